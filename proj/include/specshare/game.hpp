#pragma once

#include <optional>
#include <utility>

#include "specshare/range_spec.hpp"

namespace specshare::game {

enum class RateModel { FixedRate, VariableRate };

enum class RegimeTag { FullFull, FullPartial, PartialPartial };

// Analytic problem statement: pathloss exponent and per-network nodes per
// transmission disc. Canonical form has n1 <= n2 (network 1 sparser).
struct GameConfig {
  double alpha;
  double n1;
  double n2;
  RateModel model = RateModel::FixedRate;

  GameConfig(double alpha, double n1, double n2,
             RateModel model = RateModel::FixedRate);
  bool canonical() const { return n1 <= n2; }
};

// Mapping from canonical network order back to the caller's labels.
struct LabelMap {
  bool swapped = false;
};

// Returns the canonical (n1 <= n2) configuration, recording whether the
// networks were swapped.
GameConfig canonicalize(const GameConfig& cfg, LabelMap& labels);

struct StrategyPair {
  double lambda1 = 0;
  double lambda2 = 0;
  std::optional<double> beta1;
  std::optional<double> beta2;
};

struct Equilibrium {
  RegimeTag regime;
  double lambda1, lambda2;  // transmit densities at the N.E.
  double p1, p2;            // access probabilities lambda_i / n_i
  std::optional<double> beta1, beta2;
  double u1, u2;  // per-disc utilities (nats per slot per d.o.f.)
  double u_e;     // u1 + u2
  RateModel model;
};

// Fixed-rate payoffs at explicit targets:
//   U_i = L_i log(1+b_i) e^{-(L1+L2) b_i^{2/alpha}}.
std::pair<double, double> utility_fixed(const StrategyPair& s,
                                        const GameConfig& cfg);

// Transformed payoffs (same N.E. set as the fixed-rate game):
//   U_1 = L1 log(1+L1^{-alpha/2}) e^{-L2/L1 - 1}, symmetric in U_2.
std::pair<double, double> utility_transformed(double lambda1, double lambda2,
                                              double alpha);

// Variable-rate payoffs U_i = L_i * vr_kernel(L1+L2, alpha).
std::pair<double, double> utility_variable(double lambda1, double lambda2,
                                           double alpha);

// Payoff of one network with the target SIR already optimized out
// (fixed-rate) or none needed (variable-rate). This is the utility the
// equilibrium and deviation checks are stated in.
double payoff(RateModel model, double lambda_self, double lambda_other,
              double alpha);

// argmax over [0, n_self] of the responder's payoff given the opponent's
// density; the interior solution satisfies the model's first-order condition.
double best_response(double lambda_other, double n_self,
                     const GameConfig& cfg);

// Unique Nash equilibrium (requires canonical cfg).
Equilibrium solve_equilibrium(const GameConfig& cfg);

RegimeTag classify_regime(const GameConfig& cfg);

// Large-N1 equilibrium (2 < alpha < 4, both models):
// (n1, n2) if n2 <= 2 n1/(alpha-2), else (n1, 2 n1/(alpha-2)).
StrategyPair asymptotic_equilibrium(const GameConfig& cfg);

// Large-N1 closed form for the equilibrium system utility (2 < alpha < 4):
//   c2(alpha)/(n1+n2)^{alpha/2-1}   when n2 <= 2 n1/(alpha-2)  (full/full)
//   c1(alpha)/n1^{alpha/2-1}        otherwise                   (full/partial)
// with c1 = (alpha/2-1)^{alpha/2-1} (alpha/2) e^{-alpha/2},
//      c2 = (alpha/2)^{alpha/2} e^{-alpha/2}.
double equilibrium_utility_asymptote(const GameConfig& cfg);

// Cooperative optimum: the single-network optimal total density (capped at
// n1+n2) split proportionally to the n_i, and the resulting system utility.
std::pair<StrategyPair, double> cooperative_baseline(const GameConfig& cfg);

// U_c / U_e.
double price_of_anarchy(const GameConfig& cfg);

// N_i = pi * density * E[d^2].
double effective_nodes_per_disc(double density, const RangeSpec& range);

}  // namespace specshare::game
