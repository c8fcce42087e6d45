#include "specshare/game.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "specshare/numerics.hpp"

namespace specshare::game {

namespace {

// alpha / (2 (1+L^{alpha/2}) log(1+L^{-alpha/2})); the interior first-order
// condition of the transformed game is lambda_other = L (g(L) - 1).
double transformed_foc_gain(double lam, double alpha) {
  const double x = std::pow(lam, 0.5 * alpha);
  return alpha / (2.0 * (1.0 + x) * std::log1p(1.0 / x));
}

double fixed_rate_br_unconstrained(double lambda_other, double alpha) {
  auto resid = [=](double lam) {
    return lam * (transformed_foc_gain(lam, alpha) - 1.0) - lambda_other;
  };
  return num::find_root(resid, num::expand_bracket(resid));
}

double variable_rate_br_unconstrained(double lambda_other, double alpha) {
  auto resid = [=](double lam) {
    const double s = lam + lambda_other;
    return num::vr_kernel(s, alpha) - lam * num::vr_kernel_moment(s, alpha);
  };
  return num::find_root(resid, num::expand_bracket(resid, 1e-3, 8.0));
}

// Partial/partial threshold: sqrt(Lambda*(alpha/2)) for the fixed-rate game,
// Lambda''(alpha) for the variable-rate game; absent means +infinity.
std::optional<double> interior_threshold(const GameConfig& cfg) {
  if (cfg.model == RateModel::FixedRate) {
    if (cfg.alpha <= 4.0) return std::nullopt;
    return std::sqrt(num::solve_lambda_star(0.5 * cfg.alpha));
  }
  return num::solve_lambda_double_prime(cfg.alpha);
}

}  // namespace

GameConfig::GameConfig(double alpha, double n1, double n2, RateModel model)
    : alpha(alpha), n1(n1), n2(n2), model(model) {
  if (!(alpha > 2.0))
    throw std::invalid_argument("pathloss exponent must be > 2");
  if (!(n1 > 0.0) || !(n2 > 0.0))
    throw std::invalid_argument("nodes per disc must be > 0");
}

GameConfig canonicalize(const GameConfig& cfg, LabelMap& labels) {
  labels.swapped = cfg.n1 > cfg.n2;
  if (!labels.swapped) return cfg;
  return GameConfig(cfg.alpha, cfg.n2, cfg.n1, cfg.model);
}

std::pair<double, double> utility_fixed(const StrategyPair& s,
                                        const GameConfig& cfg) {
  if (cfg.model != RateModel::FixedRate)
    throw std::invalid_argument("utility_fixed requires the fixed-rate model");
  if (!s.beta1 || !s.beta2)
    throw std::invalid_argument("utility_fixed requires both targets");
  const double total = s.lambda1 + s.lambda2;
  auto one = [&](double lam, double beta) {
    if (lam == 0.0) return 0.0;
    return lam * std::log1p(beta) *
           std::exp(-total * std::pow(beta, 2.0 / cfg.alpha));
  };
  return {one(s.lambda1, *s.beta1), one(s.lambda2, *s.beta2)};
}

std::pair<double, double> utility_transformed(double lambda1, double lambda2,
                                              double alpha) {
  auto one = [&](double self, double other) {
    if (self <= 0.0) return 0.0;  // degenerate input, limit is 0
    return self * std::log1p(std::pow(self, -0.5 * alpha)) *
           std::exp(-other / self - 1.0);
  };
  return {one(lambda1, lambda2), one(lambda2, lambda1)};
}

std::pair<double, double> utility_variable(double lambda1, double lambda2,
                                           double alpha) {
  const double total = lambda1 + lambda2;
  if (!(total > 0.0))
    throw std::invalid_argument("at least one density must be positive");
  const double kernel = num::vr_kernel(total, alpha);
  return {lambda1 * kernel, lambda2 * kernel};
}

double payoff(RateModel model, double lambda_self, double lambda_other,
              double alpha) {
  if (lambda_self <= 0.0) return 0.0;
  const double total = lambda_self + lambda_other;
  if (model == RateModel::VariableRate)
    return lambda_self * num::vr_kernel(total, alpha);
  const double beta = num::optimal_sir_threshold(total, alpha);
  return lambda_self * std::log1p(beta) *
         std::exp(-total * std::pow(beta, 2.0 / alpha));
}

double best_response(double lambda_other, double n_self,
                     const GameConfig& cfg) {
  if (!(lambda_other >= 0.0) || !(n_self > 0.0))
    throw std::invalid_argument("best_response: invalid densities");
  const double root =
      cfg.model == RateModel::FixedRate
          ? fixed_rate_br_unconstrained(lambda_other, cfg.alpha)
          : variable_rate_br_unconstrained(lambda_other, cfg.alpha);
  return std::min(root, n_self);
}

Equilibrium solve_equilibrium(const GameConfig& cfg) {
  if (!cfg.canonical())
    throw std::invalid_argument("solve_equilibrium requires n1 <= n2");
  Equilibrium eq{};
  eq.model = cfg.model;
  const std::optional<double> threshold = interior_threshold(cfg);
  if (threshold && cfg.n1 > *threshold) {
    eq.regime = RegimeTag::PartialPartial;
    eq.lambda1 = eq.lambda2 = *threshold;
  } else {
    eq.lambda1 = cfg.n1;
    const double unconstrained =
        cfg.model == RateModel::FixedRate
            ? fixed_rate_br_unconstrained(cfg.n1, cfg.alpha)
            : variable_rate_br_unconstrained(cfg.n1, cfg.alpha);
    if (unconstrained >= cfg.n2) {
      eq.regime = RegimeTag::FullFull;
      eq.lambda2 = cfg.n2;
    } else {
      eq.regime = RegimeTag::FullPartial;
      eq.lambda2 = unconstrained;
    }
  }
  eq.p1 = std::min(1.0, eq.lambda1 / cfg.n1);
  eq.p2 = std::min(1.0, eq.lambda2 / cfg.n2);
  if (cfg.model == RateModel::FixedRate) {
    const double beta =
        num::optimal_sir_threshold(eq.lambda1 + eq.lambda2, cfg.alpha);
    eq.beta1 = eq.beta2 = beta;
    StrategyPair s{eq.lambda1, eq.lambda2, beta, beta};
    std::tie(eq.u1, eq.u2) = utility_fixed(s, cfg);
  } else {
    std::tie(eq.u1, eq.u2) =
        utility_variable(eq.lambda1, eq.lambda2, cfg.alpha);
  }
  eq.u_e = eq.u1 + eq.u2;
  return eq;
}

RegimeTag classify_regime(const GameConfig& cfg) {
  return solve_equilibrium(cfg).regime;
}

StrategyPair asymptotic_equilibrium(const GameConfig& cfg) {
  if (!(cfg.alpha < 4.0))
    throw std::invalid_argument("asymptotic form requires 2 < alpha < 4");
  const double cap = 2.0 * cfg.n1 / (cfg.alpha - 2.0);
  return StrategyPair{cfg.n1, std::min(cfg.n2, cap)};
}

double equilibrium_utility_asymptote(const GameConfig& cfg) {
  if (!(cfg.alpha < 4.0))
    throw std::invalid_argument("asymptotic form requires 2 < alpha < 4");
  const double h = 0.5 * cfg.alpha;
  const double c1 = std::pow(h - 1.0, h - 1.0) * h * std::exp(-h);
  const double c2 = std::pow(h, h) * std::exp(-h);
  if (cfg.n2 <= 2.0 * cfg.n1 / (cfg.alpha - 2.0))
    return c2 / std::pow(cfg.n1 + cfg.n2, h - 1.0);  // full/full: (n1, n2)
  return c1 / std::pow(cfg.n1, h - 1.0);
}

std::pair<StrategyPair, double> cooperative_baseline(const GameConfig& cfg) {
  if (!cfg.canonical())
    throw std::invalid_argument("cooperative_baseline requires n1 <= n2");
  const double optimum = cfg.model == RateModel::FixedRate
                             ? num::solve_lambda_star(cfg.alpha)
                             : num::solve_lambda_prime(cfg.alpha);
  const double total = std::min(optimum, cfg.n1 + cfg.n2);
  StrategyPair split{cfg.n1 / (cfg.n1 + cfg.n2) * total,
                     cfg.n2 / (cfg.n1 + cfg.n2) * total};
  double u_c;
  if (cfg.model == RateModel::FixedRate) {
    const double beta = num::optimal_sir_threshold(total, cfg.alpha);
    split.beta1 = split.beta2 = beta;
    u_c = total * std::log1p(beta) *
          std::exp(-total * std::pow(beta, 2.0 / cfg.alpha));
  } else {
    u_c = total * num::vr_kernel(total, cfg.alpha);
  }
  return {split, u_c};
}

double price_of_anarchy(const GameConfig& cfg) {
  const Equilibrium eq = solve_equilibrium(cfg);
  if (!(eq.u_e > 0.0))
    throw std::domain_error("equilibrium utility is zero; ratio undefined");
  return cooperative_baseline(cfg).second / eq.u_e;
}

double effective_nodes_per_disc(double density, const RangeSpec& range) {
  if (!(density > 0.0)) throw std::invalid_argument("density must be > 0");
  return std::numbers::pi * density * range.mean_square_range();
}

}  // namespace specshare::game
