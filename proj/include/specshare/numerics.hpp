#pragma once

#include <functional>
#include <optional>

namespace specshare::num {

// Bracketing interval for a scalar root. The objective must change sign on
// [lo, hi]; tol is the absolute tolerance on the argument.
struct RootBracket {
  double lo;
  double hi;
  double tol = 1e-12;
};

// Bisection with a safeguarded secant step. Requires a sign change on the
// bracket; throws std::invalid_argument otherwise.
double find_root(const std::function<double(double)>& f, RootBracket bracket);

// Expands [lo0, hi0] geometrically (lo down to lo_min, hi up to hi_max) until
// the objective changes sign; throws std::runtime_error if none appears.
RootBracket expand_bracket(const std::function<double(double)>& f,
                           double lo0 = 1e-6, double hi0 = 1.0,
                           double lo_min = 1e-9, double hi_max = 1e7);

// Optimal number of simultaneous transmissions per transmission disc for a
// single network: the unique solution of
//   alpha/2 = (1 + L^{alpha/2}) log(1 + L^{-alpha/2}).
double solve_lambda_star(double alpha);

// Optimal target SIR (linear) when the total transmit density is fixed at
// `total_density`: the unique root of
//   alpha / (2 S b^{2/alpha}) = (1 + 1/b) log(1 + b).
double optimal_sir_threshold(double total_density, double alpha);

// Optimal target SIR for a single isolated network with n_per_disc nodes per
// transmission disc: Lambda*^{-alpha/2} when n_per_disc > Lambda*(alpha),
// otherwise the root above with S = n_per_disc (all nodes scheduled).
double solve_beta_star(double n_per_disc, double alpha);

// Semi-infinite rate kernel  integral_0^inf e^{-S x^{2/alpha}} dx/(1+x).
// Diverges as S -> 0; throws std::domain_error for S <= 0.
double vr_kernel(double lambda_sum, double alpha);

// Companion moment  integral_0^inf x^{2/alpha} e^{-S x^{2/alpha}} dx/(1+x).
double vr_kernel_moment(double lambda_sum, double alpha);

// f(s1, s2) = vr_kernel(s1+s2) / (s1 * vr_kernel_moment(s1+s2)).
// The first-order condition of the variable-rate game is f = 1.
double f_ratio(double s_self, double s_other, double alpha);

// Unconstrained single-network optimum of the variable-rate objective
// L * vr_kernel(L, alpha); equivalently the root of f(L, 0) = 1.
double solve_lambda_prime(double alpha);

// Symmetric interior equilibrium density of the variable-rate game: the root
// of f(L, L) = 1, which exists only for alpha > 4. Returns nullopt for
// alpha <= 4 (callers treat the absent value as +infinity).
std::optional<double> solve_lambda_double_prime(double alpha);

}  // namespace specshare::num
