#include "specshare/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace specshare::num {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 2.0))
    throw std::invalid_argument("pathloss exponent must be > 2");
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
constexpr double kGkNode[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813};
constexpr double kGaussW[8] = {
    0.417959183673469, 0.0,               0.381830050505119,
    0.0,               0.279705391489277, 0.0,
    0.129484966168870, 0.0};
constexpr double kKronrodW[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785,
    0.169004726639267, 0.140653259715525, 0.104790010322250,
    0.063092092629979, 0.022935322010529};

template <class F>
void gk15(const F& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double g = kGaussW[0] * f0;
  double k = kKronrodW[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = h * kGkNode[i];
    const double fi = f(c + dx) + f(c - dx);
    g += kGaussW[i] * fi;
    k += kKronrodW[i] * fi;
  }
  value = k * h;
  err = std::fabs(k - g) * std::fabs(h);
}

// Adaptive bisection on an interval stack.
template <class F>
double adaptive_integrate(const F& f, double a, double b, double rel_tol) {
  struct Seg {
    double a, b, value, err;
  };
  double v0, e0;
  gk15(f, a, b, v0, e0);
  std::vector<Seg> stack{{a, b, v0, e0}};
  double total = v0;
  double total_err = e0;
  int splits = 0;
  while (!stack.empty() && splits < 4000) {
    if (total_err <= rel_tol * std::fabs(total) + 1e-305) break;
    // split the segment with the largest error estimate
    std::size_t worst = 0;
    for (std::size_t i = 1; i < stack.size(); ++i)
      if (stack[i].err > stack[worst].err) worst = i;
    Seg s = stack[worst];
    stack[worst] = stack.back();
    stack.pop_back();
    const double m = 0.5 * (s.a + s.b);
    Seg l{s.a, m, 0, 0}, r{m, s.b, 0, 0};
    gk15(f, l.a, l.b, l.value, l.err);
    gk15(f, r.a, r.b, r.value, r.err);
    total += l.value + r.value - s.value;
    total_err += l.err + r.err - s.err;
    if (l.err > 0) stack.push_back(l);
    if (r.err > 0) stack.push_back(r);
    ++splits;
  }
  return total;
}

// Kernel moments after the substitution u = x^{2/alpha}:
//   integral_0^inf (alpha/2) u^{alpha/2-1+k} e^{-s u} / (1 + u^{alpha/2}) du.
// The substitution removes the endpoint kink and exposes the exponential
// tail, truncated where s*u > 50.
double kernel_moment(double s, double alpha, int k) {
  require_alpha(alpha);
  if (!(s > 0.0))
    throw std::domain_error("rate kernel diverges for lambda_sum <= 0");
  const double half = 0.5 * alpha;
  const double umax = 50.0 / s;
  auto f = [=](double u) {
    if (u <= 0.0) return 0.0;
    return half * std::pow(u, half - 1.0 + k) * std::exp(-s * u) /
           (1.0 + std::pow(u, half));
  };
  return adaptive_integrate(f, 0.0, umax, 1e-11);
}

}  // namespace

double find_root(const std::function<double(double)>& f, RootBracket bracket) {
  double lo = bracket.lo, hi = bracket.hi;
  if (!(lo < hi) || !(bracket.tol > 0))
    throw std::invalid_argument("invalid root bracket");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("objective does not change sign on bracket");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double width = hi - lo;
    if (width <= bracket.tol + 8.0 * std::numeric_limits<double>::epsilon() *
                                   std::fabs(mid))
      break;
    // secant proposal, clipped away from the bracket edges; every other
    // iteration bisects so convergence never stalls on a skewed residual
    double x = 0.5 * (lo + hi);
    const double denom = fhi - flo;
    if (it % 2 == 0 && denom != 0.0) {
      const double s = lo - flo * (hi - lo) / denom;
      if (s > lo + 0.01 * width && s < hi - 0.01 * width) x = s;
    }
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    mid = 0.5 * (lo + hi);
  }
  return mid;
}

RootBracket expand_bracket(const std::function<double(double)>& f, double lo0,
                           double hi0, double lo_min, double hi_max) {
  double lo = lo0, hi = hi0;
  double flo = f(lo), fhi = f(hi);
  for (int it = 0; it < 200; ++it) {
    if ((flo > 0) != (fhi > 0) || flo == 0.0 || fhi == 0.0)
      return RootBracket{lo, hi};
    if (hi < hi_max) {
      hi *= 4.0;
      fhi = f(hi);
    } else if (lo > lo_min) {
      lo /= 4.0;
      flo = f(lo);
    } else {
      break;
    }
  }
  throw std::runtime_error("bracket expansion failed: no sign change");
}

double solve_lambda_star(double alpha) {
  require_alpha(alpha);
  const double half = 0.5 * alpha;
  // (1+x) log(1+1/x) with x = L^{alpha/2} decreases from +inf to 1, so the
  // objective below decreases through zero exactly once.
  auto resid = [=](double lam) {
    const double x = std::pow(lam, half);
    return (1.0 + x) * std::log1p(1.0 / x) - half;
  };
  return find_root(resid, expand_bracket(resid));
}

double optimal_sir_threshold(double total_density, double alpha) {
  require_alpha(alpha);
  if (!(total_density > 0.0))
    throw std::invalid_argument("total density must be > 0");
  auto resid = [=](double b) {
    return alpha / (2.0 * total_density * std::pow(b, 2.0 / alpha)) -
           (1.0 + 1.0 / b) * std::log1p(b);
  };
  // the root scales like S^{-alpha/2} as the density S shrinks, so the upper
  // expansion cap must be generous
  return find_root(resid, expand_bracket(resid, 1e-6, 1.0, 1e-12, 1e60));
}

double solve_beta_star(double n_per_disc, double alpha) {
  require_alpha(alpha);
  if (!(n_per_disc > 0.0))
    throw std::invalid_argument("n_per_disc must be > 0");
  const double lam_star = solve_lambda_star(alpha);
  if (n_per_disc > lam_star) return std::pow(lam_star, -0.5 * alpha);
  return optimal_sir_threshold(n_per_disc, alpha);
}

double vr_kernel(double lambda_sum, double alpha) {
  return kernel_moment(lambda_sum, alpha, 0);
}

double vr_kernel_moment(double lambda_sum, double alpha) {
  return kernel_moment(lambda_sum, alpha, 1);
}

double f_ratio(double s_self, double s_other, double alpha) {
  require_alpha(alpha);
  if (!(s_self > 0.0) || !(s_other >= 0.0))
    throw std::invalid_argument("f_ratio requires s_self > 0, s_other >= 0");
  const double s = s_self + s_other;
  return kernel_moment(s, alpha, 0) / (s_self * kernel_moment(s, alpha, 1));
}

double solve_lambda_prime(double alpha) {
  require_alpha(alpha);
  // f(L, 0) decreases from +inf to 2/alpha < 1, so K0(L) - L K1(L) has a
  // single sign change.
  auto resid = [=](double lam) {
    return kernel_moment(lam, alpha, 0) - lam * kernel_moment(lam, alpha, 1);
  };
  return find_root(resid, expand_bracket(resid, 1e-3, 8.0));
}

std::optional<double> solve_lambda_double_prime(double alpha) {
  require_alpha(alpha);
  if (alpha <= 4.0) return std::nullopt;
  auto resid = [=](double lam) {
    return kernel_moment(2.0 * lam, alpha, 0) -
           lam * kernel_moment(2.0 * lam, alpha, 1);
  };
  return find_root(resid, expand_bracket(resid, 1e-3, 8.0));
}

}  // namespace specshare::num
