// specshare: spectrum-sharing equilibria and Monte Carlo validation runs.
//
// Subcommands:
//   thresholds   characteristic densities for a given pathloss exponent
//   equilibrium  the unique Nash equilibrium of the two-network game
//   regime-map   grid classification of the equilibrium regime
//   simulate     greedy strategy adaptation on a random topology

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "specshare/game.hpp"
#include "specshare/numerics.hpp"
#include "specshare/simulator.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace specshare;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Round-trips through 12 significant digits so every emitted number obeys the
// documented precision regardless of serializer.
json num12(double v) { return json(std::stod(fmt12(v))); }

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot open output path: " + out_path);
  os << text;
}

const char* regime_name(game::RegimeTag r) {
  switch (r) {
    case game::RegimeTag::FullFull:
      return "full_full";
    case game::RegimeTag::FullPartial:
      return "full_partial";
    case game::RegimeTag::PartialPartial:
      return "partial_partial";
  }
  return "?";
}

game::RateModel parse_model(const std::string& s) {
  if (s == "fixed") return game::RateModel::FixedRate;
  if (s == "variable") return game::RateModel::VariableRate;
  throw std::invalid_argument("model must be 'fixed' or 'variable'");
}

int cmd_thresholds(double alpha, const std::string& format,
                   const std::string& out) {
  const double lam_star = num::solve_lambda_star(alpha);
  const double beta_unc = std::pow(lam_star, -0.5 * alpha);
  const double lam_prime = num::solve_lambda_prime(alpha);
  const std::optional<double> lam_dp = num::solve_lambda_double_prime(alpha);
  const std::optional<double> sqrt_half =
      alpha > 4.0 ? std::optional<double>(
                        std::sqrt(num::solve_lambda_star(0.5 * alpha)))
                  : std::nullopt;
  if (format == "csv") {
    std::ostringstream os;
    os << "alpha,lambda_star,beta_star_unconstrained,lambda_prime,"
          "lambda_double_prime,sqrt_lambda_star_half_alpha\n";
    os << fmt12(alpha) << ',' << fmt12(lam_star) << ',' << fmt12(beta_unc)
       << ',' << fmt12(lam_prime) << ','
       << (lam_dp ? fmt12(*lam_dp) : std::string()) << ','
       << (sqrt_half ? fmt12(*sqrt_half) : std::string()) << '\n';
    emit(os.str(), out);
  } else {
    json j;
    j["alpha"] = num12(alpha);
    j["lambda_star"] = num12(lam_star);
    j["beta_star_unconstrained"] = num12(beta_unc);
    j["lambda_prime"] = num12(lam_prime);
    j["lambda_double_prime"] = lam_dp ? num12(*lam_dp) : json(nullptr);
    j["sqrt_lambda_star_half_alpha"] =
        sqrt_half ? num12(*sqrt_half) : json(nullptr);
    emit(j.dump(2) + "\n", out);
  }
  return 0;
}

// Grid deviation check: no unilateral density move may beat the equilibrium
// payoff beyond 1e-6 relative slack.
bool verify_equilibrium(const game::GameConfig& cfg,
                        const game::Equilibrium& eq) {
  const int kGrid = 400;
  const double tol = 1e-6;
  const double n[2] = {cfg.n1, cfg.n2};
  const double lam[2] = {eq.lambda1, eq.lambda2};
  for (int i = 0; i < 2; ++i) {
    const double other = lam[1 - i];
    const double base = game::payoff(cfg.model, lam[i], other, cfg.alpha);
    for (int k = 0; k <= kGrid; ++k) {
      const double cand = n[i] * static_cast<double>(k) / kGrid;
      const double u = cand > 0.0
                           ? game::payoff(cfg.model, cand, other, cfg.alpha)
                           : 0.0;
      if (u > base * (1.0 + tol) + 1e-12) return false;
    }
  }
  return true;
}

int cmd_equilibrium(double alpha, double n1, double n2,
                    const std::string& model_s, bool verify,
                    const std::string& format, const std::string& out) {
  const game::RateModel model = parse_model(model_s);
  game::GameConfig cfg(alpha, n1, n2, model);
  game::LabelMap labels;
  const game::GameConfig canon = game::canonicalize(cfg, labels);
  game::Equilibrium eq = game::solve_equilibrium(canon);
  const auto [split, u_c] = game::cooperative_baseline(canon);
  const double poa = game::price_of_anarchy(canon);
  if (labels.swapped) {
    std::swap(eq.lambda1, eq.lambda2);
    std::swap(eq.p1, eq.p2);
    std::swap(eq.beta1, eq.beta2);
    std::swap(eq.u1, eq.u2);
  }
  bool verified = true;
  if (verify) verified = verify_equilibrium(canon, game::solve_equilibrium(canon));

  json j;
  j["alpha"] = num12(alpha);
  j["n1"] = num12(n1);
  j["n2"] = num12(n2);
  j["model"] = model_s;
  j["regime"] = regime_name(eq.regime);
  j["canonical_swap"] = labels.swapped;
  j["lambda1"] = num12(eq.lambda1);
  j["lambda2"] = num12(eq.lambda2);
  j["p1"] = num12(eq.p1);
  j["p2"] = num12(eq.p2);
  j["beta1"] = eq.beta1 ? num12(*eq.beta1) : json(nullptr);
  j["beta2"] = eq.beta2 ? num12(*eq.beta2) : json(nullptr);
  j["u1"] = num12(eq.u1);
  j["u2"] = num12(eq.u2);
  j["u_e"] = num12(eq.u_e);
  j["u_c"] = num12(u_c);
  j["price_of_anarchy"] = num12(poa);
  if (verify) j["verified"] = verified;

  if (format == "csv") {
    std::ostringstream os;
    std::string header, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += it.key();
      const json& v = it.value();
      if (v.is_null())
        row += "";
      else if (v.is_string())
        row += v.get<std::string>();
      else if (v.is_boolean())
        row += v.get<bool>() ? "true" : "false";
      else
        row += fmt12(v.get<double>());
    }
    os << header << '\n' << row << '\n';
    emit(os.str(), out);
  } else {
    emit(j.dump(2) + "\n", out);
  }
  if (verify && !verified) {
    std::cerr << "equilibrium verification failed\n";
    return 1;
  }
  return 0;
}

int cmd_regime_map(double alpha, double n_max, int grid_steps,
                   const std::string& model_s, const std::string& out) {
  if (grid_steps < 2) throw std::invalid_argument("grid-steps must be >= 2");
  if (!(n_max > 0)) throw std::invalid_argument("n-max must be > 0");
  const game::RateModel model = parse_model(model_s);
  std::ostringstream os;
  os << "n1,n2,regime\n";
  for (int i = 0; i < grid_steps; ++i) {
    for (int k = 0; k < grid_steps; ++k) {
      const double n1 = n_max * static_cast<double>(i) / (grid_steps - 1);
      const double n2 = n_max * static_cast<double>(k) / (grid_steps - 1);
      // the axes themselves are degenerate (no nodes); classify the limit
      game::GameConfig cfg(alpha, std::max(n1, 1e-9), std::max(n2, 1e-9),
                           model);
      game::LabelMap labels;
      const game::RegimeTag r =
          game::classify_regime(game::canonicalize(cfg, labels));
      os << fmt12(n1) << ',' << fmt12(n2) << ',' << regime_name(r) << '\n';
    }
  }
  emit(os.str(), out);
  return 0;
}

int cmd_simulate(const sim::AdaptationParams& params, const std::string& out) {
  const sim::AdaptationTrace trace = sim::run_greedy_adaptation(params);
  std::ostringstream os;
  sim::write_trace_csv(os, trace);
  emit(os.str(), out);
  const std::size_t n = trace.steps.size();
  const std::size_t tail = n < 100 ? n : 100;
  double m1 = 0, m2 = 0;
  for (std::size_t i = n - tail; i < n; ++i) {
    m1 += trace.steps[i].strategy1;
    m2 += trace.steps[i].strategy2;
  }
  json j;
  j["iterations"] = static_cast<std::int64_t>(n);
  j["tail_window"] = static_cast<std::int64_t>(tail);
  j["final_mean_strategy1"] = num12(m1 / static_cast<double>(tail));
  j["final_mean_strategy2"] = num12(m2 / static_cast<double>(tail));
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum sharing between wireless networks: equilibria and "
               "Monte Carlo validation"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out;
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out, "output path (default stdout)");

  double alpha = 4.0, n1 = 1.0, n2 = 1.0, n_max = 4.0;
  std::string model_s = "fixed";
  bool verify = false;
  int grid_steps = 81;

  CLI::App* th = app.add_subcommand("thresholds", "characteristic densities");
  th->fallthrough();
  th->add_option("--alpha", alpha, "pathloss exponent (> 2)")->required();

  CLI::App* eqc = app.add_subcommand("equilibrium", "two-network Nash point");
  eqc->fallthrough();
  eqc->add_option("--alpha", alpha)->required();
  eqc->add_option("--n1", n1, "network 1 nodes per disc")->required();
  eqc->add_option("--n2", n2, "network 2 nodes per disc")->required();
  eqc->add_option("--model", model_s)->check(CLI::IsMember({"fixed", "variable"}));
  eqc->add_flag("--verify", verify, "grid deviation check");

  CLI::App* rm = app.add_subcommand("regime-map", "regime over an (n1,n2) grid");
  rm->fallthrough();
  rm->add_option("--alpha", alpha)->required();
  rm->add_option("--n-max", n_max, "grid upper bound");
  rm->add_option("--grid-steps", grid_steps, "points per axis");
  rm->add_option("--model", model_s)->check(CLI::IsMember({"fixed", "variable"}));

  sim::AdaptationParams sp;
  std::string protocol_s = "ra";
  std::string interference_s = "full";
  std::string rate_s = "variable";
  double radius = 0.15, fixed_range = 0.0;
  std::uint64_t seed = 0;
  bool has_init1 = false, has_init2 = false;
  double init1 = 0, init2 = 0;

  CLI::App* si = app.add_subcommand("simulate", "greedy adaptation run");
  si->fallthrough();
  si->add_option("--protocol", protocol_s)->check(CLI::IsMember({"ra", "csma"}));
  si->add_option("--alpha", sp.alpha);
  si->add_option("--n1-count", sp.count1);
  si->add_option("--n2-count", sp.count2);
  si->add_option("--radius", radius, "rx uniform on a disc of this radius");
  si->add_option("--range-fixed", fixed_range, "fixed tx-rx range instead");
  si->add_option("--delta", sp.delta);
  si->add_option("--iters", sp.iterations);
  si->add_option("--slots", sp.slots_per_estimate);
  si->add_option("--churn", sp.churn, "link replacements per network per iter");
  si->add_option("--margin", sp.margin);
  si->add_option("--model", rate_s)->check(CLI::IsMember({"fixed", "variable"}));
  si->add_option("--beta1", sp.beta1, "fixed-rate SIR target, network 1");
  si->add_option("--beta2", sp.beta2, "fixed-rate SIR target, network 2");
  si->add_option("--interference", interference_s)
      ->check(CLI::IsMember({"dominant", "full"}));
  si->add_option("--init1", init1)->each([&](const std::string&) { has_init1 = true; });
  si->add_option("--init2", init2)->each([&](const std::string&) { has_init2 = true; });
  si->add_flag("--receiver-gamma", sp.receiver_gamma,
               "admission uses the protected receiver's threshold");
  si->add_flag("!--power-control", sp.power_control,
               "disable per-link power control");
  si->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (th->parsed()) return cmd_thresholds(alpha, format, out);
    if (eqc->parsed())
      return cmd_equilibrium(alpha, n1, n2, model_s, verify, format, out);
    if (rm->parsed())
      return cmd_regime_map(alpha, n_max, grid_steps, model_s, out);
    if (si->parsed()) {
      sp.protocol =
          protocol_s == "csma" ? sim::Protocol::Csma : sim::Protocol::RandomAccess;
      sp.interference = interference_s == "dominant"
                            ? sim::InterferenceMode::DominantInterferer
                            : sim::InterferenceMode::FullInterference;
      sp.rate = parse_model(rate_s);
      sp.range_spec = fixed_range > 0 ? RangeSpec::fixed(fixed_range)
                                      : RangeSpec::uniform_disc(radius);
      const double def = sp.protocol == sim::Protocol::Csma ? 0.0 : 1.0;
      sp.init1 = has_init1 ? init1 : def;
      sp.init2 = has_init2 ? init2 : def;
      sp.seed = seed;
      return cmd_simulate(sp, out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
