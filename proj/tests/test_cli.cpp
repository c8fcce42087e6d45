#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SPECSHARE_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf;
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("thresholds: values, null handling, validation exit") {
  auto r = run_cli("thresholds --alpha 4");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["lambda_star"].get<double>() == doctest::Approx(0.504976212228));
  CHECK(j["lambda_double_prime"].is_null());
  CHECK(j["sqrt_lambda_star_half_alpha"].is_null());
  CHECK(j["lambda_prime"].get<double>() == doctest::Approx(0.77048622974));

  auto r5 = run_cli("thresholds --alpha 5");
  const json j5 = json::parse(r5.out);
  CHECK(j5["lambda_double_prime"].get<double>() ==
        doctest::Approx(1.8369635632));
  CHECK(j5["sqrt_lambda_star_half_alpha"].get<double>() ==
        doctest::Approx(1.23434).epsilon(1e-4));

  CHECK(run_cli("thresholds --alpha 2").exit_code == 2);
  CHECK(run_cli("thresholds --alpha 4 --bogus-flag").exit_code == 2);

  auto csv = run_cli("thresholds --alpha 4 --format csv");
  CHECK(csv.out.find("alpha,lambda_star") == 0);
}

TEST_CASE("equilibrium: regimes, labels, verification") {
  auto pp = run_cli("equilibrium --alpha 4.5 --n1 14.14 --n2 7.07 --model fixed");
  REQUIRE(pp.exit_code == 0);
  json j = json::parse(pp.out);
  CHECK(j["regime"] == "partial_partial");
  CHECK(j["canonical_swap"] == true);
  CHECK(j["lambda1"].get<double>() == doctest::Approx(1.78440623269));
  // caller order preserved: n1 is the denser network here
  CHECK(j["p1"].get<double>() == doctest::Approx(1.7844062 / 14.14));

  auto fp = run_cli(
      "equilibrium --alpha 3 --n1 5 --n2 30 --model fixed --verify");
  REQUIRE(fp.exit_code == 0);
  j = json::parse(fp.out);
  CHECK(j["regime"] == "full_partial");
  CHECK(j["lambda2"].get<double>() == doctest::Approx(10.4528098487));
  CHECK(j["verified"] == true);
  CHECK(j["price_of_anarchy"].get<double>() >= 1.0);

  auto ff = run_cli("equilibrium --alpha 3 --n1 5 --n2 6 --model fixed");
  j = json::parse(ff.out);
  CHECK(j["regime"] == "full_full");
  CHECK(j["lambda1"].get<double>() == 5.0);
  CHECK(j["lambda2"].get<double>() == 6.0);

  auto vr = run_cli(
      "equilibrium --alpha 4.5 --n1 7.07 --n2 14.14 --model variable --verify");
  j = json::parse(vr.out);
  CHECK(j["regime"] == "partial_partial");
  CHECK(j["beta1"].is_null());
  CHECK(j["verified"] == true);

  CHECK(run_cli("equilibrium --alpha 1.5 --n1 1 --n2 2").exit_code == 2);
}

TEST_CASE("regime-map: structure and symmetry") {
  auto r = run_cli("regime-map --alpha 2.1 --n-max 8 --grid-steps 9");
  REQUIRE(r.exit_code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "n1,n2,regime");
  int rows = 0;
  bool all_ff = true;
  while (std::getline(is, line)) {
    ++rows;
    if (line.find("full_full") == std::string::npos) all_ff = false;
  }
  CHECK(rows == 81);
  CHECK(all_ff);

  // swap symmetry with mirrored FullPartial labels: row (a,b) and (b,a)
  // carry the same tag
  auto m = run_cli("regime-map --alpha 5 --n-max 3 --grid-steps 7");
  std::map<std::pair<std::string, std::string>, std::string> tag;
  std::istringstream ms(m.out);
  std::getline(ms, line);
  bool has_pp = false, has_fp = false, has_ff = false;
  while (std::getline(ms, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const std::string a = line.substr(0, c1);
    const std::string b = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string t = line.substr(c2 + 1);
    tag[{a, b}] = t;
    has_pp = has_pp || t == "partial_partial";
    has_fp = has_fp || t == "full_partial";
    has_ff = has_ff || t == "full_full";
  }
  CHECK(has_pp);
  CHECK(has_fp);
  CHECK(has_ff);
  for (const auto& [key, t] : tag) {
    const auto it = tag.find({key.second, key.first});
    REQUIRE(it != tag.end());
    CHECK(it->second == t);
  }
  CHECK(run_cli("regime-map --alpha 5 --n-max 3 --grid-steps 1").exit_code ==
        2);
}

TEST_CASE("simulate: determinism and summary output") {
  const std::string base =
      "simulate --protocol ra --alpha 4 --n1-count 50 --n2-count 30 "
      "--radius 0.15 --delta 0.02 --iters 4 --slots 12 --seed 11 ";
  auto a = run_cli(base + "--out /tmp/specshare_cli_a.csv");
  auto b = run_cli(base + "--out /tmp/specshare_cli_b.csv");
  REQUIRE(a.exit_code == 0);
  CHECK(slurp("/tmp/specshare_cli_a.csv") == slurp("/tmp/specshare_cli_b.csv"));
  CHECK(slurp("/tmp/specshare_cli_a.csv").find(
            "iter,strategy1,strategy2,r1,r2,f1,f2") == 0);
  const json j = json::parse(a.out);
  CHECK(j["iterations"] == 4);
  CHECK(j["final_mean_strategy1"].get<double>() >= 0.0);
  CHECK(j["final_mean_strategy1"].get<double>() <= 1.0);

  auto c = run_cli(base + "--seed 12 --out /tmp/specshare_cli_c.csv");
  (void)c;
  CHECK(slurp("/tmp/specshare_cli_a.csv") != slurp("/tmp/specshare_cli_c.csv"));

  CHECK(run_cli("simulate --iters 0 --slots 5").exit_code == 2);
  CHECK(run_cli("simulate --protocol csma --init1 99 --iters 2 --slots 5")
            .exit_code == 2);
}
