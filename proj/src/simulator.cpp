#include "specshare/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "specshare/rng.hpp"

namespace specshare::sim {

namespace {

constexpr double kGammaBoundDb = 30.0;
constexpr double kSirCap = 1e12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

int net_of(const Link& l) { return static_cast<int>(l.network); }

Link draw_link(rng::Stream& st, Network net, const RangeSpec& spec,
               bool power_control, double alpha) {
  Link l;
  l.network = net;
  l.tx = {st.uniform(), st.uniform()};
  double r = 0;
  switch (spec.kind()) {
    case RangeSpec::Kind::Fixed:
      r = spec.param();
      break;
    case RangeSpec::Kind::UniformDisc: {
      double u;
      do {
        u = st.uniform();
      } while (u == 0.0);
      r = spec.param() * std::sqrt(u);
      break;
    }
    case RangeSpec::Kind::SecondMoment:
      throw std::invalid_argument(
          "second-moment range model has no sampling distribution");
  }
  const double theta = 2.0 * std::numbers::pi * st.uniform();
  l.rx = {l.tx.x + r * std::cos(theta), l.tx.y + r * std::sin(theta)};
  l.range = r;
  l.power_weight = power_control ? std::pow(r, alpha) : 1.0;
  return l;
}

void fill_permutation(rng::Stream& st, std::vector<std::uint32_t>& perm) {
  const std::size_t n = perm.size();
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(st.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
}

// Received power at `rx` from transmitter of link `from`, capped so the
// float interference matrix cannot overflow on pathological geometries.
double rx_power(const Link& from, const Vec2& rx, double alpha) {
  const double d = dist(from.tx, rx);
  if (d <= 0.0) return 1e30;
  return std::min(from.power_weight * std::pow(d, -alpha), 1e30);
}

double desired_power(const Link& l, double alpha) {
  if (!(l.range > 0.0)) return 1e30;
  return l.power_weight * std::pow(l.range, -alpha);
}

double slot_rate(double sir, RateModel rate, double beta) {
  if (rate == RateModel::FixedRate)
    return sir >= beta ? std::log1p(beta) : 0.0;
  return std::log1p(std::min(sir, kSirCap));
}

// Dense interference cache over one topology: sig_[i] is link i's desired
// power, w_[i*n+j] the power link j's tx lands on link i's rx (diagonal 0).
// Per network g, cols_[g] lists the interior (measured) links and wc_[g] is
// the n x m column-compacted matrix wc_[g][j*m+c] = w_[cols_[g][c]*n + j],
// so accumulating interference at every measured rx of a slot is one
// contiguous row pass per active transmitter.
class Field {
 public:
  Field(const Topology& topo, double alpha) : topo_(topo), alpha_(alpha) {
    const std::size_t n = topo_.links.size();
    sig_.resize(n);
    w_.assign(n * n, 0.0f);
    total_[0] = total_[1] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Link& li = topo_.links[i];
      ++total_[net_of(li)];
      sig_[i] = desired_power(li, alpha_);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        w_[i * n + j] =
            static_cast<float>(rx_power(topo_.links[j], li.rx, alpha_));
      }
    }
    refresh_compact();
  }

  const Topology& topology() const { return topo_; }
  int interior_count(int g) const { return static_cast<int>(cols_[g].size()); }
  int total_count(int g) const { return total_[g]; }

  void replace_link(std::size_t i, const Link& l) {
    const std::size_t n = topo_.links.size();
    topo_.links[i] = l;
    sig_[i] = desired_power(l, alpha_);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      w_[i * n + j] =
          static_cast<float>(rx_power(topo_.links[j], l.rx, alpha_));
      w_[j * n + i] =
          static_cast<float>(rx_power(l, topo_.links[j].rx, alpha_));
    }
  }

  void refresh_compact() {
    const std::size_t n = topo_.links.size();
    for (int g = 0; g < 2; ++g) {
      cols_[g].clear();
      for (std::size_t i = 0; i < n; ++i)
        if (net_of(topo_.links[i]) == g && topo_.interior(topo_.links[i]))
          cols_[g].push_back(static_cast<std::uint32_t>(i));
      const std::size_t m = cols_[g].size();
      wc_[g].assign(n * m, 0.0f);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < m; ++c)
          wc_[g][j * m + c] = w_[cols_[g][c] * n + j];
    }
  }

  // j blocks candidate c when c's transmission erodes the margin at j's rx
  // below the governing silencing threshold.
  std::vector<std::vector<std::uint32_t>> build_blocklists(
      double gamma1_db, double gamma2_db, bool receiver_gamma) const {
    const std::size_t n = topo_.links.size();
    const double thr[2] = {std::pow(10.0, gamma1_db / 10.0),
                           std::pow(10.0, gamma2_db / 10.0)};
    std::vector<std::vector<std::uint32_t>> block(n);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        const int g =
            receiver_gamma ? net_of(topo_.links[j]) : net_of(topo_.links[c]);
        if (sig_[j] < thr[g] * static_cast<double>(w_[j * n + c]))
          block[c].push_back(static_cast<std::uint32_t>(j));
      }
    }
    return block;
  }

  void slot_random_access(rng::Stream& st, double p1, double p2,
                          std::vector<std::uint8_t>& flags,
                          std::vector<std::uint32_t>& order,
                          int count[2]) const {
    const std::size_t n = topo_.links.size();
    flags.assign(n, 0);
    order.clear();
    count[0] = count[1] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int g = net_of(topo_.links[i]);
      if (st.bernoulli(g == 0 ? p1 : p2)) {
        flags[i] = 1;
        order.push_back(static_cast<std::uint32_t>(i));
        ++count[g];
      }
    }
  }

  void slot_csma(rng::Stream& st,
                 const std::vector<std::vector<std::uint32_t>>& block,
                 std::vector<std::uint8_t>& flags,
                 std::vector<std::uint32_t>& order,
                 std::vector<std::uint32_t>& perm, int count[2]) const {
    const std::size_t n = topo_.links.size();
    flags.assign(n, 0);
    order.clear();
    count[0] = count[1] = 0;
    perm.resize(n);
    fill_permutation(st, perm);
    rank_.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) rank_[perm[k]] = static_cast<std::uint32_t>(k);
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint32_t c = perm[k];
      bool blocked = false;
      for (std::uint32_t j : block[c])
        if (rank_[j] < k) {
          blocked = true;
          break;
        }
      if (!blocked) {
        flags[c] = 1;
        order.push_back(c);
        ++count[net_of(topo_.links[c])];
      }
    }
  }

  struct MeasureOut {
    double rate[2] = {0, 0};
    double frac[2] = {0, 0};
  };

  // net_filter: -1 measures both networks, 0/1 only that one (probes).
  // per_link, when given, receives each interior link's summed credit.
  MeasureOut measure(std::pair<double, double> strategy, const SirModel& model,
                     Protocol protocol, std::int64_t slots, std::uint64_t seed,
                     std::uint64_t purpose, std::uint64_t index_base,
                     int net_filter, bool receiver_gamma,
                     std::vector<double>* per_link) const {
    std::vector<std::vector<std::uint32_t>> block;
    if (protocol == Protocol::Csma)
      block = build_blocklists(strategy.first, strategy.second, receiver_gamma);
    std::vector<std::uint8_t> flags;
    std::vector<std::uint32_t> order, perm;
    std::vector<float> acc[2];
    double credit_sum[2] = {0, 0};
    std::int64_t active_sum[2] = {0, 0};
    const double beta[2] = {model.beta1, model.beta2};
    int count[2];
    for (std::int64_t s = 0; s < slots; ++s) {
      rng::Stream st(seed, purpose, index_base + static_cast<std::uint64_t>(s));
      if (protocol == Protocol::RandomAccess)
        slot_random_access(st, strategy.first, strategy.second, flags, order,
                           count);
      else
        slot_csma(st, block, flags, order, perm, count);
      active_sum[0] += count[0];
      active_sum[1] += count[1];
      for (int g = 0; g < 2; ++g) {
        if (net_filter >= 0 && net_filter != g) continue;
        const std::size_t m = cols_[g].size();
        if (m == 0) continue;
        acc[g].assign(m, 0.0f);
        float* a = acc[g].data();
        if (model.mode == InterferenceMode::FullInterference) {
          for (std::uint32_t j : order) {
            const float* row = wc_[g].data() + static_cast<std::size_t>(j) * m;
            for (std::size_t c = 0; c < m; ++c) a[c] += row[c];
          }
        } else {
          for (std::uint32_t j : order) {
            const float* row = wc_[g].data() + static_cast<std::size_t>(j) * m;
            for (std::size_t c = 0; c < m; ++c) a[c] = std::max(a[c], row[c]);
          }
        }
        for (std::size_t c = 0; c < m; ++c) {
          const std::uint32_t i = cols_[g][c];
          if (!flags[i]) continue;
          const double inter = static_cast<double>(a[c]);
          const double sir = inter > 0.0 ? sig_[i] / inter : kInf;
          const double credit = slot_rate(sir, model.rate, beta[g]);
          credit_sum[g] += credit;
          if (per_link) (*per_link)[i] += credit;
        }
      }
    }
    MeasureOut out;
    for (int g = 0; g < 2; ++g) {
      const std::size_t m = cols_[g].size();
      out.rate[g] =
          m == 0 ? 0.0
                 : credit_sum[g] / (static_cast<double>(slots) *
                                    static_cast<double>(m));
      out.frac[g] = total_[g] == 0
                        ? 0.0
                        : static_cast<double>(active_sum[g]) /
                              (static_cast<double>(slots) * total_[g]);
    }
    return out;
  }

  const std::vector<std::uint32_t>& cols(int g) const { return cols_[g]; }

 private:
  Topology topo_;
  double alpha_;
  std::vector<double> sig_;
  std::vector<float> w_;
  std::vector<std::uint32_t> cols_[2];
  std::vector<float> wc_[2];
  mutable std::vector<std::uint32_t> rank_;
  int total_[2];
};

}  // namespace

Topology generate_topology(int count1, int count2, const RangeSpec& range_spec,
                           bool power_control, double alpha,
                           std::uint64_t seed) {
  if (count1 < 0 || count2 < 0)
    throw std::invalid_argument("link counts must be non-negative");
  Topology topo;
  topo.rng_seed = seed;
  topo.links.reserve(static_cast<std::size_t>(count1 + count2));
  rng::Stream st(seed, rng::kTopology, 0);
  for (int i = 0; i < count1; ++i)
    topo.links.push_back(
        draw_link(st, Network::Net1, range_spec, power_control, alpha));
  for (int i = 0; i < count2; ++i)
    topo.links.push_back(
        draw_link(st, Network::Net2, range_spec, power_control, alpha));
  return topo;
}

SlotSchedule schedule_random_access(const Topology& topo, double p1, double p2,
                                    std::int64_t slot_index,
                                    std::uint64_t seed) {
  if (!(p1 >= 0 && p1 <= 1 && p2 >= 0 && p2 <= 1))
    throw std::invalid_argument("access probabilities must lie in [0, 1]");
  SlotSchedule sched;
  sched.slot_index = slot_index;
  rng::Stream st(seed, rng::kSchedule, static_cast<std::uint64_t>(slot_index));
  for (std::size_t i = 0; i < topo.links.size(); ++i)
    if (st.bernoulli(net_of(topo.links[i]) == 0 ? p1 : p2))
      sched.active.push_back(static_cast<std::uint32_t>(i));
  return sched;
}

SlotSchedule schedule_csma(const Topology& topo, double gamma1_db,
                           double gamma2_db, double alpha,
                           std::int64_t slot_index, std::uint64_t seed,
                           bool receiver_gamma) {
  if (std::fabs(gamma1_db) > kGammaBoundDb ||
      std::fabs(gamma2_db) > kGammaBoundDb)
    throw std::invalid_argument("silencing thresholds must lie in [-30, 30] dB");
  const std::size_t n = topo.links.size();
  const double thr[2] = {std::pow(10.0, gamma1_db / 10.0),
                         std::pow(10.0, gamma2_db / 10.0)};
  SlotSchedule sched;
  sched.slot_index = slot_index;
  std::vector<std::uint32_t> perm(n);
  rng::Stream st(seed, rng::kSchedule, static_cast<std::uint64_t>(slot_index));
  fill_permutation(st, perm);
  std::vector<std::uint32_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[perm[k]] = static_cast<std::uint32_t>(k);
  std::vector<std::uint8_t> flags(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t c = perm[k];
    bool blocked = false;
    for (std::size_t j = 0; j < n && !blocked; ++j) {
      if (rank[j] >= k || j == c) continue;
      const int g =
          receiver_gamma ? net_of(topo.links[j]) : net_of(topo.links[c]);
      const double inter = rx_power(topo.links[c], topo.links[j].rx, alpha);
      blocked = desired_power(topo.links[j], alpha) < thr[g] * inter;
    }
    if (!blocked) flags[c] = 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (flags[i]) sched.active.push_back(static_cast<std::uint32_t>(i));
  return sched;
}

double compute_sir(const Topology& topo, const SlotSchedule& schedule,
                   std::size_t link_index, const SirModel& model) {
  if (link_index >= topo.links.size())
    throw std::invalid_argument("link index out of range");
  bool active = false;
  for (std::uint32_t k : schedule.active) active = active || k == link_index;
  if (!active)
    throw std::invalid_argument("SIR queried for a link that is not active");
  const Link& l = topo.links[link_index];
  const double signal = desired_power(l, model.alpha);
  double inter = 0.0;
  bool any = false;
  for (std::uint32_t k : schedule.active) {
    if (k == link_index) continue;
    const double term = rx_power(topo.links[k], l.rx, model.alpha);
    if (model.mode == InterferenceMode::FullInterference)
      inter += term;
    else
      inter = std::max(inter, term);
    any = true;
  }
  if (!any || inter == 0.0) return kInf;
  return signal / inter;
}

ThroughputEstimate measure_throughput(const Topology& topo,
                                      std::pair<double, double> strategy,
                                      const SirModel& model, Protocol protocol,
                                      std::int64_t slots, std::uint64_t seed,
                                      bool receiver_gamma) {
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  Field field(topo, model.alpha);
  if (field.interior_count(0) + field.interior_count(1) == 0)
    throw std::invalid_argument("no interior links to measure");
  std::vector<double> per_link(topo.links.size(), 0.0);
  const Field::MeasureOut out =
      field.measure(strategy, model, protocol, slots, seed, rng::kSchedule, 0,
                    -1, receiver_gamma, &per_link);
  ThroughputEstimate est;
  est.slots_used = slots;
  for (int g = 0; g < 2; ++g) {
    est.rate[g] = out.rate[g];
    est.sched_fraction[g] = out.frac[g];
    const auto& cols = field.cols(g);
    const std::size_t m = cols.size();
    est.interior_count[g] = static_cast<int>(m);
    if (m > 1) {
      // standard error across interior-link time averages, so geometry
      // variance is counted, not just slot noise
      double var = 0.0;
      for (std::uint32_t i : cols) {
        const double d = per_link[i] / static_cast<double>(slots) - out.rate[g];
        var += d * d;
      }
      var /= static_cast<double>(m - 1);
      est.std_error[g] = std::sqrt(var / static_cast<double>(m));
    }
  }
  return est;
}

AdaptationTrace run_greedy_adaptation(const AdaptationParams& p) {
  if (!(p.delta > 0)) throw std::invalid_argument("delta must be > 0");
  if (p.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (p.slots_per_estimate < 1)
    throw std::invalid_argument("slots_per_estimate must be >= 1");
  if (p.churn < 0) throw std::invalid_argument("churn must be >= 0");
  const bool csma = p.protocol == Protocol::Csma;
  const double lo = csma ? -kGammaBoundDb : 0.0;
  const double hi = csma ? kGammaBoundDb : 1.0;
  if (p.init1 < lo || p.init1 > hi || p.init2 < lo || p.init2 > hi)
    throw std::invalid_argument("initial strategies outside protocol bounds");

  Topology topo = generate_topology(p.count1, p.count2, p.range_spec,
                                    p.power_control, p.alpha, p.seed);
  topo.margin = p.margin;
  Field field(topo, p.alpha);
  if (field.interior_count(0) + field.interior_count(1) == 0)
    throw std::invalid_argument("no interior links to measure");
  SirModel model{p.interference, p.rate, p.alpha, p.beta1, p.beta2};

  AdaptationTrace trace;
  trace.protocol = p.protocol;
  trace.delta = p.delta;
  trace.steps.reserve(static_cast<std::size_t>(p.iterations));

  double s1 = p.init1, s2 = p.init2;
  const std::uint64_t span = static_cast<std::uint64_t>(p.slots_per_estimate);
  auto clamp = [&](double v) { return std::min(hi, std::max(lo, v)); };

  for (int t = 1; t <= p.iterations; ++t) {
    if (p.churn > 0) {
      rng::Stream cs(p.seed, rng::kChurn, static_cast<std::uint64_t>(t));
      const int base[2] = {0, p.count1};
      const int cnt[2] = {p.count1, p.count2};
      for (int g = 0; g < 2; ++g) {
        for (int k = 0; k < p.churn && cnt[g] > 0; ++k) {
          const std::size_t i =
              static_cast<std::size_t>(base[g]) +
              static_cast<std::size_t>(
                  cs.below(static_cast<std::uint64_t>(cnt[g])));
          field.replace_link(
              i, draw_link(cs, static_cast<Network>(g), p.range_spec,
                           p.power_control, p.alpha));
        }
      }
      field.refresh_compact();
    }

    AdaptationStep step;
    step.iter = t;
    const std::uint64_t pid = static_cast<std::uint64_t>(t - 1) * 4;

    // network 1 probes against the opponent's standing value
    {
      const double up = clamp(s1 + p.delta), dn = clamp(s1 - p.delta);
      const auto r_up = field.measure({up, s2}, model, p.protocol,
                                      p.slots_per_estimate, p.seed, rng::kProbe,
                                      pid * span, 0, p.receiver_gamma, nullptr);
      const auto r_dn =
          field.measure({dn, s2}, model, p.protocol, p.slots_per_estimate,
                        p.seed, rng::kProbe, (pid + 1) * span, 0,
                        p.receiver_gamma, nullptr);
      if (r_up.rate[0] > r_dn.rate[0]) {
        s1 = up;
        step.r1 = r_up.rate[0];
        step.f1 = csma ? r_up.frac[0] : s1;
      } else {
        s1 = dn;
        step.r1 = r_dn.rate[0];
        step.f1 = csma ? r_dn.frac[0] : s1;
      }
    }
    // then network 2 against network 1's committed value
    {
      const double up = clamp(s2 + p.delta), dn = clamp(s2 - p.delta);
      const auto r_up = field.measure({s1, up}, model, p.protocol,
                                      p.slots_per_estimate, p.seed, rng::kProbe,
                                      (pid + 2) * span, 1, p.receiver_gamma,
                                      nullptr);
      const auto r_dn = field.measure({s1, dn}, model, p.protocol,
                                      p.slots_per_estimate, p.seed, rng::kProbe,
                                      (pid + 3) * span, 1, p.receiver_gamma,
                                      nullptr);
      if (r_up.rate[1] > r_dn.rate[1]) {
        s2 = up;
        step.r2 = r_up.rate[1];
        step.f2 = csma ? r_up.frac[1] : s2;
      } else {
        s2 = dn;
        step.r2 = r_dn.rate[1];
        step.f2 = csma ? r_dn.frac[1] : s2;
      }
    }
    step.strategy1 = s1;
    step.strategy2 = s2;
    trace.steps.push_back(step);
  }
  return trace;
}

std::vector<std::pair<double, double>> scheduled_fraction(
    const AdaptationTrace& trace) {
  if (trace.steps.empty()) throw std::invalid_argument("empty trace");
  std::vector<std::pair<double, double>> out;
  out.reserve(trace.steps.size());
  for (const AdaptationStep& s : trace.steps) out.emplace_back(s.f1, s.f2);
  return out;
}

namespace {

void print_g12(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const AdaptationTrace& trace) {
  os << "iter,strategy1,strategy2,r1,r2,f1,f2\n";
  for (const AdaptationStep& s : trace.steps) {
    os << s.iter << ',';
    print_g12(os, s.strategy1);
    os << ',';
    print_g12(os, s.strategy2);
    os << ',';
    print_g12(os, s.r1);
    os << ',';
    print_g12(os, s.r2);
    os << ',';
    print_g12(os, s.f1);
    os << ',';
    print_g12(os, s.f2);
    os << '\n';
  }
}

void write_topology_csv(std::ostream& os, const Topology& topo) {
  os << "idx,network,tx_x,tx_y,rx_x,rx_y,range\n";
  for (std::size_t i = 0; i < topo.links.size(); ++i) {
    const Link& l = topo.links[i];
    os << i << ',' << (net_of(l) + 1) << ',';
    print_g12(os, l.tx.x);
    os << ',';
    print_g12(os, l.tx.y);
    os << ',';
    print_g12(os, l.rx.x);
    os << ',';
    print_g12(os, l.rx.y);
    os << ',';
    print_g12(os, l.range);
    os << '\n';
  }
}

}  // namespace specshare::sim
