#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "specshare/game.hpp"
#include "specshare/range_spec.hpp"

namespace specshare::sim {

using game::RateModel;

struct Vec2 {
  double x = 0;
  double y = 0;
};

enum class Network : int { Net1 = 0, Net2 = 1 };

struct Link {
  Vec2 tx;
  Vec2 rx;
  Network network = Network::Net1;
  double range = 0;         // |tx - rx|
  double power_weight = 1;  // range^alpha under power control, else 1
};

struct Topology {
  std::vector<Link> links;
  double area_side = 1.0;
  double margin = 0.1;  // interior measurement band
  std::uint64_t rng_seed = 0;

  bool interior(const Link& l) const {
    return l.tx.x >= margin && l.tx.x <= area_side - margin &&
           l.tx.y >= margin && l.tx.y <= area_side - margin;
  }
};

struct SlotSchedule {
  std::vector<std::uint32_t> active;  // link indices, ascending
  std::int64_t slot_index = 0;
};

enum class InterferenceMode { DominantInterferer, FullInterference };

enum class Protocol { RandomAccess, Csma };

struct SirModel {
  InterferenceMode mode = InterferenceMode::DominantInterferer;
  RateModel rate = RateModel::FixedRate;
  double alpha = 4.0;
  double beta1 = 1.0;  // fixed-rate targets (linear)
  double beta2 = 1.0;
};

struct ThroughputEstimate {
  double rate[2] = {0, 0};       // nats per interior link per slot
  double std_error[2] = {0, 0};  // across interior-link time averages
  double sched_fraction[2] = {0, 0};
  std::int64_t slots_used = 0;
  int interior_count[2] = {0, 0};
};

// Tx nodes i.i.d. uniform on the unit square; each rx placed by range_spec
// (fixed range at uniform bearing, or uniform on a disc). Rx may fall outside
// the square; only interior tx are ever measured. Deterministic in seed.
Topology generate_topology(int count1, int count2, const RangeSpec& range_spec,
                           bool power_control, double alpha,
                           std::uint64_t seed);

// Each link scheduled i.i.d. with its network's access probability.
SlotSchedule schedule_random_access(const Topology& topo, double p1, double p2,
                                    std::int64_t slot_index,
                                    std::uint64_t seed);

// Token-priority carrier sensing: a fresh uniform priority permutation each
// slot; a candidate transmits iff for every higher-priority rx, the rx's
// signal-over-candidate-interference margin (dB) is at least the silencing
// threshold of the candidate's network (or the receiver's network, when
// receiver_gamma is set). Admission therefore depends only on the candidate's
// own priority rank, which makes the admitted set shrink monotonically as a
// network raises its threshold.
SlotSchedule schedule_csma(const Topology& topo, double gamma1_db,
                           double gamma2_db, double alpha,
                           std::int64_t slot_index, std::uint64_t seed,
                           bool receiver_gamma = false);

// SIR of one active link: desired power over the strongest single interferer
// (DominantInterferer) or the sum of all interferers (FullInterference).
// Returns +infinity when no other link is active.
double compute_sir(const Topology& topo, const SlotSchedule& schedule,
                   std::size_t link_index, const SirModel& model);

// Average throughput per interior link per slot over `slots` slots.
// strategy is (p1, p2) for random access, (gamma1_db, gamma2_db) for CSMA.
ThroughputEstimate measure_throughput(const Topology& topo,
                                      std::pair<double, double> strategy,
                                      const SirModel& model, Protocol protocol,
                                      std::int64_t slots, std::uint64_t seed,
                                      bool receiver_gamma = false);

struct AdaptationStep {
  int iter = 0;
  double strategy1 = 0, strategy2 = 0;  // committed p_i or gamma_i (dB)
  double r1 = 0, r2 = 0;                // winning probe estimates
  double f1 = 0, f2 = 0;                // scheduled fractions
};

struct AdaptationTrace {
  std::vector<AdaptationStep> steps;
  Protocol protocol = Protocol::RandomAccess;
  double delta = 0;
};

struct AdaptationParams {
  int count1 = 400;
  int count2 = 200;
  RangeSpec range_spec = RangeSpec::uniform_disc(0.15);
  bool power_control = true;
  double alpha = 4.0;
  Protocol protocol = Protocol::RandomAccess;
  InterferenceMode interference = InterferenceMode::FullInterference;
  RateModel rate = RateModel::VariableRate;
  double beta1 = 1.0, beta2 = 1.0;  // fixed-rate crediting targets
  double init1 = 1.0, init2 = 1.0;
  double delta = 0.02;
  int iterations = 500;
  int slots_per_estimate = 200;
  int churn = 0;  // links replaced per network per iteration (CSMA)
  double margin = 0.1;
  bool receiver_gamma = false;
  std::uint64_t seed = 0;
};

// Alternating greedy adaptation: per iteration network 1 probes its strategy
// at +/-delta against the opponent's last value, commits the better (ties go
// down), then network 2 does the same against the committed value.
// Strategies are clamped to [0,1] (access probability) or +/-30 dB (CSMA).
AdaptationTrace run_greedy_adaptation(const AdaptationParams& params);

// Per-iteration scheduled fraction of each network; for random access this is
// the committed access probability itself.
std::vector<std::pair<double, double>> scheduled_fraction(
    const AdaptationTrace& trace);

// CSV exports: `iter,strategy1,strategy2,r1,r2,f1,f2` and
// `idx,network,tx_x,tx_y,rx_x,rx_y,range`.
void write_trace_csv(std::ostream& os, const AdaptationTrace& trace);
void write_topology_csv(std::ostream& os, const Topology& topo);

}  // namespace specshare::sim
