#pragma once

#include <cstdint>
#include <vector>

#include "tq/model.hpp"

namespace tq {

/// Discrete-event simulation settings. Warmup is discarded by event count;
/// confidence intervals come from batch means over n_batches contiguous
/// post-warmup batches.
struct SimConfig {
  std::uint64_t seed = 1;
  std::int64_t warmup_events = 100000;
  std::int64_t total_events = 1000000;
  int n_batches = 20;
};

/// A point estimate with a 95% confidence half-width.
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;

  bool covers(double x) const { return value - half_width <= x && x <= value + half_width; }
};

struct SimEstimate {
  Estimate mql1;
  Estimate mql2;
  Estimate blocking_prob;  // time fraction with station 2 at the threshold
  Estimate throughput;     // network exits per unit time
  Estimate loss_rate;      // dropped jobs per unit time (finite buffer only)

  // exact event accounting over the whole run, warmup included
  std::int64_t events = 0;
  std::int64_t external_arrivals = 0;
  std::int64_t accepted_arrivals = 0;
  std::int64_t exits = 0;
  std::int64_t arrival_losses = 0;
  std::int64_t feedback_losses = 0;
  double sim_time = 0.0;           // total simulated time
  double measured_time = 0.0;      // post-warmup simulated time
};

/// Event-driven simulation of the tandem network: competing exponential
/// clocks for arrival, station-1 service (armed iff j >= 1 and i < N) and
/// station-2 service (armed iff i >= 1), with a Bernoulli feedback draw on
/// each station-2 completion. Every armed clock is redrawn after each
/// transition, which by memorylessness leaves the law of the chain unchanged
/// and makes the blocking rule unambiguous. One RNG stream per clock type
/// plus one for routing, all derived from the single seed; identical seeds
/// give bit-identical estimates.
SimEstimate run_sim(const TandemParams& params, const SimConfig& cfg);

/// Independent replications with per-run seeds derived from cfg.seed. Runs in
/// parallel when threads != 1 (0 = hardware default); the result of each run
/// does not depend on the thread count.
std::vector<SimEstimate> run_many(const TandemParams& params, const SimConfig& cfg,
                                  int n_runs, int threads = 0);

}  // namespace tq
