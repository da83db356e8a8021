#pragma once

#include <vector>

#include "tq/distribution.hpp"
#include "tq/metrics.hpp"
#include "tq/model.hpp"

namespace tq {

/// How the level axis is closed off at j_bound.
///
///  - truncated_infinite: numerical truncation of the infinite-buffer chain;
///    external arrivals at the top level are suppressed and a feedback
///    completion there behaves as an exit, so the generator stays
///    conservative. Used as ground truth for the spectral solvers.
///  - finite_capacity: the first buffer genuinely holds at most K = j_bound
///    jobs; arrivals and feedback aimed past it are lost (and counted in the
///    loss rate).
///
/// Both modes drop the same upward transitions; they differ in what the
/// boundary means, and therefore in which metrics apply.
enum class TruncationMode { truncated_infinite, finite_capacity };

struct RateTriplet {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

/// Full CTMC on the rectangle i in 0..N, j in 0..j_bound, stored as a sparse
/// off-diagonal rate list (the diagonal is implied by conservation).
struct TruncatedGenerator {
  int n_phases = 0;  // N + 1
  int j_bound = 0;
  TruncationMode mode = TruncationMode::truncated_infinite;
  TandemParams params;
  std::vector<RateTriplet> rates;

  int n_states() const { return n_phases * (j_bound + 1); }
  int state_index(int phase, int level) const { return level * n_phases + phase; }
  int phase_of(int state) const { return state % n_phases; }
  int level_of(int state) const { return state / n_phases; }
};

TruncatedGenerator build_truncated_generator(const TandemParams& params, int j_bound,
                                             TruncationMode mode);

/// Direct stationary solve of the truncated chain.
///
/// Exploits the block-tridiagonal layout: censoring levels from the top down
/// yields one (N+1) x (N+1) system per level and a nonnegative forward
/// recursion pi_{j} = pi_{j-1} S_j, which keeps even deep-tail entries at
/// their correct relative size. The result is verified against the triplet
/// list: ||pi G||_inf <= 1e-11 * max rate.
StationaryDistribution solve_stationary(const TruncatedGenerator& g);

/// Independent estimate of the geometric tail decay rate: the geometric mean
/// of successive level-marginal ratios over [j_lo, j_hi]. Requires a truncated
/// distribution with j_hi well below the truncation bound (estimates too close
/// to the bound are biased low).
double tail_ratio_estimate(const StationaryDistribution& dist, int j_lo, int j_hi);

/// Metrics of the finite-first-buffer model, including the loss rate
/// sigma P(J = K) + mu2 p_fb P(I >= 1, J = K). Flow conservation
/// (sigma - external losses = throughput) holds for every exact solve.
PerformanceMetrics finite_buffer_metrics(const TandemParams& params,
                                         const StationaryDistribution& dist);

}  // namespace tq
