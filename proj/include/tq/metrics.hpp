#pragma once

#include <Eigen/Dense>

#include "tq/distribution.hpp"
#include "tq/model.hpp"

namespace tq {

/// Stationary performance measures, solver-independent.
///
/// mql1/mql2 count the job in service. util1 is the fraction of time station 1
/// is actually serving (nonempty and not blocked); throughput is the network
/// exit rate mu2 (1 - p_fb) P(I >= 1), which equals sigma for any stable
/// infinite-buffer solution. loss_rate is nonzero only for a finite first
/// buffer, where arrivals and feedback aimed past the capacity are dropped.
struct PerformanceMetrics {
  double mql1 = 0.0;
  double mql2 = 0.0;
  double blocking_prob = 0.0;
  double util1 = 0.0;
  double util2 = 0.0;
  double throughput = 0.0;
  double loss_rate = 0.0;
};

/// Requires a normalized distribution (mass within 1e-8 of 1).
PerformanceMetrics compute_metrics(const TandemParams& params,
                                   const StationaryDistribution& dist);

Eigen::VectorXd phase_marginal(const StationaryDistribution& dist);
double level_marginal(const StationaryDistribution& dist, int level);

}  // namespace tq
