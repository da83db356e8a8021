#include "tq/metrics.hpp"

#include <cmath>
#include <string>

namespace tq {

PerformanceMetrics compute_metrics(const TandemParams& params,
                                   const StationaryDistribution& dist) {
  const double mass = dist.total_mass();
  if (std::abs(mass - 1.0) > 1e-8) {
    throw Error(ErrorCode::NotNormalized, "total mass " + std::to_string(mass));
  }
  const int n = dist.n_phases() - 1;  // blocking threshold N

  PerformanceMetrics pm;
  const Eigen::VectorXd phase = dist.phase_marginal();
  pm.mql1 = dist.mean_level();
  for (int i = 0; i <= n; ++i) pm.mql2 += i * phase(i);
  pm.blocking_prob = phase(n);
  pm.util2 = 1.0 - phase(0);
  // P(J >= 1, I < N) = sum_{i<N} (phase_i - p(i, 0))
  for (int i = 0; i < n; ++i) pm.util1 += phase(i) - dist.p(i, 0);
  pm.throughput = params.mu2 * (1.0 - params.p_fb) * pm.util2;

  if (params.k_capacity && dist.support_bound() &&
      *dist.support_bound() == *params.k_capacity) {
    const int k = *params.k_capacity;
    double blocked_feedback = 0.0;
    for (int i = 1; i <= n; ++i) blocked_feedback += dist.p(i, k);
    pm.loss_rate = params.sigma * dist.level_marginal(k) +
                   params.mu2 * params.p_fb * blocked_feedback;
  }
  return pm;
}

Eigen::VectorXd phase_marginal(const StationaryDistribution& dist) {
  return dist.phase_marginal();
}

double level_marginal(const StationaryDistribution& dist, int level) {
  return dist.level_marginal(level);
}

}  // namespace tq
