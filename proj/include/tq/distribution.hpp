#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "tq/error.hpp"

namespace tq {

/// Joint stationary distribution over (phase i, level j) with a uniform query
/// interface. Two storage kinds:
///
///  - spectral_tailed: a list of explicit boundary level vectors v_0..v_{M-1}
///    followed by an eigenvalue expansion v_j = sum_k alpha_k u_k lam_k^j for
///    j >= M, so marginals and moments have closed forms over the infinite
///    support.
///  - truncated: a finite (N+1) x (J+1) table of joint probabilities, either a
///    truncation of the infinite-buffer chain or the exact law of the
///    finite-first-buffer model.
class StationaryDistribution {
 public:
  enum class Kind { spectral_tailed, truncated };

  static StationaryDistribution make_spectral_tailed(
      int n_phases, std::vector<Eigen::VectorXd> boundary_levels,
      std::vector<std::complex<double>> lambdas, std::vector<Eigen::VectorXcd> u_vecs,
      std::vector<std::complex<double>> alphas);

  static StationaryDistribution make_truncated(Eigen::MatrixXd joint);

  Kind kind() const { return kind_; }
  int n_phases() const { return n_phases_; }

  /// Largest level with stored mass for the truncated kind; empty otherwise.
  std::optional<int> support_bound() const;

  /// Joint probability of (phase, level). Tiny negative roundoff (above
  /// -1e-12) is clipped to zero.
  double p(int phase, int level) const;

  /// P(level = j), in closed form for the spectral tail.
  double level_marginal(int level) const;

  /// Distribution of the phase (station-2 occupancy), summed over all levels.
  Eigen::VectorXd phase_marginal() const;

  /// Total mass; 1 up to solver tolerance for any normalized solution.
  double total_mass() const;

  /// E[level] = station-1 mean queue length, including the job in service.
  double mean_level() const;

  // spectral-tailed internals, exposed for metric closed forms
  int tail_start() const { return static_cast<int>(boundary_.size()); }
  const std::vector<Eigen::VectorXd>& boundary_levels() const { return boundary_; }
  const std::vector<std::complex<double>>& tail_lambdas() const { return lambdas_; }
  const std::vector<Eigen::VectorXcd>& tail_vectors() const { return u_vecs_; }
  const std::vector<std::complex<double>>& tail_alphas() const { return alphas_; }
  const Eigen::MatrixXd& joint_table() const { return table_; }

 private:
  StationaryDistribution() = default;

  Kind kind_ = Kind::truncated;
  int n_phases_ = 0;

  // spectral_tailed
  std::vector<Eigen::VectorXd> boundary_;
  std::vector<std::complex<double>> lambdas_;
  std::vector<Eigen::VectorXcd> u_vecs_;
  std::vector<std::complex<double>> alphas_;

  // truncated
  Eigen::MatrixXd table_;  // (n_phases) x (support_bound + 1)
};

}  // namespace tq
