#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tq/error.hpp"

namespace tq {

/// Parameters of the two-station tandem network with a blocking threshold and
/// Bernoulli feedback.
///
/// Station 1 receives Poisson(sigma) external arrivals and serves at rate mu1;
/// completed jobs join station 2, which serves at rate mu2. When station 2
/// holds n_threshold jobs, station 1 suspends service until that count drops.
/// A station-2 completion rejoins queue 1 with probability p_fb, otherwise it
/// leaves the network. k_capacity, when set, bounds the first buffer
/// (including the job in service); absent means infinite.
struct TandemParams {
  double sigma = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double p_fb = 0.0;
  int n_threshold = 1;
  std::optional<int> k_capacity;
};

/// Checks ranges and returns the validated record; never clamps silently.
TandemParams validate_params(const TandemParams& raw);

/// Transition-rate matrices of the quasi-birth-death process. The phase is the
/// station-2 occupancy i in 0..N; the level is the station-1 queue length j.
///
///   a: phase-only transitions (network departures), a(i, i-1) = mu2*(1-p_fb)
///   b: level +1 transitions: b(i, i) = sigma, b(i, i-1) = mu2*p_fb (feedback)
///   c: level -1 transitions: c(i, i+1) = mu1, row N zero (station 1 blocked)
///
/// da/db/dc hold the row sums of a/b/c (the diagonal correction terms of the
/// generator). Rates are level-independent except that c does not act at
/// level 0 (nothing to serve at station 1).
struct QbdMatrices {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  Eigen::VectorXd da;
  Eigen::VectorXd db;
  Eigen::VectorXd dc;

  int n_phases() const { return static_cast<int>(a.rows()); }
};

/// Requires validated params with an infinite first buffer.
QbdMatrices build_qbd_matrices(const TandemParams& params);

enum class LevelClass { boundary0, interior };

/// Self-test: assembles the generator rows implied by the matrices for the
/// given level class and returns the largest absolute row-sum deviation.
/// Zero (up to roundoff) for a consistent construction.
double generator_row_check(const QbdMatrices& m, LevelClass level_class);

/// Mean-drift stability test. phase_stationary solves the balance equations of
/// the phase process driven by the off-diagonal rates of a + b + c (the sigma
/// diagonal of b is a self-loop and drops out). The chain is positive
/// recurrent iff the mean upward level rate is below the mean downward rate.
struct StabilityReport {
  Eigen::VectorXd phase_stationary;
  double drift_up = 0.0;
  double drift_down = 0.0;
  bool is_stable = false;
};

StabilityReport stability_report(const TandemParams& params);
StabilityReport stability_report(const QbdMatrices& m);

}  // namespace tq
