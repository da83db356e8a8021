#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "tq/distribution.hpp"
#include "tq/model.hpp"

namespace tq {

/// An eigenvalue of the characteristic matrix polynomial together with its
/// left null vector, u * Q(lam) = 0. The vector is scaled so its
/// largest-modulus entry is exactly 1 (real positive); residual is
/// ||u Q(lam)||_inf / (||Q(lam)||_inf * ||u||_inf) and is kept below 1e-8.
struct EigenPair {
  std::complex<double> lam;
  Eigen::VectorXcd u;
  double residual = 0.0;
};

enum class SpectralMethod { exact, geometric, hybrid };

/// Everything the spectral solvers expose about a solve: the interior
/// spectrum (|lam| < 1, ascending modulus), the dominant pair, and the
/// expansion coefficients. For the hybrid method the explicit boundary level
/// vectors and the sacrificed balance residual at j = m_boundary are kept too.
struct SpectralSolution {
  SpectralMethod method = SpectralMethod::exact;
  int m_boundary = 0;
  std::vector<EigenPair> interior;
  double gamma = 0.0;
  Eigen::VectorXd u_dom;  // elementwise nonnegative, sums to 1
  std::vector<std::complex<double>> alphas;
  std::vector<Eigen::VectorXd> boundary_levels;
  double boundary_balance_residual = 0.0;
};

struct SpectralResult {
  SpectralSolution solution;
  StationaryDistribution distribution;
};

/// Q(lam) = b + (a - da - db - dc) lam + c lam^2. Level vectors of the form
/// v_j = u lam^j satisfy the interior balance equations iff u Q(lam) = 0.
Eigen::MatrixXcd char_poly_eval(const QbdMatrices& m, std::complex<double> lam);

/// All roots of det Q(lam) = 0 strictly inside the unit circle, each paired
/// with its left null vector. Computed by companion linearization of the
/// quadratic polynomial to a 2(N+1) generalized eigenproblem (the singular
/// leading block c contributes infinite eigenvalues, which are discarded),
/// then polished by a Newton step on u Q(lam) v. A stable model yields
/// exactly N+1 interior roots; lam = 1 always lies on the circle and is
/// always excluded.
std::vector<EigenPair> solve_interior_spectrum(const QbdMatrices& m);

/// The unique largest-modulus interior eigenvalue and its eigenvector,
/// rescaled elementwise nonnegative with unit sum. Errors if the dominant
/// value is complex, nonpositive, or not well separated in modulus.
std::pair<double, Eigen::VectorXd> dominant_eigenpair(const std::vector<EigenPair>& spectrum);

/// Full expansion v_j = sum_k alpha_k u_k lam_k^j for j >= 0. The
/// coefficients solve the level-0 balance equations plus normalization as an
/// (N+2) x (N+1) least-squares system; every balance row must come out below
/// 1e-9.
SpectralResult solve_exact(const QbdMatrices& m, const std::vector<EigenPair>& spectrum);

/// One-term geometric form v_j = u_dom (1 - gamma) gamma^j. Normalization
/// alone fixes the coefficient; no linear system is solved. The level
/// marginal is exactly Geometric(gamma).
SpectralResult solve_geometric(const QbdMatrices& m, double gamma,
                               const Eigen::VectorXd& u_dom);

/// Geometric tail restricted to j >= m_boundary, with explicit level vectors
/// v_0..v_{M-1}. Solves the M(N+1)+1 balance-plus-normalization equations;
/// every balance equation holds except at j = M, whose residual is reported
/// in the solution as a quality metric.
SpectralResult solve_hybrid(const QbdMatrices& m, const std::vector<EigenPair>& spectrum,
                            int m_boundary);

/// Station-1 mean queue length of any solver's distribution (closed form for
/// spectral tails; gamma / (1 - gamma) for the geometric method).
double mean_queue_length(const StationaryDistribution& dist);

}  // namespace tq
