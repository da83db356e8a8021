#include "tq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tq {

namespace {

using Complex = std::complex<double>;

constexpr double kCircleEps = 1e-9;        // unit-circle exclusion band
constexpr double kInfiniteCutoff = 1e9;    // |lam| beyond this is "infinite"
constexpr double kResidualTol = 1e-8;
constexpr double kDegenerateGap = 1e-8;

Eigen::MatrixXd middle_coeff(const QbdMatrices& m) {
  Eigen::MatrixXd a1 = m.a;
  a1.diagonal() -= m.da + m.db + m.dc;
  return a1;
}

double matrix_inf_norm(const Eigen::MatrixXcd& q) {
  return q.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Left/right null directions of Q(lam) from its smallest singular value.
struct NullVectors {
  Eigen::VectorXcd u;  // row vector (stored as column): u* Q ~ 0
  Eigen::VectorXcd v;  // column vector: Q v ~ 0
  double sigma_min = 0.0;
};

NullVectors smallest_singular_direction(const Eigen::MatrixXcd& q) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index last = q.rows() - 1;
  NullVectors nv;
  nv.u = svd.matrixU().col(last).conjugate();
  nv.v = svd.matrixV().col(last);
  nv.sigma_min = svd.singularValues()(last);
  return nv;
}

/// One or two Newton corrections lam -= (u Q v) / (u Q' v) with Q' = a1 + 2 lam c.
Complex polish_root(const QbdMatrices& m, const Eigen::MatrixXd& a1, Complex lam) {
  for (int iter = 0; iter < 2; ++iter) {
    const Eigen::MatrixXcd q = char_poly_eval(m, lam);
    const NullVectors nv = smallest_singular_direction(q);
    const Eigen::MatrixXcd dq =
        a1.cast<Complex>() + 2.0 * lam * m.c.cast<Complex>();
    const Complex numer = nv.u.transpose() * q * nv.v;
    const Complex denom = nv.u.transpose() * dq * nv.v;
    if (std::abs(denom) < 1e-14 * matrix_inf_norm(q)) break;
    const Complex delta = numer / denom;
    if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag()) || std::abs(delta) > 0.1) {
      break;
    }
    lam -= delta;
    if (std::abs(delta) < 1e-15 * std::max(1.0, std::abs(lam))) break;
  }
  return lam;
}

EigenPair make_eigen_pair(const QbdMatrices& m, Complex lam) {
  const Eigen::MatrixXcd q = char_poly_eval(m, lam);
  NullVectors nv = smallest_singular_direction(q);

  // Deterministic scaling: the largest-modulus entry becomes exactly 1.
  Eigen::Index max_idx = 0;
  nv.u.cwiseAbs().maxCoeff(&max_idx);
  const Complex pivot = nv.u(max_idx);
  Eigen::VectorXcd u = nv.u / pivot;

  const double q_norm = matrix_inf_norm(q);
  const double u_norm = u.cwiseAbs().maxCoeff();
  const double resid = (u.transpose() * q).cwiseAbs().maxCoeff() / (q_norm * u_norm);
  if (!(resid <= kResidualTol)) {
    std::ostringstream os;
    os << "left null vector residual " << resid << " at lam = (" << lam.real() << ", "
       << lam.imag() << ")";
    throw Error(ErrorCode::EigenvectorResidualTooLarge, os.str());
  }
  return EigenPair{lam, std::move(u), resid};
}

std::string format_roots(const std::vector<Complex>& roots) {
  std::ostringstream os;
  os << "[";
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (k) os << ", ";
    os << roots[k].real();
    if (roots[k].imag() != 0.0) os << (roots[k].imag() < 0 ? "-" : "+")
                                   << std::abs(roots[k].imag()) << "i";
  }
  os << "]";
  return os.str();
}

/// Raw (unclipped) level vector of a spectral tail at one level.
Eigen::VectorXcd tail_level(const StationaryDistribution& d, int level) {
  const int n = d.n_phases();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  for (std::size_t k = 0; k < d.tail_lambdas().size(); ++k) {
    v += d.tail_alphas()[k] * std::pow(d.tail_lambdas()[k], level) * d.tail_vectors()[k];
  }
  return v;
}

/// Rejects genuinely negative probabilities anywhere in the expansion. The
/// scan stops once the eigenvalue powers bound every later level below 1e-13.
void check_nonnegative(const StationaryDistribution& d) {
  for (std::size_t j = 0; j < d.boundary_levels().size(); ++j) {
    const double lo = d.boundary_levels()[j].minCoeff();
    if (lo < -1e-12) {
      throw Error(ErrorCode::NegativeProbability,
                  "level " + std::to_string(j) + " has entry " + std::to_string(lo));
    }
  }
  const int start = d.tail_start();
  for (int j = start; j < 200000; ++j) {
    double bound = 0.0;
    for (std::size_t k = 0; k < d.tail_lambdas().size(); ++k) {
      bound += std::abs(d.tail_alphas()[k]) * std::pow(std::abs(d.tail_lambdas()[k]), j) *
               d.tail_vectors()[k].cwiseAbs().maxCoeff();
    }
    if (bound < 1e-13) break;
    const Eigen::VectorXcd v = tail_level(d, j);
    const double lo = v.real().minCoeff();
    if (lo < -1e-12) {
      throw Error(ErrorCode::NegativeProbability,
                  "level " + std::to_string(j) + " has entry " + std::to_string(lo));
    }
  }
}

}  // namespace

Eigen::MatrixXcd char_poly_eval(const QbdMatrices& m, Complex lam) {
  return m.b.cast<Complex>() + lam * middle_coeff(m).cast<Complex>() +
         (lam * lam) * m.c.cast<Complex>();
}

std::vector<EigenPair> solve_interior_spectrum(const QbdMatrices& m) {
  const int n = m.n_phases();
  const Eigen::MatrixXd a1 = middle_coeff(m);

  // First companion form: pencil (P, E) of dimension 2n acting on [x; lam x],
  // with P z = lam E z recovering (b + lam a1 + lam^2 c) x = 0.
  Eigen::MatrixXd pencil_a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::MatrixXd pencil_b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  pencil_a.topRightCorner(n, n).setIdentity();
  pencil_a.bottomLeftCorner(n, n) = -m.b.transpose();
  pencil_a.bottomRightCorner(n, n) = -a1.transpose();
  pencil_b.topLeftCorner(n, n).setIdentity();
  pencil_b.bottomRightCorner(n, n) = m.c.transpose();

  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
  ges.compute(pencil_a, pencil_b, /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success) {
    throw Error(ErrorCode::WrongInteriorCount, "generalized eigensolver failed to converge");
  }

  std::vector<Complex> finite;
  for (Eigen::Index k = 0; k < ges.alphas().size(); ++k) {
    const Complex alpha = ges.alphas()(k);
    const double beta = ges.betas()(k);
    if (beta == 0.0 || std::abs(alpha) > kInfiniteCutoff * std::abs(beta)) continue;
    Complex lam = alpha / beta;
    if (std::abs(lam) < 2.0) lam = polish_root(m, a1, lam);
    finite.push_back(lam);
  }

  std::vector<Complex> interior;
  for (const Complex& lam : finite) {
    if (std::abs(lam) < 1.0 - kCircleEps) interior.push_back(lam);
  }

  if (static_cast<int>(interior.size()) != n) {
    const StabilityReport stab = stability_report(m);
    std::ostringstream os;
    os << "expected " << n << " eigenvalues inside the unit circle, found " << interior.size()
       << "; finite roots " << format_roots(finite);
    if (!stab.is_stable) {
      os << "; model is unstable (mean drift up " << stab.drift_up << " >= drift down "
         << stab.drift_down << ")";
    }
    throw Error(ErrorCode::WrongInteriorCount, os.str());
  }
  for (std::size_t p = 0; p < interior.size(); ++p) {
    for (std::size_t q = p + 1; q < interior.size(); ++q) {
      if (std::abs(interior[p] - interior[q]) < kDegenerateGap) {
        throw Error(ErrorCode::WrongInteriorCount,
                    "degenerate interior eigenvalues near " + format_roots({interior[p]}) +
                        " require a confluent expansion, which is not supported");
      }
    }
  }

  std::sort(interior.begin(), interior.end(), [](const Complex& x, const Complex& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax < ay;
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });

  std::vector<EigenPair> pairs;
  pairs.reserve(interior.size());
  for (const Complex& lam : interior) pairs.push_back(make_eigen_pair(m, lam));
  return pairs;
}

std::pair<double, Eigen::VectorXd> dominant_eigenpair(const std::vector<EigenPair>& spectrum) {
  if (spectrum.empty()) {
    throw Error(ErrorCode::WrongInteriorCount, "empty interior spectrum");
  }
  std::size_t top = 0;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (std::abs(spectrum[k].lam) > std::abs(spectrum[top].lam)) top = k;
  }
  const Complex lam = spectrum[top].lam;
  if (std::abs(lam.imag()) > 1e-10) {
    throw Error(ErrorCode::DominantNotReal, "largest-modulus eigenvalue " +
                                                format_roots({lam}) + " is not real");
  }
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (k == top) continue;
    if (std::abs(std::abs(spectrum[k].lam) - std::abs(lam)) < 1e-10) {
      throw Error(ErrorCode::DominantNotSimple,
                  "another eigenvalue shares the dominant modulus " +
                      std::to_string(std::abs(lam)));
    }
  }
  const double gamma = lam.real();
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::DominantNotReal,
                "dominant eigenvalue must be real positive, got " + std::to_string(gamma));
  }

  Eigen::VectorXd u = spectrum[top].u.real();
  const double imag_left = spectrum[top].u.imag().cwiseAbs().maxCoeff();
  if (imag_left > 1e-8) {
    throw Error(ErrorCode::EigenvectorNotPositive,
                "dominant eigenvector has imaginary residue " + std::to_string(imag_left));
  }
  if (u.maxCoeff() < 0.0) u = -u;
  if (u.minCoeff() < -1e-8 * u.cwiseAbs().maxCoeff()) {
    throw Error(ErrorCode::EigenvectorNotPositive,
                "dominant eigenvector has mixed signs; smallest entry " +
                    std::to_string(u.minCoeff()));
  }
  u = u.cwiseMax(0.0);
  u /= u.sum();
  return {gamma, u};
}

SpectralResult solve_exact(const QbdMatrices& m, const std::vector<EigenPair>& spectrum) {
  const int n = m.n_phases();
  if (static_cast<int>(spectrum.size()) != n) {
    throw Error(ErrorCode::WrongInteriorCount,
                "exact expansion needs exactly " + std::to_string(n) + " interior eigenpairs");
  }

  // Level-0 balance v_0 (a - da - db) + v_1 c = 0 plus normalization, as an
  // overdetermined least-squares system in the coefficients alpha_k. One
  // balance row is linearly dependent, so the square rank is still n.
  Eigen::MatrixXd bound0 = m.a;
  bound0.diagonal() -= m.da + m.db;

  Eigen::MatrixXcd sys(n + 1, n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
  for (int k = 0; k < n; ++k) {
    const Eigen::RowVectorXcd u = spectrum[k].u.transpose();
    const Eigen::RowVectorXcd balance_row =
        u * bound0.cast<Complex>() + spectrum[k].lam * (u * m.c.cast<Complex>());
    sys.block(0, k, n, 1) = balance_row.transpose();
    sys(n, k) = spectrum[k].u.sum() / (1.0 - spectrum[k].lam);
  }
  rhs(n) = 1.0;

  // Equilibrate columns before the least-squares solve; modes whose
  // eigenvalues cluster give nearly parallel columns, and the combination they
  // span is what matters, not the conditioning of individual coefficients.
  Eigen::VectorXd col_scale(n);
  for (int k = 0; k < n; ++k) {
    col_scale(k) = std::max(sys.col(k).cwiseAbs().maxCoeff(), 1e-300);
  }
  const Eigen::MatrixXcd scaled = sys * col_scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXcd alpha = col_scale.cwiseInverse().asDiagonal() * svd.solve(rhs);
  if (!alpha.allFinite()) {
    throw Error(ErrorCode::BoundaryRankDeficient, "boundary solve produced non-finite output");
  }

  const Eigen::VectorXcd resid = sys * alpha - rhs;
  const double balance_resid = resid.head(n).cwiseAbs().maxCoeff();
  if (!(balance_resid <= 1e-9)) {
    throw Error(ErrorCode::BoundaryRankDeficient,
                "boundary balance residual " + std::to_string(balance_resid));
  }

  std::vector<Complex> lambdas(n);
  std::vector<Eigen::VectorXcd> u_vecs(n);
  std::vector<Complex> alphas(n);
  for (int k = 0; k < n; ++k) {
    lambdas[k] = spectrum[k].lam;
    u_vecs[k] = spectrum[k].u;
    alphas[k] = alpha(k);
  }
  StationaryDistribution dist =
      StationaryDistribution::make_spectral_tailed(n, {}, lambdas, u_vecs, alphas);
  check_nonnegative(dist);

  SpectralSolution sol;
  sol.method = SpectralMethod::exact;
  sol.interior = spectrum;
  auto [gamma, u_dom] = dominant_eigenpair(spectrum);
  sol.gamma = gamma;
  sol.u_dom = u_dom;
  sol.alphas = alphas;
  sol.boundary_balance_residual = balance_resid;
  return {std::move(sol), std::move(dist)};
}

SpectralResult solve_geometric(const QbdMatrices& m, double gamma,
                               const Eigen::VectorXd& u_dom) {
  const int n = m.n_phases();
  if (u_dom.size() != n) {
    throw Error(ErrorCode::EigenvectorNotPositive, "dominant eigenvector has wrong dimension");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::DominantNotReal,
                "geometric form needs gamma in (0, 1), got " + std::to_string(gamma));
  }
  Eigen::VectorXd u = u_dom / u_dom.sum();
  StationaryDistribution dist = StationaryDistribution::make_spectral_tailed(
      n, {}, {Complex(gamma, 0.0)}, {u.cast<Complex>()}, {Complex(1.0 - gamma, 0.0)});

  SpectralSolution sol;
  sol.method = SpectralMethod::geometric;
  sol.gamma = gamma;
  sol.u_dom = u;
  sol.alphas = {Complex(1.0 - gamma, 0.0)};
  return {std::move(sol), std::move(dist)};
}

SpectralResult solve_hybrid(const QbdMatrices& m, const std::vector<EigenPair>& spectrum,
                            int m_boundary) {
  const int n = m.n_phases();
  if (m_boundary < 1) {
    throw Error(ErrorCode::HybridSystemSingular, "m_boundary must be >= 1");
  }
  auto [gamma, u_dom] = dominant_eigenpair(spectrum);

  const Eigen::MatrixXd a1 = middle_coeff(m);
  Eigen::MatrixXd bound0 = m.a;
  bound0.diagonal() -= m.da + m.db;

  // Unknowns: v_0..v_{M-1} (n each) then alpha. Equations: balance for
  // levels 0..M-1, then normalization.
  const int mb = m_boundary;
  const int dim = mb * n + 1;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  auto tail_vec = [&](int level) -> Eigen::RowVectorXd {
    return std::pow(gamma, level) * u_dom.transpose();
  };

  for (int t = 0; t < mb; ++t) {
    const Eigen::MatrixXd& diag_block = (t == 0) ? bound0 : a1;
    for (int q = 0; q < n; ++q) {
      const int row = t * n + q;
      if (t >= 1) {
        for (int r = 0; r < n; ++r) sys(row, (t - 1) * n + r) += m.b(r, q);
      }
      for (int r = 0; r < n; ++r) sys(row, t * n + r) += diag_block(r, q);
      if (t + 1 <= mb - 1) {
        for (int r = 0; r < n; ++r) sys(row, (t + 1) * n + r) += m.c(r, q);
      } else {
        sys(row, dim - 1) += tail_vec(t + 1) * m.c.col(q);
      }
    }
  }
  for (int t = 0; t < mb; ++t) {
    for (int r = 0; r < n; ++r) sys(dim - 1, t * n + r) = 1.0;
  }
  sys(dim - 1, dim - 1) = u_dom.sum() * std::pow(gamma, mb) / (1.0 - gamma);
  rhs(dim - 1) = 1.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys);
  if (qr.rank() < dim) {
    throw Error(ErrorCode::HybridSystemSingular,
                "hybrid system rank " + std::to_string(qr.rank()) + " < " + std::to_string(dim));
  }
  const Eigen::VectorXd x = qr.solve(rhs);
  if ((sys * x - rhs).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::HybridSystemSingular, "hybrid solve residual too large");
  }

  std::vector<Eigen::VectorXd> boundary(mb);
  for (int t = 0; t < mb; ++t) boundary[t] = x.segment(t * n, n);
  const double alpha = x(dim - 1);

  // The sacrificed balance equations live at j = M; report their residual.
  Eigen::RowVectorXd sacrificed = boundary[mb - 1].transpose() * m.b +
                                  alpha * tail_vec(mb) * a1 + alpha * tail_vec(mb + 1) * m.c;
  const double j_m_residual = sacrificed.cwiseAbs().maxCoeff();

  StationaryDistribution dist = StationaryDistribution::make_spectral_tailed(
      n, boundary, {Complex(gamma, 0.0)}, {u_dom.cast<Complex>()}, {Complex(alpha, 0.0)});
  check_nonnegative(dist);

  SpectralSolution sol;
  sol.method = SpectralMethod::hybrid;
  sol.m_boundary = mb;
  sol.interior = spectrum;
  sol.gamma = gamma;
  sol.u_dom = u_dom;
  sol.alphas = {Complex(alpha, 0.0)};
  sol.boundary_levels = boundary;
  sol.boundary_balance_residual = j_m_residual;
  return {std::move(sol), std::move(dist)};
}

double mean_queue_length(const StationaryDistribution& dist) { return dist.mean_level(); }

}  // namespace tq
