#include "tq/model.hpp"

#include <cmath>
#include <string>

#include "tq/linalg.hpp"

namespace tq {

TandemParams validate_params(const TandemParams& raw) {
  auto bad_rate = [](const char* name, double v) {
    return Error(ErrorCode::NonPositiveRate,
                 std::string(name) + " must be strictly positive, got " + std::to_string(v));
  };
  if (!(raw.sigma > 0.0)) throw bad_rate("sigma", raw.sigma);
  if (!(raw.mu1 > 0.0)) throw bad_rate("mu1", raw.mu1);
  if (!(raw.mu2 > 0.0)) throw bad_rate("mu2", raw.mu2);
  if (!(raw.p_fb >= 0.0 && raw.p_fb < 1.0)) {
    throw Error(ErrorCode::FeedbackOutOfRange,
                "p_fb must lie in [0, 1), got " + std::to_string(raw.p_fb));
  }
  if (raw.n_threshold < 1) {
    throw Error(ErrorCode::BadThreshold,
                "n_threshold must be >= 1, got " + std::to_string(raw.n_threshold));
  }
  if (raw.k_capacity && *raw.k_capacity < 1) {
    throw Error(ErrorCode::BadCapacity,
                "k_capacity must be >= 1, got " + std::to_string(*raw.k_capacity));
  }
  return raw;
}

QbdMatrices build_qbd_matrices(const TandemParams& params) {
  const TandemParams p = validate_params(params);
  if (p.k_capacity) {
    throw Error(ErrorCode::BadCapacity,
                "QBD matrices describe the infinite-buffer model; use the truncated "
                "generator for finite k_capacity");
  }
  const int n = p.n_threshold + 1;
  QbdMatrices m;
  m.a = Eigen::MatrixXd::Zero(n, n);
  m.b = Eigen::MatrixXd::Zero(n, n);
  m.c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m.b(i, i) = p.sigma;
    if (i >= 1) {
      m.a(i, i - 1) = p.mu2 * (1.0 - p.p_fb);  // departure from the network
      m.b(i, i - 1) = p.mu2 * p.p_fb;          // feedback to queue 1
    }
    if (i < n - 1) m.c(i, i + 1) = p.mu1;  // station-1 completion feeds station 2
  }
  m.da = m.a.rowwise().sum();
  m.db = m.b.rowwise().sum();
  m.dc = m.c.rowwise().sum();
  return m;
}

double generator_row_check(const QbdMatrices& m, LevelClass level_class) {
  // Interior rows: out-diagonal is -(da+db+dc); level 0 has no downward class.
  Eigen::VectorXd row_sums = m.a.rowwise().sum() + m.b.rowwise().sum() - m.da - m.db;
  if (level_class == LevelClass::interior) {
    row_sums += m.c.rowwise().sum() - m.dc;
  }
  return row_sums.cwiseAbs().maxCoeff();
}

StabilityReport stability_report(const QbdMatrices& m) {
  const int n = m.n_phases();
  Eigen::MatrixXd phase_gen = m.a + m.b + m.c;
  phase_gen.diagonal().setZero();  // drop self-loops (the sigma diagonal of b)
  for (int i = 0; i < n; ++i) phase_gen(i, i) = -phase_gen.row(i).sum();

  StabilityReport rep;
  rep.phase_stationary = stationary_of_generator(phase_gen, ErrorCode::SingularPhaseProcess);
  rep.drift_up = rep.phase_stationary.dot(m.db);
  rep.drift_down = rep.phase_stationary.dot(m.dc);
  const double tol = 1e-12 * (rep.drift_up + rep.drift_down);
  rep.is_stable = (rep.drift_down - rep.drift_up) > tol;
  return rep;
}

StabilityReport stability_report(const TandemParams& params) {
  return stability_report(build_qbd_matrices(params));
}

}  // namespace tq
