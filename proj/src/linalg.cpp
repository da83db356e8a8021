#include "tq/linalg.hpp"

#include <cmath>

namespace tq {

Eigen::VectorXd stationary_of_generator(const Eigen::MatrixXd& gen, ErrorCode on_singular) {
  const Eigen::Index n = gen.rows();
  if (n == 0 || gen.cols() != n) throw Error(on_singular, "generator must be square and nonempty");
  if (n == 1) return Eigen::VectorXd::Ones(1);

  // pi * gen = 0  <=>  gen^T * pi^T = 0; swap the last equation for sum(pi) = 1.
  Eigen::MatrixXd sys = gen.transpose();
  sys.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  const double scale = gen.cwiseAbs().maxCoeff();
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw Error(on_singular, "balance system is rank deficient");
  Eigen::VectorXd pi = lu.solve(rhs);

  const double resid = (gen.transpose() * pi).cwiseAbs().maxCoeff();
  if (!pi.allFinite() || resid > 1e-10 * std::max(1.0, scale)) {
    throw Error(on_singular, "stationary solve residual too large");
  }
  // Roundoff may leave tiny negatives on a valid solution; anything sizable is a
  // reducibility symptom.
  if (pi.minCoeff() < -1e-9) throw Error(on_singular, "stationary vector has negative entries");
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

}  // namespace tq
