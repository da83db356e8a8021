#include "tq/distribution.hpp"

#include <cmath>

namespace tq {

namespace {

using Complex = std::complex<double>;

// sum_{j>=m} x^j
Complex geom_tail(Complex x, int m) { return std::pow(x, m) / (1.0 - x); }

// sum_{j>=m} j x^j = x^m (m - (m-1) x) / (1-x)^2
Complex geom_tail_weighted(Complex x, int m) {
  const Complex one_minus = 1.0 - x;
  return std::pow(x, m) * (static_cast<double>(m) - static_cast<double>(m - 1) * x) /
         (one_minus * one_minus);
}

double clip_roundoff(double v) { return (v < 0.0 && v > -1e-12) ? 0.0 : v; }

}  // namespace

StationaryDistribution StationaryDistribution::make_spectral_tailed(
    int n_phases, std::vector<Eigen::VectorXd> boundary_levels, std::vector<Complex> lambdas,
    std::vector<Eigen::VectorXcd> u_vecs, std::vector<Complex> alphas) {
  StationaryDistribution d;
  d.kind_ = Kind::spectral_tailed;
  d.n_phases_ = n_phases;
  d.boundary_ = std::move(boundary_levels);
  d.lambdas_ = std::move(lambdas);
  d.u_vecs_ = std::move(u_vecs);
  d.alphas_ = std::move(alphas);
  return d;
}

StationaryDistribution StationaryDistribution::make_truncated(Eigen::MatrixXd joint) {
  StationaryDistribution d;
  d.kind_ = Kind::truncated;
  d.n_phases_ = static_cast<int>(joint.rows());
  d.table_ = std::move(joint);
  return d;
}

std::optional<int> StationaryDistribution::support_bound() const {
  if (kind_ != Kind::truncated) return std::nullopt;
  return static_cast<int>(table_.cols()) - 1;
}

double StationaryDistribution::p(int phase, int level) const {
  if (kind_ == Kind::truncated) {
    if (level >= table_.cols()) return 0.0;
    return clip_roundoff(table_(phase, level));
  }
  if (level < tail_start()) return clip_roundoff(boundary_[level](phase));
  Complex acc = 0.0;
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    acc += alphas_[k] * u_vecs_[k](phase) * std::pow(lambdas_[k], level);
  }
  return clip_roundoff(acc.real());
}

double StationaryDistribution::level_marginal(int level) const {
  if (kind_ == Kind::truncated) {
    if (level >= table_.cols()) return 0.0;
    return clip_roundoff(table_.col(level).sum());
  }
  if (level < tail_start()) return clip_roundoff(boundary_[level].sum());
  Complex acc = 0.0;
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    acc += alphas_[k] * u_vecs_[k].sum() * std::pow(lambdas_[k], level);
  }
  return clip_roundoff(acc.real());
}

Eigen::VectorXd StationaryDistribution::phase_marginal() const {
  if (kind_ == Kind::truncated) return table_.rowwise().sum().cwiseMax(0.0);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n_phases_);
  for (const auto& v : boundary_) acc += v.cast<Complex>();
  const int m = tail_start();
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    acc += alphas_[k] * geom_tail(lambdas_[k], m) * u_vecs_[k];
  }
  return acc.real().cwiseMax(0.0);
}

double StationaryDistribution::total_mass() const {
  if (kind_ == Kind::truncated) return table_.sum();
  Complex acc = 0.0;
  for (const auto& v : boundary_) acc += v.sum();
  const int m = tail_start();
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    acc += alphas_[k] * u_vecs_[k].sum() * geom_tail(lambdas_[k], m);
  }
  return acc.real();
}

double StationaryDistribution::mean_level() const {
  if (kind_ == Kind::truncated) {
    double acc = 0.0;
    for (int j = 0; j < table_.cols(); ++j) acc += j * table_.col(j).sum();
    return acc;
  }
  Complex acc = 0.0;
  for (std::size_t j = 0; j < boundary_.size(); ++j) {
    acc += static_cast<double>(j) * boundary_[j].sum();
  }
  const int m = tail_start();
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    acc += alphas_[k] * u_vecs_[k].sum() * geom_tail_weighted(lambdas_[k], m);
  }
  // Conjugate eigenvalue pairs carry conjugate coefficients, so the imaginary
  // parts cancel; anything sizable left over indicates a broken expansion.
  if (std::abs(acc.imag()) > 1e-10) {
    throw Error(ErrorCode::NegativeProbability,
                "mean level has non-vanishing imaginary part " + std::to_string(acc.imag()));
  }
  return acc.real();
}

}  // namespace tq
