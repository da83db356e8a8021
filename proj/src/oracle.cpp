#include "tq/oracle.hpp"

#include <cmath>
#include <string>

#include "tq/linalg.hpp"

namespace tq {

TruncatedGenerator build_truncated_generator(const TandemParams& params, int j_bound,
                                             TruncationMode mode) {
  const TandemParams p = validate_params(params);
  if (j_bound < 1) {
    throw Error(ErrorCode::BadCapacity, "j_bound must be >= 1, got " + std::to_string(j_bound));
  }
  if (mode == TruncationMode::finite_capacity) {
    if (!p.k_capacity || *p.k_capacity != j_bound) {
      throw Error(ErrorCode::BadCapacity,
                  "finite_capacity mode requires k_capacity == j_bound");
    }
  } else if (p.k_capacity) {
    throw Error(ErrorCode::BadCapacity, "truncated_infinite mode requires an infinite buffer");
  }

  TruncatedGenerator g;
  g.n_phases = p.n_threshold + 1;
  g.j_bound = j_bound;
  g.mode = mode;
  g.params = p;
  g.rates.reserve(static_cast<std::size_t>(g.n_states()) * 4);

  const int n = p.n_threshold;
  for (int j = 0; j <= j_bound; ++j) {
    for (int i = 0; i <= n; ++i) {
      const int from = g.state_index(i, j);
      // External arrival; at the top level the job is lost / suppressed and
      // the state does not change, so no transition is emitted.
      if (j < j_bound) g.rates.push_back({from, g.state_index(i, j + 1), p.sigma});
      // Station-1 completion, blocked while i == N.
      if (j >= 1 && i < n) g.rates.push_back({from, g.state_index(i + 1, j - 1), p.mu1});
      if (i >= 1) {
        // Station-2 completion: departure branch...
        if (p.p_fb < 1.0) {
          g.rates.push_back({from, g.state_index(i - 1, j), p.mu2 * (1.0 - p.p_fb)});
        }
        // ...and feedback branch; a feedback landing past the top level leaves
        // the network instead.
        if (p.p_fb > 0.0) {
          const int to = (j < j_bound) ? g.state_index(i - 1, j + 1) : g.state_index(i - 1, j);
          g.rates.push_back({from, to, p.mu2 * p.p_fb});
        }
      }
    }
  }
  return g;
}

namespace {

struct LevelBlocks {
  std::vector<Eigen::MatrixXd> same;  // within-level rates
  std::vector<Eigen::MatrixXd> up;    // level j -> j+1
  std::vector<Eigen::MatrixXd> down;  // level j -> j-1
  std::vector<Eigen::VectorXd> out;   // total outflow per phase
};

LevelBlocks split_into_levels(const TruncatedGenerator& g) {
  const int n = g.n_phases;
  const int levels = g.j_bound + 1;
  LevelBlocks lb;
  lb.same.assign(levels, Eigen::MatrixXd::Zero(n, n));
  lb.up.assign(levels, Eigen::MatrixXd::Zero(n, n));
  lb.down.assign(levels, Eigen::MatrixXd::Zero(n, n));
  lb.out.assign(levels, Eigen::VectorXd::Zero(n));
  for (const RateTriplet& t : g.rates) {
    const int j_from = g.level_of(t.from);
    const int j_to = g.level_of(t.to);
    const int i_from = g.phase_of(t.from);
    const int i_to = g.phase_of(t.to);
    const int dj = j_to - j_from;
    if (dj == 0) {
      lb.same[j_from](i_from, i_to) += t.rate;
    } else if (dj == 1) {
      lb.up[j_from](i_from, i_to) += t.rate;
    } else if (dj == -1) {
      lb.down[j_from](i_from, i_to) += t.rate;
    } else {
      throw Error(ErrorCode::SingularGenerator, "transition skips more than one level");
    }
    lb.out[j_from](i_from) += t.rate;
  }
  return lb;
}

}  // namespace

StationaryDistribution solve_stationary(const TruncatedGenerator& g) {
  const int n = g.n_phases;
  const int top = g.j_bound;
  LevelBlocks lb = split_into_levels(g);

  // Censor levels from the top down: W_j is the negated generator of the
  // censored chain restricted to level j, and pi_j = pi_{j-1} * S_j with
  // S_j = up_{j-1} * W_j^{-1} >= 0 elementwise.
  std::vector<Eigen::MatrixXd> step(top + 1);
  Eigen::MatrixXd w = Eigen::MatrixXd(lb.out[top].asDiagonal()) - lb.same[top];
  for (int j = top; j >= 1; --j) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(w.transpose());
    step[j] = lu.solve(lb.up[j - 1].transpose()).transpose();
    if (!step[j].allFinite()) {
      throw Error(ErrorCode::SingularGenerator,
                  "level censoring failed at level " + std::to_string(j));
    }
    if (j >= 2) {
      w = Eigen::MatrixXd(lb.out[j - 1].asDiagonal()) - lb.same[j - 1] - step[j] * lb.down[j];
    }
  }

  Eigen::MatrixXd censored0 =
      lb.same[0] - Eigen::MatrixXd(lb.out[0].asDiagonal()) + step[1] * lb.down[1];
  Eigen::VectorXd pi0 = stationary_of_generator(censored0, ErrorCode::SingularGenerator);

  Eigen::MatrixXd table(n, top + 1);
  table.col(0) = pi0;
  for (int j = 1; j <= top; ++j) {
    table.col(j) = (table.col(j - 1).transpose() * step[j]).transpose();
  }
  table = table.cwiseMax(0.0);
  const double mass = table.sum();
  if (!(mass > 0.0) || !table.allFinite()) {
    throw Error(ErrorCode::SingularGenerator, "stationary mass is not positive and finite");
  }
  table /= mass;

  // Verify against the raw rate list.
  Eigen::VectorXd residual = Eigen::VectorXd::Zero(g.n_states());
  double max_rate = 0.0;
  auto pi_at = [&](int s) { return table(g.phase_of(s), g.level_of(s)); };
  for (const RateTriplet& t : g.rates) {
    residual(t.to) += pi_at(t.from) * t.rate;
    residual(t.from) -= pi_at(t.from) * t.rate;
    max_rate = std::max(max_rate, t.rate);
  }
  const double resid = residual.cwiseAbs().maxCoeff();
  if (resid > 1e-11 * max_rate) {
    throw Error(ErrorCode::SingularGenerator,
                "balance residual " + std::to_string(resid) + " exceeds tolerance");
  }
  return StationaryDistribution::make_truncated(std::move(table));
}

double tail_ratio_estimate(const StationaryDistribution& dist, int j_lo, int j_hi) {
  if (dist.kind() != StationaryDistribution::Kind::truncated || !dist.support_bound()) {
    throw Error(ErrorCode::InsufficientMass, "tail ratio needs a truncated distribution");
  }
  const int bound = *dist.support_bound();
  if (!(0 <= j_lo && j_lo < j_hi && j_hi < bound)) {
    throw Error(ErrorCode::InsufficientMass, "invalid tail window [" + std::to_string(j_lo) +
                                                 ", " + std::to_string(j_hi) + "]");
  }
  // Geometric mean of successive ratios telescopes to the window endpoints.
  double log_sum = 0.0;
  double prev = dist.level_marginal(j_lo);
  for (int j = j_lo + 1; j <= j_hi + 1; ++j) {
    const double cur = dist.level_marginal(j);
    if (prev < 1e-300 || cur < 1e-300) {
      throw Error(ErrorCode::InsufficientMass,
                  "level marginal underflows inside the tail window");
    }
    log_sum += std::log(cur) - std::log(prev);
    prev = cur;
  }
  return std::exp(log_sum / (j_hi + 1 - j_lo));
}

PerformanceMetrics finite_buffer_metrics(const TandemParams& params,
                                         const StationaryDistribution& dist) {
  if (!params.k_capacity) {
    throw Error(ErrorCode::BadCapacity, "finite_buffer_metrics needs k_capacity");
  }
  if (!dist.support_bound() || *dist.support_bound() != *params.k_capacity) {
    throw Error(ErrorCode::BadCapacity,
                "distribution support does not match the buffer capacity");
  }
  return compute_metrics(params, dist);
}

}  // namespace tq
