#include "tq/sim.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tq {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// mt19937_64 bits mapped to doubles by hand so results do not depend on the
/// standard library's distribution implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 gen_;
};

struct BatchAccumulator {
  double time = 0.0;
  double j_dt = 0.0;
  double i_dt = 0.0;
  double blocked_dt = 0.0;
  std::int64_t exits = 0;
  std::int64_t losses = 0;
};

Estimate batch_means(const std::vector<double>& xs, double t_quantile) {
  const int n = static_cast<int>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1);
  return Estimate{mean, t_quantile * std::sqrt(var / n)};
}

}  // namespace

SimEstimate run_sim(const TandemParams& params, const SimConfig& cfg) {
  const TandemParams p = validate_params(params);
  if (cfg.warmup_events < 0 || cfg.total_events <= 0) {
    throw Error(ErrorCode::ConfigInvalid, "event counts must be positive");
  }
  if (cfg.total_events <= cfg.warmup_events) {
    throw Error(ErrorCode::ConfigInvalid, "total_events must exceed warmup_events");
  }
  if (cfg.n_batches < 10) {
    throw Error(ErrorCode::ConfigInvalid,
                "n_batches must be >= 10, got " + std::to_string(cfg.n_batches));
  }
  const std::int64_t measured = cfg.total_events - cfg.warmup_events;
  if (measured < cfg.n_batches) {
    throw Error(ErrorCode::ConfigInvalid, "fewer post-warmup events than batches");
  }

  std::uint64_t seed_state = cfg.seed;
  Stream arrival_clock(splitmix64(seed_state));
  Stream s1_clock(splitmix64(seed_state));
  Stream s2_clock(splitmix64(seed_state));
  Stream routing(splitmix64(seed_state));

  const int n = p.n_threshold;
  const bool finite = p.k_capacity.has_value();
  const int cap = finite ? *p.k_capacity : 0;
  const double inf = std::numeric_limits<double>::infinity();

  int i = 0;  // station-2 occupancy (phase)
  int j = 0;  // station-1 occupancy (level)
  SimEstimate est;

  const std::int64_t batch_events = measured / cfg.n_batches;
  std::vector<BatchAccumulator> batches(cfg.n_batches);

  for (std::int64_t ev = 0; ev < cfg.total_events; ++ev) {
    const double t_arrival = arrival_clock.exponential(p.sigma);
    const double t_s1 = (j >= 1 && i < n) ? s1_clock.exponential(p.mu1) : inf;
    const double t_s2 = (i >= 1) ? s2_clock.exponential(p.mu2) : inf;

    const double dt = std::min(t_arrival, std::min(t_s1, t_s2));
    est.sim_time += dt;
    const std::int64_t measured_idx = ev - cfg.warmup_events;
    BatchAccumulator* acc = nullptr;
    if (measured_idx >= 0) {
      acc = &batches[std::min<std::int64_t>(measured_idx / batch_events, cfg.n_batches - 1)];
      acc->time += dt;
      acc->j_dt += j * dt;
      acc->i_dt += i * dt;
      if (i == n) acc->blocked_dt += dt;
    }

    if (t_arrival <= t_s1 && t_arrival <= t_s2) {
      ++est.external_arrivals;
      if (finite && j == cap) {
        ++est.arrival_losses;
        if (acc) ++acc->losses;
      } else {
        ++est.accepted_arrivals;
        ++j;
      }
    } else if (t_s1 <= t_s2) {
      --j;
      ++i;
    } else {
      --i;
      if (routing.uniform() < p.p_fb) {
        if (finite && j == cap) {
          ++est.feedback_losses;
          if (acc) ++acc->losses;
        } else {
          ++j;
        }
      } else {
        ++est.exits;
        if (acc) ++acc->exits;
      }
    }
  }

  est.events = cfg.total_events;
  // Every accepted job must be accounted for: it left through the exit, was
  // dropped on feedback, or is still in the system.
  if (est.accepted_arrivals != est.exits + est.feedback_losses + i + j ||
      est.external_arrivals != est.accepted_arrivals + est.arrival_losses) {
    throw Error(ErrorCode::ConfigInvalid, "event accounting mismatch (internal bug)");
  }

  const boost::math::students_t t_dist(cfg.n_batches - 1);
  const double t_q = boost::math::quantile(t_dist, 0.975);
  std::vector<double> mql1(cfg.n_batches), mql2(cfg.n_batches), block(cfg.n_batches),
      thr(cfg.n_batches), loss(cfg.n_batches);
  for (int b = 0; b < cfg.n_batches; ++b) {
    const BatchAccumulator& acc = batches[b];
    est.measured_time += acc.time;
    mql1[b] = acc.j_dt / acc.time;
    mql2[b] = acc.i_dt / acc.time;
    block[b] = acc.blocked_dt / acc.time;
    thr[b] = acc.exits / acc.time;
    loss[b] = acc.losses / acc.time;
  }
  est.mql1 = batch_means(mql1, t_q);
  est.mql2 = batch_means(mql2, t_q);
  est.blocking_prob = batch_means(block, t_q);
  est.throughput = batch_means(thr, t_q);
  est.loss_rate = batch_means(loss, t_q);
  return est;
}

std::vector<SimEstimate> run_many(const TandemParams& params, const SimConfig& cfg,
                                  int n_runs, int threads) {
  std::vector<std::uint64_t> seeds(n_runs);
  std::uint64_t state = cfg.seed;
  for (int r = 0; r < n_runs; ++r) seeds[r] = splitmix64(state);

  std::vector<SimEstimate> out(n_runs);
  std::exception_ptr failure;
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (int r = 0; r < n_runs; ++r) {
    try {
      SimConfig run_cfg = cfg;
      run_cfg.seed = seeds[r];
      out[r] = run_sim(params, run_cfg);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (threads == 1) { /* serial path exercised above when OpenMP is absent */
  }
  return out;
}

}  // namespace tq
