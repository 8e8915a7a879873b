#pragma once
// Path simulation and empirical estimators. Two construction routes: the
// disintegration route draws the mixing parameter per path and then runs the
// kernel at that parameter; the direct route runs a fixed-rate exponential
// clock with no mixing draw at all, giving a genuinely distinct code path for
// distributional-identity tests.
//
// Determinism: path i consumes only streams keyed by (master_seed, i), so a
// batch is a pure function of the plan. Workers claim fixed-size blocks of
// the path index range and write into per-block buffers that are merged in
// block order, which keeps batches byte-identical across thread counts.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mppv/core.hpp"
#include "mppv/errors.hpp"
#include "mppv/kernels.hpp"
#include "mppv/mixing.hpp"
#include "mppv/rng.hpp"
#include "mppv/stats.hpp"

namespace mppv {

enum class SimRoute { kDisintegration, kDirectPoisson };

struct SimulationPlan {
  SimRoute route = SimRoute::kDisintegration;
  MixingLaw mixing = MixingLaw::degenerate(1.0);
  InterarrivalKernel kernel = InterarrivalKernel::exponential(identity_transform());
  double direct_rate = 1.0;  // direct route only
  double horizon = 1.0;
  std::uint64_t num_paths = 1;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw DomainError("SimulationPlan: horizon must be finite and positive");
    }
    if (num_paths < 1) throw DomainError("SimulationPlan: num_paths must be >= 1");
    if (route == SimRoute::kDirectPoisson) {
      if (!(direct_rate > 0.0) || !std::isfinite(direct_rate)) {
        throw DomainError("SimulationPlan: direct route requires a positive finite rate");
      }
    } else {
      // The parameter draw may live anywhere (a normal base with an
      // exponential rate map is legitimate); positivity is a property of the
      // rate, which rate_of enforces on every draw. Atomic laws can be
      // checked exhaustively up front.
      if (const auto* d = mixing.get_if<DegenerateLaw>()) {
        kernel.rate_of(d->value);
      } else if (const auto* d = mixing.get_if<DiscreteLaw>()) {
        for (const auto& atom : d->atoms) kernel.rate_of(atom.first);
      }
    }
  }
};

inline constexpr std::uint64_t kExplosionGuard = 10'000'000;

struct PathSample {
  CountingPath path;
  double theta;  // mixing draw; equals the fixed rate on the direct route
};

namespace detail {

// Events for one path appended to `events`; returns the theta used.
template <class Sink>
double generate_events(const SimulationPlan& plan, std::uint64_t path_index, Sink&& emit) {
  double theta;
  if (plan.route == SimRoute::kDisintegration) {
    SplitStream theta_stream(plan.master_seed, path_index, StreamPurpose::kMixingDraw);
    theta = plan.mixing.sample(theta_stream);
  } else {
    theta = plan.direct_rate;
  }

  SplitStream arrivals(plan.master_seed, path_index, StreamPurpose::kArrivals);
  double t = 0.0;
  std::uint64_t count = 0;
  for (;;) {
    const double w = plan.route == SimRoute::kDisintegration
                         ? plan.kernel.sample_interarrival(theta, arrivals)
                         : arrivals.exponential(plan.direct_rate);
    t += w;
    if (t > plan.horizon) break;
    emit(t);
    if (++count > kExplosionGuard) {
      throw NumericError("sample_path: explosion guard tripped at " +
                         std::to_string(kExplosionGuard) + " events (path " +
                         std::to_string(path_index) + ")");
    }
  }
  return theta;
}

}  // namespace detail

inline PathSample sample_path(const SimulationPlan& plan, std::uint64_t path_index) {
  plan.validate();
  if (path_index >= plan.num_paths) {
    throw DomainError("sample_path: path index beyond the plan's num_paths");
  }
  std::vector<double> events;
  const double theta =
      detail::generate_events(plan, path_index, [&](double t) { events.push_back(t); });
  return PathSample{CountingPath(plan.horizon, std::move(events)), theta};
}

// A batch holds all paths of a plan in flat arrays (offsets into one event
// buffer), which keeps million-path batteries cheap to scan.
class PathBatch {
 public:
  PathBatch(SimulationPlan plan, std::vector<double> events,
            std::vector<std::uint64_t> offsets, std::vector<double> thetas)
      : plan_(std::move(plan)),
        events_(std::move(events)),
        offsets_(std::move(offsets)),
        thetas_(std::move(thetas)) {}

  const SimulationPlan& plan() const { return plan_; }
  std::uint64_t size() const { return thetas_.size(); }
  double theta_of(std::uint64_t i) const { return thetas_[i]; }

  std::span<const double> events_of(std::uint64_t i) const {
    return std::span<const double>(events_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  CountingPath path_of(std::uint64_t i) const {
    const auto ev = events_of(i);
    return CountingPath(plan_.horizon, std::vector<double>(ev.begin(), ev.end()));
  }

  // N_t within path i, by binary search over its (sorted) events.
  std::int64_t count_at(std::uint64_t i, double t) const {
    if (!(t >= 0.0) || t > plan_.horizon) {
      throw DomainError("PathBatch::count_at: query time outside [0, horizon]");
    }
    const auto ev = events_of(i);
    return std::upper_bound(ev.begin(), ev.end(), t) - ev.begin();
  }

 private:
  SimulationPlan plan_;
  std::vector<double> events_;
  std::vector<std::uint64_t> offsets_;  // size() + 1 entries
  std::vector<double> thetas_;
};

inline PathBatch generate_paths(const SimulationPlan& plan, unsigned threads = 1) {
  plan.validate();
  if (threads == 0) throw DomainError("generate_paths: threads must be >= 1");

  // Fixed block size independent of the thread count: the merge order below,
  // not the scheduling, determines the batch layout.
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t num_blocks = (plan.num_paths + kBlock - 1) / kBlock;

  struct BlockOut {
    std::vector<double> events;
    std::vector<std::uint32_t> counts;
    std::vector<double> thetas;
  };
  std::vector<BlockOut> blocks(num_blocks);

  std::atomic<std::uint64_t> next_block{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= num_blocks || failed.load()) break;
      const std::uint64_t begin = b * kBlock;
      const std::uint64_t end = std::min(begin + kBlock, plan.num_paths);
      BlockOut& out = blocks[b];
      out.counts.reserve(end - begin);
      out.thetas.reserve(end - begin);
      try {
        for (std::uint64_t i = begin; i < end; ++i) {
          const std::size_t before = out.events.size();
          const double theta =
              detail::generate_events(plan, i, [&](double t) { out.events.push_back(t); });
          out.counts.push_back(static_cast<std::uint32_t>(out.events.size() - before));
          out.thetas.push_back(theta);
        }
      } catch (const std::exception& e) {
        failed.store(true);
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure.empty()) failure = e.what();
        break;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw NumericError("generate_paths: " + failure);

  std::uint64_t total_events = 0;
  for (const auto& b : blocks) total_events += b.events.size();

  std::vector<double> events;
  events.reserve(total_events);
  std::vector<std::uint64_t> offsets;
  offsets.reserve(plan.num_paths + 1);
  std::vector<double> thetas;
  thetas.reserve(plan.num_paths);
  offsets.push_back(0);
  for (const auto& b : blocks) {
    events.insert(events.end(), b.events.begin(), b.events.end());
    for (std::uint32_t c : b.counts) offsets.push_back(offsets.back() + c);
    thetas.insert(thetas.end(), b.thetas.begin(), b.thetas.end());
  }
  return PathBatch(plan, std::move(events), std::move(offsets), std::move(thetas));
}

struct EmpiricalEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t num_paths = 0;

  // z-score of the estimate against an exact reference, using the exact
  // value's binomial standard error (stable even when the empirical count
  // is 0).
  double z_against(double exact) const {
    const double se =
        std::sqrt(exact * (1.0 - exact) / static_cast<double>(num_paths));
    if (!(se > 0.0)) return value == exact ? 0.0 : std::numeric_limits<double>::infinity();
    return (value - exact) / se;
  }
};

// Fraction of paths whose increments over the query grid match exactly.
inline EmpiricalEstimate empirical_fdd(const PathBatch& batch, const FddQuery& q) {
  if (q.times.back() > batch.plan().horizon) {
    throw DomainError("empirical_fdd: query time beyond the simulated horizon");
  }
  std::uint64_t hits = 0;
  const std::uint64_t n = batch.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::int64_t prev = 0;
    bool match = true;
    for (std::size_t j = 0; j < q.times.size() && match; ++j) {
      const std::int64_t c = batch.count_at(i, q.times[j]);
      match = (c - prev == q.increments[j]);
      prev = c;
    }
    hits += match ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return EmpiricalEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

// Fraction of paths with W_k <= w_k for every k. Decidable from a truncated
// path only when the horizon covers sum(w): if all W_k are small enough, the
// r-th event lands before the horizon; otherwise some observed prefix
// already violates the event.
inline EmpiricalEstimate empirical_joint_interarrival_cdf(const PathBatch& batch,
                                                          std::span<const double> w) {
  if (w.empty()) throw DomainError("empirical_joint_interarrival_cdf: empty w");
  double total = 0.0;
  for (double wk : w) {
    if (!(wk > 0.0)) throw DomainError("empirical_joint_interarrival_cdf: w_k must be > 0");
    total += wk;
  }
  if (total > batch.plan().horizon) {
    throw DomainError(
        "empirical_joint_interarrival_cdf: horizon " + std::to_string(batch.plan().horizon) +
        " cannot decide the event, needs >= sum(w) = " + std::to_string(total));
  }
  std::uint64_t hits = 0;
  const std::uint64_t n = batch.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto ev = batch.events_of(i);
    if (ev.size() < w.size()) continue;  // some event past horizon >= sum(w): a miss
    bool all = true;
    double prev = 0.0;
    for (std::size_t k = 0; k < w.size() && all; ++k) {
      all = (ev[k] - prev <= w[k]);
      prev = ev[k];
    }
    hits += all ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return EmpiricalEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

// First `per_path` interarrivals of each path, with the parameter draw that
// produced them. Sampled without any horizon: stopping at a time bound and
// keeping only paths that completed enough events would condition the sample
// on T_m <= horizon and tilt the kept interarrivals short, which shows up as
// a systematic bias in the transform checks once enough of them are pooled.
// Stream keying matches generate_paths, so path i is a pure function of
// (master_seed, i) here too.
struct InterarrivalBatch {
  std::vector<double> thetas;
  std::vector<double> interarrivals;  // per_path entries per path, row-major
  int per_path = 0;

  std::uint64_t size() const { return thetas.size(); }
  std::span<const double> interarrivals_of(std::uint64_t i) const {
    return std::span<const double>(interarrivals)
        .subspan(i * static_cast<std::uint64_t>(per_path), static_cast<std::size_t>(per_path));
  }
};

inline InterarrivalBatch sample_first_interarrivals(const MixingLaw& mixing,
                                                    const InterarrivalKernel& kernel,
                                                    std::uint64_t num_paths,
                                                    std::uint64_t master_seed, int per_path) {
  if (num_paths < 1) throw DomainError("sample_first_interarrivals: num_paths must be >= 1");
  if (per_path < 1) throw DomainError("sample_first_interarrivals: per_path must be >= 1");
  if (const auto* d = mixing.get_if<DegenerateLaw>()) {
    kernel.rate_of(d->value);
  } else if (const auto* d = mixing.get_if<DiscreteLaw>()) {
    for (const auto& atom : d->atoms) kernel.rate_of(atom.first);
  }

  InterarrivalBatch batch;
  batch.per_path = per_path;
  batch.thetas.reserve(num_paths);
  batch.interarrivals.reserve(num_paths * static_cast<std::uint64_t>(per_path));
  for (std::uint64_t i = 0; i < num_paths; ++i) {
    SplitStream theta_stream(master_seed, i, StreamPurpose::kMixingDraw);
    const double theta = mixing.sample(theta_stream);
    batch.thetas.push_back(theta);
    SplitStream arrivals(master_seed, i, StreamPurpose::kArrivals);
    for (int k = 0; k < per_path; ++k) {
      batch.interarrivals.push_back(kernel.sample_interarrival(theta, arrivals));
    }
  }
  return batch;
}

struct ConditionalPoissonReport {
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  SerialCorrelation serial;
  ChiSquareResult uniform_bins;  // chi-square of the pooled PITs against flat bins
  std::uint64_t pit_count = 0;
};

// Probability integral transform of each path's interarrivals through the
// *claimed* conditional law at the path's own theta. Under a correct
// disintegration the pooled PITs are i.i.d. uniform; the claimed kernel may
// deliberately differ from the generating one to act as a misspecification
// control.
inline ConditionalPoissonReport conditional_poisson_check(const InterarrivalBatch& batch,
                                                          const InterarrivalKernel& claimed,
                                                          int num_bins = 16) {
  if (num_bins < 2) throw DomainError("conditional_poisson_check: num_bins must be >= 2");
  if (batch.size() == 0) throw DomainError("conditional_poisson_check: empty batch");

  ConditionalPoissonReport report;
  std::vector<double> pits;
  std::vector<std::pair<double, double>> lag_pairs;
  pits.reserve(batch.size() * static_cast<std::size_t>(batch.per_path));

  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    const double theta = batch.thetas[i];
    double prev_u = -1.0;
    for (double w : batch.interarrivals_of(i)) {
      const double u = claimed.cdf(theta, w);
      pits.push_back(u);
      if (prev_u >= 0.0) lag_pairs.emplace_back(prev_u, u);
      prev_u = u;
    }
  }

  report.pit_count = pits.size();
  std::vector<std::int64_t> bins(static_cast<std::size_t>(num_bins), 0);
  std::vector<double> expected_bins(static_cast<std::size_t>(num_bins), 0.0);
  for (double u : pits) {
    auto b = static_cast<std::size_t>(u * num_bins);
    if (b >= bins.size()) b = bins.size() - 1;
    ++bins[b];
  }
  // Chi-square against the flat profile, reusing the two-sample machinery
  // with an exact expected histogram is overkill; do it directly.
  {
    const double expected = static_cast<double>(pits.size()) / num_bins;
    double stat = 0.0;
    for (std::int64_t c : bins) {
      stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) /
              expected;
    }
    report.uniform_bins.statistic = stat;
    report.uniform_bins.df = num_bins - 1.0;
    report.uniform_bins.p_value = chi_square_sf(report.uniform_bins.df, stat);
  }

  std::sort(pits.begin(), pits.end());
  report.ks_statistic = ks_statistic_sorted_uniform(pits);
  report.ks_p_value = ks_p_value(pits.size(), report.ks_statistic);
  if (lag_pairs.size() >= 3) {
    report.serial = serial_correlation(lag_pairs);
  }
  return report;
}

}  // namespace mppv
