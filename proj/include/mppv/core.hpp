#pragma once
// Counting-path value types and finite-dimensional queries. A CountingPath is
// an immutable record of event times on (0, horizon]; the induced counting
// process is right-continuous, so an event at t is included in the count at t
// and increments are taken over half-open cells (t_{j-1}, t_j].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mppv/errors.hpp"

namespace mppv {

class CountingPath {
 public:
  CountingPath(double horizon, std::vector<double> events)
      : horizon_(horizon), events_(std::move(events)) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
      throw DomainError("CountingPath: horizon must be finite and positive");
    }
    double prev = 0.0;
    for (double e : events_) {
      if (!std::isfinite(e)) throw DomainError("CountingPath: non-finite event time");
      if (e <= prev) {
        throw DomainError(prev == e
                              ? "CountingPath: tied event times"
                              : "CountingPath: event times must be strictly increasing and > 0");
      }
      prev = e;
    }
    if (!events_.empty() && events_.back() > horizon_) {
      throw DomainError("CountingPath: event beyond the horizon");
    }
  }

  double horizon() const { return horizon_; }
  std::span<const double> events() const { return events_; }
  std::int64_t total_events() const { return static_cast<std::int64_t>(events_.size()); }

  // N_t: number of events in (0, t]. Defined for t in [0, horizon].
  std::int64_t count_at(double t) const {
    if (!(t >= 0.0)) throw DomainError("count_at: requires t >= 0");
    if (t > horizon_) {
      throw DomainError("count_at: query time " + std::to_string(t) +
                        " beyond horizon " + std::to_string(horizon_));
    }
    const auto it = std::upper_bound(events_.begin(), events_.end(), t);
    return static_cast<std::int64_t>(it - events_.begin());
  }

 private:
  double horizon_;
  std::vector<double> events_;
};

// A finite-dimensional query: increment counts over the cells (t_{j-1}, t_j]
// of a strictly increasing grid, with t_0 = 0.
struct FddQuery {
  std::vector<double> times;
  std::vector<std::int64_t> increments;

  FddQuery(std::vector<double> times_in, std::vector<std::int64_t> increments_in)
      : times(std::move(times_in)), increments(std::move(increments_in)) {
    if (times.empty()) throw DomainError("FddQuery: empty time grid");
    if (times.size() != increments.size()) {
      throw DomainError("FddQuery: times and increments must have equal length");
    }
    double prev = 0.0;
    for (double t : times) {
      if (!std::isfinite(t) || t <= prev) {
        throw DomainError("FddQuery: times must be finite, strictly increasing, and > 0");
      }
      prev = t;
    }
    for (std::int64_t k : increments) {
      if (k < 0) throw DomainError("FddQuery: negative increment count");
    }
  }

  // Build from cumulative counts n_1 <= ... <= n_m at the grid times.
  static FddQuery from_cumulative(std::vector<double> times,
                                  const std::vector<std::int64_t>& cumulative) {
    if (times.size() != cumulative.size()) {
      throw DomainError("FddQuery: times and cumulative counts must have equal length");
    }
    std::vector<std::int64_t> incr(cumulative.size());
    std::int64_t prev = 0;
    for (std::size_t j = 0; j < cumulative.size(); ++j) {
      if (cumulative[j] < prev) {
        throw DomainError("FddQuery: cumulative counts must be non-decreasing");
      }
      incr[j] = cumulative[j] - prev;
      prev = cumulative[j];
    }
    return FddQuery(std::move(times), std::move(incr));
  }

  std::vector<std::int64_t> cumulative() const {
    std::vector<std::int64_t> cum(increments.size());
    std::partial_sum(increments.begin(), increments.end(), cum.begin());
    return cum;
  }

  std::int64_t total() const {
    return std::accumulate(increments.begin(), increments.end(), std::int64_t{0});
  }
};

inline std::vector<double> arrivals_of(const CountingPath& path) {
  return std::vector<double>(path.events().begin(), path.events().end());
}

// Completed interarrival times W_1, W_2, ...; W_1 is measured from 0.
inline std::vector<double> interarrivals_of(const CountingPath& path) {
  std::vector<double> gaps;
  gaps.reserve(path.events().size());
  double prev = 0.0;
  for (double e : path.events()) {
    gaps.push_back(e - prev);
    prev = e;
  }
  return gaps;
}

inline CountingPath path_from_interarrivals(double horizon,
                                            std::span<const double> interarrivals) {
  std::vector<double> events;
  events.reserve(interarrivals.size());
  double t = 0.0;
  for (double w : interarrivals) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("path_from_interarrivals: interarrivals must be finite and > 0");
    }
    t += w;
    if (t > horizon) {
      throw DomainError("path_from_interarrivals: arrivals exceed the horizon");
    }
    events.push_back(t);
  }
  return CountingPath(horizon, std::move(events));
}

inline std::vector<std::int64_t> count_at(const CountingPath& path,
                                          std::span<const double> times) {
  std::vector<std::int64_t> counts;
  counts.reserve(times.size());
  for (double t : times) counts.push_back(path.count_at(t));
  return counts;
}

// Increment counts of the path over the cells of the query grid.
inline std::vector<std::int64_t> increments_of(const CountingPath& path,
                                               std::span<const double> times) {
  double prev_t = 0.0;
  std::int64_t prev_n = 0;
  std::vector<std::int64_t> incr;
  incr.reserve(times.size());
  for (double t : times) {
    if (!(t > prev_t)) {
      throw DomainError("increments_of: times must be strictly increasing and > 0");
    }
    const std::int64_t n = path.count_at(t);
    incr.push_back(n - prev_n);
    prev_t = t;
    prev_n = n;
  }
  return incr;
}

}  // namespace mppv
