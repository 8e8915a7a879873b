#pragma once
// Verification suites. A Scenario bundles a data-generating description (base
// parameter law + interarrival kernel) with an exact evaluator of the claimed
// mixed-Poisson law and a pre-registered query battery. The suite maps the
// four equivalence assertions onto concrete checks:
//
//   (i)   conditional structure given the parameter draw (PIT uniformity +
//         within-path independence),
//   (ii)  joint interarrival orthant probabilities vs the product formula,
//   (iii) conditional Poisson-ness of the pushforward construction (same
//         machinery as (i), reported under its own tag: the disintegration
//         content beyond the conditional law is not numerically observable),
//   (iv)  finite-dimensional probabilities vs the exact evaluator, plus the
//         multinomial / binomial-splitting / Markov-factorization identities
//         on both the exact and the empirical route.
//
// Control scenarios invert expectations: rows designed to fail are verdicted
// XFAIL when they fail and XPASS when they do not, and an XPASS fails the
// whole suite. That guards the battery against becoming vacuous.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mppv/assumption.hpp"
#include "mppv/core.hpp"
#include "mppv/errors.hpp"
#include "mppv/kernels.hpp"
#include "mppv/laws.hpp"
#include "mppv/mixing.hpp"
#include "mppv/rng.hpp"
#include "mppv/sim.hpp"
#include "mppv/stats.hpp"
#include "mppv/version.hpp"

namespace mppv {

struct Tolerances {
  double exact_identity = 1e-8;  // |residual| gate for evaluator-level identities
  double z_threshold = 3.0;      // Monte Carlo z gate per statistic
  double coverage = 0.95;        // battery fraction required within z_threshold
  double pit_p_min = 0.01;       // smallest acceptable PIT p-value
  double control_z = 5.0;        // magnitude a control failure must reach
  double rate_identity = 1e-6;   // max |p_h - h| over the grid

  void validate() const {
    const bool ok = exact_identity > 0.0 && z_threshold > 0.0 && coverage > 0.0 &&
                    coverage <= 1.0 && pit_p_min > 0.0 && pit_p_min < 1.0 &&
                    control_z >= z_threshold && rate_identity > 0.0;
    if (!ok) throw DomainError("Tolerances: all entries must be positive (coverage in (0,1], control_z >= z_threshold)");
  }
};

enum class Verdict { kPass, kFail, kXfail, kXpass, kInfo, kSkip };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kXfail: return "XFAIL";
    case Verdict::kXpass: return "XPASS";
    case Verdict::kInfo: return "INFO";
    case Verdict::kSkip: return "SKIP";
  }
  return "?";
}

struct CheckRecord {
  std::string check_id;
  std::string assertion_tag;  // i | ii | iii | iv | assumption | rate_identity | meta
  double statistic = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::kInfo;
  std::string note;
};

// Cumulative-count probe: P(N_{t_1}=n_1, ..., N_{t_m}=n_m).
struct CumulativeCountCase {
  std::vector<double> times;
  std::vector<std::int64_t> cumulative;
};

// Split probe: P(N_s=k, N_t=n) against the conditional binomial thinning.
struct SplitCase {
  double s = 0.0, t = 0.0;
  std::int64_t k = 0, n = 0;
};

struct Battery {
  std::vector<FddQuery> fdd_queries;
  std::vector<CumulativeCountCase> multinomial_cases;
  std::vector<SplitCase> splitting_cases;
  std::vector<CumulativeCountCase> markov_cases;
  std::vector<std::vector<double>> huang_w;

  bool empty() const {
    return fdd_queries.empty() && multinomial_cases.empty() && splitting_cases.empty() &&
           markov_cases.empty() && huang_w.empty();
  }

  // Fill any empty section deterministically. Generation is keyed by a fixed
  // constant, never the run seed, so the battery is pre-registered: changing
  // --seed changes the sample paths but not the questions asked of them.
  // Queries are filtered to probability >= min_p so every z-statistic has a
  // usable standard error.
  template <FddEvaluatorLike F>
  void ensure_defaults(const F& exact, double horizon, std::size_t fdd_count = 40,
                       double min_p = 1e-3) {
    SplitStream gen(0x7072652d72656773ULL);
    auto draw_times = [&](std::size_t m) {
      std::vector<double> times(m);
      for (double& t : times) t = horizon * (0.05 + 0.95 * gen.uniform01());
      std::sort(times.begin(), times.end());
      for (std::size_t j = 1; j < m; ++j) {
        if (times[j] <= times[j - 1]) return std::vector<double>{};
      }
      return times;
    };

    if (fdd_queries.empty()) {
      for (int attempt = 0; attempt < 40000 && fdd_queries.size() < fdd_count; ++attempt) {
        const std::size_t m = 1 + static_cast<std::size_t>(gen.next_u64() % 4);
        auto times = draw_times(m);
        if (times.empty()) continue;
        std::vector<std::int64_t> incs(m);
        for (auto& k : incs) k = static_cast<std::int64_t>(gen.next_u64() % 4);
        FddQuery q(std::move(times), std::move(incs));
        if (exact(q) >= min_p) fdd_queries.push_back(std::move(q));
      }
      if (fdd_queries.size() < fdd_count) {
        throw DomainError("Battery: could not auto-generate enough queries above min_p");
      }
    }

    auto draw_cumulative = [&](std::size_t m) {
      CumulativeCountCase c;
      c.times = draw_times(m);
      if (c.times.empty()) return c;
      std::int64_t running = 0;
      for (std::size_t j = 0; j < m; ++j) {
        running += static_cast<std::int64_t>(gen.next_u64() % 3);
        c.cumulative.push_back(running);
      }
      return c;
    };
    auto joint_p = [&](const CumulativeCountCase& c) {
      return exact(FddQuery::from_cumulative(c.times, c.cumulative));
    };

    if (multinomial_cases.empty()) {
      for (int attempt = 0; attempt < 4000 && multinomial_cases.size() < 2; ++attempt) {
        auto c = draw_cumulative(2 + static_cast<std::size_t>(gen.next_u64() % 2));
        if (c.times.empty()) continue;
        if (c.cumulative.back() >= 1 && joint_p(c) >= min_p) multinomial_cases.push_back(c);
      }
    }
    if (markov_cases.empty()) {
      // Three points minimum: with two the factorization collapses to a
      // tautology (the past is the conditioning point itself). The count at
      // the conditioning point must be positive, else monotonicity forces
      // the whole past and the identity is again vacuous.
      for (int attempt = 0; attempt < 4000 && markov_cases.size() < 2; ++attempt) {
        auto c = draw_cumulative(3 + static_cast<std::size_t>(gen.next_u64() % 2));
        if (c.times.empty()) continue;
        if (c.cumulative[c.times.size() - 2] < 1) continue;
        if (joint_p(c) >= min_p) markov_cases.push_back(c);
      }
    }
    if (splitting_cases.empty()) {
      for (int attempt = 0; attempt < 4000 && splitting_cases.size() < 2; ++attempt) {
        auto times = draw_times(2);
        if (times.empty()) continue;
        SplitCase sc;
        sc.s = times[0];
        sc.t = times[1];
        sc.n = 1 + static_cast<std::int64_t>(gen.next_u64() % 4);
        sc.k = static_cast<std::int64_t>(gen.next_u64() % (sc.n + 1));
        const FddQuery q({sc.s, sc.t}, {sc.k, sc.n - sc.k});
        if (exact(q) >= min_p) splitting_cases.push_back(sc);
      }
    }
    if (huang_w.empty()) {
      huang_w.push_back({horizon / 4.0});
      huang_w.push_back({horizon / 8.0, horizon / 8.0});
    }
  }
};

enum class EvaluatorChoice { kQuadrature, kPolyaClosedForm, kPoisson };

struct Scenario {
  std::string name;
  MixingLaw base = MixingLaw::degenerate(1.0);  // law of the raw parameter
  InterarrivalKernel kernel = InterarrivalKernel::exponential(identity_transform());
  EvaluatorChoice evaluator = EvaluatorChoice::kQuadrature;
  QuadratureSettings quadrature;

  double horizon = 4.0;
  std::uint64_t num_paths = 100000;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;

  // Conditional-structure block: its own batch of unconditioned first
  // interarrivals (no horizon, see sample_first_interarrivals).
  std::uint64_t pit_paths = 3000;
  int pit_per_path = 3;
  int pit_bins = 16;

  Battery battery;
  Tolerances tol;
  bool is_control = false;

  // Law of the conditional rate h(Theta): the mixing distribution of the
  // claimed mixed Poisson process.
  MixingLaw rate_law() const { return pushforward(base, kernel.transform()); }

  FddEvaluator exact_evaluator() const {
    const MixingLaw rates = rate_law();
    switch (evaluator) {
      case EvaluatorChoice::kPoisson: {
        const auto* d = rates.get_if<DegenerateLaw>();
        if (d == nullptr) {
          throw DomainError("Scenario '" + name + "': poisson evaluator needs a degenerate rate law");
        }
        return FddEvaluator::poisson(d->value);
      }
      case EvaluatorChoice::kPolyaClosedForm: {
        const auto* g = rates.get_if<GammaLaw>();
        if (g == nullptr) {
          throw DomainError("Scenario '" + name + "': polya evaluator needs a gamma rate law");
        }
        return FddEvaluator::polya(g->shape, g->rate);
      }
      case EvaluatorChoice::kQuadrature: return FddEvaluator::quadrature(rates, quadrature);
    }
    throw DomainError("Scenario: unknown evaluator choice");
  }

  SimulationPlan plan() const {
    SimulationPlan p;
    p.route = SimRoute::kDisintegration;
    p.mixing = base;
    p.kernel = kernel;
    p.horizon = horizon;
    p.num_paths = num_paths;
    p.master_seed = master_seed;
    return p;
  }

  // The conditional checks draw from their own seed so that changing the
  // main path count never perturbs them.
  std::uint64_t pit_seed() const { return detail::absorb(master_seed, 0x636f6e642d706974ULL); }

  void validate() const {
    if (name.empty()) throw DomainError("Scenario: name must be nonempty");
    tol.validate();
    if (!(horizon > 0.0) || num_paths < 1) {
      throw DomainError("Scenario: requires horizon > 0 and num_paths >= 1");
    }
    if (pit_paths < 1 || pit_per_path < 1 || pit_bins < 2) {
      throw DomainError("Scenario: conditional-check block parameters out of range");
    }
    exact_evaluator();  // throws on an inconsistent evaluator choice
    for (const auto& q : battery.fdd_queries) {
      if (q.times.back() > horizon) {
        throw DomainError("Scenario: battery query time beyond the horizon");
      }
    }
    for (const auto& w : battery.huang_w) {
      double total = 0.0;
      for (double wk : w) total += wk;
      if (total > horizon) {
        throw DomainError("Scenario: huang w-vector sum beyond the horizon (event undecidable)");
      }
    }
  }
};

namespace detail {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

inline std::string fmt_query(const FddQuery& q) {
  std::string s = "times=[";
  for (std::size_t j = 0; j < q.times.size(); ++j) {
    s += (j ? "," : "") + fmt_double(q.times[j]);
  }
  s += "] increments=[";
  for (std::size_t j = 0; j < q.increments.size(); ++j) {
    s += (j ? "," : "") + std::to_string(q.increments[j]);
  }
  return s + "]";
}

// z-statistic of an empirical residual a_hat - coeff * b_hat where the event
// behind a is contained in the event behind b; the covariance then reduces
// to indicator moments of the two counts alone.
inline double nested_residual_z(std::uint64_t count_a, std::uint64_t count_b, double coeff,
                                std::uint64_t n_paths, double* residual_out = nullptr) {
  const double n = static_cast<double>(n_paths);
  const double pa = static_cast<double>(count_a) / n;
  const double pb = static_cast<double>(count_b) / n;
  const double residual = pa - coeff * pb;
  if (residual_out != nullptr) *residual_out = residual;
  const double var =
      (pa * (1.0 - pa) + coeff * coeff * pb * (1.0 - pb) - 2.0 * coeff * (pa - pa * pb)) / n;
  if (!(var > 0.0)) {
    return residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return residual / std::sqrt(var);
}

inline bool prefix_matches(const PathBatch& batch, std::uint64_t i,
                           std::span<const double> times,
                           std::span<const std::int64_t> cumulative, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    if (batch.count_at(i, times[j]) != cumulative[j]) return false;
  }
  return true;
}

inline double log_multinomial_coeff(std::span<const double> times,
                                    std::span<const std::int64_t> cumulative) {
  const double t_m = times.back();
  double log_coeff = log_factorial(cumulative.back());
  double prev_t = 0.0;
  std::int64_t prev_n = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double delta = times[j] - prev_t;
    const std::int64_t kappa = cumulative[j] - prev_n;
    log_coeff -= log_factorial(kappa);
    if (kappa > 0) log_coeff += static_cast<double>(kappa) * std::log(delta / t_m);
    prev_t = times[j];
    prev_n = cumulative[j];
  }
  return log_coeff;
}

}  // namespace detail

struct EmpiricalIdentityZ {
  double residual = 0.0;
  double z = 0.0;
};

// Empirical multinomial identity: relative frequency of the full increment
// pattern minus the conditional-multinomial coefficient times the frequency
// of the terminal count.
inline EmpiricalIdentityZ empirical_multinomial_z(const PathBatch& batch,
                                                  const CumulativeCountCase& c) {
  const std::size_t m = c.times.size();
  if (m == 0 || c.cumulative.size() != m) {
    throw DomainError("empirical_multinomial_z: malformed case");
  }
  std::uint64_t count_a = 0, count_b = 0;
  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    if (batch.count_at(i, c.times.back()) != c.cumulative.back()) continue;
    ++count_b;
    if (detail::prefix_matches(batch, i, c.times, c.cumulative, m - 1)) ++count_a;
  }
  const double coeff = std::exp(detail::log_multinomial_coeff(c.times, c.cumulative));
  EmpiricalIdentityZ out;
  out.z = detail::nested_residual_z(count_a, count_b, coeff, batch.size(), &out.residual);
  return out;
}

inline EmpiricalIdentityZ empirical_splitting_z(const PathBatch& batch, const SplitCase& c) {
  if (!(0.0 < c.s && c.s < c.t) || c.k < 0 || c.n < c.k) {
    throw DomainError("empirical_splitting_z: requires 0 < s < t and 0 <= k <= n");
  }
  std::uint64_t count_a = 0, count_b = 0;
  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    if (batch.count_at(i, c.t) != c.n) continue;
    ++count_b;
    if (batch.count_at(i, c.s) == c.k) ++count_a;
  }
  double log_coeff = log_factorial(c.n) - log_factorial(c.k) - log_factorial(c.n - c.k);
  if (c.k > 0) log_coeff += static_cast<double>(c.k) * std::log(c.s / c.t);
  if (c.n - c.k > 0) log_coeff += static_cast<double>(c.n - c.k) * std::log1p(-c.s / c.t);
  EmpiricalIdentityZ out;
  out.z = detail::nested_residual_z(count_a, count_b, std::exp(log_coeff), batch.size(),
                                    &out.residual);
  return out;
}

// Empirical Markov factorization via the delta method on four nested event
// frequencies: head * pair - full * single. The intersections needed for the
// covariance are themselves among the four events (full = head AND pair).
inline EmpiricalIdentityZ empirical_markov_z(const PathBatch& batch,
                                             const CumulativeCountCase& c) {
  const std::size_t points = c.times.size();
  if (points < 2 || c.cumulative.size() != points) {
    throw DomainError("empirical_markov_z: needs at least two time points");
  }
  const std::size_t m = points - 1;
  std::uint64_t n_head = 0, n_pair = 0, n_full = 0, n_single = 0;
  for (std::uint64_t i = 0; i < batch.size(); ++i) {
    const bool single = batch.count_at(i, c.times[m - 1]) == c.cumulative[m - 1];
    if (!single) continue;  // every other event is contained in this one
    ++n_single;
    const bool head = detail::prefix_matches(batch, i, c.times, c.cumulative, m - 1);
    const bool last = batch.count_at(i, c.times[m]) == c.cumulative[m];
    n_head += head ? 1 : 0;
    n_pair += last ? 1 : 0;
    n_full += (head && last) ? 1 : 0;
  }
  const double n = static_cast<double>(batch.size());
  const double pa = n_head / n, pb = n_pair / n, pc = n_full / n, pd = n_single / n;
  EmpiricalIdentityZ out;
  out.residual = pa * pb - pc * pd;
  // Gradient of (A,B,C,D) -> AB - CD and indicator covariances from the
  // containment structure: full = head AND pair, and all three lie in single.
  const double ga = pb, gb = pa, gc = -pd, gd = -pc;
  double var = 0.0;
  var += ga * ga * pa * (1.0 - pa);
  var += gb * gb * pb * (1.0 - pb);
  var += gc * gc * pc * (1.0 - pc);
  var += gd * gd * pd * (1.0 - pd);
  var += 2.0 * ga * gb * (pc - pa * pb);
  var += 2.0 * ga * gc * (pc - pa * pc);
  var += 2.0 * ga * gd * (pa - pa * pd);
  var += 2.0 * gb * gc * (pc - pb * pc);
  var += 2.0 * gb * gd * (pb - pb * pd);
  var += 2.0 * gc * gd * (pc - pc * pd);
  var /= n;
  if (!(var > 0.0)) {
    out.z = out.residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  out.z = out.residual / std::sqrt(var);
  return out;
}

struct VerificationReport {
  std::string scenario_name;
  std::uint64_t master_seed = 0;
  Tolerances tolerances;
  std::string version{kVersion};
  bool control = false;
  std::vector<CheckRecord> checks;

  void add(std::string id, std::string tag, double statistic, double threshold,
           Verdict verdict, std::string note = "") {
    checks.push_back(CheckRecord{std::move(id), std::move(tag), statistic, threshold, verdict,
                                 std::move(note)});
  }

  // A suite passes when nothing failed and every designed-to-fail control
  // check actually failed.
  bool overall_pass() const {
    for (const auto& c : checks) {
      if (c.verdict == Verdict::kFail || c.verdict == Verdict::kXpass) return false;
    }
    return true;
  }
};

namespace detail {

// PASS/FAIL for regular rows; XFAIL/XPASS for rows a control scenario is
// designed to break.
inline Verdict gate(bool ok, bool designed_to_fail) {
  if (designed_to_fail) return ok ? Verdict::kXpass : Verdict::kXfail;
  return ok ? Verdict::kPass : Verdict::kFail;
}

}  // namespace detail

inline VerificationReport run_equivalence_suite(const Scenario& sc) {
  sc.validate();
  Scenario scenario = sc;  // battery fill-in must not mutate the caller's scenario
  scenario.battery.ensure_defaults(scenario.exact_evaluator(), scenario.horizon);

  VerificationReport rep;
  rep.scenario_name = scenario.name;
  rep.master_seed = scenario.master_seed;
  rep.tolerances = scenario.tol;
  rep.control = scenario.is_control;

  const FddEvaluator exact = scenario.exact_evaluator();
  const Tolerances& tol = scenario.tol;
  const bool ctrl = scenario.is_control;

  const PathBatch batch = generate_paths(scenario.plan(), scenario.threads);

  // --- (i)/(iii): conditional structure through the probability integral
  // transform. The claimed conditional law is exponential at rate h(theta)
  // regardless of the generating kernel; a non-exponential kernel is exactly
  // what this check must detect.
  {
    const InterarrivalBatch pit_batch = sample_first_interarrivals(
        scenario.base, scenario.kernel, scenario.pit_paths, scenario.pit_seed(),
        scenario.pit_per_path);
    const auto claimed = InterarrivalKernel::exponential(scenario.kernel.transform());
    const auto pit = conditional_poisson_check(pit_batch, claimed, scenario.pit_bins);

    rep.add("i.conditional.ks", "i", pit.ks_p_value, tol.pit_p_min,
            detail::gate(pit.ks_p_value >= tol.pit_p_min, ctrl),
            "pooled transform uniformity, " + std::to_string(pit.pit_count) + " values");
    if (pit.serial.pairs >= 3) {
      rep.add("i.conditional.serial", "i", std::fabs(pit.serial.z), tol.z_threshold,
              detail::gate(std::fabs(pit.serial.z) <= tol.z_threshold, false),
              "within-path lag-1 correlation over " + std::to_string(pit.serial.pairs) +
                  " pairs");
    } else {
      rep.add("i.conditional.serial", "i", 0.0, tol.z_threshold, Verdict::kSkip,
              "needs at least 2 transforms per path");
    }
    rep.add("iii.conditional.ks", "iii", pit.ks_p_value, tol.pit_p_min,
            detail::gate(pit.ks_p_value >= tol.pit_p_min, ctrl),
            "same statistic as i.conditional.ks: the disintegration assertion is tested "
            "through its conditional-law consequence");
    rep.add("iii.conditional.bins", "iii", pit.uniform_bins.p_value, tol.pit_p_min,
            detail::gate(pit.uniform_bins.p_value >= tol.pit_p_min, ctrl),
            "chi-square of pooled transforms against flat bins, df=" +
                detail::fmt_double(pit.uniform_bins.df));
  }

  // --- (ii): joint interarrival orthants vs the product formula.
  {
    double max_abs_z = 0.0;
    for (std::size_t wi = 0; wi < scenario.battery.huang_w.size(); ++wi) {
      const auto& w = scenario.battery.huang_w[wi];
      const double rhs =
          huang_product_rhs(scenario.base, scenario.kernel.transform(), w, scenario.quadrature);
      const EmpiricalEstimate est = empirical_joint_interarrival_cdf(batch, w);
      const double z = est.z_against(rhs);
      max_abs_z = std::max(max_abs_z, std::fabs(z));
      std::string note = "w=[";
      for (std::size_t j = 0; j < w.size(); ++j) note += (j ? "," : "") + detail::fmt_double(w[j]);
      note += "] exact=" + detail::fmt_double(rhs) + " empirical=" + detail::fmt_double(est.value);
      rep.add("ii.huang.w" + std::to_string(wi), "ii", z, tol.z_threshold,
              ctrl ? Verdict::kInfo : detail::gate(std::fabs(z) <= tol.z_threshold, false),
              std::move(note));
    }
    if (ctrl) {
      rep.add("ii.huang.control", "ii", max_abs_z, tol.z_threshold,
              detail::gate(max_abs_z <= tol.z_threshold, true),
              "largest |z| across w-vectors; the product formula must break here");
    }
  }

  // --- (iv): finite-dimensional probabilities, coverage-gated.
  {
    std::size_t within = 0;
    for (std::size_t qi = 0; qi < scenario.battery.fdd_queries.size(); ++qi) {
      const auto& q = scenario.battery.fdd_queries[qi];
      const double p = exact(q);
      const EmpiricalEstimate est = empirical_fdd(batch, q);
      const double z = est.z_against(p);
      if (std::fabs(z) <= tol.z_threshold) ++within;
      char id[32];
      std::snprintf(id, sizeof(id), "iv.fdd.q%02zu", qi);
      rep.add(id, "iv", z, tol.z_threshold, Verdict::kInfo,
              detail::fmt_query(q) + " exact=" + detail::fmt_double(p));
    }
    const double frac = static_cast<double>(within) /
                        static_cast<double>(scenario.battery.fdd_queries.size());
    rep.add("iv.fdd.coverage", "iv", frac, tol.coverage,
            detail::gate(frac >= tol.coverage, ctrl),
            "fraction of battery queries within the z gate");
  }

  // --- (iv): evaluator-level identities. These hold for any mixed-Poisson
  // evaluator, control or not, so they are never expectation-inverted.
  {
    std::size_t idx = 0;
    for (const auto& c : scenario.battery.multinomial_cases) {
      const double r = multinomial_residual(exact, c.times, c.cumulative);
      rep.add("iv.identity.multinomial.exact." + std::to_string(idx++), "iv", r,
              tol.exact_identity, detail::gate(std::fabs(r) <= tol.exact_identity, false));
    }
    idx = 0;
    for (const auto& c : scenario.battery.splitting_cases) {
      const double r = binomial_splitting_residual(exact, c.s, c.t, c.k, c.n);
      rep.add("iv.identity.splitting.exact." + std::to_string(idx++), "iv", r,
              tol.exact_identity, detail::gate(std::fabs(r) <= tol.exact_identity, false));
    }
    idx = 0;
    for (const auto& c : scenario.battery.markov_cases) {
      const double r = markov_factorization_residual(exact, c.times, c.cumulative);
      rep.add("iv.identity.markov.exact." + std::to_string(idx++), "iv", r, tol.exact_identity,
              detail::gate(std::fabs(r) <= tol.exact_identity, false));
    }
  }

  // --- (iv): the same identities on the empirical route. This is the side a
  // non-Poisson renewal control is required to break (at control_z), so in a
  // control scenario the per-case rows are informational and one aggregate
  // row carries the designed-failure requirement: at least one case beyond
  // the control threshold.
  {
    double max_abs_z = 0.0;
    std::size_t idx = 0;
    auto emit = [&](const std::string& kind, const EmpiricalIdentityZ& e) {
      max_abs_z = std::max(max_abs_z, std::fabs(e.z));
      rep.add("iv.identity." + kind + ".empirical." + std::to_string(idx), "iv", e.z,
              tol.z_threshold,
              ctrl ? Verdict::kInfo : detail::gate(std::fabs(e.z) <= tol.z_threshold, false),
              "residual=" + detail::fmt_double(e.residual));
    };
    for (idx = 0; idx < scenario.battery.multinomial_cases.size(); ++idx) {
      emit("multinomial", empirical_multinomial_z(batch, scenario.battery.multinomial_cases[idx]));
    }
    for (idx = 0; idx < scenario.battery.splitting_cases.size(); ++idx) {
      emit("splitting", empirical_splitting_z(batch, scenario.battery.splitting_cases[idx]));
    }
    for (idx = 0; idx < scenario.battery.markov_cases.size(); ++idx) {
      emit("markov", empirical_markov_z(batch, scenario.battery.markov_cases[idx]));
    }
    if (ctrl) {
      rep.add("iv.identity.empirical.control", "iv", max_abs_z, tol.control_z,
              detail::gate(max_abs_z <= tol.control_z, true),
              "largest |z| across identity cases; must exceed the control threshold");
    }
  }

  return rep;
}

// Regularity grid of the scenario's kernel against its base law.
inline AssumptionReport run_assumption_suite(const Scenario& sc, int grid_size = 64) {
  sc.validate();
  return check_assumption(sc.kernel, sc.base, grid_size);
}

// AssumptionReport reduced to report rows. In control scenarios positivity
// is the designed failure; the dependent verdicts turn informational.
inline std::vector<CheckRecord> assumption_records(const AssumptionReport& rep,
                                                   bool control) {
  std::vector<CheckRecord> rows;
  std::size_t ok_points = 0;
  for (const auto& p : rep.grid) ok_points += p.ok ? 1 : 0;
  const double frac =
      rep.grid.empty() ? 0.0 : static_cast<double>(ok_points) / static_cast<double>(rep.grid.size());

  rows.push_back({"assumption.positivity", "assumption", frac, 1.0,
                  detail::gate(rep.positivity_ok, control),
                  "fraction of grid points with a positive density limit"});
  rows.push_back({"assumption.injectivity", "assumption", rep.injectivity_ok ? 1.0 : 0.0, 1.0,
                  control ? Verdict::kInfo : detail::gate(rep.injectivity_ok, false),
                  "pairwise-distinct limits across the grid"});
  rows.push_back({"assumption.domination", "assumption", rep.domination_ok ? 1.0 : 0.0, 1.0,
                  control ? Verdict::kInfo : detail::gate(rep.domination_ok, false),
                  "estimated density sup within the declared bound"});
  rows.push_back({"assumption.l1", "assumption", rep.l1_integral, 0.0, Verdict::kInfo,
                  std::string("integral of the dominating function under the base law (") +
                      (rep.l1_finite ? "finite)" : "not finite)")});
  if (rep.skipped_null_set > 0) {
    rows.push_back({"assumption.null_set_skips", "assumption",
                    static_cast<double>(rep.skipped_null_set), 0.0, Verdict::kInfo,
                    "grid points inside the declared null set"});
  }
  return rows;
}

// For exponential kernels the density limit at zero IS the conditional rate;
// the numeric limit must reproduce the transform on a quantile grid.
inline CheckRecord run_rate_identity_check(const Scenario& sc, int grid_size = 32) {
  sc.validate();
  if (sc.kernel.family() != KernelFamily::kExponential) {
    return {"rate_identity.max_dev", "rate_identity", 0.0, sc.tol.rate_identity,
            Verdict::kSkip, "only meaningful for exponential kernels"};
  }
  double max_dev = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double theta = sc.base.quantile((i + 0.5) / grid_size);
    if (sc.kernel.in_null_set(theta)) continue;
    const double dev = std::fabs(p_h_numeric(sc.kernel, theta) - sc.kernel.transform()(theta));
    max_dev = std::max(max_dev, dev);
  }
  return {"rate_identity.max_dev", "rate_identity", max_dev, sc.tol.rate_identity,
          detail::gate(max_dev < sc.tol.rate_identity, false),
          "max |density limit - conditional rate| over the parameter grid"};
}

// Everything a scenario asserts, in one report: the equivalence suite, the
// regularity grid, and the rate identity.
inline VerificationReport run_full_verification(const Scenario& sc) {
  VerificationReport rep = run_equivalence_suite(sc);
  for (auto& row : assumption_records(run_assumption_suite(sc), sc.is_control)) {
    rep.checks.push_back(std::move(row));
  }
  rep.checks.push_back(run_rate_identity_check(sc));
  return rep;
}

}  // namespace mppv
