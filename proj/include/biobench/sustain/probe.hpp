#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "biobench/core/deadline.hpp"
#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/sustain/fit.hpp"

namespace biobench::sustain {

// Subjects drawn at uniform stages along `seq` with Gaussian noise.
inline Matrix simulate_subjects(const Sequence& seq, const EventSet& ev, int n, double noise, std::uint64_t seed,
                                std::vector<int>* stages = nullptr) {
  const Matrix mu = stage_trajectories(seq, ev);
  Matrix z(n, ev.n_vars());
  if (stages) stages->assign(n, 0);
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(seed, i);
    std::uniform_int_distribution<int> stage(0, ev.n_events());
    std::normal_distribution<double> eps(0.0, noise);
    const int s = stage(rng);
    if (stages) (*stages)[i] = s;
    for (int j = 0; j < ev.n_vars(); ++j) z(i, j) = mu(s, j) + eps(rng);
  }
  return z;
}

struct ProbeRow {
  int n_vars = 0;
  double log10_orderings = 0;
  std::optional<double> iter_ms; // median EM iteration time, absent if none finished
  std::string status;            // ok | timeout
};

struct ProbeConfig {
  int n_subjects = 200;
  double budget_seconds = 60; // per variable count
  std::uint64_t seed = 0;
  std::vector<double> thresholds{1, 2, 3};
  int em_iterations = 3;
};

// One single-restart, single-subtype EM fit per variable count on data
// simulated from a random sequence. Timeouts are recorded, never raised.
inline std::vector<ProbeRow> scaling_probe(const std::vector<int>& var_counts, const ProbeConfig& cfg) {
  if (var_counts.empty()) throw ConfigError("scaling_probe needs at least one variable count");
  std::vector<ProbeRow> rows;
  for (int nv : var_counts) {
    if (nv < 1) throw ConfigError("scaling_probe variable counts must be positive");
    ProbeRow row;
    row.n_vars = nv;
    row.log10_orderings = ordering_space_log10(nv, static_cast<int>(cfg.thresholds.size()));
    const Deadline deadline = Deadline::after(cfg.budget_seconds);
    SustainFit fit;
    std::vector<double> times;
    try {
      deadline.check();
      const EventSet ev = EventSet::uniform(nv, cfg.thresholds);
      Rng rng = make_rng(cfg.seed, nv);
      const Sequence truth = random_sequence(ev, rng);
      const Matrix z = simulate_subjects(truth, ev, cfg.n_subjects, 1.0, derive_seed(cfg.seed, nv, 1));
      SustainConfig sc;
      sc.n_subtypes = 1;
      sc.n_restarts = 1;
      sc.max_em_iter = cfg.em_iterations;
      sc.tol = -1; // fixed iteration count for comparable timing
      sc.seed = derive_seed(cfg.seed, nv, 2);
      sc.thresholds = cfg.thresholds;
      fit = fit_sustain(z, sc, deadline);
      times = fit.iter_ms;
      row.status = "ok";
    } catch (const Cancelled&) {
      row.status = "timeout";
    }
    if (!times.empty()) {
      std::sort(times.begin(), times.end());
      row.iter_ms = times[times.size() / 2];
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_probe_csv(std::ostream& os, const std::vector<ProbeRow>& rows) {
  os << "n_vars,log10_orderings,iter_ms,status\n";
  for (const auto& r : rows)
    os << r.n_vars << ',' << format_double(r.log10_orderings) << ',' << (r.iter_ms ? format_double(*r.iter_ms) : "") << ','
       << r.status << '\n';
}

} // namespace biobench::sustain
