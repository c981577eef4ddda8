#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/rng.hpp"

namespace biobench::sustain {

// Per-variable z thresholds (strictly increasing, all below z_max).
struct EventSet {
  std::vector<std::vector<double>> thresholds;
  std::vector<double> z_max;

  static EventSet uniform(int n_vars, std::vector<double> levels = {1, 2, 3}, double zmax = 5) {
    EventSet e;
    e.thresholds.assign(n_vars, std::move(levels));
    e.z_max.assign(n_vars, zmax);
    e.validate();
    return e;
  }

  int n_vars() const { return static_cast<int>(thresholds.size()); }
  int levels(int var) const { return static_cast<int>(thresholds[var].size()); }
  int n_events() const {
    int n = 0;
    for (const auto& t : thresholds) n += static_cast<int>(t.size());
    return n;
  }

  void validate() const {
    if (thresholds.empty()) throw ConfigError("event set needs at least one variable");
    if (z_max.size() != thresholds.size()) throw ConfigError("event set: one z_max per variable required");
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      const auto& t = thresholds[j];
      if (t.empty()) throw ConfigError("event set: variable " + std::to_string(j) + " has no thresholds");
      for (std::size_t l = 0; l < t.size(); ++l) {
        if (!std::isfinite(t[l])) throw ConfigError("event set: non-finite threshold");
        if (l > 0 && !(t[l] > t[l - 1])) throw ConfigError("event set: thresholds must increase strictly");
      }
      if (!(t.back() < z_max[j])) throw ConfigError("event set: thresholds must stay below z_max");
    }
  }
};

struct Event {
  int variable = 0;
  int level = 0; // index into the variable's thresholds

  bool operator==(const Event&) const = default;
};

using Sequence = std::vector<Event>;

// Canonical event index: variable-major, then level.
inline std::vector<int> event_offsets(const EventSet& ev) {
  std::vector<int> off(ev.n_vars() + 1, 0);
  for (int j = 0; j < ev.n_vars(); ++j) off[j + 1] = off[j] + ev.levels(j);
  return off;
}

inline bool valid_sequence(const Sequence& seq, const EventSet& ev) {
  if (static_cast<int>(seq.size()) != ev.n_events()) return false;
  std::vector<int> next(ev.n_vars(), 0);
  for (const Event& e : seq) {
    if (e.variable < 0 || e.variable >= ev.n_vars()) return false;
    if (e.level != next[e.variable]) return false;
    ++next[e.variable];
  }
  return true;
}

// Uniformly random valid sequence: shuffle the multiset of variable ids, then
// hand out levels in order.
inline Sequence random_sequence(const EventSet& ev, Rng& rng) {
  std::vector<int> vars;
  for (int j = 0; j < ev.n_vars(); ++j) vars.insert(vars.end(), ev.levels(j), j);
  std::shuffle(vars.begin(), vars.end(), rng);
  std::vector<int> next(ev.n_vars(), 0);
  Sequence seq;
  seq.reserve(vars.size());
  for (int j : vars) seq.push_back({j, next[j]++});
  return seq;
}

// Expected z of every variable at every stage 0..E, as an (E+1) x n_vars
// matrix. Variable j passes threshold l exactly at the (1-based) position of
// its event in `seq`, starts from 0 at stage 0 and continues linearly towards
// z_max at stage E.
inline Matrix stage_trajectories(const Sequence& seq, const EventSet& ev) {
  const int n_events = ev.n_events();
  if (!valid_sequence(seq, ev)) throw ConfigError("invalid event sequence");
  std::vector<std::vector<int>> pos(ev.n_vars());
  for (int p = 0; p < n_events; ++p) pos[seq[p].variable].push_back(p + 1);

  Matrix mu(n_events + 1, ev.n_vars());
  for (int j = 0; j < ev.n_vars(); ++j) {
    std::vector<double> xs{0.0}, ys{0.0};
    for (int l = 0; l < ev.levels(j); ++l) {
      xs.push_back(pos[j][l]);
      ys.push_back(ev.thresholds[j][l]);
    }
    if (xs.back() < n_events) {
      xs.push_back(n_events);
      ys.push_back(ev.z_max[j]);
    }
    std::size_t seg = 0;
    for (int s = 0; s <= n_events; ++s) {
      while (seg + 2 < xs.size() && s > xs[seg + 1]) ++seg;
      const double x0 = xs[seg], x1 = xs[seg + 1];
      const double t = (s - x0) / (x1 - x0);
      mu(s, j) = ys[seg] + t * (ys[seg + 1] - ys[seg]);
    }
  }
  return mu;
}

inline Vector expected_z(const Sequence& seq, int stage, const EventSet& ev) {
  if (stage < 0 || stage > ev.n_events()) throw ConfigError("stage out of range");
  return stage_trajectories(seq, ev).row(stage).transpose();
}

// log10(E! / prod_j t_j!): the number of interleavings of per-variable chains.
inline double ordering_count_log10(const EventSet& ev) {
  double s = std::lgamma(ev.n_events() + 1.0);
  for (int j = 0; j < ev.n_vars(); ++j) s -= std::lgamma(ev.levels(j) + 1.0);
  return s / std::log(10.0);
}

inline double ordering_space_log10(int n_vars, int thresholds_per_var) {
  if (n_vars < 1 || thresholds_per_var < 1) throw ConfigError("ordering_space_log10 needs positive counts");
  const double e = static_cast<double>(n_vars) * thresholds_per_var;
  return (std::lgamma(e + 1) - n_vars * std::lgamma(thresholds_per_var + 1.0)) / std::log(10.0);
}

} // namespace biobench::sustain
