#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <json.hpp>

#include "biobench/core/deadline.hpp"
#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/parallel.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/sustain/events.hpp"

namespace biobench::sustain {

struct SubtypeModel {
  EventSet events;
  std::vector<Sequence> sequences;
  std::vector<double> fractions;
  Vector noise; // per-variable SD in z-space

  int n_subtypes() const { return static_cast<int>(sequences.size()); }

  void validate() const {
    if (sequences.empty()) throw ConfigError("subtype model has no sequences");
    if (fractions.size() != sequences.size()) throw ConfigError("one fraction per subtype required");
    double total = 0;
    for (double f : fractions) {
      if (!(f >= 0)) throw ConfigError("subtype fractions must be non-negative");
      total += f;
    }
    if (std::abs(total - 1) > 1e-9) throw ConfigError("subtype fractions must sum to 1");
    for (const auto& s : sequences)
      if (!valid_sequence(s, events)) throw ConfigError("subtype model holds an invalid sequence");
    if (noise.size() != events.n_vars() || !(noise.array() > 0).all()) throw ConfigError("noise SD must be positive per variable");
  }
};

// Precomputed pieces of the Gaussian stage likelihood.
class LikelihoodCache {
public:
  LikelihoodCache(const Matrix& z, const Vector& noise) : zs_(z.array().rowwise() / noise.transpose().array()), inv_(noise.cwiseInverse()) {
    if (!z.allFinite()) throw DataError("z-matrix holds non-finite values");
    if (z.cols() != noise.size()) throw DataError("z-matrix column count does not match the event set");
    sq_ = zs_.rowwise().squaredNorm();
    norm_ = 0;
    for (Eigen::Index j = 0; j < noise.size(); ++j) norm_ += std::log(noise(j) * std::sqrt(2 * std::numbers::pi));
  }

  Eigen::Index n_subjects() const { return zs_.rows(); }

  // n x (E+1) log-likelihood of each subject at each stage.
  Matrix stage_loglik(const Matrix& mu) const {
    const Matrix mus = mu.array().rowwise() * inv_.transpose().array();
    Matrix ll = zs_ * mus.transpose();
    ll *= 2.0;
    ll.colwise() -= sq_;
    ll.rowwise() -= mus.rowwise().squaredNorm().transpose();
    ll *= 0.5;
    ll.array() -= norm_;
    return ll;
  }

  // Stage-marginalized log-likelihood per subject under a uniform stage prior.
  Vector subject_loglik(const Sequence& seq, const EventSet& ev) const {
    const Matrix ll = stage_loglik(stage_trajectories(seq, ev));
    Vector out(ll.rows());
    const double log_stages = std::log(static_cast<double>(ll.cols()));
    for (Eigen::Index i = 0; i < ll.rows(); ++i) {
      const double m = ll.row(i).maxCoeff();
      out(i) = m + std::log((ll.row(i).array() - m).exp().sum()) - log_stages;
    }
    return out;
  }

private:
  Matrix zs_;
  Vector inv_;
  Vector sq_;
  double norm_ = 0;
};

inline double sequence_loglik(const Matrix& z, const Sequence& seq, const EventSet& ev, const Vector& noise) {
  if (z.rows() == 0) return 0.0;
  return LikelihoodCache(z, noise).subject_loglik(seq, ev).sum();
}

struct SustainConfig {
  int n_subtypes = 1;
  int n_restarts = 4;
  int max_em_iter = 20;
  int greedy_passes = 1;
  double tol = 1e-6; // negative: always run max_em_iter iterations
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<double> thresholds{1, 2, 3};
  double z_max = 5;
  double noise = 1;
  // Harness-side preselection: keep the n variables with the largest mean
  // patient z before fitting (0 = all).
  int max_variables = 0;

  void validate() const {
    if (n_subtypes < 1) throw ConfigError("SuStaIn needs C >= 1");
    if (max_variables < 0) throw ConfigError("SuStaIn max_variables must be non-negative");
    if (n_restarts < 1 || max_em_iter < 1 || greedy_passes < 1) throw ConfigError("SuStaIn iteration counts must be positive");
    if (!(noise > 0)) throw ConfigError("SuStaIn noise SD must be positive");
  }
};

struct SustainFit {
  SubtypeModel model;
  double loglik = 0;
  std::vector<double> loglik_trace; // winning restart, one entry per EM iteration
  std::vector<double> iter_ms;      // winning restart
  int restart = 0;
  bool converged = false;
};

namespace detail {

// Mixture log-likelihood and responsibilities given per-subtype subject logliks.
inline double responsibilities(const Matrix& ll, const std::vector<double>& f, Matrix& resp) {
  const Eigen::Index n = ll.rows(), c = ll.cols();
  resp.resize(n, c);
  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < c; ++k) {
      resp(i, k) = f[k] > 0 ? std::log(f[k]) + ll(i, k) : -std::numeric_limits<double>::infinity();
      m = std::max(m, resp(i, k));
    }
    double s = 0;
    for (Eigen::Index k = 0; k < c; ++k) s += std::exp(resp(i, k) - m);
    const double lse = m + std::log(s);
    total += lse;
    for (Eigen::Index k = 0; k < c; ++k) resp(i, k) = std::exp(resp(i, k) - lse);
  }
  return total;
}

// One greedy pass: every event is moved to its best admissible position under
// the weighted log-likelihood. Only strict improvements are accepted.
inline double reposition_pass(Sequence& seq, const EventSet& ev, const LikelihoodCache& cache, const Vector& weight,
                              double current, const Deadline& deadline) {
  const int n = static_cast<int>(seq.size());
  for (int v = 0; v < ev.n_vars(); ++v) {
    for (int l = 0; l < ev.levels(v); ++l) {
      deadline.check();
      const Event target{v, l};
      const int from = static_cast<int>(std::find(seq.begin(), seq.end(), target) - seq.begin());
      Sequence base = seq;
      base.erase(base.begin() + from);
      // Admissible slots lie strictly between the neighbouring levels.
      int lo = 0, hi = n - 1;
      for (int p = 0; p < n - 1; ++p) {
        if (base[p].variable != v) continue;
        if (base[p].level == l - 1) lo = p + 1;
        if (base[p].level == l + 1) hi = p;
      }
      int best_slot = from;
      double best = current;
      for (int slot = lo; slot <= hi; ++slot) {
        if (slot == from) continue;
        Sequence trial = base;
        trial.insert(trial.begin() + slot, target);
        const double val = weight.dot(cache.subject_loglik(trial, ev));
        if (val > best + 1e-12) {
          best = val;
          best_slot = slot;
        }
      }
      if (best_slot != from) {
        base.insert(base.begin() + best_slot, target);
        seq = std::move(base);
        current = best;
      }
    }
  }
  return current;
}

inline SustainFit run_restart(const LikelihoodCache& cache, const EventSet& ev, const SustainConfig& cfg, int restart,
                              const Deadline& deadline) {
  using Clock = std::chrono::steady_clock;
  Rng rng = make_rng(cfg.seed, stream::restart, restart);
  const int c = cfg.n_subtypes;
  const Eigen::Index n = cache.n_subjects();

  SustainFit fit;
  fit.restart = restart;
  fit.model.events = ev;
  fit.model.noise = Vector::Constant(ev.n_vars(), cfg.noise);
  fit.model.fractions.assign(c, 1.0 / c);
  for (int k = 0; k < c; ++k) fit.model.sequences.push_back(random_sequence(ev, rng));

  Matrix ll(n, c), resp;
  for (int k = 0; k < c; ++k) ll.col(k) = cache.subject_loglik(fit.model.sequences[k], ev);
  double total = responsibilities(ll, fit.model.fractions, resp);
  for (int it = 0; it < cfg.max_em_iter; ++it) {
    const auto t0 = Clock::now();
    deadline.check();
    for (int k = 0; k < c; ++k) {
      const Vector w = resp.col(k);
      double cur = w.dot(ll.col(k));
      for (int pass = 0; pass < cfg.greedy_passes; ++pass) {
        const double next = reposition_pass(fit.model.sequences[k], ev, cache, w, cur, deadline);
        const bool moved = next > cur;
        cur = next;
        if (!moved) break;
      }
      ll.col(k) = cache.subject_loglik(fit.model.sequences[k], ev);
    }
    if (n > 0)
      for (int k = 0; k < c; ++k) fit.model.fractions[k] = resp.col(k).sum() / static_cast<double>(n);
    const double next = responsibilities(ll, fit.model.fractions, resp);
    fit.loglik_trace.push_back(next);
    fit.iter_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    const bool stalled = next - total <= cfg.tol;
    total = next;
    if (stalled) {
      fit.converged = true;
      break;
    }
  }
  fit.loglik = total;
  return fit;
}

} // namespace detail

// EM over C event sequences: the E-step computes subject responsibilities over
// subtypes, the M-step repositions single events greedily under the
// responsibility-weighted log-likelihood and updates the mixture fractions.
// The best of n_restarts random starts (by total log-likelihood) is returned.
inline SustainFit fit_sustain(const Matrix& z, const SustainConfig& cfg, const Deadline& deadline = Deadline::never()) {
  cfg.validate();
  const EventSet ev = EventSet::uniform(static_cast<int>(z.cols()), cfg.thresholds, cfg.z_max);
  const double space = ordering_count_log10(ev);
  if (space < 9 && std::log10(static_cast<double>(cfg.n_subtypes)) > space + 1e-9)
    throw ConfigError("SuStaIn: C=" + std::to_string(cfg.n_subtypes) + " exceeds the number of distinct sequences");
  const LikelihoodCache cache(z, Vector::Constant(z.cols(), cfg.noise));

  std::vector<SustainFit> fits(cfg.n_restarts);
  parallel_for(static_cast<std::size_t>(cfg.n_restarts), cfg.workers,
               [&](std::size_t r) { fits[r] = detail::run_restart(cache, ev, cfg, static_cast<int>(r), deadline); });
  std::size_t best = 0;
  for (std::size_t r = 1; r < fits.size(); ++r)
    if (fits[r].loglik > fits[best].loglik) best = r;
  return fits[best];
}

// Columns with the n largest mean z, in ascending column order. Ties go to
// the lower index.
inline std::vector<int> select_variables(const Matrix& z, int n) {
  std::vector<int> idx(z.cols());
  std::iota(idx.begin(), idx.end(), 0);
  if (n <= 0 || n >= z.cols()) return idx;
  const Vector mean = z.colwise().mean().transpose();
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return mean(a) > mean(b); });
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Posterior over (subtype, stage) for every subject.
struct StagePosterior {
  int n_subtypes = 0;
  int n_stages = 0; // E + 1
  Matrix prob;      // subjects x (n_subtypes * n_stages), subtype-major

  double at(Eigen::Index subject, int subtype, int stage) const { return prob(subject, subtype * n_stages + stage); }

  Vector subtype_marginal(Eigen::Index subject) const {
    Vector m(n_subtypes);
    for (int c = 0; c < n_subtypes; ++c) m(c) = prob.row(subject).segment(c * n_stages, n_stages).sum();
    return m;
  }

  // Argmax over subtypes of the stage-marginalized posterior; 1-based.
  std::vector<int> labels() const {
    std::vector<int> out(prob.rows(), 1);
    for (Eigen::Index i = 0; i < prob.rows(); ++i) {
      const Vector m = subtype_marginal(i);
      int best = 0;
      for (int c = 1; c < n_subtypes; ++c)
        if (m(c) > m(best)) best = c;
      out[i] = best + 1;
    }
    return out;
  }

  // Most probable stage within the subject's assigned subtype.
  std::vector<int> stages() const {
    const auto lab = labels();
    std::vector<int> out(prob.rows(), 0);
    for (Eigen::Index i = 0; i < prob.rows(); ++i)
      prob.row(i).segment((lab[i] - 1) * n_stages, n_stages).maxCoeff(&out[i]);
    return out;
  }
};

inline StagePosterior stage_and_assign(const SubtypeModel& model, const Matrix& z) {
  model.validate();
  const LikelihoodCache cache(z, model.noise);
  StagePosterior post;
  post.n_subtypes = model.n_subtypes();
  post.n_stages = model.events.n_events() + 1;
  post.prob.resize(z.rows(), post.n_subtypes * post.n_stages);
  for (int c = 0; c < post.n_subtypes; ++c) {
    Matrix ll = cache.stage_loglik(stage_trajectories(model.sequences[c], model.events));
    const double lf = model.fractions[c] > 0 ? std::log(model.fractions[c]) : -std::numeric_limits<double>::infinity();
    post.prob.middleCols(c * post.n_stages, post.n_stages) = (ll.array() + lf).matrix();
  }
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = post.prob.row(i).maxCoeff();
    post.prob.row(i) = (post.prob.row(i).array() - m).exp();
    post.prob.row(i) /= post.prob.row(i).sum();
  }
  return post;
}

inline nlohmann::json model_json(const SubtypeModel& m, const std::vector<std::string>& names = {}) {
  nlohmann::json j;
  nlohmann::json seqs = nlohmann::json::array();
  for (const auto& s : m.sequences) {
    nlohmann::json events = nlohmann::json::array();
    for (const Event& e : s) {
      nlohmann::json o{{"variable", e.variable}, {"z", m.events.thresholds[e.variable][e.level]}};
      if (!names.empty()) o["name"] = names[e.variable];
      events.push_back(o);
    }
    seqs.push_back(events);
  }
  j["sequences"] = seqs;
  j["fractions"] = m.fractions;
  j["noise"] = std::vector<double>(m.noise.data(), m.noise.data() + m.noise.size());
  j["thresholds"] = m.events.thresholds;
  j["z_max"] = m.events.z_max;
  return j;
}

} // namespace biobench::sustain
