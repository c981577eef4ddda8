#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/parallel.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/sustain/fit.hpp"

namespace biobench::sustain {

struct ChainResult {
  std::vector<Sequence> samples; // state after each proposal
  std::vector<double> loglik;    // mixture log-likelihood after each proposal
  Matrix position_freq;          // canonical events x positions
  double acceptance_rate = 0;
  int proposals = 0;
};

struct McmcResult {
  std::vector<ChainResult> chains; // one per subtype
};

// Metropolis-Hastings over the sequence of each subtype in turn, holding the
// other subtypes and the fractions at the fitted values. A proposal swaps two
// positions; swaps that break a variable's threshold order are rejected.
inline McmcResult mcmc_sample(const Matrix& z, const SubtypeModel& model, int n_iter, std::uint64_t seed, int workers = 1) {
  if (n_iter < 1) throw ConfigError("mcmc_sample needs n_iter >= 1");
  model.validate();
  const LikelihoodCache cache(z, model.noise);
  const EventSet& ev = model.events;
  const int c = model.n_subtypes();
  const int n_events = ev.n_events();
  const auto offsets = event_offsets(ev);

  Matrix base(z.rows(), c);
  for (int k = 0; k < c; ++k) base.col(k) = cache.subject_loglik(model.sequences[k], ev);

  McmcResult out;
  out.chains.resize(c);
  parallel_for(static_cast<std::size_t>(c), workers, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    Rng rng = make_rng(seed, stream::chain, k);
    std::uniform_int_distribution<int> pick(0, n_events - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix ll = base;
    Matrix resp;
    auto mixture = [&](const Matrix& m) { return detail::responsibilities(m, model.fractions, resp); };

    ChainResult& ch = out.chains[k];
    ch.position_freq = Matrix::Zero(n_events, n_events);
    Sequence cur = model.sequences[k];
    double cur_ll = mixture(ll);
    int accepted = 0;
    for (int it = 0; it < n_iter; ++it) {
      ++ch.proposals;
      int a = pick(rng), b = n_events > 1 ? pick(rng) : a;
      if (n_events > 1)
        while (b == a) b = pick(rng);
      Sequence prop = cur;
      std::swap(prop[a], prop[b]);
      if (a != b && valid_sequence(prop, ev)) {
        Matrix trial = ll;
        trial.col(k) = cache.subject_loglik(prop, ev);
        const double prop_ll = mixture(trial);
        const double delta = prop_ll - cur_ll;
        if (delta >= 0 || unit(rng) < std::exp(delta)) {
          cur = std::move(prop);
          cur_ll = prop_ll;
          ll = std::move(trial);
          ++accepted;
        }
      }
      ch.samples.push_back(cur);
      ch.loglik.push_back(cur_ll);
      for (int p = 0; p < n_events; ++p) ch.position_freq(offsets[cur[p].variable] + cur[p].level, p) += 1.0;
    }
    ch.position_freq /= static_cast<double>(n_iter);
    ch.acceptance_rate = static_cast<double>(accepted) / n_iter;
  });
  return out;
}

} // namespace biobench::sustain
