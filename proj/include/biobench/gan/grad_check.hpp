#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/gan/params.hpp"
#include "biobench/gan/smile.hpp"
#include "biobench/gan/surreal.hpp"

namespace biobench::gan {

struct GradCheckReport {
  double max_rel_error = 0;
  std::string worst_block;
  Eigen::Index worst_entry = -1;
  std::size_t checked = 0;
};

// Central differences of `loss` against the analytic gradient left in `ps`
// by `analytic`. Relative error |a - n| / max(|a|, |n|, 1e-6). With
// max_per_block > 0, a seeded subset of entries is probed per block.
inline void check_blocks(ParamSet& ps, const std::function<double()>& loss, const std::function<void()>& analytic, double eps,
                         int max_per_block, std::uint64_t seed, GradCheckReport& rep) {
  ps.zero_grad();
  analytic();
  Rng rng = make_rng(seed);
  for (int blk = 0; blk < ps.size(); ++blk) {
    Matrix& v = ps.val(blk);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (max_per_block > 0 && static_cast<int>(idx.size()) > max_per_block) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_per_block);
    }
    for (Eigen::Index i : idx) {
      const double orig = v.data()[i];
      v.data()[i] = orig + eps;
      const double up = loss();
      v.data()[i] = orig - eps;
      const double down = loss();
      v.data()[i] = orig;
      const double num = (up - down) / (2 * eps);
      const double ana = ps[blk].grad.data()[i];
      const double rel = std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), 1e-6});
      ++rep.checked;
      if (rel > rep.max_rel_error) {
        rep.max_rel_error = rel;
        rep.worst_block = ps[blk].name;
        rep.worst_entry = i;
      }
    }
  }
}

inline GradCheckReport grad_check(SmileModel m, const SmileBatch& b, double eps, int max_per_block = 0, std::uint64_t seed = 0) {
  if (!(eps > 0)) throw ConfigError("grad_check needs eps > 0");
  GradCheckReport rep;
  check_blocks(
      m.gen, [&] { return smile_generator_loss(m, b, false).total(); }, [&] { smile_generator_loss(m, b, true); }, eps,
      max_per_block, seed, rep);
  check_blocks(
      m.disc, [&] { return smile_discriminator_loss(m, b, false); }, [&] { smile_discriminator_loss(m, b, true); }, eps,
      max_per_block, seed + 1, rep);
  return rep;
}

inline GradCheckReport grad_check(SurrealModel s, const SurrealBatch& b, double eps, int max_per_block = 0, std::uint64_t seed = 0) {
  if (!(eps > 0)) throw ConfigError("grad_check needs eps > 0");
  GradCheckReport rep;
  check_blocks(
      s.gen, [&] { return surreal_generator_loss(s, b, false).total(); }, [&] { surreal_generator_loss(s, b, true); }, eps,
      max_per_block, seed, rep);
  check_blocks(
      s.disc, [&] { return surreal_discriminator_loss(s, b, false); }, [&] { surreal_discriminator_loss(s, b, true); }, eps,
      max_per_block, seed + 1, rep);
  return rep;
}

} // namespace biobench::gan
