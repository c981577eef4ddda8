#pragma once

#include <cmath>

#include "biobench/core/error.hpp"
#include "biobench/datagen/types.hpp"

namespace biobench::datagen {

struct ControlStats {
  Vector mean;
  Vector sd; // unbiased
};

inline ControlStats control_stats(const LabeledDataset& ds) {
  const Matrix c = ds.controls();
  if (c.rows() < 2) throw DataError("z-transform needs at least 2 control rows");
  ControlStats s;
  s.mean = c.colwise().mean().transpose();
  s.sd = ((c.rowwise() - s.mean.transpose()).array().square().colwise().sum() / static_cast<double>(c.rows() - 1))
             .sqrt()
             .transpose();
  for (Eigen::Index j = 0; j < s.sd.size(); ++j)
    if (!(s.sd(j) > 0)) throw DataError("zero-variance control column '" + ds.data.variable_names[j] + "'");
  return s;
}

inline Matrix standardize(const Matrix& x, const ControlStats& s) {
  return (x.rowwise() - s.mean.transpose()).array().rowwise() / s.sd.transpose().array();
}

// Patient rows in control-referenced z units.
inline Matrix z_transform(const LabeledDataset& ds) { return standardize(ds.patients(), control_stats(ds)); }

struct ZSplit {
  Matrix controls;
  Matrix patients;
};

inline ZSplit z_split(const LabeledDataset& ds) {
  const ControlStats s = control_stats(ds);
  return {standardize(ds.controls(), s), standardize(ds.patients(), s)};
}

} // namespace biobench::datagen
