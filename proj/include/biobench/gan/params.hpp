#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"

namespace biobench::gan {

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m1; // momentum / first moment
  Matrix m2; // second moment (adam only)
  double lr_scale = 1.0;
};

// Named parameter blocks; vectors are stored as one-column matrices.
class ParamSet {
public:
  int add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    Param p;
    p.name = std::move(name);
    p.value = Matrix::Zero(rows, cols);
    p.grad = p.m1 = p.m2 = p.value;
    blocks_.push_back(std::move(p));
    return static_cast<int>(blocks_.size()) - 1;
  }

  Param& operator[](int i) { return blocks_[i]; }
  const Param& operator[](int i) const { return blocks_[i]; }
  Matrix& val(int i) { return blocks_[i].value; }
  const Matrix& val(int i) const { return blocks_[i].value; }
  Matrix& grad(int i) { return blocks_[i].grad; }

  int size() const { return static_cast<int>(blocks_.size()); }
  auto begin() { return blocks_.begin(); }
  auto end() { return blocks_.end(); }
  auto begin() const { return blocks_.begin(); }
  auto end() const { return blocks_.end(); }

  int find(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
      if (blocks_[i].name == name) return i;
    return -1;
  }

  void zero_grad() {
    for (auto& p : blocks_) p.grad.setZero();
  }

  bool finite() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const Param& p) { return p.value.allFinite(); });
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& p : blocks_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

private:
  std::vector<Param> blocks_;
};

enum class Optimizer { sgd_momentum, adam };

NLOHMANN_JSON_SERIALIZE_ENUM(Optimizer, {{Optimizer::sgd_momentum, "sgd_momentum"}, {Optimizer::adam, "adam"}})

struct OptimizerState {
  Optimizer kind = Optimizer::sgd_momentum;
  double lr = 0.01;
  double momentum = 0.9;
  long step = 0;
};

inline void apply_update(ParamSet& ps, OptimizerState& st) {
  ++st.step;
  for (auto& p : ps) {
    if (st.kind == Optimizer::sgd_momentum) {
      p.m1 = st.momentum * p.m1 - st.lr * p.lr_scale * p.grad;
      p.value += p.m1;
    } else {
      constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      p.m1 = b1 * p.m1 + (1 - b1) * p.grad;
      p.m2 = b2 * p.m2 + (1 - b2) * p.grad.cwiseAbs2();
      const double c1 = 1 - std::pow(b1, static_cast<double>(st.step));
      const double c2 = 1 - std::pow(b2, static_cast<double>(st.step));
      p.value.array() -= st.lr * p.lr_scale * (p.m1.array() / c1) / ((p.m2.array() / c2).sqrt() + eps);
    }
  }
}

// Rescale onto the Frobenius ball of the given radius.
inline void project_frobenius(Matrix& a, double radius) {
  const double n = a.norm();
  if (n > radius && n > 0) a *= radius / n;
}

// --- base64 of little-endian float64 blocks -------------------------------

inline std::string base64_encode(const std::vector<unsigned char>& bytes) {
  static constexpr char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += tbl[(v >> 6) & 63];
    out += tbl[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += tbl[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

inline std::vector<unsigned char> base64_decode(std::string_view s) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (s.size() % 4 != 0) throw DataError("base64 length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      if (s[i + k] == '=') {
        v[k] = 0;
        ++pad;
      } else if ((v[k] = val(s[i + k])) < 0 || pad > 0) {
        throw DataError("invalid base64 character");
      }
    }
    const std::uint32_t w = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<unsigned char>(w >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(w >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(w));
  }
  return out;
}

// Column-major values as little-endian IEEE-754 doubles.
inline std::string encode_block(const Matrix& m) {
  std::vector<unsigned char> bytes(static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(m.data()[i]);
    for (int b = 0; b < 8; ++b) bytes[static_cast<std::size_t>(i) * 8 + b] = static_cast<unsigned char>(u >> (8 * b));
  }
  return base64_encode(bytes);
}

inline Matrix decode_block(std::string_view text, Eigen::Index rows, Eigen::Index cols) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * 8) throw DataError("parameter block size does not match its shape");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(i) * 8 + b]) << (8 * b);
    m.data()[i] = std::bit_cast<double>(u);
  }
  return m;
}

inline nlohmann::json params_to_json(const ParamSet& ps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : ps)
    arr.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}, {"data", encode_block(p.value)}});
  return arr;
}

// Fills the blocks of `ps` (already shaped) from a checkpoint array.
inline void params_from_json(ParamSet& ps, const nlohmann::json& arr) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != ps.size()) throw DataError("checkpoint block count mismatch");
  for (int i = 0; i < ps.size(); ++i) {
    const auto& b = arr[i];
    if (b.at("name").get<std::string>() != ps[i].name) throw DataError("checkpoint block order mismatch at " + ps[i].name);
    const auto rows = b.at("rows").get<Eigen::Index>(), cols = b.at("cols").get<Eigen::Index>();
    if (rows != ps[i].value.rows() || cols != ps[i].value.cols()) throw DataError("checkpoint shape mismatch for " + ps[i].name);
    ps.val(i) = decode_block(b.at("data").get<std::string>(), rows, cols);
  }
}

} // namespace biobench::gan
