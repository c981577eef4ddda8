#pragma once

#include <chrono>
#include <optional>

#include "biobench/core/error.hpp"

namespace biobench {

// Cooperative wall-clock budget. Long loops call check() between units of
// work; an expired deadline throws Cancelled.
class Deadline {
public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;

  static Deadline never() { return {}; }

  static Deadline after(double seconds) {
    Deadline d;
    d.at_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
    return d;
  }

  bool bounded() const { return at_.has_value(); }
  bool expired() const { return at_ && Clock::now() >= *at_; }

  void check() const {
    if (expired()) throw Cancelled();
  }

private:
  std::optional<Clock::time_point> at_;
};

} // namespace biobench
