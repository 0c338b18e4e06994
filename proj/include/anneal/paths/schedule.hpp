#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "anneal/core/errors.hpp"

namespace anneal {

/// Annealing level lambda(t) in [0, 1] as a function of algorithm time t.
///   linear:      min(1, t)
///   exponential: min(1, exp(-2 (T - t))), so lambda(0) = exp(-2T)
struct Schedule {
  enum class Kind { linear, exponential };

  Kind kind = Kind::linear;
  double horizon = 1.0;  // T, exponential only

  static Schedule linear() { return {Kind::linear, 1.0}; }
  static Schedule exponential(double horizon) {
    if (!(horizon > 0.0)) throw InputError("exponential schedule needs a positive horizon");
    return {Kind::exponential, horizon};
  }
};

inline double schedule_eval(const Schedule& s, double t) {
  if (!(t >= 0.0)) throw InputError("schedule_eval: time must be non-negative");
  switch (s.kind) {
    case Schedule::Kind::linear:
      return std::min(1.0, t);
    case Schedule::Kind::exponential:
      if (!(s.horizon > 0.0)) throw InputError("exponential schedule needs a positive horizon");
      return t >= s.horizon ? 1.0 : std::min(1.0, std::exp(-2.0 * (s.horizon - t)));
  }
  return 1.0;
}

inline const char* to_string(Schedule::Kind k) {
  return k == Schedule::Kind::linear ? "linear" : "exponential";
}

}  // namespace anneal
