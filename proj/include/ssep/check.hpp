#pragma once

#include <string>

namespace ssep {

/// Outcome of a numerically checked inequality or identity.
/// `margin` is the worst-case slack (bound minus observed); it is >= 0 on success
/// for inequality checks and reports the tightest instance otherwise.
struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

}  // namespace ssep
