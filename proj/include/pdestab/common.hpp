#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

namespace pdestab {

/// Extended real used in reports: a finite double or an explicit +infinity
/// marker. Reports never store floating-point infinities directly.
struct ExtReal {
  double value = 0.0;
  bool finite = true;

  static ExtReal inf() { return {0.0, false}; }
  static ExtReal of(double v) { return {v, true}; }

  double or_inf() const {
    return finite ? value : std::numeric_limits<double>::infinity();
  }
  bool is_inf() const { return !finite; }
};

inline ExtReal ext_min(ExtReal a, ExtReal b) {
  if (!a.finite) return b;
  if (!b.finite) return a;
  return a.value <= b.value ? a : b;
}

/// Where a reported value came from.
enum class Provenance {
  formula,         // closed-form arithmetic
  scanned,         // finite-horizon sampling of an expression
  declared,        // user-supplied declaration
  constant,        // expression proved t-independent by inspection
  truncated_tail,  // numeric truncation plus an analytic tail bound
};

inline std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::formula: return "formula";
    case Provenance::scanned: return "scanned";
    case Provenance::declared: return "declared";
    case Provenance::constant: return "constant";
    case Provenance::truncated_tail: return "truncated+tail";
  }
  return "?";
}

/// 17-significant-digit decimal rendering (round-trips IEEE doubles).
inline std::string to_string_17g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// FNV-1a 64-bit hash, used for stable problem digests.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace pdestab
