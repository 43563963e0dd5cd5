#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace pcactl {

/// Quantized spectral-phase genome. Gene i selects phase 2*pi*gene/levels
/// for spectral bin i.
struct Genome {
  std::vector<int> genes;
  int levels = 32;

  std::size_t size() const { return genes.size(); }
  double phase(std::size_t i) const {
    return 2.0 * std::numbers::pi * genes[i] / levels;
  }
  bool valid() const;
  /// Adds `shift` levels to every gene, modulo `levels`.
  Genome shifted(int shift) const;

  friend bool operator==(const Genome&, const Genome&) = default;
};

inline bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace pcactl
