#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pcactl/genome.hpp"

namespace pcactl::test {

inline constexpr double kPi = std::numbers::pi;

inline Genome random_genome(std::mt19937_64& rng, int n = 25, int levels = 32) {
  std::uniform_int_distribution<int> d(0, levels - 1);
  Genome g{std::vector<int>(n), levels};
  for (int& x : g.genes) x = d(rng);
  return g;
}

inline double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pcactl-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace pcactl::test
