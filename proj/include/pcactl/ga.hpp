#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pcactl/genome.hpp"
#include "pcactl/pca.hpp"

namespace pcactl {

using Rng = std::mt19937_64;
using FitnessFn = std::function<double(const Genome&)>;

struct GaConfig {
  int population_size = 50;
  int max_generations = 40;
  int stall_generations = 10;
  double mutation_prob = 0.03;
  int tournament_size = 3;
  int elite_count = 2;
  std::uint64_t rng_seed = 1;
  int genome_length = 25;
  int levels = 32;
  // Fitness evaluations per generation are spread over this many threads.
  int workers = 1;

  void validate() const;
};

struct TrialRecord {
  std::int64_t trial_id = 0;
  int generation = 0;
  Genome genome;
  double fitness = 0.0;
  std::vector<std::int64_t> parent_ids;
  // Reduced-basis coefficients eta_j; empty for full-basis trials.
  std::vector<double> coefficients;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Destination for every evaluated trial, in evaluation order.
class TrialSink {
 public:
  virtual ~TrialSink() = default;
  virtual void append(const TrialRecord& record) = 0;
};

class TrialLog : public TrialSink {
 public:
  void append(const TrialRecord& record) override { records_.push_back(record); }
  const std::vector<TrialRecord>& records() const { return records_; }

 private:
  std::vector<TrialRecord> records_;
};

struct RunSummary {
  TrialRecord best;
  int generations = 0;
  std::int64_t evaluations = 0;
  std::vector<double> best_per_generation;  // best-so-far after each generation
};

/// An evaluated population member as seen by selection.
struct Scored {
  Genome genome;
  double fitness = 0.0;
  std::int64_t trial_id = 0;
};

struct Offspring {
  Genome genome;
  std::array<std::int64_t, 2> parents{};
};

std::vector<Genome> init_population(const GaConfig& config, Rng& rng);

/// Elites first (parents = themselves), then tournament/crossover/mutation
/// children. Throws EvaluationError on non-finite fitness.
std::vector<Offspring> step_generation(std::span<const Scored> population,
                                       const GaConfig& config, Rng& rng);

/// One-point crossover: first `cut` genes from `a`, the rest from `b`.
Genome crossover(const Genome& a, const Genome& b, std::size_t cut);

RunSummary run_search(const GaConfig& config, const FitnessFn& fitness, TrialSink& sink);

/// Search over k principal-control coefficients around an anchor genome.
struct ReducedBasis {
  PrincipalControls controls;
  Genome anchor;
  double range_scale = 2.0;  // eta_j in [-c sqrt(lambda_j), +c sqrt(lambda_j)]

  void validate() const;
  double half_range(std::size_t j) const;
  /// Anchor deltas plus sum_j eta_j u_j, quantized back onto the genome grid.
  Genome decode(std::span<const double> eta) const;
};

RunSummary reduced_search(const ReducedBasis& basis, const GaConfig& config,
                          const FitnessFn& fitness, TrialSink& sink);

}  // namespace pcactl
