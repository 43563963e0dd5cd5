#include "pcactl/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <string>
#include <thread>

#include "pcactl/errors.hpp"

namespace pcactl {
namespace {

constexpr double kImprovement = 1e-12;

template <class Gene>
struct Member {
  std::vector<Gene> genes;
  double fitness = 0.0;
  std::int64_t id = 0;
};

template <class Gene>
struct Child {
  std::vector<Gene> genes;
  std::vector<std::int64_t> parents;
};

// Higher fitness wins; equal fitness goes to the lower trial id.
template <class Gene>
bool fitter(const Member<Gene>& a, const Member<Gene>& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.id < b.id;
}

template <class Gene>
const Member<Gene>& tournament(std::span<const Member<Gene>> pop, int size, Rng& rng) {
  // Distinct entrants: partial Fisher-Yates over the index range.
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t entrants = std::min<std::size_t>(size, pop.size());
  const Member<Gene>* winner = nullptr;
  for (std::size_t i = 0; i < entrants; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    const Member<Gene>& m = pop[idx[i]];
    if (winner == nullptr || fitter(m, *winner)) winner = &m;
  }
  return *winner;
}

template <class Gene, class Draw>
std::vector<Child<Gene>> breed(std::span<const Member<Gene>> pop, const GaConfig& config,
                               Rng& rng, const Draw& draw) {
  for (const auto& m : pop)
    if (!std::isfinite(m.fitness))
      throw EvaluationError("trial " + std::to_string(m.id) + " has non-finite fitness");

  std::vector<std::size_t> ranked(pop.size());
  std::iota(ranked.begin(), ranked.end(), 0);
  std::sort(ranked.begin(), ranked.end(),
            [&](std::size_t a, std::size_t b) { return fitter(pop[a], pop[b]); });

  std::vector<Child<Gene>> next;
  next.reserve(config.population_size);
  for (int e = 0; e < config.elite_count && e < static_cast<int>(pop.size()); ++e) {
    const auto& elite = pop[ranked[e]];
    next.push_back({elite.genes, {elite.id, elite.id}});
  }

  std::bernoulli_distribution mutate(config.mutation_prob);
  while (static_cast<int>(next.size()) < config.population_size) {
    const auto& a = tournament(pop, config.tournament_size, rng);
    const auto& b = tournament(pop, config.tournament_size, rng);
    const std::size_t n = a.genes.size();
    std::vector<Gene> genes = a.genes;
    if (n >= 2) {
      std::uniform_int_distribution<std::size_t> cut_dist(1, n - 1);
      const std::size_t cut = cut_dist(rng);
      std::copy(b.genes.begin() + static_cast<std::ptrdiff_t>(cut), b.genes.end(),
                genes.begin() + static_cast<std::ptrdiff_t>(cut));
    }
    for (std::size_t i = 0; i < n; ++i)
      if (mutate(rng)) genes[i] = draw(i, rng);
    next.push_back({std::move(genes), {a.id, b.id}});
  }
  return next;
}

std::vector<double> evaluate_all(const std::vector<Genome>& genomes, const FitnessFn& fitness,
                                 int workers) {
  std::vector<double> out(genomes.size());
  const auto count = static_cast<int>(genomes.size());
  const int threads = std::clamp(workers, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) out[i] = fitness(genomes[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < count; i += threads) out[i] = fitness(genomes[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Generational loop shared by the full and reduced searches. `realize` maps
// a gene vector to the genome that is evaluated and the coefficients that
// are logged alongside it.
template <class Gene, class Draw, class Realize>
RunSummary evolve(const GaConfig& config, const Draw& draw, const Realize& realize,
                  std::size_t length, const FitnessFn& fitness, TrialSink& sink) {
  Rng rng(config.rng_seed);
  std::vector<Child<Gene>> brood(config.population_size);
  for (auto& child : brood) {
    child.genes.resize(length);
    for (std::size_t i = 0; i < length; ++i) child.genes[i] = draw(i, rng);
  }

  RunSummary summary;
  std::int64_t next_id = 0;
  std::vector<Member<Gene>> pop;
  double best = -std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int gen = 0;; ++gen) {
    std::vector<Genome> genomes;
    std::vector<std::vector<double>> coefficients;
    genomes.reserve(brood.size());
    for (const auto& child : brood) {
      auto [genome, coeffs] = realize(child.genes);
      genomes.push_back(std::move(genome));
      coefficients.push_back(std::move(coeffs));
    }
    const std::vector<double> scores = evaluate_all(genomes, fitness, config.workers);

    pop.clear();
    bool improved = false;
    for (std::size_t i = 0; i < brood.size(); ++i) {
      TrialRecord rec{next_id++, gen, genomes[i], scores[i], brood[i].parents, coefficients[i]};
      if (!std::isfinite(rec.fitness))
        throw EvaluationError("trial " + std::to_string(rec.trial_id) + " has non-finite fitness");
      sink.append(rec);
      ++summary.evaluations;
      if (summary.evaluations == 1 || rec.fitness > best + kImprovement) {
        improved = true;
        best = rec.fitness;
        summary.best = rec;
      }
      pop.push_back({brood[i].genes, rec.fitness, rec.trial_id});
    }
    summary.generations = gen + 1;
    summary.best_per_generation.push_back(best);
    stall = (gen == 0 || improved) ? 0 : stall + 1;
    if (summary.generations >= config.max_generations || stall >= config.stall_generations) break;

    brood = breed<Gene>(std::span<const Member<Gene>>(pop), config, rng, draw);
  }
  return summary;
}

auto level_draw(int levels) {
  return [levels](std::size_t, Rng& rng) {
    std::uniform_int_distribution<int> d(0, levels - 1);
    return d(rng);
  };
}

}  // namespace

void GaConfig::validate() const {
  if (population_size < 2) throw ConfigError("population_size must be at least 2");
  if (elite_count < 0 || elite_count >= population_size)
    throw ConfigError("elite_count must satisfy 0 <= elite_count < population_size");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
    throw ConfigError("mutation_prob must lie in [0, 1]");
  if (tournament_size < 2) throw ConfigError("tournament_size must be at least 2");
  if (max_generations < 1) throw ConfigError("max_generations must be at least 1");
  if (stall_generations < 1) throw ConfigError("stall_generations must be at least 1");
  if (genome_length < 1) throw ConfigError("genome_length must be positive");
  if (!is_power_of_two(levels) || levels < 2) throw ConfigError("levels must be a power of two");
  if (workers < 1) throw ConfigError("workers must be at least 1");
}

std::vector<Genome> init_population(const GaConfig& config, Rng& rng) {
  config.validate();
  auto draw = level_draw(config.levels);
  std::vector<Genome> out(config.population_size);
  for (auto& g : out) {
    g.levels = config.levels;
    g.genes.resize(config.genome_length);
    for (int i = 0; i < config.genome_length; ++i) g.genes[i] = draw(i, rng);
  }
  return out;
}

std::vector<Offspring> step_generation(std::span<const Scored> population,
                                       const GaConfig& config, Rng& rng) {
  config.validate();
  if (population.empty()) throw SampleSizeError("empty population");
  const int levels = population.front().genome.levels;
  std::vector<Member<int>> pop;
  pop.reserve(population.size());
  for (const auto& s : population) pop.push_back({s.genome.genes, s.fitness, s.trial_id});

  auto children = breed<int>(std::span<const Member<int>>(pop), config, rng, level_draw(levels));
  std::vector<Offspring> out;
  out.reserve(children.size());
  for (auto& c : children)
    out.push_back({Genome{std::move(c.genes), levels}, {c.parents[0], c.parents[1]}});
  return out;
}

Genome crossover(const Genome& a, const Genome& b, std::size_t cut) {
  if (a.size() != b.size()) throw DimensionError("crossover parents differ in length");
  if (cut > a.size()) throw DimensionError("crossover cut beyond genome length");
  Genome child = a;
  std::copy(b.genes.begin() + static_cast<std::ptrdiff_t>(cut), b.genes.end(),
            child.genes.begin() + static_cast<std::ptrdiff_t>(cut));
  return child;
}

RunSummary run_search(const GaConfig& config, const FitnessFn& fitness, TrialSink& sink) {
  config.validate();
  const int levels = config.levels;
  auto realize = [levels](const std::vector<int>& genes) {
    return std::pair{Genome{genes, levels}, std::vector<double>{}};
  };
  return evolve<int>(config, level_draw(levels), realize,
                     static_cast<std::size_t>(config.genome_length), fitness, sink);
}

void ReducedBasis::validate() const {
  if (controls.selected.empty())
    throw ConfigError("reduced search needs at least one principal control");
  if (!anchor.valid() || anchor.size() < 2) throw ConfigError("reduced search anchor is invalid");
  if (!(range_scale >= 0.0)) throw ConfigError("range scale must be non-negative");
  for (const auto& c : controls.selected) {
    if (!(c.eigenvalue > 0.0))
      throw ConfigError("principal control " + std::to_string(c.axis + 1) +
                        " has a non-positive eigenvalue");
    if (c.vector.size() + 1 != anchor.size())
      throw DimensionError("principal control does not match the anchor genome");
  }
}

double ReducedBasis::half_range(std::size_t j) const {
  return range_scale * std::sqrt(controls.selected[j].eigenvalue);
}

Genome ReducedBasis::decode(std::span<const double> eta) const {
  if (eta.size() != controls.size()) throw DimensionError("coefficient count mismatch");
  DeltaVector d = deltas(anchor);
  for (std::size_t j = 0; j < eta.size(); ++j)
    for (std::size_t r = 0; r < d.size(); ++r)
      d.values[r] += eta[j] * controls.selected[j].vector[r];
  return reconstruct_genome(d, anchor.phase(0), anchor.levels);
}

RunSummary reduced_search(const ReducedBasis& basis, const GaConfig& config,
                          const FitnessFn& fitness, TrialSink& sink) {
  config.validate();
  basis.validate();
  auto draw = [&basis](std::size_t j, Rng& rng) {
    const double h = basis.half_range(j);
    if (h == 0.0) return 0.0;
    std::uniform_real_distribution<double> d(-h, h);
    return d(rng);
  };
  auto realize = [&basis](const std::vector<double>& eta) {
    return std::pair{basis.decode(eta), eta};
  };
  return evolve<double>(config, draw, realize, basis.controls.size(), fitness, sink);
}

}  // namespace pcactl
