#include "pcactl/srs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcactl/errors.hpp"

namespace pcactl {

std::string_view to_string(RamanTarget target) {
  return target == RamanTarget::Symmetric ? "sym" : "anti";
}

RamanTarget parse_target(std::string_view text) {
  if (text == "sym" || text == "symmetric") return RamanTarget::Symmetric;
  if (text == "anti" || text == "antisymmetric") return RamanTarget::Antisymmetric;
  throw ConfigError("unknown Raman target '" + std::string(text) + "' (expected sym|anti)");
}

void SrsModelParams::validate() const {
  if (!(coupling_frequency > 0.0)) throw ConfigError("coupling_frequency must be positive");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!(flank_offset > bandwidth))
    throw ConfigError("flank_offset must exceed the averaging bandwidth");
  if (flank_offset >= coupling_frequency)
    throw ConfigError("flank_offset must be below the coupling frequency");
}

FitnessBreakdown evaluate_fitness_detail(const SpectralField& field, RamanTarget target,
                                         const SrsModelParams& params) {
  params.validate();
  if (!(field.energy() > 0.0)) throw DegenerateFieldError("spectral field has zero energy");

  const TemporalField temporal = synthesize_temporal(field, params.n_t);
  const std::vector<double> series = intensity(temporal);
  const IntensitySpectrum spec = intensity_spectrum(series, temporal.dt);

  const double dc = spec.values[0].real();
  const std::size_t half = spec.size() / 2;
  const double w0 = params.coupling_frequency;

  double sum = 0.0;
  int count = 0;
  for (std::size_t m = 0; m <= half; ++m) {
    if (std::abs(spec.freq_axis[m] - w0) <= params.bandwidth) {
      sum += std::abs(spec.values[m]);
      ++count;
    }
  }
  // Window narrower than the grid spacing: fall back to the nearest bin.
  if (count == 0) {
    sum = std::abs(spec.values[spec.nearest_bin(w0)]);
    count = 1;
  }

  FitnessBreakdown out;
  out.peak = sum / count / dc;
  const double lo = std::abs(spec.values[spec.nearest_bin(w0 - params.flank_offset)]);
  const double hi = std::abs(spec.values[spec.nearest_bin(w0 + params.flank_offset)]);
  out.background = std::max(lo, hi) / dc;
  out.modulation = std::max(0.0, out.peak - out.background);
  out.phase = std::arg(spec.values[spec.nearest_bin(w0)]);
  const double match = 0.5 * (1.0 + std::cos(out.phase - params.target_phase(target)));
  out.fitness = std::clamp(out.modulation * match, 0.0, 1.0);
  return out;
}

double evaluate_fitness(const SpectralField& field, RamanTarget target,
                        const SrsModelParams& params) {
  return evaluate_fitness_detail(field, target, params).fitness;
}

SrsFitness::SrsFitness(SpectralGrid grid, RamanTarget target, SrsModelParams params)
    : grid_(grid), target_(target), params_(params) {
  grid_.validate();
  params_.validate();
}

double SrsFitness::operator()(const Genome& genome) const {
  return evaluate_fitness(genome_to_spectral_field(genome, grid_), target_, params_);
}

}  // namespace pcactl
