#pragma once

#include <numbers>
#include <string_view>

#include "pcactl/genome.hpp"
#include "pcactl/pulse.hpp"

namespace pcactl {

enum class RamanTarget { Symmetric, Antisymmetric };

std::string_view to_string(RamanTarget target);
/// Accepts "sym"/"symmetric" and "anti"/"antisymmetric".
RamanTarget parse_target(std::string_view text);

/// Two-mode stimulated Raman surrogate. A pulse scores when its intensity
/// is modulated at the mode-separation frequency (a local maximum of
/// |FT[I]| there) and the modulation has the phase assigned to the target.
struct SrsModelParams {
  double coupling_frequency = 3.0;  // THz
  double phase_symmetric = 0.0;
  double phase_antisymmetric = std::numbers::pi / 2.0;
  double bandwidth = 0.25;     // THz, half-width of the averaging window
  double flank_offset = 1.0;   // THz, distance of the background bins
  int n_t = 1024;

  void validate() const;
  double target_phase(RamanTarget target) const {
    return target == RamanTarget::Symmetric ? phase_symmetric : phase_antisymmetric;
  }
};

struct FitnessBreakdown {
  double peak = 0.0;        // window mean of |Itilde| / Itilde(0)
  double background = 0.0;  // larger flank |Itilde| / Itilde(0)
  double modulation = 0.0;  // max(0, peak - background)
  double phase = 0.0;       // arg Itilde at the coupling frequency
  double fitness = 0.0;
};

FitnessBreakdown evaluate_fitness_detail(const SpectralField& field, RamanTarget target,
                                         const SrsModelParams& params);

double evaluate_fitness(const SpectralField& field, RamanTarget target,
                        const SrsModelParams& params);

/// Genome -> fitness closure over a fixed grid, target and model.
class SrsFitness {
 public:
  SrsFitness(SpectralGrid grid, RamanTarget target, SrsModelParams params = {});
  double operator()(const Genome& genome) const;

  const SpectralGrid& grid() const { return grid_; }
  RamanTarget target() const { return target_; }
  const SrsModelParams& params() const { return params_; }

 private:
  SpectralGrid grid_;
  RamanTarget target_;
  SrsModelParams params_;
};

}  // namespace pcactl
