#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pcactl/genome.hpp"

namespace pcactl {

using cplx = std::complex<double>;

// Frequencies are in THz and times in fs throughout.

struct SpectralGrid {
  int n_bins = 25;
  double center_frequency = 374.7;  // 800 nm
  double bin_width = 1.0;
  double envelope_fwhm = 12.0;  // FWHM of the Gaussian amplitude envelope

  void validate() const;
  /// Offset of bin i from the center frequency.
  double offset(int i) const { return (i - 0.5 * (n_bins - 1)) * bin_width; }
  double frequency(int i) const { return center_frequency + offset(i); }
  /// Unit-peak Gaussian amplitude at bin i.
  double envelope(int i) const;
};

struct SpectralField {
  SpectralGrid grid;
  std::vector<double> amplitudes;
  std::vector<double> phases;  // radians, [0, 2pi)

  double energy() const;
  cplx value(int i) const { return std::polar(amplitudes[i], phases[i]); }
};

/// Complex field E(t) on a periodic window of n_t samples centered at t = 0.
/// Sample k sits at time (k - n_t/2) * dt.
struct TemporalField {
  double dt = 0.0;
  std::vector<cplx> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(samples.size() / 2)) * dt;
  }
  double energy() const;
};

/// Discrete Wigner distribution. Rows are on a half-bin frequency grid
/// (2*n_bins - 1 rows), columns on the temporal grid.
struct WignerMap {
  std::vector<double> omega_axis;  // THz (absolute)
  std::vector<double> t_axis;      // fs
  std::vector<double> values;      // row-major, omega_axis.size() x t_axis.size()
  double imag_residue = 0.0;       // max |Im W| before it was discarded

  double at(std::size_t row, std::size_t col) const {
    return values[row * t_axis.size() + col];
  }
  std::size_t rows() const { return omega_axis.size(); }
  std::size_t cols() const { return t_axis.size(); }
  /// Sum of W over t for each row.
  std::vector<double> time_marginal() const;
  /// Row nearest to the given absolute frequency.
  std::size_t nearest_row(double omega) const;
};

/// FT[I(t)] over the full DFT index range. Index m has frequency m/(N dt)
/// for m < N/2 and (m - N)/(N dt) above.
struct IntensitySpectrum {
  std::vector<double> freq_axis;  // THz
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  double resolution() const;
  /// Index of the non-negative frequency bin nearest to `freq`.
  std::size_t nearest_bin(double freq) const;
};

SpectralField genome_to_spectral_field(const Genome& genome, const SpectralGrid& grid);

/// Zero-padded inverse synthesis E(t_k) = sum_i c_i exp(-2 pi i f_i t_k),
/// scaled so dt * sum |E|^2 equals sum A_i^2.
TemporalField synthesize_temporal(const SpectralField& field, int n_t = 1024);

std::vector<double> intensity(const TemporalField& field);

/// Itilde(W) = dt * sum_k I(t_k) exp(+2 pi i W t_k) with t_k centered as in
/// TemporalField, so Itilde(0) is the pulse energy.
IntensitySpectrum intensity_spectrum(std::span<const double> intensity, double dt);

WignerMap wigner(const SpectralField& field, int n_t = 1024);

}  // namespace pcactl
