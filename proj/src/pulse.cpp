#include "pcactl/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "pcactl/errors.hpp"

namespace pcactl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// THz * fs -> cycles
constexpr double kThzFs = 1e-3;

}  // namespace

bool Genome::valid() const {
  if (!is_power_of_two(levels)) return false;
  return std::all_of(genes.begin(), genes.end(),
                     [&](int g) { return g >= 0 && g < levels; });
}

Genome Genome::shifted(int shift) const {
  Genome out = *this;
  for (int& g : out.genes) g = ((g + shift) % levels + levels) % levels;
  return out;
}

void SpectralGrid::validate() const {
  if (n_bins < 2) throw ConfigError("spectral grid needs at least 2 bins");
  if (!(bin_width > 0.0)) throw ConfigError("bin_width must be positive");
  if (!(envelope_fwhm > 0.0)) throw ConfigError("envelope_fwhm must be positive");
}

double SpectralGrid::envelope(int i) const {
  const double x = offset(i) / envelope_fwhm;
  return std::exp(-4.0 * std::numbers::ln2 * x * x);
}

double SpectralField::energy() const {
  double e = 0.0;
  for (double a : amplitudes) e += a * a;
  return e;
}

double TemporalField::energy() const {
  double e = 0.0;
  for (const cplx& s : samples) e += std::norm(s);
  return e * dt;
}

std::vector<double> WignerMap::time_marginal() const {
  std::vector<double> out(rows(), 0.0);
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) out[r] += at(r, c);
  return out;
}

std::size_t WignerMap::nearest_row(double omega) const {
  std::size_t best = 0;
  for (std::size_t r = 1; r < omega_axis.size(); ++r)
    if (std::abs(omega_axis[r] - omega) < std::abs(omega_axis[best] - omega)) best = r;
  return best;
}

double IntensitySpectrum::resolution() const {
  return freq_axis.size() > 1 ? freq_axis[1] - freq_axis[0] : 0.0;
}

std::size_t IntensitySpectrum::nearest_bin(double freq) const {
  const double df = resolution();
  const auto half = static_cast<double>(values.size() / 2);
  const double idx = std::clamp(std::round(freq / df), 0.0, half);
  return static_cast<std::size_t>(idx);
}

SpectralField genome_to_spectral_field(const Genome& genome, const SpectralGrid& grid) {
  grid.validate();
  if (static_cast<int>(genome.size()) != grid.n_bins)
    throw DimensionError("genome length " + std::to_string(genome.size()) +
                         " does not match grid with " + std::to_string(grid.n_bins) + " bins");
  if (!genome.valid()) throw DimensionError("genome has genes outside [0, levels)");

  SpectralField field{grid, {}, {}};
  field.amplitudes.resize(grid.n_bins);
  field.phases.resize(grid.n_bins);
  for (int i = 0; i < grid.n_bins; ++i) {
    field.amplitudes[i] = grid.envelope(i);
    field.phases[i] = genome.phase(i);
  }
  return field;
}

TemporalField synthesize_temporal(const SpectralField& field, int n_t) {
  const SpectralGrid& grid = field.grid;
  grid.validate();
  if (field.amplitudes.size() != static_cast<std::size_t>(grid.n_bins) ||
      field.phases.size() != static_cast<std::size_t>(grid.n_bins))
    throw DimensionError("spectral field arrays do not match the grid");
  if (!is_power_of_two(n_t) || n_t < 4 * grid.n_bins)
    throw ResolutionError("n_t must be a power of two and at least 4 * n_bins (got " +
                          std::to_string(n_t) + ")");
  if (!(field.energy() > 0.0)) throw DegenerateFieldError("spectral field has zero energy");

  // Bin i has offset p_i = i - (n-1)/2 in units of bin_width, with p_i = q_i + h
  // and h in {0, 1/2}. With t_k = (k - n_t/2) dt and dt = 1/(n_t bw):
  //   exp(-2 pi i p (k - n_t/2)/n_t) = exp(i pi p) exp(-2 pi i h k/n_t) exp(-2 pi i q k/n_t)
  const double h = (grid.n_bins % 2 == 0) ? 0.5 : 0.0;
  const double centre = 0.5 * (grid.n_bins - 1);
  std::vector<cplx> buf(static_cast<std::size_t>(n_t), cplx{});
  for (int i = 0; i < grid.n_bins; ++i) {
    const double p = i - centre;
    const auto q = static_cast<long>(std::lround(p - h));
    const auto slot = static_cast<std::size_t>(((q % n_t) + n_t) % n_t);
    buf[slot] += field.value(i) * std::polar(1.0, std::numbers::pi * p);
  }
  detail::fft_inplace(buf, -1);

  TemporalField out;
  out.dt = 1.0 / (kThzFs * n_t * grid.bin_width);
  const double scale = 1.0 / std::sqrt(n_t * out.dt);
  for (int k = 0; k < n_t; ++k) {
    cplx ramp = h == 0.0 ? cplx{1.0, 0.0} : std::polar(1.0, -kTwoPi * h * k / n_t);
    buf[k] *= ramp * scale;
  }
  out.samples = std::move(buf);
  return out;
}

std::vector<double> intensity(const TemporalField& field) {
  std::vector<double> out(field.samples.size());
  std::transform(field.samples.begin(), field.samples.end(), out.begin(),
                 [](const cplx& s) { return std::norm(s); });
  return out;
}

IntensitySpectrum intensity_spectrum(std::span<const double> series, double dt) {
  if (series.empty()) throw DimensionError("intensity series is empty");
  if (series.size() < 4) throw DimensionError("intensity series needs at least 4 samples");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");

  const std::size_t n = series.size();
  std::vector<cplx> buf(series.begin(), series.end());
  detail::fft_inplace(buf, +1);

  IntensitySpectrum out;
  out.freq_axis.resize(n);
  out.values.resize(n);
  const double df = 1.0 / (kThzFs * static_cast<double>(n) * dt);
  const auto origin = static_cast<double>(n / 2);
  for (std::size_t m = 0; m < n; ++m) {
    const auto signed_m = m < (n + 1) / 2 ? static_cast<double>(m)
                                           : static_cast<double>(m) - static_cast<double>(n);
    out.freq_axis[m] = signed_m * df;
    // Undo the FFT's time origin at k = 0 so t = 0 sits at sample n/2.
    const double shift = -kTwoPi * static_cast<double>(m) * origin / static_cast<double>(n);
    out.values[m] = buf[m] * std::polar(dt, shift);
  }
  // Real input: enforce exact conjugate symmetry against FFT rounding.
  out.values[0] = {out.values[0].real(), 0.0};
  for (std::size_t m = 1; m < n - m; ++m) out.values[n - m] = std::conj(out.values[m]);
  if (n % 2 == 0) out.values[n / 2] = {out.values[n / 2].real(), 0.0};
  return out;
}

WignerMap wigner(const SpectralField& field, int n_t) {
  const SpectralGrid& grid = field.grid;
  grid.validate();
  if (!is_power_of_two(n_t) || n_t < 4 * grid.n_bins)
    throw ResolutionError("n_t must be a power of two and at least 4 * n_bins");
  if (!(field.energy() > 0.0)) throw DegenerateFieldError("spectral field has zero energy");

  const int n = grid.n_bins;
  const int rows = 2 * n - 1;
  WignerMap map;
  map.omega_axis.resize(rows);
  map.t_axis.resize(n_t);
  map.values.assign(static_cast<std::size_t>(rows) * n_t, 0.0);
  const double dt = 1.0 / (kThzFs * n_t * grid.bin_width);
  for (int k = 0; k < n_t; ++k) map.t_axis[k] = (k - n_t / 2) * dt;

  // exp(+2 pi i j / n_t) for j in [0, n_t)
  std::vector<cplx> twiddle(n_t);
  for (int j = 0; j < n_t; ++j) twiddle[j] = std::polar(1.0, kTwoPi * j / n_t);

  std::vector<cplx> spectrum(n);
  for (int i = 0; i < n; ++i) spectrum[i] = field.value(i);

  // Row s pairs bins a + b = s, i.e. omega = (a+b)/2 and omega' = (b-a)/2 in
  // bin units. The synthesis uses exp(-2 pi i f t), so the kernel that makes
  // the omega-marginal equal |E(t)|^2 is exp(+2 pi i d (k - n_t/2)/n_t) with
  // d = b - a.
  double residue = 0.0;
  for (int s = 0; s < rows; ++s) {
    map.omega_axis[s] = grid.center_frequency + (0.5 * s - 0.5 * (n - 1)) * grid.bin_width;
    const int a_lo = std::max(0, s - (n - 1));
    const int a_hi = std::min(n - 1, s);
    for (int k = 0; k < n_t; ++k) {
      const int tk = k - n_t / 2;
      cplx acc{};
      for (int a = a_lo; a <= a_hi; ++a) {
        const int b = s - a;
        const long d = b - a;
        const auto j = static_cast<std::size_t>((((d * tk) % n_t) + n_t) % n_t);
        acc += spectrum[a] * std::conj(spectrum[b]) * twiddle[j];
      }
      map.values[static_cast<std::size_t>(s) * n_t + k] = acc.real();
      residue = std::max(residue, std::abs(acc.imag()));
    }
  }
  map.imag_residue = residue;
  return map;
}

}  // namespace pcactl
