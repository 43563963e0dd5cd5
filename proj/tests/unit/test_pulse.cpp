#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "pcactl/errors.hpp"
#include "pcactl/pulse.hpp"
#include "support.hpp"

using namespace pcactl;
using pcactl::test::kPi;

namespace {

Genome constant_genome(int value, int n = 25) { return Genome{std::vector<int>(n, value), 32}; }

// Direct O(n_bins * n_t) evaluation of the synthesis sum.
std::vector<cplx> direct_synthesis(const SpectralField& f, int n_t) {
  const double dt = 1000.0 / (n_t * f.grid.bin_width);
  std::vector<cplx> out(n_t);
  for (int k = 0; k < n_t; ++k) {
    const double t = (k - n_t / 2) * dt * 1e-3;  // ps
    cplx acc{};
    for (int i = 0; i < f.grid.n_bins; ++i)
      acc += f.value(i) * std::polar(1.0, -2.0 * kPi * f.grid.offset(i) * t);
    out[k] = acc / std::sqrt(n_t * dt);
  }
  return out;
}

// Full width at half maximum of a sampled single peak, by linear interpolation.
double fwhm(const std::vector<double>& y, double dt) {
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  std::size_t r = peak;
  while (y[r + 1] > half) ++r;
  std::size_t l = peak;
  while (y[l - 1] > half) --l;
  const double right = r + (y[r] - half) / (y[r] - y[r + 1]);
  const double left = l - (y[l] - half) / (y[l] - y[l - 1]);
  return (right - left) * dt;
}

std::vector<std::size_t> local_maxima(const IntensitySpectrum& s, double min_freq, double floor) {
  std::vector<std::size_t> out;
  const std::size_t half = s.size() / 2;
  for (std::size_t m = 1; m < half; ++m) {
    const double v = std::abs(s.values[m]);
    if (s.freq_axis[m] > min_freq && v > floor && v > std::abs(s.values[m - 1]) &&
        v > std::abs(s.values[m + 1]))
      out.push_back(m);
  }
  return out;
}

}  // namespace

TEST_SUITE("pulse") {

TEST_CASE("spectral field from genome") {
  const SpectralGrid grid;
  const SpectralField flat = genome_to_spectral_field(constant_genome(0), grid);
  for (int i = 0; i < grid.n_bins; ++i) {
    CHECK(flat.phases[i] == 0.0);
    const double x = grid.offset(i) / grid.envelope_fwhm;
    CHECK(flat.amplitudes[i] == doctest::Approx(std::exp(-4.0 * std::log(2.0) * x * x)));
  }
  CHECK(grid.frequency(0) == doctest::Approx(374.7 - 12.0));
  CHECK(flat.amplitudes[12] == 1.0);

  const SpectralField quarter = genome_to_spectral_field(constant_genome(8), grid);
  for (double p : quarter.phases) CHECK(p == doctest::Approx(kPi / 2));

  CHECK_THROWS_AS(genome_to_spectral_field(constant_genome(0, 24), grid), DimensionError);
  CHECK_THROWS_AS(genome_to_spectral_field(constant_genome(32), grid), DimensionError);
}

TEST_CASE("FFT synthesis matches the direct sum") {
  std::mt19937_64 rng(3);
  for (int n_bins : {25, 24, 7}) {
    SpectralGrid grid;
    grid.n_bins = n_bins;
    const SpectralField f = genome_to_spectral_field(test::random_genome(rng, n_bins), grid);
    const TemporalField e = synthesize_temporal(f, 256);
    const auto ref = direct_synthesis(f, 256);
    CHECK(e.dt == doctest::Approx(1000.0 / 256));
    double err = 0.0;
    for (int k = 0; k < 256; ++k) err = std::max(err, std::abs(e.samples[k] - ref[k]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("transform-limited pulse width matches the Gaussian Fourier pair") {
  // Narrow envelope so the 25-bin grid spans +-2 FWHM and truncation is negligible.
  SpectralGrid grid;
  grid.envelope_fwhm = 6.0;
  const TemporalField e = synthesize_temporal(genome_to_spectral_field(constant_genome(0), grid));
  const auto i = intensity(e);
  // Amplitude exp(-4 ln2 f^2/F^2) transforms to an intensity of FWHM 2 sqrt2 ln2 / (pi F).
  const double analytic_fs = 2.0 * std::sqrt(2.0) * std::log(2.0) / (kPi * grid.envelope_fwhm) * 1e3;
  CHECK(analytic_fs == doctest::Approx(104.0).epsilon(0.01));
  CHECK(fwhm(i, e.dt) == doctest::Approx(analytic_fs).epsilon(0.02));
  const auto peak = std::max_element(i.begin(), i.end()) - i.begin();
  CHECK(peak == 512);

  int maxima = 0;
  for (std::size_t k = 1; k + 1 < i.size(); ++k)
    if (i[k] > 0.01 * i[512] && i[k] > i[k - 1] && i[k] >= i[k + 1]) ++maxima;
  CHECK(maxima == 1);
}

TEST_CASE("linear spectral phase delays the pulse") {
  const SpectralGrid grid;
  Genome ramp = constant_genome(0);
  std::iota(ramp.genes.begin(), ramp.genes.end(), 0);
  const TemporalField flat = synthesize_temporal(genome_to_spectral_field(constant_genome(0), grid));
  const TemporalField shifted = synthesize_temporal(genome_to_spectral_field(ramp, grid));
  const auto a = intensity(flat);
  const auto b = intensity(shifted);
  const int n = static_cast<int>(a.size());

  // Circular cross-correlation peak: slope 2 pi/32 per THz is a 1/32 ps delay.
  int best_lag = 0;
  double best = -1.0;
  for (int lag = -n / 2; lag < n / 2; ++lag) {
    double c = 0.0;
    for (int k = 0; k < n; ++k) c += a[k] * b[((k + lag) % n + n) % n];
    if (c > best) {
      best = c;
      best_lag = lag;
    }
  }
  const double expected_fs = 1000.0 / 32.0;
  CHECK(best_lag * flat.dt == doctest::Approx(expected_fs));
  CHECK(best_lag == 32);

  const double peak = *std::max_element(a.begin(), a.end());
  double err = 0.0;
  for (int k = 0; k < n; ++k) err = std::max(err, std::abs(b[(k + 32) % n] - a[k]));
  CHECK(err < 1e-9 * peak);
}

TEST_CASE("Parseval over random genomes") {
  std::mt19937_64 rng(11);
  const SpectralGrid grid;
  for (int trial = 0; trial < 100; ++trial) {
    const SpectralField f = genome_to_spectral_field(test::random_genome(rng), grid);
    const TemporalField e = synthesize_temporal(f);
    CHECK(std::abs(e.energy() - f.energy()) < 1e-9 * f.energy());
  }
  SpectralField unit = genome_to_spectral_field(constant_genome(0), grid);
  const double norm = std::sqrt(unit.energy());
  for (double& a : unit.amplitudes) a /= norm;
  CHECK(synthesize_temporal(unit).energy() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("global phase leaves intensity and Wigner map unchanged") {
  std::mt19937_64 rng(5);
  const SpectralGrid grid;
  for (int trial = 0; trial < 10; ++trial) {
    const Genome g = test::random_genome(rng);
    const Genome h = g.shifted(1 + trial);
    const auto ia = intensity(synthesize_temporal(genome_to_spectral_field(g, grid)));
    const auto ib = intensity(synthesize_temporal(genome_to_spectral_field(h, grid)));
    const double peak = *std::max_element(ia.begin(), ia.end());
    double err = 0.0;
    for (std::size_t k = 0; k < ia.size(); ++k) err = std::max(err, std::abs(ia[k] - ib[k]));
    CHECK(err < 1e-12 * peak);

    const WignerMap wa = wigner(genome_to_spectral_field(g, grid), 128);
    const WignerMap wb = wigner(genome_to_spectral_field(h, grid), 128);
    double wmax = 0.0;
    double werr = 0.0;
    for (std::size_t k = 0; k < wa.values.size(); ++k) {
      wmax = std::max(wmax, std::abs(wa.values[k]));
      werr = std::max(werr, std::abs(wa.values[k] - wb.values[k]));
    }
    CHECK(werr < 1e-9 * wmax);
  }
}

TEST_CASE("synthesis preconditions") {
  const SpectralGrid grid;
  SpectralField f = genome_to_spectral_field(constant_genome(0), grid);
  CHECK_THROWS_AS(synthesize_temporal(f, 64), ResolutionError);
  CHECK_THROWS_AS(synthesize_temporal(f, 1000), ResolutionError);
  std::fill(f.amplitudes.begin(), f.amplitudes.end(), 0.0);
  CHECK_THROWS_AS(synthesize_temporal(f), DegenerateFieldError);
  CHECK_THROWS_AS(wigner(f), DegenerateFieldError);

  TemporalField zero{1.0, std::vector<cplx>(8)};
  for (double v : intensity(zero)) CHECK(v == 0.0);
}

TEST_CASE("intensity is non-negative") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto i = intensity(synthesize_temporal(genome_to_spectral_field(test::random_genome(rng), {})));
    CHECK(*std::min_element(i.begin(), i.end()) >= 0.0);
  }
}

TEST_CASE("intensity spectrum of a pulse pair peaks at the inverse separation") {
  const int n = 1024;
  const double dt = 1000.0 / n;
  const double tau = 333.0;
  const double sigma = 15.0;
  std::vector<double> series(n);
  for (int k = 0; k < n; ++k) {
    const double t = (k - n / 2) * dt;
    series[k] = std::exp(-0.5 * std::pow((t - tau / 2) / sigma, 2)) +
                std::exp(-0.5 * std::pow((t + tau / 2) / sigma, 2));
  }
  const IntensitySpectrum s = intensity_spectrum(series, dt);
  CHECK(s.resolution() == doctest::Approx(1.0));
  // Two deltas at +-tau/2 give |cos(pi W tau)|, which first peaks again at W = 1/tau.
  const double expected = 1000.0 / tau;
  bool found = false;
  for (std::size_t m : local_maxima(s, 0.5, 0.0))
    if (std::abs(s.freq_axis[m] - expected) <= s.resolution()) found = true;
  CHECK(found);
  CHECK(s.nearest_bin(expected) == 3);
}

TEST_CASE("intensity spectrum invariants") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const TemporalField e = synthesize_temporal(genome_to_spectral_field(test::random_genome(rng), {}));
    const auto i = intensity(e);
    const IntensitySpectrum s = intensity_spectrum(i, e.dt);
    const double total = std::accumulate(i.begin(), i.end(), 0.0) * e.dt;
    CHECK(std::abs(s.values[0].real() - total) < 1e-9 * total);
    CHECK(s.values[0].imag() == 0.0);
    for (std::size_t m = 1; m < s.size(); ++m) CHECK(s.values[s.size() - m] == std::conj(s.values[m]));
  }
  CHECK_THROWS_AS(intensity_spectrum(std::vector<double>{}, 1.0), DimensionError);
}

TEST_CASE("transform-limited pulse has no intensity-spectrum side peaks") {
  const TemporalField e = synthesize_temporal(genome_to_spectral_field(constant_genome(0), {}));
  const IntensitySpectrum s = intensity_spectrum(intensity(e), e.dt);
  CHECK(local_maxima(s, 1.0, 0.05 * s.values[0].real()).empty());
}

TEST_CASE("Wigner marginal and reality") {
  std::mt19937_64 rng(21);
  const SpectralGrid grid;
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralField f = genome_to_spectral_field(test::random_genome(rng), grid);
    const WignerMap w = wigner(f, 256);
    const TemporalField e = synthesize_temporal(f, 256);
    CHECK(w.rows() == 49);
    CHECK(w.cols() == 256);
    double wmax = 0.0;
    for (double v : w.values) wmax = std::max(wmax, std::abs(v));
    CHECK(w.imag_residue < 1e-9 * wmax);

    const auto marginal = w.time_marginal();
    for (int i = 0; i < grid.n_bins; ++i) {
      const std::size_t row = w.nearest_row(grid.frequency(i));
      CHECK(row == static_cast<std::size_t>(2 * i));
      const double expected = 256.0 * std::norm(f.value(i));
      CHECK(std::abs(marginal[row] - expected) < 1e-6 * expected);
    }
    // Summing over every omega row gives back the temporal intensity.
    const auto i = intensity(e);
    const double peak = *std::max_element(i.begin(), i.end());
    for (std::size_t k = 0; k < w.cols(); ++k) {
      double s = 0.0;
      for (std::size_t r = 0; r < w.rows(); ++r) s += w.at(r, k);
      CHECK(std::abs(s - 256 * e.dt * i[k]) < 1e-9 * 256 * e.dt * peak);
    }
  }
}

TEST_CASE("Wigner tilt follows the chirp") {
  const SpectralGrid grid;
  auto tilt = [&](double beta) {
    SpectralField f = genome_to_spectral_field(constant_genome(0), grid);
    for (int i = 0; i < grid.n_bins; ++i) f.phases[i] = beta * grid.offset(i) * grid.offset(i);
    const WignerMap w = wigner(f, 512);
    double s0 = 0, so = 0, st = 0;
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) {
        const double v = w.at(r, c);
        s0 += v;
        so += v * w.omega_axis[r];
        st += v * w.t_axis[c];
      }
    const double mo = so / s0, mt = st / s0;
    double coo = 0, ctt = 0, cot = 0;
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) {
        const double v = w.at(r, c) / s0;
        const double dom = w.omega_axis[r] - mo, dtt = w.t_axis[c] - mt;
        coo += v * dom * dom;
        ctt += v * dtt * dtt;
        cot += v * dom * dtt;
      }
    return std::array<double, 3>{cot, coo, ctt};
  };
  const auto flat = tilt(0.0);
  CHECK(std::abs(flat[0]) < 1e-6 * std::sqrt(flat[1] * flat[2]));
  // Stationary phase: component f arrives at t = phi'(f)/(2 pi), so d t/d f has the sign of beta.
  CHECK(tilt(0.02)[0] > 0.0);
  CHECK(tilt(-0.02)[0] < 0.0);
}

}  // TEST_SUITE
