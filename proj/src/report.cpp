#include "pcactl/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "pcactl/errors.hpp"

namespace pcactl {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string format_number(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string{};
}

void write_wigner_csv(const WignerMap& map, std::ostream& out) {
  out << "omega_THz/t_fs";
  for (double t : map.t_axis) out << ',' << format_number(t);
  out << '\n';
  for (std::size_t r = 0; r < map.rows(); ++r) {
    out << format_number(map.omega_axis[r]);
    for (std::size_t c = 0; c < map.cols(); ++c) out << ',' << format_number(map.at(r, c));
    out << '\n';
  }
}

void write_intensity_spectrum_csv(const IntensitySpectrum& spectrum, std::ostream& out) {
  out << "freq_THz,re,im,magnitude,phase\n";
  for (std::size_t m = 0; m < (spectrum.size() + 1) / 2; ++m) {
    const cplx v = spectrum.values[m];
    out << format_number(spectrum.freq_axis[m]) << ',' << format_number(v.real()) << ','
        << format_number(v.imag()) << ',' << format_number(std::abs(v)) << ','
        << format_number(std::arg(v)) << '\n';
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace pcactl
