#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pcactl/analysis.hpp"
#include "pcactl/cli.hpp"
#include "pcactl/errors.hpp"
#include "pcactl/ga.hpp"
#include "pcactl/pca.hpp"
#include "pcactl/pulse.hpp"
#include "pcactl/runfile.hpp"
#include "pcactl/srs.hpp"

namespace py = pybind11;
using namespace pcactl;

namespace {

Genome make_genome(std::vector<int> genes, int levels) {
  Genome g{std::move(genes), levels};
  if (!g.valid()) throw ConfigError("genes must lie in [0, levels)");
  return g;
}

SpectralField field_of(const std::vector<int>& genes, int levels) {
  SpectralGrid grid;
  grid.n_bins = static_cast<int>(genes.size());
  return genome_to_spectral_field(make_genome(genes, levels), grid);
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.size(), std::vector<double>(m.size()));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) rows[r][c] = m(r, c);
  return rows;
}

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw DimensionError("matrix must be square");
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["best_genes"] = s.best.genome.genes;
  d["best_fitness"] = s.best.fitness;
  d["best_trial"] = s.best.trial_id;
  d["generations"] = s.generations;
  d["evaluations"] = s.evaluations;
  d["best_per_generation"] = s.best_per_generation;
  return d;
}

py::dict trial_dict(const TrialRecord& r) {
  py::dict d;
  d["id"] = r.trial_id;
  d["generation"] = r.generation;
  d["genes"] = r.genome.genes;
  d["fitness"] = r.fitness;
  d["parents"] = r.parent_ids;
  d["coefficients"] = r.coefficients;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pulse synthesis, Raman fitness, GA search and principal control analysis.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  m.def(
      "fitness",
      [](const std::vector<int>& genes, const std::string& target, int levels) {
        SpectralGrid grid;
        grid.n_bins = static_cast<int>(genes.size());
        return SrsFitness(grid, parse_target(target))(make_genome(genes, levels));
      },
      py::arg("genes"), py::arg("target"), py::arg("levels") = 32);

  m.def(
      "synthesize",
      [](const std::vector<int>& genes, int levels, int n_t) {
        const TemporalField e = synthesize_temporal(field_of(genes, levels), n_t);
        std::vector<double> t(e.size());
        for (std::size_t k = 0; k < e.size(); ++k) t[k] = e.time(k);
        return py::make_tuple(t, e.samples);
      },
      py::arg("genes"), py::arg("levels") = 32, py::arg("n_t") = 1024,
      "Returns (t_fs, E) on the periodic time window.");

  m.def(
      "intensity",
      [](const std::vector<int>& genes, int levels, int n_t) {
        return intensity(synthesize_temporal(field_of(genes, levels), n_t));
      },
      py::arg("genes"), py::arg("levels") = 32, py::arg("n_t") = 1024);

  m.def(
      "intensity_spectrum",
      [](const std::vector<int>& genes, int levels, int n_t) {
        const TemporalField e = synthesize_temporal(field_of(genes, levels), n_t);
        const IntensitySpectrum s = intensity_spectrum(intensity(e), e.dt);
        return py::make_tuple(s.freq_axis, s.values);
      },
      py::arg("genes"), py::arg("levels") = 32, py::arg("n_t") = 1024,
      "Returns (freq_THz, FT[I]) over the full DFT index range.");

  m.def(
      "wigner",
      [](const std::vector<int>& genes, int levels, int n_t) {
        const WignerMap w = wigner(field_of(genes, levels), n_t);
        std::vector<std::vector<double>> rows(w.rows(), std::vector<double>(w.cols()));
        for (std::size_t r = 0; r < w.rows(); ++r)
          for (std::size_t c = 0; c < w.cols(); ++c) rows[r][c] = w.at(r, c);
        py::dict d;
        d["omega"] = w.omega_axis;
        d["t"] = w.t_axis;
        d["values"] = rows;
        d["imag_residue"] = w.imag_residue;
        return d;
      },
      py::arg("genes"), py::arg("levels") = 32, py::arg("n_t") = 256);

  m.def(
      "run_search",
      [](py::object fitness, std::uint64_t seed, int population, int generations, int genes, int levels) {
        GaConfig cfg;
        cfg.rng_seed = seed;
        cfg.population_size = population;
        cfg.max_generations = generations;
        cfg.genome_length = genes;
        cfg.levels = levels;
        TrialLog log;
        RunSummary s;
        if (py::isinstance<py::str>(fitness)) {
          SpectralGrid grid;
          grid.n_bins = genes;
          const SrsFitness f(grid, parse_target(fitness.cast<std::string>()));
          py::gil_scoped_release release;
          s = run_search(cfg, std::cref(f), log);
        } else {
          s = run_search(cfg, [&](const Genome& g) { return fitness(g.genes).cast<double>(); }, log);
        }
        py::dict d = summary_dict(s);
        py::list trials;
        for (const auto& r : log.records()) trials.append(trial_dict(r));
        d["trials"] = trials;
        return d;
      },
      py::arg("fitness"), py::arg("seed") = 1, py::arg("population") = 50, py::arg("generations") = 40,
      py::arg("genes") = 25, py::arg("levels") = 32,
      "GA search; `fitness` is 'sym', 'anti' or a callable taking a gene list.");

  m.def(
      "deltas",
      [](const std::vector<int>& genes, int levels) { return deltas(make_genome(genes, levels)).values; },
      py::arg("genes"), py::arg("levels") = 32);

  m.def(
      "covariance",
      [](const std::vector<std::vector<double>>& samples) {
        std::vector<DeltaVector> d;
        for (const auto& s : samples) d.push_back({s});
        return matrix_rows(covariance(d).entries);
      },
      py::arg("samples"));

  m.def(
      "eigendecompose",
      [](const std::vector<std::vector<double>>& matrix) {
        const EigenSystem e = eigendecompose(matrix_from_rows(matrix));
        return py::make_tuple(e.values, matrix_rows(e.vectors));
      },
      py::arg("matrix"), "Returns (eigenvalues descending, eigenvector matrix with vectors as columns).");

  m.def(
      "load_run",
      [](const std::filesystem::path& path, bool tolerate_truncation) {
        const LoadedRun run = load_run(path, tolerate_truncation);
        py::dict d;
        d["target"] = std::string(to_string(run.header.target));
        d["seed"] = run.header.ga.rng_seed;
        d["basis"] = run.header.basis();
        d["truncated"] = run.truncated;
        py::list trials;
        for (const auto& r : run.trials) trials.append(trial_dict(r));
        d["trials"] = trials;
        return d;
      },
      py::arg("path"), py::arg("tolerate_truncation") = false);

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "pcactl");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the pcactl command line in-process; returns (exit code, stdout, stderr).");
}
