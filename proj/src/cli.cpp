#include "pcactl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pcactl/analysis.hpp"
#include "pcactl/errors.hpp"
#include "pcactl/ga.hpp"
#include "pcactl/pca.hpp"
#include "pcactl/pulse.hpp"
#include "pcactl/report.hpp"
#include "pcactl/runfile.hpp"
#include "pcactl/srs.hpp"

namespace pcactl {
namespace {

namespace fs = std::filesystem;

struct GaFlags {
  GaConfig ga;
  std::string target = "sym";
};

void add_ga_flags(CLI::App* cmd, GaFlags& f) {
  cmd->add_option("--target", f.target, "Raman target: sym or anti")
      ->check(CLI::IsMember({"sym", "anti", "symmetric", "antisymmetric"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.ga.rng_seed, "RNG seed")->capture_default_str();
  cmd->add_option("--pop", f.ga.population_size, "Population size")->capture_default_str();
  cmd->add_option("--generations", f.ga.max_generations, "Maximum generations")
      ->capture_default_str();
  cmd->add_option("--stall", f.ga.stall_generations, "Stop after this many generations without improvement")
      ->capture_default_str();
  cmd->add_option("--mutation", f.ga.mutation_prob, "Per-gene mutation probability")
      ->capture_default_str();
  cmd->add_option("--tournament", f.ga.tournament_size, "Tournament size")->capture_default_str();
  cmd->add_option("--elite", f.ga.elite_count, "Elite count")->capture_default_str();
  cmd->add_option("--genes", f.ga.genome_length, "Genes per genome (spectral bins)")
      ->capture_default_str();
  cmd->add_option("--levels", f.ga.levels, "Phase levels per gene (power of two)")
      ->capture_default_str();
  cmd->add_option("--workers", f.ga.workers, "Fitness evaluation threads")->capture_default_str();
}

struct AnalysisFlags {
  std::vector<std::string> runs;
  SelectionRule rule;
  int generations_from = 0;
  bool tolerate_truncation = false;
};

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& f, bool runs_required) {
  auto* runs = cmd->add_option("runs", f.runs, "Run files")->check(CLI::ExistingFile);
  if (runs_required) runs->required();
  cmd->add_option("--k", f.rule.k, "Number of principal controls")->capture_default_str();
  cmd->add_option("--threshold", f.rule.threshold, "Minimum |r| for a principal control")
      ->capture_default_str();
  cmd->add_option("--generations-from", f.generations_from,
                  "Ignore trials from earlier generations")
      ->capture_default_str();
  cmd->add_flag("--tolerate-truncation", f.tolerate_truncation,
                "Drop a partial final line instead of failing");
}

std::vector<fs::path> to_paths(const std::vector<std::string>& names) {
  return {names.begin(), names.end()};
}

Analysis run_analysis(const MergedRuns& merged, const AnalysisFlags& f) {
  if (f.rule.k < 1) throw ConfigError("--k must be at least 1");
  return analyze(merged, {f.rule, f.generations_from});
}

const TargetAnalysis& target_analysis(const Analysis& a, RamanTarget target) {
  const TargetAnalysis* t = a.find(target);
  if (!t) throw ConfigError("no trials for target " + std::string(to_string(target)));
  if (!t->essential) throw EmptySelectionError(t->diagnostic);
  return *t;
}

SpectralGrid grid_for(int genes) {
  SpectralGrid grid;
  grid.n_bins = genes;
  grid.validate();
  return grid;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

std::vector<int> parse_genes(const std::string& text) {
  std::vector<int> genes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ConfigError("bad gene list '" + text + "'");
    genes.push_back(value);
    pos = end + 1;
  }
  return genes;
}

fs::path default_run_path(const std::string& out_dir, const std::string& out,
                          const std::string& stem) {
  if (!out.empty()) return out;
  return fs::path(out_dir) / (stem + ".runs");
}

void report_summary(const RunSummary& s, const fs::path& path, std::ostream& out) {
  out << "best trial " << s.best.trial_id << " fitness " << format_number(s.best.fitness)
      << "\ngenerations " << s.generations << " evaluations " << s.evaluations << "\nwrote "
      << path.string() << '\n';
}

// Where a single genome comes from for the diagnostics subcommands.
struct GenomeSource {
  std::string genes;
  std::string from = "best";
  std::string target;
  AnalysisFlags analysis;
};

struct ResolvedGenome {
  Genome genome;
  SpectralGrid grid;
  std::optional<RamanTarget> target;
};

ResolvedGenome resolve_genome(const GenomeSource& src, int levels) {
  if (!src.genes.empty()) {
    Genome g{parse_genes(src.genes), levels};
    if (!g.valid() || g.size() < 1) throw ConfigError("--genome has a gene outside [0, levels)");
    return {g, grid_for(static_cast<int>(g.size())), std::nullopt};
  }
  if (src.analysis.runs.empty()) throw ConfigError("give --genome or at least one run file");
  MergedRuns merged = load_runs(to_paths(src.analysis.runs), src.analysis.tolerate_truncation);
  const RamanTarget target =
      src.target.empty() ? merged.runs.front().header.target : parse_target(src.target);
  const SpectralGrid grid = merged.runs.front().header.grid;

  if (src.from == "best") {
    const TrialRecord* best = nullptr;
    for (const auto& t : merged.trials)
      if (t.target == target && (!best || t.record.fitness > best->fitness)) best = &t.record;
    if (!best) throw ConfigError("no trials for target " + std::string(to_string(target)));
    return {best->genome, grid, target};
  }
  if (src.from == "essential") {
    const Analysis a = run_analysis(merged, src.analysis);
    return {target_analysis(a, target).essential->genome, grid, target};
  }
  if (src.from.rfind("trial:", 0) == 0) {
    std::int64_t id = 0;
    const std::string digits = src.from.substr(6);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
      throw ConfigError("bad trial reference '" + src.from + "'");
    for (const auto& t : merged.trials)
      if (t.record.trial_id == id && t.target == target) return {t.record.genome, grid, target};
    throw ConfigError("trial " + digits + " not found");
  }
  throw ConfigError("--genome-from must be best, essential or trial:ID");
}

void add_genome_flags(CLI::App* cmd, GenomeSource& src, int& levels) {
  add_analysis_flags(cmd, src.analysis, false);
  cmd->add_option("--genome", src.genes, "Comma-separated gene list");
  cmd->add_option("--genome-from", src.from, "best, essential or trial:ID")->capture_default_str();
  cmd->add_option("--target", src.target, "Target whose trials are searched (default: first run's)")
      ->check(CLI::IsMember({"sym", "anti", "symmetric", "antisymmetric"}));
  cmd->add_option("--levels", levels, "Phase levels for --genome")->capture_default_str();
}

std::ostream& pick_output(const std::string& path, std::ofstream& file, std::ostream& out) {
  if (path.empty() || path == "-") return out;
  file = open_output(path);
  return file;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-shaped pulse search and principal control analysis", "pcactl"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file (flags override)");
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "Print the effective configuration and exit")
      ->configurable(false);

  // run
  GaFlags run_flags;
  std::string run_out_dir = ".";
  std::string run_out;
  int n_t = SrsModelParams{}.n_t;
  auto* run = app.add_subcommand("run", "GA search on a target; writes a run file");
  add_ga_flags(run, run_flags);
  run->add_option("--out-dir", run_out_dir, "Directory for <target>.runs")->capture_default_str();
  run->add_option("--out", run_out, "Run file path (overrides --out-dir)");
  run->add_option("--n-t", n_t, "Time samples per fitness evaluation")->capture_default_str();

  // analyze
  AnalysisFlags an_flags;
  std::string an_out_dir = "analysis";
  auto* an = app.add_subcommand("analyze", "Principal control report from run files");
  add_analysis_flags(an, an_flags, true);
  an->add_option("--out-dir", an_out_dir, "Report directory")->capture_default_str();

  // essential
  AnalysisFlags es_flags;
  std::string es_target;
  std::string es_out;
  auto* es = app.add_subcommand("essential", "Essential pulse of a target's optimum");
  add_analysis_flags(es, es_flags, true);
  es->add_option("--target", es_target, "Target (default: first run's)")
      ->check(CLI::IsMember({"sym", "anti", "symmetric", "antisymmetric"}));
  es->add_option("--out", es_out, "Write the report here instead of stdout");

  // wigner / ftintensity
  GenomeSource wg_src;
  int wg_levels = 32;
  int wg_nt = 1024;
  std::string wg_out;
  auto* wg = app.add_subcommand("wigner", "Wigner map CSV of one pulse");
  add_genome_flags(wg, wg_src, wg_levels);
  wg->add_option("--n-t", wg_nt, "Time samples")->capture_default_str();
  wg->add_option("--out", wg_out, "Output CSV (default stdout)");

  GenomeSource ft_src;
  int ft_levels = 32;
  int ft_nt = 1024;
  std::string ft_out;
  auto* ft = app.add_subcommand("ftintensity", "Fourier transform of I(t) as CSV");
  add_genome_flags(ft, ft_src, ft_levels);
  ft->add_option("--n-t", ft_nt, "Time samples")->capture_default_str();
  ft->add_option("--out", ft_out, "Output CSV (default stdout)");

  // reduced-run
  GaFlags rr_flags;
  rr_flags.target.clear();
  AnalysisFlags rr_an;
  double rr_scale = 2.0;
  std::string rr_anchor = "best";
  std::string rr_out_dir = ".";
  std::string rr_out;
  auto* rr = app.add_subcommand("reduced-run", "GA over principal-control coefficients");
  add_analysis_flags(rr, rr_an, true);
  add_ga_flags(rr, rr_flags);
  rr->add_option("--range-scale", rr_scale, "eta_j ranges over +-c sqrt(lambda_j)")
      ->capture_default_str();
  rr->add_option("--anchor", rr_anchor, "Base genome: best, essential or flat")
      ->check(CLI::IsMember({"best", "essential", "flat"}))
      ->capture_default_str();
  rr->add_option("--out-dir", rr_out_dir, "Directory for <target>-reduced.runs")
      ->capture_default_str();
  rr->add_option("--out", rr_out, "Run file path (overrides --out-dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "pcactl: " << e.what() << '\n';
    return 2;
  }

  if (dump_config) {
    out << app.config_to_str(true, false);
    return 0;
  }

  try {
    if (run->parsed()) {
      const RamanTarget target = parse_target(run_flags.target);
      run_flags.ga.validate();
      SrsModelParams model;
      model.n_t = n_t;
      RunHeader header;
      header.target = target;
      header.ga = run_flags.ga;
      header.grid = grid_for(run_flags.ga.genome_length);
      header.model = model;
      const SrsFitness fitness(header.grid, target, model);
      const fs::path path =
          default_run_path(run_out_dir, run_out, std::string(to_string(target)));
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      RunFileWriter writer(path, header);
      const RunSummary s = run_search(header.ga, std::cref(fitness), writer);
      report_summary(s, path, out);
    } else if (an->parsed()) {
      const MergedRuns merged = load_runs(to_paths(an_flags.runs), an_flags.tolerate_truncation);
      const Analysis a = run_analysis(merged, an_flags);
      write_analysis_report(a, an_out_dir);
      nlohmann::json meta = {{"created", utc_timestamp()},
                             {"inputs", an_flags.runs},
                             {"k", an_flags.rule.k},
                             {"threshold", an_flags.rule.threshold},
                             {"generations_from", an_flags.generations_from},
                             {"trials", a.trial_count}};
      auto side = open_output(fs::path(an_out_dir) / "metadata.json");
      side << meta.dump(2) << '\n';
      for (const auto& t : a.targets) {
        out << to_string(t.target) << ": " << t.trial_count << " trials";
        if (t.essential)
          out << ", retained_fraction " << format_number(t.essential->retained_fraction);
        else
          out << ", no principal controls (" << t.diagnostic << ')';
        out << '\n';
      }
      out << "wrote " << an_out_dir << '\n';
    } else if (es->parsed()) {
      const MergedRuns merged = load_runs(to_paths(es_flags.runs), es_flags.tolerate_truncation);
      const RamanTarget target =
          es_target.empty() ? merged.runs.front().header.target : parse_target(es_target);
      const Analysis a = run_analysis(merged, es_flags);
      const TargetAnalysis& t = target_analysis(a, target);
      const LoadedRun* source = nullptr;
      for (const auto& r : merged.runs)
        if (r.header.target == target) source = &r;
      const SrsFitness fitness(source->header.grid, target, source->header.model);
      std::vector<double> eta = t.essential->projections;
      std::vector<int> axes;
      for (const auto& c : t.controls->selected) axes.push_back(static_cast<int>(c.axis) + 1);
      std::ofstream file;
      std::ostream& o = pick_output(es_out, file, out);
      o << "target " << to_string(target) << '\n'
        << "axes " << join(axes) << '\n'
        << "eta " << join(eta) << '\n'
        << "retained_fraction " << format_number(t.essential->retained_fraction) << '\n'
        << "optimum_trial " << t.best.trial_id << '\n'
        << "optimum_fitness " << format_number(t.best.fitness) << '\n'
        << "essential_fitness " << format_number(fitness(t.essential->genome)) << '\n'
        << "optimum_genes " << join(t.best.genome.genes) << '\n'
        << "essential_genes " << join(t.essential->genome.genes) << '\n';
    } else if (wg->parsed()) {
      const ResolvedGenome r = resolve_genome(wg_src, wg_levels);
      const WignerMap map = wigner(genome_to_spectral_field(r.genome, r.grid), wg_nt);
      std::ofstream file;
      write_wigner_csv(map, pick_output(wg_out, file, out));
    } else if (ft->parsed()) {
      const ResolvedGenome r = resolve_genome(ft_src, ft_levels);
      const TemporalField e = synthesize_temporal(genome_to_spectral_field(r.genome, r.grid), ft_nt);
      std::ofstream file;
      write_intensity_spectrum_csv(intensity_spectrum(intensity(e), e.dt),
                                   pick_output(ft_out, file, out));
    } else if (rr->parsed()) {
      const MergedRuns merged = load_runs(to_paths(rr_an.runs), rr_an.tolerate_truncation);
      const RamanTarget target = rr_flags.target.empty() ? merged.runs.front().header.target
                                                         : parse_target(rr_flags.target);
      const Analysis a = run_analysis(merged, rr_an);
      const TargetAnalysis& t = target_analysis(a, target);
      const LoadedRun* source = nullptr;
      for (const auto& r : merged.runs)
        if (r.header.target == target) source = &r;

      ReducedBasis basis;
      basis.controls = *t.controls;
      basis.range_scale = rr_scale;
      if (rr_anchor == "best")
        basis.anchor = t.best.genome;
      else if (rr_anchor == "essential")
        basis.anchor = t.essential->genome;
      else
        basis.anchor = Genome{std::vector<int>(t.best.genome.size(), 0), merged.levels};

      RunHeader header = source->header;
      header.ga = rr_flags.ga;
      header.ga.genome_length = merged.genome_length;
      header.ga.levels = merged.levels;
      header.reduced = ReducedInfo{rr_scale, basis.anchor, basis.controls.selected};
      const SrsFitness fitness(header.grid, target, header.model);
      const fs::path path =
          default_run_path(rr_out_dir, rr_out, std::string(to_string(target)) + "-reduced");
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      RunFileWriter writer(path, header);
      const RunSummary s = reduced_search(basis, header.ga, std::cref(fitness), writer);
      report_summary(s, path, out);
    }
  } catch (const ConfigError& e) {
    err << "pcactl: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "pcactl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pcactl
