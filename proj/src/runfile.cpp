#include "pcactl/runfile.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "pcactl/errors.hpp"

namespace pcactl {
namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "pcactl-run";

json ga_to_json(const GaConfig& c) {
  return {{"population_size", c.population_size},
          {"max_generations", c.max_generations},
          {"stall_generations", c.stall_generations},
          {"mutation_prob", c.mutation_prob},
          {"tournament_size", c.tournament_size},
          {"elite_count", c.elite_count},
          {"rng_seed", c.rng_seed},
          {"crossover", "one-point"}};
}

GaConfig ga_from_json(const json& j, int n, int levels) {
  GaConfig c;
  c.population_size = j.at("population_size").get<int>();
  c.max_generations = j.at("max_generations").get<int>();
  c.stall_generations = j.at("stall_generations").get<int>();
  c.mutation_prob = j.at("mutation_prob").get<double>();
  c.tournament_size = j.at("tournament_size").get<int>();
  c.elite_count = j.at("elite_count").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.genome_length = n;
  c.levels = levels;
  return c;
}

json control_to_json(const PrincipalControl& c) {
  return {{"axis", c.axis + 1},
          {"eigenvalue", c.eigenvalue},
          {"correlation", c.correlation},
          {"vector", c.vector}};
}

PrincipalControl control_from_json(const json& j) {
  PrincipalControl c;
  c.axis = j.at("axis").get<std::size_t>() - 1;
  c.eigenvalue = j.at("eigenvalue").get<double>();
  c.correlation = j.at("correlation").get<double>();
  c.vector = j.at("vector").get<std::vector<double>>();
  return c;
}

RunHeader decode_header(const std::string& line) {
  const json j = json::parse(line);
  if (j.value("format", "") != kFormatTag) throw SchemaError("not a run file header");
  RunHeader h;
  h.version = j.at("version").get<int>();
  if (h.version != kRunFormatVersion)
    throw SchemaError("unsupported run file version " + std::to_string(h.version));
  h.target = parse_target(j.at("target").get<std::string>());
  const int n = j.at("n").get<int>();
  const int levels = j.at("levels").get<int>();
  h.ga = ga_from_json(j.at("ga"), n, levels);
  const json& g = j.at("grid");
  h.grid = {g.at("n_bins").get<int>(), g.at("center_frequency").get<double>(),
            g.at("bin_width").get<double>(), g.at("envelope_fwhm").get<double>()};
  const json& m = j.at("model");
  h.model.coupling_frequency = m.at("coupling_frequency").get<double>();
  h.model.phase_symmetric = m.at("phase_symmetric").get<double>();
  h.model.phase_antisymmetric = m.at("phase_antisymmetric").get<double>();
  h.model.bandwidth = m.at("bandwidth").get<double>();
  h.model.flank_offset = m.at("flank_offset").get<double>();
  h.model.n_t = m.at("n_t").get<int>();
  const std::string basis = j.at("basis").get<std::string>();
  if (basis == "reduced") {
    const json& r = j.at("reduced");
    ReducedInfo info;
    info.range_scale = r.at("range_scale").get<double>();
    info.anchor = Genome{r.at("anchor").get<std::vector<int>>(), levels};
    for (const json& c : r.at("controls")) info.controls.push_back(control_from_json(c));
    h.reduced = std::move(info);
  } else if (basis != "full") {
    throw SchemaError("unknown basis tag '" + basis + "'");
  }
  return h;
}

TrialRecord decode_record(const std::string& line, int levels) {
  const json j = json::parse(line);
  TrialRecord r;
  r.trial_id = j.at("id").get<std::int64_t>();
  r.generation = j.at("gen").get<int>();
  r.genome = Genome{j.at("genes").get<std::vector<int>>(), levels};
  r.fitness = j.at("fitness").get<double>();
  r.parent_ids = j.at("parents").get<std::vector<std::int64_t>>();
  if (auto it = j.find("eta"); it != j.end()) r.coefficients = it->get<std::vector<double>>();
  return r;
}

// Schema checks shared by the writer and the reader. Returns an empty
// string when the record is consistent.
std::string check_record(const TrialRecord& r, const RunHeader& h, std::int64_t last_id,
                         const std::unordered_map<std::int64_t, int>& generations) {
  if (static_cast<int>(r.genome.size()) != h.ga.genome_length)
    return "genome length " + std::to_string(r.genome.size()) + " differs from header n " +
           std::to_string(h.ga.genome_length);
  if (!r.genome.valid()) return "gene outside [0, levels)";
  if (r.trial_id <= last_id) return "trial ids must be strictly increasing";
  if (r.generation < 0) return "negative generation";
  if (!std::isfinite(r.fitness)) return "non-finite fitness";
  if (r.generation == 0 && !r.parent_ids.empty()) return "generation 0 trial with parents";
  if (r.generation > 0 && r.parent_ids.size() != 2) return "trial needs exactly two parents";
  for (auto p : r.parent_ids) {
    const auto it = generations.find(p);
    if (p >= r.trial_id || it == generations.end())
      return "parent id " + std::to_string(p) + " does not refer to an earlier trial";
    if (it->second != r.generation - 1)
      return "parent " + std::to_string(p) + " is not from the previous generation";
  }
  return {};
}

}  // namespace

std::string encode_header(const RunHeader& h) {
  json j = {{"format", kFormatTag},
            {"version", h.version},
            {"basis", h.basis()},
            {"target", std::string(to_string(h.target))},
            {"seed", h.ga.rng_seed},
            {"n", h.ga.genome_length},
            {"levels", h.ga.levels},
            {"ga", ga_to_json(h.ga)},
            {"grid",
             {{"n_bins", h.grid.n_bins},
              {"center_frequency", h.grid.center_frequency},
              {"bin_width", h.grid.bin_width},
              {"envelope_fwhm", h.grid.envelope_fwhm}}},
            {"model",
             {{"coupling_frequency", h.model.coupling_frequency},
              {"phase_symmetric", h.model.phase_symmetric},
              {"phase_antisymmetric", h.model.phase_antisymmetric},
              {"bandwidth", h.model.bandwidth},
              {"flank_offset", h.model.flank_offset},
              {"n_t", h.model.n_t}}}};
  if (h.reduced) {
    json controls = json::array();
    for (const auto& c : h.reduced->controls) controls.push_back(control_to_json(c));
    j["reduced"] = {{"range_scale", h.reduced->range_scale},
                    {"anchor", h.reduced->anchor.genes},
                    {"controls", std::move(controls)}};
  }
  return j.dump();
}

std::string encode_record(const TrialRecord& r) {
  json j = {{"id", r.trial_id},
            {"gen", r.generation},
            {"genes", r.genome.genes},
            {"fitness", r.fitness},
            {"parents", r.parent_ids}};
  if (!r.coefficients.empty()) j["eta"] = r.coefficients;
  return j.dump();
}

RunFileWriter::RunFileWriter(const std::filesystem::path& path, const RunHeader& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), header_(header) {
  if (!out_) throw StoreError("cannot open run file " + path.string() + " for writing");
  write_line(encode_header(header_));
}

void RunFileWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw StoreError("write to " + path_.string() + " failed");
}

void RunFileWriter::append(const TrialRecord& record) {
  if (auto problem = check_record(record, header_, last_id_, generations_); !problem.empty())
    throw SchemaError("trial " + std::to_string(record.trial_id) + ": " + problem);
  write_line(encode_record(record));
  last_id_ = record.trial_id;
  generations_.emplace(record.trial_id, record.generation);
  ++count_;
}

LoadedRun load_run(const std::filesystem::path& path, bool tolerate_truncation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open run file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  LoadedRun run;
  run.path = path;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::int64_t last_id = -1;
  std::unordered_map<std::int64_t, int> generations;
  bool have_header = false;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const bool terminated = end != std::string::npos;
    const std::string line = text.substr(pos, terminated ? end - pos : std::string::npos);
    pos = terminated ? end + 1 : text.size();
    ++line_no;
    if (line.empty()) continue;
    try {
      if (!have_header) {
        run.header = decode_header(line);
        have_header = true;
        continue;
      }
      TrialRecord rec = decode_record(line, run.header.ga.levels);
      if (auto problem = check_record(rec, run.header, last_id, generations); !problem.empty())
        throw SchemaError(problem);
      last_id = rec.trial_id;
      generations.emplace(rec.trial_id, rec.generation);
      run.trials.push_back(std::move(rec));
    } catch (const json::exception& e) {
      if (!terminated && tolerate_truncation && have_header) {
        run.truncated = true;
        break;
      }
      throw ParseError(line_no, path.string() + ": " + e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, path.string() + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError(1, path.string() + ": missing header line");
  return run;
}

MergedRuns load_runs(const std::vector<std::filesystem::path>& paths, bool tolerate_truncation) {
  if (paths.empty()) throw ConfigError("no run files given");
  MergedRuns merged;
  for (const auto& path : paths) {
    LoadedRun run = load_run(path, tolerate_truncation);
    const int n = run.header.ga.genome_length;
    const int levels = run.header.ga.levels;
    if (merged.runs.empty()) {
      merged.genome_length = n;
      merged.levels = levels;
    } else if (n != merged.genome_length || levels != merged.levels) {
      throw IncompatibleRunsError(path.string() + " has n=" + std::to_string(n) +
                                  ", L=" + std::to_string(levels) + "; expected n=" +
                                  std::to_string(merged.genome_length) +
                                  ", L=" + std::to_string(merged.levels));
    }
    const std::size_t index = merged.runs.size();
    for (const auto& rec : run.trials) merged.trials.push_back({index, run.header.target, rec});
    merged.runs.push_back(std::move(run));
  }
  return merged;
}

}  // namespace pcactl
