#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "pcactl/analysis.hpp"
#include "pcactl/errors.hpp"
#include "pcactl/report.hpp"
#include "pcactl/runfile.hpp"
#include "support.hpp"

using namespace pcactl;
namespace fs = std::filesystem;

namespace {

RunHeader small_header(RamanTarget target = RamanTarget::Symmetric, std::uint64_t seed = 1) {
  RunHeader h;
  h.target = target;
  h.ga.rng_seed = seed;
  h.ga.population_size = 12;
  h.ga.max_generations = 6;
  return h;
}

double awkward_fitness(const Genome& g) {
  // Values with long decimal expansions exercise the round trip.
  return std::sin(std::accumulate(g.genes.begin(), g.genes.end(), 0.0) / 7.0) / 3.0 + 1e-17 * g.genes[0];
}

fs::path write_run(const fs::path& path, const RunHeader& h) {
  RunFileWriter w(path, h);
  run_search(h.ga, awkward_fitness, w);
  return path;
}

}  // namespace

TEST_SUITE("runfile") {

TEST_CASE("write then read back") {
  const fs::path dir = test::scratch_dir("roundtrip");
  const RunHeader h = small_header(RamanTarget::Antisymmetric, 9);
  TrialLog log;
  {
    RunFileWriter w(dir / "a.runs", h);
    struct Tee : TrialSink {
      TrialSink& x;
      TrialSink& y;
      Tee(TrialSink& a, TrialSink& b) : x(a), y(b) {}
      void append(const TrialRecord& r) override {
        x.append(r);
        y.append(r);
      }
    } tee(w, log);
    run_search(h.ga, awkward_fitness, tee);
    CHECK(w.records_written() == log.records().size());
  }
  const LoadedRun run = load_run(dir / "a.runs");
  CHECK(run.header.target == RamanTarget::Antisymmetric);
  CHECK(run.header.ga.rng_seed == 9);
  CHECK(run.header.ga.population_size == 12);
  CHECK(run.header.basis() == "full");
  CHECK(!run.truncated);
  CHECK(run.trials == log.records());
  CHECK(encode_header(run.header) == encode_header(h));
}

TEST_CASE("identical seeds give identical files") {
  const fs::path dir = test::scratch_dir("determinism");
  write_run(dir / "a.runs", small_header());
  write_run(dir / "b.runs", small_header());
  write_run(dir / "c.runs", small_header(RamanTarget::Symmetric, 2));
  CHECK(test::slurp(dir / "a.runs") == test::slurp(dir / "b.runs"));
  CHECK(test::slurp(dir / "a.runs") != test::slurp(dir / "c.runs"));
}

TEST_CASE("writer rejects inconsistent records") {
  const fs::path dir = test::scratch_dir("schema");
  RunFileWriter w(dir / "x.runs", small_header());
  const Genome g{std::vector<int>(25, 1), 32};
  w.append({0, 0, g, 0.5, {}, {}});
  CHECK_THROWS_AS(w.append({1, 0, Genome{std::vector<int>(24, 1), 32}, 0.5, {}, {}}), SchemaError);
  CHECK_THROWS_AS(w.append({1, 1, g, 0.5, {1, 0}, {}}), SchemaError);
  CHECK_THROWS_AS(w.append({0, 0, g, 0.5, {}, {}}), SchemaError);
  CHECK_THROWS_AS(w.append({1, 0, g, NAN, {}, {}}), SchemaError);
  CHECK_THROWS_AS(w.append({1, 1, g, 0.5, {0}, {}}), SchemaError);
  w.append({1, 0, g, 0.5, {}, {}});
  w.append({2, 1, g, 0.5, {0, 1}, {}});
  CHECK_THROWS_AS(w.append({3, 2, g, 0.5, {0, 2}, {}}), SchemaError);
  CHECK(w.records_written() == 3);
}

TEST_CASE("2720 records") {
  const fs::path dir = test::scratch_dir("large");
  RunHeader h;
  h.ga.population_size = 68;
  h.ga.max_generations = 40;
  h.ga.stall_generations = 40;
  std::int64_t calls = 0;
  {
    RunFileWriter w(dir / "big.runs", h);
    run_search(h.ga, [&](const Genome&) { return static_cast<double>(calls++); }, w);
  }
  CHECK(load_run(dir / "big.runs").trials.size() == 2720);
}

TEST_CASE("malformed lines and truncation") {
  const fs::path dir = test::scratch_dir("truncation");
  const fs::path path = write_run(dir / "t.runs", small_header());
  const std::string text = test::slurp(path);
  const std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));

  const std::string cut = text.substr(0, text.size() - 20);
  {
    std::ofstream(dir / "cut.runs", std::ios::binary) << cut;
  }
  try {
    load_run(dir / "cut.runs");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == lines);
  }
  const LoadedRun partial = load_run(dir / "cut.runs", true);
  CHECK(partial.truncated);
  CHECK(partial.trials.size() == lines - 2);

  std::string broken = text;
  broken.insert(text.find('\n') + 1, "{\"id\": oops}\n");
  {
    std::ofstream(dir / "broken.runs", std::ios::binary) << broken;
  }
  try {
    load_run(dir / "broken.runs", true);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_run(dir / "missing.runs"), StoreError);
}

TEST_CASE("merging runs") {
  const fs::path dir = test::scratch_dir("merge");
  const fs::path a = write_run(dir / "sym.runs", small_header(RamanTarget::Symmetric, 1));
  const fs::path b = write_run(dir / "anti.runs", small_header(RamanTarget::Antisymmetric, 2));
  const MergedRuns merged = load_runs({a, b});
  const LoadedRun ra = load_run(a), rb = load_run(b);
  REQUIRE(merged.trials.size() == ra.trials.size() + rb.trials.size());
  CHECK(merged.trials.front().target == RamanTarget::Symmetric);
  CHECK(merged.trials.back().target == RamanTarget::Antisymmetric);
  CHECK(merged.trials.back().run == 1);

  std::vector<DeltaVector> concatenated;
  for (const auto& t : ra.trials) concatenated.push_back(deltas(t.genome));
  for (const auto& t : rb.trials) concatenated.push_back(deltas(t.genome));
  const Analysis an = analyze(merged);
  CHECK(an.covariance.entries == covariance(concatenated).entries);
  CHECK(an.trial_count == concatenated.size());

  RunHeader other = small_header();
  other.ga.genome_length = 20;
  other.grid.n_bins = 20;
  const fs::path c = write_run(dir / "short.runs", other);
  CHECK_THROWS_AS(load_runs({a, c}), IncompatibleRunsError);
  CHECK_THROWS_AS(load_runs({}), ConfigError);
}

TEST_CASE("reduced header round trip") {
  const fs::path dir = test::scratch_dir("reduced");
  RunHeader h = small_header();
  ReducedInfo info;
  info.range_scale = 1.5;
  info.anchor = Genome{std::vector<int>(25, 4), 32};
  info.controls.push_back({3, 2.25, -0.4, std::vector<double>(24, 1.0 / std::sqrt(24.0))});
  h.reduced = info;
  ReducedBasis basis{{info.controls, {}}, info.anchor, info.range_scale};
  {
    RunFileWriter w(dir / "r.runs", h);
    reduced_search(basis, h.ga, awkward_fitness, w);
  }
  const LoadedRun run = load_run(dir / "r.runs");
  REQUIRE(run.header.reduced.has_value());
  CHECK(run.header.basis() == "reduced");
  CHECK(run.header.reduced->anchor == info.anchor);
  CHECK(run.header.reduced->controls[0].axis == 3);
  CHECK(run.header.reduced->controls[0].vector == info.controls[0].vector);
  for (const auto& t : run.trials) CHECK(t.coefficients.size() == 1);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5e-20) == "-2.5e-20");
  CHECK(format_number(std::optional<double>{}).empty());
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);
}

}  // TEST_SUITE
