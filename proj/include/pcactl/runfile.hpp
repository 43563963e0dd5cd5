#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcactl/ga.hpp"
#include "pcactl/pulse.hpp"
#include "pcactl/srs.hpp"

namespace pcactl {

inline constexpr int kRunFormatVersion = 1;

/// Extra header block of a reduced-basis run.
struct ReducedInfo {
  double range_scale = 2.0;
  Genome anchor;
  std::vector<PrincipalControl> controls;
};

struct RunHeader {
  int version = kRunFormatVersion;
  RamanTarget target = RamanTarget::Symmetric;
  GaConfig ga;
  SpectralGrid grid;
  SrsModelParams model;
  std::optional<ReducedInfo> reduced;

  std::string basis() const { return reduced ? "reduced" : "full"; }
};

/// Line-delimited JSON: one header line followed by one line per trial.
/// Every line is flushed as it is written.
class RunFileWriter : public TrialSink {
 public:
  RunFileWriter(const std::filesystem::path& path, const RunHeader& header);
  void append(const TrialRecord& record) override;
  std::size_t records_written() const { return count_; }

 private:
  void write_line(const std::string& line);

  std::filesystem::path path_;
  std::ofstream out_;
  RunHeader header_;
  std::int64_t last_id_ = -1;
  std::unordered_map<std::int64_t, int> generations_;
  std::size_t count_ = 0;
};

struct LoadedRun {
  std::filesystem::path path;
  RunHeader header;
  std::vector<TrialRecord> trials;
  bool truncated = false;  // a partial final line was dropped
};

struct TaggedTrial {
  std::size_t run = 0;  // index into MergedRuns::runs
  RamanTarget target = RamanTarget::Symmetric;
  TrialRecord record;
};

struct MergedRuns {
  std::vector<LoadedRun> runs;
  std::vector<TaggedTrial> trials;
  int genome_length = 0;
  int levels = 0;
};

std::string encode_header(const RunHeader& header);
std::string encode_record(const TrialRecord& record);

/// Parses one run file. A malformed line raises ParseError naming it; with
/// `tolerate_truncation` an unterminated malformed last line is dropped.
LoadedRun load_run(const std::filesystem::path& path, bool tolerate_truncation = false);

/// Concatenates runs in argument order. All runs must share n and L.
MergedRuns load_runs(const std::vector<std::filesystem::path>& paths,
                     bool tolerate_truncation = false);

}  // namespace pcactl
