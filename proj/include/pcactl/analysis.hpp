#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcactl/pca.hpp"
#include "pcactl/runfile.hpp"

namespace pcactl {

struct AnalysisOptions {
  SelectionRule rule;
  // Trials from earlier generations are left out of every statistic.
  int generations_from = 0;
};

/// Per-target view over the shared eigenbasis: each target's fitness is
/// correlated only against the trials searched for that target.
struct TargetAnalysis {
  RamanTarget target = RamanTarget::Symmetric;
  std::size_t trial_count = 0;
  Correlations eigen_correlation;
  Correlations raw_correlation;
  TrialRecord best;
  std::optional<PrincipalControls> controls;
  std::optional<EssentialPulse> essential;
  std::string diagnostic;  // why controls/essential are missing, if they are
};

struct Analysis {
  CovarianceMatrix covariance;
  EigenSystem eigen;
  std::size_t trial_count = 0;
  std::vector<TargetAnalysis> targets;

  const TargetAnalysis* find(RamanTarget target) const;
};

Analysis analyze(const MergedRuns& runs, const AnalysisOptions& options = {});

/// eigenvalues.csv, eigenvectors.csv, correlations.csv, essential.csv and
/// summary.txt under `out_dir`. Contents depend only on the analysis.
void write_analysis_report(const Analysis& analysis, const std::filesystem::path& out_dir);

}  // namespace pcactl
