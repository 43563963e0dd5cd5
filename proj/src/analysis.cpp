#include "pcactl/analysis.hpp"

#include <algorithm>
#include <fstream>

#include "pcactl/errors.hpp"
#include "pcactl/report.hpp"

namespace pcactl {

const TargetAnalysis* Analysis::find(RamanTarget target) const {
  for (const auto& t : targets)
    if (t.target == target) return &t;
  return nullptr;
}

Analysis analyze(const MergedRuns& runs, const AnalysisOptions& options) {
  std::vector<const TaggedTrial*> kept;
  for (const auto& t : runs.trials)
    if (t.record.generation >= options.generations_from) kept.push_back(&t);

  std::vector<DeltaVector> d;
  d.reserve(kept.size());
  for (const auto* t : kept) d.push_back(deltas(t->record.genome));

  Analysis out;
  out.trial_count = kept.size();
  out.covariance = covariance(d);
  out.eigen = eigendecompose(out.covariance);

  std::vector<std::vector<double>> eta;
  eta.reserve(d.size());
  for (const auto& v : d) eta.push_back(project(v, out.eigen));

  std::vector<RamanTarget> order;
  for (const auto* t : kept)
    if (std::find(order.begin(), order.end(), t->target) == order.end())
      order.push_back(t->target);

  for (RamanTarget target : order) {
    TargetAnalysis ta;
    ta.target = target;
    std::vector<std::vector<double>> sub_eta;
    std::vector<DeltaVector> sub_delta;
    std::vector<double> fitness;
    bool have_best = false;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (kept[i]->target != target) continue;
      const TrialRecord& rec = kept[i]->record;
      sub_eta.push_back(eta[i]);
      sub_delta.push_back(d[i]);
      fitness.push_back(rec.fitness);
      if (!have_best || rec.fitness > ta.best.fitness) {
        ta.best = rec;
        have_best = true;
      }
    }
    ta.trial_count = fitness.size();
    try {
      ta.eigen_correlation = fitness_correlation(sub_eta, fitness);
      ta.raw_correlation = raw_basis_correlation(sub_delta, fitness);
      ta.controls = select_principal(out.eigen, ta.eigen_correlation, options.rule);
      ta.essential = essential_pulse(ta.best.genome, *ta.controls);
    } catch (const Error& e) {
      ta.diagnostic = e.what();
    }
    out.targets.push_back(std::move(ta));
  }
  return out;
}

void write_analysis_report(const Analysis& a, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::size_t n = a.eigen.size();

  {
    auto out = open_output(out_dir / "eigenvalues.csv");
    out << "index,lambda,cumulative_fraction\n";
    double total = 0.0;
    for (double v : a.eigen.values) total += v;
    double running = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      running += a.eigen.values[j];
      out << j + 1 << ',' << format_number(a.eigen.values[j]) << ','
          << (total > 0.0 ? format_number(running / total) : std::string{}) << '\n';
    }
  }
  {
    auto out = open_output(out_dir / "eigenvectors.csv");
    out << "component";
    for (std::size_t j = 0; j < n; ++j) out << ",u" << j + 1;
    out << '\n';
    for (std::size_t r = 0; r < n; ++r) {
      out << r + 1;
      for (std::size_t j = 0; j < n; ++j) out << ',' << format_number(a.eigen.vectors(r, j));
      out << '\n';
    }
  }
  {
    auto out = open_output(out_dir / "correlations.csv");
    out << "target,axis,r_eigen,r_raw\n";
    for (const auto& t : a.targets) {
      if (t.eigen_correlation.empty()) continue;
      for (std::size_t j = 0; j < n; ++j)
        out << to_string(t.target) << ',' << j + 1 << ','
            << format_number(t.eigen_correlation[j]) << ',' << format_number(t.raw_correlation[j])
            << '\n';
    }
  }
  {
    auto out = open_output(out_dir / "essential.csv");
    out << "target,rank,axis,eta,lambda,r\n";
    for (const auto& t : a.targets) {
      if (!t.essential) continue;
      for (std::size_t i = 0; i < t.controls->size(); ++i) {
        const auto& c = t.controls->selected[i];
        out << to_string(t.target) << ',' << i + 1 << ',' << c.axis + 1 << ','
            << format_number(t.essential->projections[i]) << ',' << format_number(c.eigenvalue)
            << ',' << format_number(c.correlation) << '\n';
      }
    }
  }
  {
    auto out = open_output(out_dir / "summary.txt");
    out << "trials: " << a.trial_count << '\n';
    out << "delta dimension: " << n << '\n';
    out << "trace: " << format_number(a.covariance.entries.trace()) << '\n';
    out << "jacobi sweeps: " << a.eigen.sweeps << '\n';
    for (const auto& t : a.targets) {
      out << '\n' << "target " << to_string(t.target) << '\n';
      out << "  trials: " << t.trial_count << '\n';
      out << "  best trial: " << t.best.trial_id << " fitness " << format_number(t.best.fitness)
          << '\n';
      if (t.controls) {
        out << "  principal axes:";
        for (const auto& c : t.controls->selected) out << ' ' << c.axis + 1;
        out << " (k=" << t.controls->rule.k
            << ", threshold=" << format_number(t.controls->rule.threshold) << ")\n";
      }
      if (t.essential)
        out << "  retained_fraction: " << format_number(t.essential->retained_fraction) << '\n';
      if (!t.diagnostic.empty()) out << "  note: " << t.diagnostic << '\n';
    }
  }
}

}  // namespace pcactl
