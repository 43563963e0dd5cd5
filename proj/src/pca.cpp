#include "pcactl/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "pcactl/errors.hpp"

namespace pcactl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxSweeps = 100;

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  const auto n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.sd = std::sqrt(ss / n);
  return m;
}

bool negligible_spread(const Moments& m) {
  return m.sd <= 1e-12 * std::max(1.0, std::abs(m.mean));
}

// Pearson coefficient of each column of `columns` against f; columns are
// stored one vector per axis.
Correlations correlate_columns(const std::vector<std::vector<double>>& columns,
                               std::span<const double> f) {
  if (f.size() < 3) throw SampleSizeError("correlation needs at least 3 trials");
  const Moments mf = moments(f);
  if (negligible_spread(mf))
    throw DegenerateFitnessError("fitness has zero variance; correlation undefined");
  const auto n = static_cast<double>(f.size());

  Correlations out(columns.size());
  for (std::size_t axis = 0; axis < columns.size(); ++axis) {
    const auto& x = columns[axis];
    const Moments mx = moments(x);
    if (negligible_spread(mx)) continue;
    double cov = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) cov += (x[t] - mx.mean) * (f[t] - mf.mean);
    cov /= n;
    out[axis] = std::clamp(cov / (mx.sd * mf.sd), -1.0, 1.0);
  }
  return out;
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(n_);
  for (std::size_t r = 0; r < n_; ++r) out[r] = (*this)(r, c);
  return out;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool Matrix::symmetric() const {
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = r + 1; c < n_; ++c)
      if ((*this)(r, c) != (*this)(c, r)) return false;
  return true;
}

DeltaVector deltas(const Genome& genome) {
  if (genome.size() < 2) throw DimensionError("genome needs at least 2 genes for deltas");
  DeltaVector out;
  out.values.resize(genome.size() - 1);
  for (std::size_t i = 0; i + 1 < genome.size(); ++i)
    out.values[i] = kTwoPi * (genome.genes[i + 1] - genome.genes[i]) / genome.levels;
  return out;
}

CovarianceMatrix covariance(std::span<const DeltaVector> trials) {
  if (trials.size() < 2) throw SampleSizeError("covariance needs at least 2 trials");
  const std::size_t dim = trials.front().size();
  for (const auto& t : trials)
    if (t.size() != dim) throw DimensionError("delta vectors have mixed lengths");

  CovarianceMatrix cov;
  cov.sample_count = trials.size();
  cov.means.assign(dim, 0.0);
  const auto n = static_cast<double>(trials.size());
  for (const auto& t : trials)
    for (std::size_t i = 0; i < dim; ++i) cov.means[i] += t.values[i];
  for (double& m : cov.means) m /= n;

  // <d_i d_j> - <d_i><d_j>, accumulated on centred data.
  cov.entries = Matrix(dim);
  std::vector<double> centred(dim);
  for (const auto& t : trials) {
    for (std::size_t i = 0; i < dim; ++i) centred[i] = t.values[i] - cov.means[i];
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) cov.entries(i, j) += centred[i] * centred[j];
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      cov.entries(i, j) /= n;
      cov.entries(j, i) = cov.entries(i, j);
    }
  return cov;
}

EigenSystem eigendecompose(const Matrix& matrix) {
  if (!matrix.symmetric()) throw ContractViolation("eigendecompose requires a symmetric matrix");
  const std::size_t n = matrix.size();
  Matrix a = matrix;
  Matrix v = Matrix::identity(n);
  const double norm = matrix.frobenius();

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  EigenSystem eig;
  while (off_norm() > 1e-12 * norm) {
    if (eig.sweeps == kMaxSweeps) throw ContractViolation("Jacobi iteration did not converge");
    ++eig.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = a(p, r) = c * arp - s * arq;
            a(r, q) = a(q, r) = s * arp + c * arq;
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  eig.values.resize(n);
  eig.vectors = Matrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    eig.values[j] = a(src, src);
    std::size_t lead = 0;
    double biggest = 0.0;
    for (std::size_t r = 0; r < n; ++r) biggest = std::max(biggest, std::abs(v(r, src)));
    for (std::size_t r = 0; r < n; ++r)
      if (std::abs(v(r, src)) >= biggest * (1.0 - 1e-12)) {
        lead = r;
        break;
      }
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) eig.vectors(r, j) = sign * v(r, src);
  }
  return eig;
}

EigenSystem eigendecompose(const CovarianceMatrix& cov) { return eigendecompose(cov.entries); }

std::vector<double> project(const DeltaVector& delta, const EigenSystem& eig) {
  const std::size_t n = eig.size();
  if (delta.size() != n)
    throw DimensionError("delta length " + std::to_string(delta.size()) +
                         " does not match eigensystem of size " + std::to_string(n));
  std::vector<double> eta(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < n; ++r) eta[j] += eig.vectors(r, j) * delta.values[r];
  return eta;
}

DeltaVector reconstruct_deltas(std::span<const double> eta, const EigenSystem& eig) {
  if (eta.size() > eig.size()) throw DimensionError("more coefficients than eigen-axes");
  DeltaVector out{std::vector<double>(eig.size(), 0.0)};
  for (std::size_t j = 0; j < eta.size(); ++j)
    for (std::size_t r = 0; r < eig.size(); ++r) out.values[r] += eta[j] * eig.vectors(r, j);
  return out;
}

Correlations fitness_correlation(std::span<const std::vector<double>> projections,
                                 std::span<const double> fitness) {
  if (projections.size() != fitness.size())
    throw DimensionError("projection and fitness counts differ");
  if (projections.empty()) throw SampleSizeError("correlation needs at least 3 trials");
  const std::size_t dim = projections.front().size();
  std::vector<std::vector<double>> columns(dim, std::vector<double>(projections.size()));
  for (std::size_t t = 0; t < projections.size(); ++t) {
    if (projections[t].size() != dim) throw DimensionError("projections have mixed lengths");
    for (std::size_t i = 0; i < dim; ++i) columns[i][t] = projections[t][i];
  }
  return correlate_columns(columns, fitness);
}

Correlations raw_basis_correlation(std::span<const DeltaVector> trials,
                                   std::span<const double> fitness) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trials.size());
  for (const auto& t : trials) rows.push_back(t.values);
  return fitness_correlation(rows, fitness);
}

PrincipalControls select_principal(const EigenSystem& eig, const Correlations& correlations,
                                   SelectionRule rule) {
  if (rule.k < 1) throw ConfigError("selection needs k >= 1");
  if (correlations.size() != eig.size())
    throw DimensionError("correlation count does not match eigensystem");

  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < correlations.size(); ++j)
    if (correlations[j] && std::abs(*correlations[j]) >= rule.threshold) candidates.push_back(j);
  if (candidates.empty()) {
    std::ostringstream msg;
    double best = 0.0;
    std::size_t defined = 0;
    for (const auto& r : correlations)
      if (r) {
        ++defined;
        best = std::max(best, std::abs(*r));
      }
    msg << "no eigen-axis reaches |r| >= " << rule.threshold << " (" << defined << " of "
        << correlations.size() << " axes defined, max |r| = " << best << ")";
    throw EmptySelectionError(msg.str());
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(*correlations[x]) > std::abs(*correlations[y]);
  });
  if (candidates.size() > static_cast<std::size_t>(rule.k)) candidates.resize(rule.k);

  PrincipalControls out;
  out.rule = rule;
  for (std::size_t j : candidates)
    out.selected.push_back({j, eig.values[j], *correlations[j], eig.vector(j)});
  return out;
}

EssentialPulse essential_pulse(const Genome& optimal, const PrincipalControls& controls) {
  if (controls.selected.empty()) throw EmptySelectionError("no principal controls selected");
  if (!optimal.valid()) throw DimensionError("optimal genome is invalid");
  const DeltaVector d = deltas(optimal);
  double norm2 = 0.0;
  for (double v : d.values) norm2 += v * v;
  if (norm2 == 0.0) throw DegenerateError("optimal genome has flat phase; nothing to project");

  EssentialPulse out;
  out.anchor_genome = optimal;
  out.reconstructed_deltas.values.assign(d.size(), 0.0);
  double kept = 0.0;
  for (const auto& control : controls.selected) {
    if (control.vector.size() != d.size())
      throw DimensionError("principal control does not match genome length");
    double eta = 0.0;
    for (std::size_t r = 0; r < d.size(); ++r) eta += control.vector[r] * d.values[r];
    out.projections.push_back(eta);
    kept += eta * eta;
    for (std::size_t r = 0; r < d.size(); ++r)
      out.reconstructed_deltas.values[r] += eta * control.vector[r];
  }
  out.retained_fraction = std::clamp(kept / norm2, 0.0, 1.0);
  out.genome = reconstruct_genome(out.reconstructed_deltas, optimal.phase(0), optimal.levels);
  return out;
}

Genome reconstruct_genome(const DeltaVector& delta, double anchor_phase, int levels) {
  if (!is_power_of_two(levels)) throw ConfigError("levels must be a power of two");
  Genome g;
  g.levels = levels;
  g.genes.reserve(delta.size() + 1);
  auto quantize = [&](double phase) {
    const double wrapped = phase - kTwoPi * std::floor(phase / kTwoPi);
    const auto level = static_cast<long>(std::llround(wrapped / kTwoPi * levels));
    return static_cast<int>(level % levels);
  };
  double phase = anchor_phase;
  g.genes.push_back(quantize(phase));
  for (double d : delta.values) {
    if (!std::isfinite(d)) throw DimensionError("non-finite delta");
    phase += d;
    g.genes.push_back(quantize(phase));
  }
  return g;
}

double largest_principal_angle(std::span<const std::vector<double>> a,
                               std::span<const std::vector<double>> b) {
  if (a.empty() || b.empty()) throw DimensionError("principal angle needs non-empty subspaces");
  // Singular values of A^T B are the cosines of the principal angles; the
  // smallest one (over min(|a|,|b|)) gives the largest angle.
  const std::size_t ka = a.size();
  const std::size_t kb = b.size();
  std::vector<double> m(ka * kb, 0.0);
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) {
      if (a[i].size() != b[j].size()) throw DimensionError("subspace vectors differ in length");
      for (std::size_t r = 0; r < a[i].size(); ++r) m[i * kb + j] += a[i][r] * b[j][r];
    }
  const bool tall = ka >= kb;
  const std::size_t k = tall ? kb : ka;
  Matrix gram(k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q) {
      double s = 0.0;
      for (std::size_t r = 0; r < (tall ? ka : kb); ++r)
        s += tall ? m[r * kb + p] * m[r * kb + q] : m[p * kb + r] * m[q * kb + r];
      gram(p, q) = s;
    }
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = p + 1; q < k; ++q) gram(q, p) = gram(p, q);
  const EigenSystem eig = eigendecompose(gram);
  const double smallest = std::clamp(std::sqrt(std::max(0.0, eig.values.back())), 0.0, 1.0);
  return std::acos(smallest);
}

}  // namespace pcactl
