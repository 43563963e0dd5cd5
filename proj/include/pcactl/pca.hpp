#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pcactl/genome.hpp"

namespace pcactl {

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  static Matrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::vector<double> column(std::size_t c) const;

  double trace() const;
  double frobenius() const;
  bool symmetric() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Nearest-neighbour phase differences of a genome, unwrapped.
struct DeltaVector {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
  friend bool operator==(const DeltaVector&, const DeltaVector&) = default;
};

struct CovarianceMatrix {
  Matrix entries;
  std::size_t sample_count = 0;
  std::vector<double> means;
};

/// Eigenvalues descending; eigenvectors are the columns of `vectors`.
struct EigenSystem {
  std::vector<double> values;
  Matrix vectors;
  int sweeps = 0;

  std::size_t size() const { return values.size(); }
  std::vector<double> vector(std::size_t j) const { return vectors.column(j); }
};

struct SelectionRule {
  int k = 3;
  double threshold = 0.1;
};

struct PrincipalControl {
  std::size_t axis = 0;  // eigen-axis index, 0-based
  double eigenvalue = 0.0;
  double correlation = 0.0;
  std::vector<double> vector;
};

struct PrincipalControls {
  std::vector<PrincipalControl> selected;
  SelectionRule rule;
  std::size_t size() const { return selected.size(); }
};

struct EssentialPulse {
  Genome anchor_genome;
  std::vector<double> projections;  // eta_j, one per selected control
  DeltaVector reconstructed_deltas;
  double retained_fraction = 0.0;
  Genome genome;  // realized essential pulse
};

/// Per-axis Pearson coefficients; std::nullopt where the axis has no spread.
using Correlations = std::vector<std::optional<double>>;

DeltaVector deltas(const Genome& genome);

CovarianceMatrix covariance(std::span<const DeltaVector> trials);

/// Cyclic Jacobi diagonalization. Eigenvalues are sorted descending with
/// equal values kept in index order; each eigenvector has its
/// largest-magnitude component positive (lowest index wins ties).
EigenSystem eigendecompose(const Matrix& matrix);
EigenSystem eigendecompose(const CovarianceMatrix& cov);

std::vector<double> project(const DeltaVector& delta, const EigenSystem& eig);
/// sum_j eta_j u_j over the leading eta.size() axes.
DeltaVector reconstruct_deltas(std::span<const double> eta, const EigenSystem& eig);

/// (<x f> - <x><f>) / (sigma_x sigma_f) for each coordinate of `samples`.
Correlations fitness_correlation(std::span<const std::vector<double>> projections,
                                 std::span<const double> fitness);
Correlations raw_basis_correlation(std::span<const DeltaVector> trials,
                                   std::span<const double> fitness);

PrincipalControls select_principal(const EigenSystem& eig, const Correlations& correlations,
                                   SelectionRule rule = {});

/// Projects `optimal` onto the selected controls and realizes the result
/// with the optimum's first phase as the anchor.
EssentialPulse essential_pulse(const Genome& optimal, const PrincipalControls& controls);

/// Cumulative sum from anchor_phase, reduced mod 2pi, rounded to the
/// nearest of `levels` quantization levels.
Genome reconstruct_genome(const DeltaVector& delta, double anchor_phase, int levels);

/// Largest principal angle (radians) between span(a) and span(b). Both sets
/// must be orthonormal.
double largest_principal_angle(std::span<const std::vector<double>> a,
                               std::span<const std::vector<double>> b);

}  // namespace pcactl
