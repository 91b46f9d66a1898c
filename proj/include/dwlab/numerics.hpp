#pragma once

// Self-contained numerical kernels: symmetric tridiagonal and small Hermitian
// eigensolvers, least squares, bracketed root finding and peak refinement.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dwlab::numerics {

/// Real symmetric tridiagonal matrix.
struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[i] couples rows i and i+1

  std::size_t dimension() const noexcept { return diag.size(); }

  /// Throws InvalidInput when the shapes disagree or an entry is not finite.
  void validate() const;

  /// y = T x
  std::vector<double> apply(std::span<const double> x) const;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;  // ||T v - value v||_2
};

struct TridiagonalEigen {
  std::vector<EigenPair> pairs;  // ascending
  /// Two lowest eigenvalues closer than 1e3 * eps * spectral width.
  bool quasi_degenerate = false;
  double spectral_width = 0.0;
};

/// Eigenpairs of a symmetric tridiagonal matrix.
///
/// With `k_lowest` set, the lowest k eigenvalues are found by Sturm-sequence
/// bisection and their vectors by inverse iteration (orthogonalized within
/// clusters). Without it, all pairs come from implicit-shift QL.
TridiagonalEigen eigh_tridiagonal(const TridiagonalMatrix& m,
                                  std::optional<std::size_t> k_lowest = std::nullopt);

/// Refines an approximate eigenvector by inverse iteration carried out in
/// long double, shifting by the Rayleigh quotient each step. In double the
/// vector of a pair separated by a tiny gap mixes with its neighbour at about
/// eps * ||T|| / gap; this pushes that down by the extra precision.
/// The returned residual is measured in long double.
EigenPair polish_eigenpair(std::span<const long double> diag,
                           std::span<const long double> offdiag,
                           std::span<const double> guess, int iterations = 2);

/// Number of eigenvalues strictly below x (Sturm count).
std::size_t sturm_count(const TridiagonalMatrix& m, double x);

/// Dense complex matrix of dimension 2 or 4, row-major.
class HermitianMatrix {
 public:
  using Complex = std::complex<double>;
  static constexpr std::size_t kMaxDim = 4;

  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t dim);

  static HermitianMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * kMaxDim + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * kMaxDim + c];
  }

  Complex trace() const;
  /// max |h_ij - conj(h_ji)|
  double hermiticity_defect() const;
  /// Frobenius norm.
  double norm() const;

  HermitianMatrix operator*(const HermitianMatrix& rhs) const;
  HermitianMatrix operator+(const HermitianMatrix& rhs) const;
  HermitianMatrix operator-(const HermitianMatrix& rhs) const;
  HermitianMatrix scaled(double s) const;
  HermitianMatrix adjoint() const;

 private:
  std::size_t dim_ = 0;
  std::array<Complex, kMaxDim * kMaxDim> data_{};
};

struct HermitianEigen {
  std::vector<double> values;  // ascending
  std::vector<std::vector<std::complex<double>>> vectors;
};

/// Cyclic complex Jacobi. Throws InvalidInput if `h` is not Hermitian within
/// 1e-12 * max(1, ||h||).
HermitianEigen eigh_hermitian_small(const HermitianMatrix& h);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Scans `grid_points` equally spaced nodes on [lo, hi] for sign changes and
/// bisects each bracket to width <= 1e-12. Exact zeros at nodes are kept once.
std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi,
                               std::size_t grid_points);

struct PeakEstimate {
  double x = 0.0;
  double y = 0.0;
  bool degenerate = false;  // collinear neighbours, grid point returned
};

struct LocalMax {
  std::size_t index = 0;
  double prominence = 0.0;  // height above the higher of the two flanking minima
};

/// Local maxima of a sampled curve with their topographic prominence. A flank
/// extends until a strictly higher sample or the end of the data; a missing
/// flank (edge maximum) is ignored. Plateaus report their first sample.
std::vector<LocalMax> local_maxima(std::span<const double> ys, bool include_edges);

/// Vertex of the parabola through the samples at index-1, index, index+1.
PeakEstimate refine_peak(std::span<const double> xs, std::span<const double> ys,
                         std::size_t index);

}  // namespace dwlab::numerics
