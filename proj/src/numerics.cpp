#include "dwlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dwlab/error.hpp"

namespace dwlab::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Gershgorin {
  double lo;
  double hi;
  double norm;  // max row sum of |T|
};

Gershgorin gershgorin(const TridiagonalMatrix& m) {
  const std::size_t n = m.dimension();
  Gershgorin g{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(m.offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(m.offdiag[i]);
    g.lo = std::min(g.lo, m.diag[i] - r);
    g.hi = std::max(g.hi, m.diag[i] + r);
    g.norm = std::max(g.norm, std::abs(m.diag[i]) + r);
  }
  const double pad = 2.0 * kEps * std::max(g.norm, 1e-300) * static_cast<double>(n) + 1e-300;
  g.lo -= pad;
  g.hi += pad;
  return g;
}

double pivot_floor(const TridiagonalMatrix& m) {
  double emax = 1.0;
  for (double e : m.offdiag) emax = std::max(emax, e * e);
  return std::numeric_limits<double>::min() * emax;
}

std::size_t sturm_count_impl(const TridiagonalMatrix& m, double x, double pivmin) {
  std::size_t count = 0;
  double q = m.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < m.diag.size(); ++i) {
    const double e = m.offdiag[i - 1];
    q = m.diag[i] - x - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

/// Eigenvalue with zero-based index `j` by bisection on the Sturm count.
double bisect_eigenvalue(const TridiagonalMatrix& m, std::size_t j, const Gershgorin& g,
                         double pivmin) {
  double lo = g.lo;
  double hi = g.hi;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
    if (sturm_count_impl(m, mid, pivmin) > j) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// LU factorisation of (T - shift I) with partial pivoting (banded, fill-in du2).
template <typename Real>
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(std::span<const Real> diag, std::span<const Real> offdiag, Real shift,
                       Real tiny)
      : n_(diag.size()),
        dl_(offdiag.begin(), offdiag.end()),
        d_(diag.begin(), diag.end()),
        du_(offdiag.begin(), offdiag.end()),
        du2_(n_ > 2 ? n_ - 2 : 0, Real(0)),
        swapped_(n_ > 1 ? n_ - 1 : 0, false) {
    for (Real& v : d_) v -= shift;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == Real(0)) d_[i] = tiny;
        const Real fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const Real fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const Real temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    for (Real& v : d_) {
      if (std::abs(v) < tiny) v = std::copysign(tiny, v == Real(0) ? Real(1) : v);
    }
  }

  void solve(std::vector<Real>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (!swapped_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const Real temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    const std::size_t n = n_;
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t ii = n >= 2 ? n - 2 : 0; ii-- > 0;) {
      b[ii] = (b[ii] - du_[ii] * b[ii + 1] - du2_[ii] * b[ii + 2]) / d_[ii];
    }
  }

 private:
  std::size_t n_;
  std::vector<Real> dl_, d_, du_, du2_;
  std::vector<bool> swapped_;
};

void orthogonalize(std::vector<double>& x, const std::vector<const std::vector<double>*>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto* q : basis) {
      const double proj = dot(x, *q);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= proj * (*q)[i];
    }
  }
}

double residual_norm(const TridiagonalMatrix& m, const std::vector<double>& v, double value) {
  auto tv = m.apply(v);
  for (std::size_t i = 0; i < v.size(); ++i) tv[i] -= value * v[i];
  return norm2(tv);
}

std::vector<double> inverse_iteration(const TridiagonalMatrix& m, double value, double tnorm,
                                      const std::vector<const std::vector<double>*>& cluster,
                                      std::size_t seed) {
  const std::size_t n = m.dimension();
  const double tiny = kEps * std::max(tnorm, 1e-300);
  ShiftedTridiagonalLU<double> lu(m.diag, m.offdiag, value, tiny);

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = uni(rng);
  orthogonalize(x, cluster);
  double nx = norm2(x);
  for (double& v : x) v /= nx;

  constexpr int kMaxIter = 16;
  std::vector<double> prev;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    prev = x;
    lu.solve(x);
    orthogonalize(x, cluster);
    nx = norm2(x);
    if (!(nx > 0.0) || !std::isfinite(nx)) {
      throw ConvergenceError("inverse iteration produced a non-finite vector",
                             static_cast<std::size_t>(iter + 1));
    }
    for (double& v : x) v /= nx;
    const double sign = dot(x, prev) < 0.0 ? -1.0 : 1.0;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(x[i] - sign * prev[i]));
    if (iter >= 2 && change <= 1e-14) break;
  }

  const double res = residual_norm(m, x, value);
  if (!(res <= 1e-8 * std::max(tnorm, 1.0))) {
    throw ConvergenceError("inverse iteration residual too large", kMaxIter);
  }
  return x;
}

void sort_pairs(std::vector<EigenPair>& pairs) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, eigenvectors accumulated.
std::vector<EigenPair> ql_all(const TridiagonalMatrix& m) {
  const std::size_t n = m.dimension();
  std::vector<double> d = m.diag;
  std::vector<double> e(n, 0.0);
  std::copy(m.offdiag.begin(), m.offdiag.end(), e.begin());
  std::vector<std::vector<double>> z(n, std::vector<double>(n, 0.0));  // z[col][row]
  for (std::size_t i = 0; i < n; ++i) z[i][i] = 1.0;

  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t mm = l;
    while (mm < n) {
      if (std::abs(e[mm]) <= kEps * tst1) break;
      ++mm;
    }
    if (mm == n) mm = n - 1;
    if (mm > l) {
      std::size_t iter = 0;
      do {
        if (++iter > 90) throw ConvergenceError("QL iteration did not converge", iter);
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[mm];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = mm; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          auto& zi = z[ii];
          auto& zi1 = z[ii + 1];
          for (std::size_t k = 0; k < n; ++k) {
            const double t = zi1[k];
            zi1[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  std::vector<EigenPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].value = d[i];
    pairs[i].vector = std::move(z[i]);
  }
  sort_pairs(pairs);
  return pairs;
}

}  // namespace

void TridiagonalMatrix::validate() const {
  if (diag.empty()) throw InvalidInput("tridiagonal matrix is empty");
  if (offdiag.size() + 1 != diag.size()) {
    throw InvalidInput("offdiag length must be diag length - 1");
  }
  for (double v : diag) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite diagonal entry");
  }
  for (double v : offdiag) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite off-diagonal entry");
  }
}

std::vector<double> TridiagonalMatrix::apply(std::span<const double> x) const {
  const std::size_t n = dimension();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += offdiag[i - 1] * x[i - 1];
    if (i + 1 < n) s += offdiag[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

EigenPair polish_eigenpair(std::span<const long double> diag,
                           std::span<const long double> offdiag,
                           std::span<const double> guess, int iterations) {
  const std::size_t n = diag.size();
  if (n == 0 || offdiag.size() + 1 != n || guess.size() != n) {
    throw InvalidInput("polish_eigenpair: shape mismatch");
  }
  if (iterations < 0) throw InvalidInput("polish_eigenpair: iterations must be >= 0");

  using LD = long double;
  auto apply = [&](const std::vector<LD>& x) {
    std::vector<LD> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      LD v = diag[i] * x[i];
      if (i > 0) v += offdiag[i - 1] * x[i - 1];
      if (i + 1 < n) v += offdiag[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  };
  auto normalize = [](std::vector<LD>& x) {
    LD s = 0.0L;
    for (LD v : x) s += v * v;
    s = std::sqrt(s);
    if (!(s > 0.0L) || !std::isfinite(static_cast<double>(s))) {
      throw ConvergenceError("polish_eigenpair: degenerate vector", 0);
    }
    for (LD& v : x) v /= s;
  };
  auto rayleigh = [&](const std::vector<LD>& x) {
    const auto y = apply(x);
    LD s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  };

  LD tnorm = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    LD r = std::abs(diag[i]);
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(offdiag[i]);
    tnorm = std::max(tnorm, r);
  }
  const LD tiny = std::numeric_limits<LD>::epsilon() * std::max(tnorm, 1e-300L);

  std::vector<LD> x(guess.begin(), guess.end());
  normalize(x);
  LD value = rayleigh(x);
  for (int it = 0; it < iterations; ++it) {
    const ShiftedTridiagonalLU<LD> lu(diag, offdiag, value, tiny);
    std::vector<LD> prev = x;
    lu.solve(x);
    normalize(x);
    LD overlap = 0.0L;
    for (std::size_t i = 0; i < n; ++i) overlap += x[i] * prev[i];
    if (overlap < 0.0L) {
      for (LD& v : x) v = -v;
    }
    value = rayleigh(x);
  }

  const auto y = apply(x);
  LD res = 0.0L;
  for (std::size_t i = 0; i < n; ++i) res += (y[i] - value * x[i]) * (y[i] - value * x[i]);

  EigenPair out;
  out.value = static_cast<double>(value);
  out.vector.assign(x.begin(), x.end());
  out.residual = static_cast<double>(std::sqrt(res));
  return out;
}

std::size_t sturm_count(const TridiagonalMatrix& m, double x) {
  m.validate();
  return sturm_count_impl(m, x, pivot_floor(m));
}

TridiagonalEigen eigh_tridiagonal(const TridiagonalMatrix& m,
                                  std::optional<std::size_t> k_lowest) {
  m.validate();
  const std::size_t n = m.dimension();
  if (k_lowest && (*k_lowest < 1 || *k_lowest > n)) {
    throw InvalidInput("k_lowest must lie in [1, dimension]");
  }

  const Gershgorin g = gershgorin(m);
  TridiagonalEigen out;
  out.spectral_width = g.hi - g.lo;
  const double degenerate_below = 1e3 * kEps * out.spectral_width;

  if (!k_lowest || *k_lowest == n) {
    out.pairs = ql_all(m);
  } else {
    const double pivmin = pivot_floor(m);
    // Always resolve two levels so the lowest gap can be judged.
    const std::size_t k = std::min(n, std::max<std::size_t>(*k_lowest, 2));
    std::vector<double> values(k);
    for (std::size_t j = 0; j < k; ++j) values[j] = bisect_eigenvalue(m, j, g, pivmin);

    const double cluster_gap = 1e-3 * g.norm;
    out.pairs.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<const std::vector<double>*> cluster;
      for (std::size_t i = 0; i < j; ++i) {
        if (values[j] - values[i] < cluster_gap) cluster.push_back(&out.pairs[i].vector);
      }
      out.pairs[j].value = values[j];
      out.pairs[j].vector = inverse_iteration(m, values[j], g.norm, cluster, j);
    }
    out.pairs.resize(*k_lowest);
  }

  if (n >= 2) {
    double gap = 0.0;
    if (out.pairs.size() >= 2) {
      gap = out.pairs[1].value - out.pairs[0].value;
    } else {
      gap = bisect_eigenvalue(m, 1, g, pivot_floor(m)) - out.pairs[0].value;
    }
    out.quasi_degenerate = gap < degenerate_below;
  }
  for (auto& p : out.pairs) p.residual = residual_norm(m, p.vector, p.value);
  return out;
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > kMaxDim) throw InvalidInput("HermitianMatrix dimension out of range");
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  HermitianMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

HermitianMatrix::Complex HermitianMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double HermitianMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    }
  }
  return d;
}

double HermitianMatrix::norm() const {
  double s = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) s += std::norm((*this)(r, c));
  }
  return std::sqrt(s);
}

HermitianMatrix HermitianMatrix::operator*(const HermitianMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw InvalidInput("dimension mismatch");
  HermitianMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) s += (*this)(r, k) * rhs(k, c);
      out(r, c) = s;
    }
  }
  return out;
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw InvalidInput("dimension mismatch");
  HermitianMatrix out(dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
  return out;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw InvalidInput("dimension mismatch");
  HermitianMatrix out(dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
  return out;
}

HermitianMatrix HermitianMatrix::scaled(double s) const {
  HermitianMatrix out = *this;
  for (auto& v : out.data_) v *= s;
  return out;
}

HermitianMatrix HermitianMatrix::adjoint() const {
  HermitianMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) out(r, c) = std::conj((*this)(c, r));
  }
  return out;
}

HermitianEigen eigh_hermitian_small(const HermitianMatrix& h) {
  using Complex = HermitianMatrix::Complex;
  const std::size_t n = h.dim();
  if (n == 0) throw InvalidInput("empty Hermitian matrix");
  const double scale = std::max(1.0, h.norm());
  if (!(h.hermiticity_defect() <= 1e-12 * scale)) {
    throw InvalidInput("matrix is not Hermitian within tolerance");
  }

  // Symmetrize exactly so the rotations see a Hermitian input.
  HermitianMatrix a(n);
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = h(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      a(r, c) = 0.5 * (h(r, c) + std::conj(h(c, r)));
      a(c, r) = std::conj(a(r, c));
    }
  }
  HermitianMatrix v = HermitianMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) s += std::norm(a(r, c));
    }
    return std::sqrt(s);
  };

  std::size_t sweep = 0;
  for (; sweep < 60 && off_norm() > 1e-17 * scale; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        const Complex u = a(p, q) / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        HermitianMatrix j = HermitianMatrix::identity(n);
        j(p, p) = c;
        j(p, q) = s;
        j(q, p) = -s * std::conj(u);
        j(q, q) = c * std::conj(u);
        a = j.adjoint() * a * j;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
        v = v * j;
      }
    }
  }
  if (off_norm() > 1e-13 * scale) throw ConvergenceError("Jacobi sweeps did not converge", sweep);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out;
  for (std::size_t idx : order) {
    out.values.push_back(a(idx, idx).real());
    std::vector<Complex> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = v(r, idx);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// ---------------------------------------------------------------------------

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("linear_fit: length mismatch");
  if (xs.size() < 3) throw InvalidInput("linear_fit: need at least 3 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidInput("linear_fit: xs are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi,
                               std::size_t grid_points) {
  if (!(lo < hi)) throw InvalidInput("find_roots: need lo < hi");
  if (grid_points < 2) throw InvalidInput("find_roots: need at least 2 grid points");

  const double span = hi - lo;
  const double last = static_cast<double>(grid_points - 1);
  auto node = [&](std::size_t i) { return lo + span * (static_cast<double>(i) / last); };

  std::vector<double> xs(grid_points);
  std::vector<double> fs(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    xs[i] = node(i);
    fs[i] = f(xs[i]);
    if (!std::isfinite(fs[i])) throw InvalidInput("find_roots: f is not finite on the grid");
  }

  std::vector<double> roots;
  for (std::size_t i = 0; i < grid_points; ++i) {
    if (fs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (i + 1 == grid_points || fs[i + 1] == 0.0) continue;
    if ((fs[i] < 0.0) == (fs[i + 1] < 0.0)) continue;

    double a = xs[i], b = xs[i + 1];
    double fa = fs[i];
    while (b - a > 1e-12) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = f(mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

PeakEstimate refine_peak(std::span<const double> xs, std::span<const double> ys,
                         std::size_t index) {
  if (xs.size() != ys.size()) throw InvalidInput("refine_peak: length mismatch");
  if (index == 0 || index + 1 >= xs.size()) {
    throw InvalidInput("refine_peak: index must be interior");
  }
  const double x0 = xs[index - 1], x1 = xs[index], x2 = xs[index + 1];
  const double y0 = ys[index - 1], y1 = ys[index], y2 = ys[index + 1];

  // Divided differences: y = y1 + b (x - x1) + a (x - x1)^2
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  const double scale = std::max({std::abs(d01), std::abs(d12), 1e-300});
  if (!(a < 0.0) || std::abs(d12 - d01) <= 1e-14 * scale) {
    return {x1, y1, true};
  }
  const double b = d01 + a * (x1 - x0);
  const double dx = -b / (2.0 * a);
  return {x1 + dx, y1 + b * dx + a * dx * dx, false};
}

std::vector<LocalMax> local_maxima(std::span<const double> ys, bool include_edges) {
  const std::size_t n = ys.size();
  std::vector<LocalMax> out;
  if (n < 2) return out;

  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 ? !include_edges : !(ys[i] > ys[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < n && ys[j] == ys[i]) ++j;
    if (j == n ? !(include_edges && i > 0) : !(ys[j] < ys[i])) continue;

    const double h = ys[i];
    bool has_left = false, has_right = false;
    double left_min = h, right_min = h;
    for (std::size_t j = i; j-- > 0;) {
      if (ys[j] > h) break;
      has_left = true;
      left_min = std::min(left_min, ys[j]);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ys[j] > h) break;
      has_right = true;
      right_min = std::min(right_min, ys[j]);
    }
    double base = h;
    if (has_left && has_right) {
      base = std::max(left_min, right_min);
    } else if (has_left) {
      base = left_min;
    } else if (has_right) {
      base = right_min;
    }
    out.push_back({i, h - base});
  }
  return out;
}

}  // namespace dwlab::numerics
