#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dwlab/error.hpp"
#include "dwlab/numerics.hpp"

using namespace dwlab;
using namespace dwlab::numerics;
using Complex = std::complex<double>;

namespace {

TridiagonalMatrix random_tridiagonal(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TridiagonalMatrix m;
  for (std::size_t i = 0; i < n; ++i) m.diag.push_back(u(rng));
  for (std::size_t i = 0; i + 1 < n; ++i) m.offdiag.push_back(u(rng));
  return m;
}

Eigen::MatrixXd dense(const TridiagonalMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dimension());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = m.diag[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = m.offdiag[i];
  return a;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

HermitianMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  HermitianMatrix h(d);
  for (std::size_t r = 0; r < d; ++r) {
    h(r, r) = g(rng);
    for (std::size_t c = r + 1; c < d; ++c) {
      h(r, c) = Complex(g(rng), g(rng));
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

}  // namespace

TEST_CASE("eigh_tridiagonal: 2x2 closed form") {
  const TridiagonalMatrix m{{0.0, 0.0}, {-1.0}};
  for (auto k : {std::optional<std::size_t>{}, std::optional<std::size_t>{2}}) {
    const auto eig = eigh_tridiagonal(m, k);
    REQUIRE(eig.pairs.size() == 2);
    CHECK(eig.pairs[0].value == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eig.pairs[1].value == doctest::Approx(1.0).epsilon(1e-14));
    const auto& v = eig.pairs[0].vector;
    CHECK(std::abs(std::abs(v[0]) - M_SQRT1_2) < 1e-14);
    CHECK(std::abs(v[0] - v[1]) < 1e-14);
  }
}

TEST_CASE("eigh_tridiagonal: N=2 free hopping") {
  const double s = std::sqrt(2.0);
  const auto eig = eigh_tridiagonal({{0.0, 0.0, 0.0}, {-s, -s}});
  REQUIRE(eig.pairs.size() == 3);
  CHECK(eig.pairs[0].value == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(eig.pairs[1].value) < 1e-14);
  CHECK(eig.pairs[2].value == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eigh_tridiagonal: random 50x50 against dense oracle") {
  std::mt19937_64 rng(7);
  const auto m = random_tridiagonal(50, rng);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(dense(m));
  const auto all = eigh_tridiagonal(m);
  REQUIRE(all.pairs.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::abs(all.pairs[i].value - oracle.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-10);
    CHECK(all.pairs[i].residual < 1e-10);
  }
  const auto low = eigh_tridiagonal(m, 5);
  REQUIRE(low.pairs.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(low.pairs[i].value - oracle.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-10);
    Eigen::VectorXd ov = oracle.eigenvectors().col(static_cast<Eigen::Index>(i));
    double overlap = 0.0;
    for (std::size_t j = 0; j < 50; ++j) overlap += ov(static_cast<Eigen::Index>(j)) * low.pairs[i].vector[j];
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-10);
  }
}

TEST_CASE("eigh_tridiagonal: orthonormality, ordering and trace") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 3u, 17u, 64u, 150u}) {
    const auto m = random_tridiagonal(n, rng);
    const auto eig = eigh_tridiagonal(m);
    double tr = std::accumulate(m.diag.begin(), m.diag.end(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += eig.pairs[i].value;
      if (i) CHECK(eig.pairs[i - 1].value <= eig.pairs[i].value);
      CHECK(std::abs(dot(eig.pairs[i].vector, eig.pairs[i].vector) - 1.0) < 1e-12);
      for (std::size_t j = 0; j < i; ++j) {
        CHECK(std::abs(dot(eig.pairs[i].vector, eig.pairs[j].vector)) < 1e-10);
      }
    }
    CHECK(std::abs(sum - tr) <= 1e-9 * std::max(1.0, std::abs(tr)));
  }
}

TEST_CASE("eigh_tridiagonal: ground energy matches dense oracle, dim <= 200") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(2, 200);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = random_tridiagonal(dim(rng), rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(dense(m), Eigen::EigenvaluesOnly);
    const double e0 = oracle.eigenvalues()(0);
    const auto eig = eigh_tridiagonal(m, 1);
    REQUIRE(eig.pairs.size() == 1);
    CHECK(std::abs(eig.pairs[0].value - e0) <= 1e-12 * std::max(1.0, std::abs(e0)));
  }
}

TEST_CASE("eigh_tridiagonal: near-degenerate pair keeps absolute accuracy") {
  // Two decoupled identical blocks: exact degeneracy, then a tiny coupling.
  TridiagonalMatrix m{{1.0, -2.0, 1.0, 1.0, -2.0, 1.0}, {0.5, 0.5, 1e-14, 0.5, 0.5}};
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(dense(m));
  const auto eig = eigh_tridiagonal(m, 2);
  CHECK(eig.quasi_degenerate);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(eig.pairs[i].value - oracle.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-12);
    CHECK(eig.pairs[i].residual < 1e-12);
  }
  CHECK(std::abs(dot(eig.pairs[0].vector, eig.pairs[1].vector)) < 1e-10);
}

TEST_CASE("eigh_tridiagonal: errors") {
  CHECK_THROWS_AS(eigh_tridiagonal({{0.0, 1.0}, {}}), InvalidInput);
  CHECK_THROWS_AS(eigh_tridiagonal({{0.0, NAN}, {1.0}}), InvalidInput);
  CHECK_THROWS_AS(eigh_tridiagonal({{0.0, 1.0}, {INFINITY}}), InvalidInput);
  CHECK_THROWS_AS(eigh_tridiagonal({{}, {}}), InvalidInput);
  CHECK_THROWS_AS(eigh_tridiagonal({{0.0, 1.0}, {1.0}}, 0), InvalidInput);
  CHECK_THROWS_AS(eigh_tridiagonal({{0.0, 1.0}, {1.0}}, 3), InvalidInput);
}

TEST_CASE("sturm_count counts eigenvalues below x") {
  const double s = std::sqrt(2.0);
  const TridiagonalMatrix m{{0.0, 0.0, 0.0}, {-s, -s}};
  CHECK(sturm_count(m, -3.0) == 0);
  CHECK(sturm_count(m, -1.0) == 1);
  CHECK(sturm_count(m, 1.0) == 2);
  CHECK(sturm_count(m, 3.0) == 3);
}

TEST_CASE("eigh_hermitian_small: closed forms") {
  auto half = HermitianMatrix::identity(2).scaled(0.5);
  auto e = eigh_hermitian_small(half);
  CHECK(e.values[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.values[1] == doctest::Approx(0.5).epsilon(1e-15));

  HermitianMatrix x(2);
  x(0, 1) = x(1, 0) = 1.0;
  e = eigh_hermitian_small(x);
  CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-15));

  HermitianMatrix y(2);
  y(0, 1) = Complex(0, -1);
  y(1, 0) = Complex(0, 1);
  e = eigh_hermitian_small(y);
  CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("eigh_hermitian_small: random 4x4 against characteristic polynomial") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const auto h = random_hermitian(4, rng);
    Eigen::Matrix4cd a;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a(r, c) = h(r, c);
    // Faddeev-LeVerrier coefficients, independent of any eigen-decomposition.
    Eigen::Matrix4cd mk = Eigen::Matrix4cd::Zero();
    Eigen::Matrix<std::complex<double>, 5, 1> coeff;
    coeff(4) = 1.0;
    for (int k = 1; k <= 4; ++k) {
      mk = a * mk + coeff(5 - k) * Eigen::Matrix4cd::Identity();
      coeff(4 - k) = -(a * mk).trace() / static_cast<double>(k);
    }
    Eigen::Matrix<double, 5, 1> real_coeff = coeff.real();
    Eigen::PolynomialSolver<double, 4> solver(real_coeff);
    std::vector<double> roots;
    for (int i = 0; i < 4; ++i) roots.push_back(solver.roots()(i).real());
    std::sort(roots.begin(), roots.end());

    const auto e = eigh_hermitian_small(h);
    const double scale = std::max(1.0, h.norm());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(e.values[i] - roots[i]) < 1e-8 * scale);

    // Reconstruction h = V diag V^dagger.
    HermitianMatrix rec(4);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < 4; ++k)
          rec(r, c) += e.values[k] * e.vectors[k][r] * std::conj(e.vectors[k][c]);
    CHECK((rec - h).norm() <= 1e-12 * h.norm());
  }
}

TEST_CASE("eigh_hermitian_small: density matrices have eigenvalues in [0, 1]") {
  std::mt19937_64 rng(5);
  for (std::size_t d : {2u, 4u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_hermitian(d, rng);
      auto rho = a * a.adjoint();
      rho = rho.scaled(1.0 / rho.trace().real());
      const auto e = eigh_hermitian_small(rho);
      double sum = 0.0;
      for (double v : e.values) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
        sum += v;
      }
      CHECK(std::abs(sum - rho.trace().real()) < 1e-12);
    }
  }
}

TEST_CASE("eigh_hermitian_small: rejects non-Hermitian input") {
  HermitianMatrix h(2);
  h(0, 1) = 1.0;
  h(1, 0) = 0.5;
  CHECK_THROWS_AS(eigh_hermitian_small(h), InvalidInput);
  HermitianMatrix d(2);
  d(0, 0) = Complex(1.0, 0.1);
  CHECK_THROWS_AS(eigh_hermitian_small(d), InvalidInput);
}

TEST_CASE("linear_fit") {
  const std::vector<double> xs{0, 1, 2, 3, 4};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2.0 * x + 1.0);
  const auto f = linear_fit(xs, ys);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(f.r_squared - 1.0) < 1e-12);

  const std::vector<double> noisy{1.1, 2.9, 5.2, 6.8, 9.1};
  const auto g = linear_fit(xs, noisy);
  CHECK(g.r_squared >= 0.0);
  CHECK(g.r_squared <= 1.0);

  const std::vector<double> same{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(linear_fit(same, same), InvalidInput);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(linear_fit(two, two), InvalidInput);
}

TEST_CASE("find_roots") {
  auto r = find_roots([](double z) { return z; }, -0.5, 0.5, 101);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0]) < 1e-12);

  // Even node count: zero falls inside a bracket.
  r = find_roots([](double z) { return z; }, -0.5, 0.5, 100);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0]) < 1e-12);

  auto lam = [](double l) {
    return [l](double z) { return z / std::sqrt(1.0 - z * z) - 0.5 * l * z; };
  };
  r = find_roots(lam(2.0), -0.999, 0.999, 2001);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0]) < 1e-12);

  r = find_roots(lam(4.0), -0.999, 0.999, 2001);
  REQUIRE(r.size() == 3);
  const double z = std::sqrt(3.0) / 2.0;
  CHECK(std::abs(r[0] + z) < 1e-11);
  CHECK(std::abs(r[1]) < 1e-12);
  CHECK(std::abs(r[2] - z) < 1e-11);

  CHECK(find_roots([](double) { return 1.0; }, 0.0, 1.0, 10).empty());
  CHECK_THROWS_AS(find_roots([](double z) { return z; }, 1.0, 0.0, 10), InvalidInput);
  CHECK_THROWS_AS(find_roots([](double z) { return z; }, 0.0, 1.0, 1), InvalidInput);
}

TEST_CASE("find_roots against a fine sign-change scan") {
  auto f = [](double x) { return std::sin(7.0 * x) - 0.3 * x; };
  const auto roots = find_roots(f, -3.0, 3.0, 1000);
  // Oracle: 10^6-point scan.
  std::size_t changes = 0;
  const std::size_t n = 1000000;
  double prev = f(-3.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = f(-3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(n - 1));
    if ((prev < 0) != (cur < 0)) ++changes;
    prev = cur;
  }
  CHECK(roots.size() == changes);
  for (double x : roots) {
    const double slope = std::abs(7.0 * std::cos(7.0 * x) - 0.3);
    CHECK(std::abs(f(x)) <= 1e-9 * std::max(1.0, slope));
  }
  CHECK(std::is_sorted(roots.begin(), roots.end()));
}

TEST_CASE("refine_peak") {
  const std::vector<double> xs{0, 1, 2};
  auto p = refine_peak(xs, std::vector<double>{1, 2, 1}, 1);
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(p.y == doctest::Approx(2.0));
  CHECK_FALSE(p.degenerate);

  // (0,3,4) lies on y = 4x - x^2, vertex (2, 4).
  p = refine_peak(xs, std::vector<double>{0, 3, 4}, 1);
  CHECK_FALSE(p.degenerate);
  CHECK(p.x == doctest::Approx(2.0));
  CHECK(p.y == doctest::Approx(4.0));

  // y = 5x - 2x^2, vertex (1.25, 3.125).
  p = refine_peak(xs, std::vector<double>{0, 3, 2}, 1);
  CHECK(p.x == doctest::Approx(1.25));
  CHECK(p.y == doctest::Approx(3.125));

  p = refine_peak(xs, std::vector<double>{1, 2, 3}, 1);
  CHECK(p.degenerate);
  CHECK(p.x == 1.0);
  CHECK(p.y == 2.0);

  // Non-uniform spacing: quadratic through exact samples recovers the vertex.
  const std::vector<double> xu{0.0, 0.7, 2.0};
  std::vector<double> yu;
  for (double x : xu) yu.push_back(5.0 - (x - 0.9) * (x - 0.9));
  p = refine_peak(xu, yu, 1);
  CHECK(p.x == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(5.0).epsilon(1e-12));

  CHECK_THROWS_AS(refine_peak(xs, std::vector<double>{1, 2, 1}, 0), InvalidInput);
  CHECK_THROWS_AS(refine_peak(xs, std::vector<double>{1, 2, 1}, 2), InvalidInput);
}

TEST_CASE("local_maxima and prominence") {
  const std::vector<double> ys{0, 3, 1, 5, 2, 4, 0};
  const auto m = local_maxima(ys, false);
  REQUIRE(m.size() == 3);
  CHECK(m[0].index == 1);
  CHECK(m[0].prominence == doctest::Approx(2.0));
  CHECK(m[1].index == 3);
  CHECK(m[1].prominence == doctest::Approx(5.0));
  CHECK(m[2].index == 5);
  CHECK(m[2].prominence == doctest::Approx(2.0));

  const std::vector<double> edge{5, 1, 2, 0};
  CHECK(local_maxima(edge, false).size() == 1);
  const auto with_edges = local_maxima(edge, true);
  REQUIRE(with_edges.size() == 2);
  CHECK(with_edges[0].index == 0);

  const std::vector<double> plateau{0, 2, 2, 0};
  const auto pm = local_maxima(plateau, false);
  REQUIRE(pm.size() == 1);
  CHECK(pm[0].index == 1);

  const std::vector<double> flat{1, 1, 1};
  CHECK(local_maxima(flat, false).empty());
}

TEST_CASE("polish_eigenpair against a long double dense oracle") {
  // Two wells with a small splitting: a pair gap around 1e-6 at ||T|| ~ 300.
  using LD = long double;
  const std::size_t n = 160;
  std::vector<LD> d(n + 1), e(n);
  TridiagonalMatrix m;
  for (std::size_t k = 0; k <= n; ++k) {
    const LD kk = k, rest = n - k;
    d[k] = -(3.0L / (2.0L * n)) * (kk * (kk - 1) + rest * (rest - 1)) - 1e-9L * (kk - rest);
    m.diag.push_back(static_cast<double>(d[k]));
  }
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = -std::sqrt(static_cast<LD>(k + 1) * static_cast<LD>(n - k));
    m.offdiag.push_back(static_cast<double>(e[k]));
  }

  Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic> a =
      Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>::Zero(n + 1, n + 1);
  for (std::size_t k = 0; k <= n; ++k) a(k, k) = d[k];
  for (std::size_t k = 0; k < n; ++k) a(k, k + 1) = a(k + 1, k) = e[k];
  Eigen::SelfAdjointEigenSolver<decltype(a)> es(a);
  const auto ref = es.eigenvectors().col(0);
  REQUIRE(es.eigenvalues()(1) - es.eigenvalues()(0) < 1e-4L);

  const auto eig = eigh_tridiagonal(m, 1);
  const auto p = polish_eigenpair(d, e, eig.pairs[0].vector);
  LD ov = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) ov += ref(k) * static_cast<LD>(p.vector[k]);
  CHECK(static_cast<double>(1.0L - std::abs(ov)) < 1e-14);
  CHECK(std::abs(p.value - static_cast<double>(es.eigenvalues()(0))) < 1e-11);
  CHECK(p.residual < 1e-12);

  CHECK_THROWS_AS(polish_eigenpair(d, e, std::vector<double>(3, 1.0)), InvalidInput);
}
