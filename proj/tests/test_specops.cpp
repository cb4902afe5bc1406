#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "ukhlab/error.hpp"
#include "ukhlab/specops.hpp"

using namespace ukh;
using Catch::Approx;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1) {
  std::normal_distribution<double> g(0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  Matrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transpose());
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Symmetric tridiagonal fixture: alternating +-1.25 on the diagonal, 0.3 off
// it. Gershgorin keeps the spectrum outside (-0.65, 0.65) and inside [-2, 2].
BandedMatrix gapped_tridiagonal(Eigen::Index n) {
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = i % 2 == 0 ? 1.25 : -1.25;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = 0.3;
  }
  return BandedMatrix(a, 1);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("eigensolve on small matrices") {
  auto s = eigensolve(SymMatrix::diagonal({3, 1, -2}));
  CHECK(s.values[0] == Approx(-2));
  CHECK(s.values[1] == Approx(1));
  CHECK(s.values[2] == Approx(3));
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto t = eigensolve(SymMatrix(swap));
  CHECK(t.values[0] == Approx(-1));
  CHECK(t.values[1] == Approx(1));

  std::mt19937_64 rng(1);
  auto a = random_symmetric(rng, 8);
  auto r = eigensolve(SymMatrix(a));
  CHECK(max_abs(a * r.vectors - r.vectors * r.values.asDiagonal()) <= 1e-8 * r.norm);
  CHECK(r.orthogonality <= 1e-8);
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK(code_of([&] { SymMatrix bad(skew); }) == ErrorCode::InvalidInput);
}

TEST_CASE("functional calculus") {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto s = eigensolve(SymMatrix(swap));
  CHECK(max_abs(apply_function(s, [](double x) { return x; }).matrix() - swap) <= 1e-10);
  CHECK(max_abs(apply_function(s, [](double x) { return x * x; }).matrix() - Matrix::Identity(2, 2)) <=
        1e-10);
  auto d = eigensolve(SymMatrix::diagonal({0, std::log(2.0)}));
  Matrix expected = Vector::LinSpaced(2, 1, 2).asDiagonal();
  CHECK(max_abs(apply_function(d, [](double x) { return std::exp(x); }).matrix() - expected) <= 1e-12);
  CHECK(code_of([&] { apply_function(s, [](double x) { return std::log(x); }); }) ==
        ErrorCode::InvalidInput);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = eigensolve(SymMatrix(random_symmetric(rng, 8)));
    auto f = [](double x) { return std::sin(x) + 0.5 * x; };
    auto g = [](double x) { return std::exp(-x * x); };
    auto fg = apply_function(a, [&](double x) { return f(x) * g(x); }).matrix();
    Matrix prod = apply_function(a, f).matrix() * apply_function(a, g).matrix();
    CHECK(max_abs(fg - prod) <= 1e-8);
    auto lin = apply_function(a, [&](double x) { return 2 * f(x) - 3 * g(x); }).matrix();
    CHECK(max_abs(lin - (2 * apply_function(a, f).matrix() - 3 * apply_function(a, g).matrix())) <= 1e-8);
  }
}

TEST_CASE("bounded transform") {
  CHECK(max_abs(bounded_transform(Matrix::Zero(3, 3))) == 0);
  auto d = bounded_transform(SymMatrix::diagonal({-3, 0.5, 2}).matrix());
  for (int i = 0; i < 3; ++i) {
    const double l = std::vector<double>{-3, 0.5, 2}[i];
    CHECK(d(i, i) == Approx(l / std::sqrt(1 + l * l)).epsilon(1e-14));
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = 6, cols = trial % 2 ? 6 : 4;
    Matrix t = random_matrix(rng, rows, cols, 1 + trial % 7);
    Matrix z = bounded_transform(t);
    // Singular values of Z are s / sqrt(1 + s^2) for singular values s of T.
    Eigen::JacobiSVD<Matrix> st(t), sz(z);
    for (Eigen::Index i = 0; i < st.singularValues().size(); ++i) {
      const double s = st.singularValues()[i];
      CHECK(sz.singularValues()[i] == Approx(s / std::sqrt(1 + s * s)).margin(1e-10));
    }
    CHECK(operator_norm(z) <= 1 + 1e-10);
    Matrix zt = bounded_transform(t.transpose());
    CHECK(max_abs(z - zt.transpose()) <= 1e-8);
  }
  Matrix sym = random_symmetric(rng, 5);
  Matrix zs = bounded_transform(sym);
  CHECK(max_abs(zs - zs.transpose()) == 0);
}

TEST_CASE("Cayley transform") {
  auto u0 = cayley(SymMatrix(Matrix::Zero(3, 3)));
  CHECK((u0 + CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
  auto u1 = cayley(SymMatrix::diagonal({1}));
  CHECK(std::abs(u1(0, 0) - std::complex<double>(0, -1)) <= 1e-15);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    auto u = cayley(SymMatrix(random_symmetric(rng, 5)));
    CHECK((u.adjoint() * u - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("eta invariant") {
  CHECK(eta(eigensolve(SymMatrix::diagonal({1, -1})), 0) == 0);
  CHECK(eta(eigensolve(SymMatrix::diagonal({2, -1})), 1) == Approx(-0.5));
  CHECK(eta(eigensolve(SymMatrix::diagonal({3, 1, -2})), 0) == 1);
  CHECK(eta(eigensolve(SymMatrix::diagonal({3, 0, -2})), 0) == 0);
  CHECK(eta(eigensolve(SymMatrix::diagonal({1e-12, 1})), 0, 1e-9) == 1);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_symmetric(rng, 4), b = random_symmetric(rng, 3);
    Matrix ab = Matrix::Zero(7, 7);
    ab.topLeftCorner(4, 4) = a;
    ab.bottomRightCorner(3, 3) = b;
    auto ea = eigensolve(SymMatrix(a)), eb = eigensolve(SymMatrix(b)), eab = eigensolve(SymMatrix(ab));
    const double z = 1e-9 * eab.norm;
    CHECK(eta(eab, 0, z) == eta(ea, 0, z) + eta(eb, 0, z));
    CHECK(eta(eab, 1.5, z) == Approx(eta(ea, 1.5, z) + eta(eb, 1.5, z)).epsilon(1e-12));
  }
  // Dyadic diagonal blocks: every partial sum is exact.
  auto da = eigensolve(SymMatrix::diagonal({2, -4})), db = eigensolve(SymMatrix::diagonal({0.5, -8, 1}));
  auto dab = eigensolve(SymMatrix::diagonal({2, -4, 0.5, -8, 1}));
  CHECK(eta(dab, 1) == eta(da, 1) + eta(db, 1));
}

TEST_CASE("spectral gap detection") {
  CHECK(spectral_gap(eigensolve(SymMatrix::diagonal({2, -2})), 1));
  CHECK_FALSE(spectral_gap(eigensolve(SymMatrix::diagonal({0.5})), 1));
  std::mt19937_64 rng(6);
  Matrix a = random_symmetric(rng, 6);
  a *= 2.0 / operator_norm(a);
  a += 3 * Matrix::Identity(6, 6);
  CHECK(spectral_gap(eigensolve(SymMatrix(a)), 1));
}

TEST_CASE("normalizing functions") {
  auto s = NormalizingFunction::smooth_sign(0.5);
  auto c = NormalizingFunction::chebyshev_sign(24, 0.5);
  auto a = NormalizingFunction::scaled_arctan();
  for (const auto* f : {&s, &c, &a}) {
    for (double x = -3; x <= 3; x += 0.01) {
      CHECK((*f)(-x) == -(*f)(x));
      CHECK(std::abs((*f)(x)) <= 1);
    }
    CHECK((*f)(1e9) == Approx(1).margin(1e-8));
  }
  for (const auto* f : {&s, &c}) {
    for (double x = 0.5; x <= 4; x += 0.01) CHECK(std::abs(1 - (*f)(x) * (*f)(x)) <= 1e-10);
    CHECK(f->admissible_for_gap(0.5));
    CHECK(f->admissible_for_gap(0.7));
    CHECK_FALSE(f->admissible_for_gap(0.4));
  }
  CHECK_FALSE(a.admissible_for_gap(10));
  // Continuous across the gap edge.
  CHECK(c(0.5 - 1e-9) == Approx(1).margin(1e-6));
  CHECK(s(0.5 - 1e-9) == Approx(1).margin(1e-6));
}

TEST_CASE("Chebyshev banded representatives") {
  auto b = gapped_tridiagonal(12);
  auto id = chebyshev_banded(b, [](double x) { return x; }, 1, -2, 2);
  CHECK(max_abs(id.matrix.matrix() - b.matrix()) <= 1e-14);
  CHECK(id.sup_error_bound <= 1e-14);

  for (int k : {0, 1, 2, 3, 5, 8}) {
    auto r = chebyshev_banded(b, [](double x) { return std::cos(x); }, k, -2, 2);
    CHECK(observed_band(r.matrix.matrix()) <= k * b.band());
    CHECK(r.matrix.band() <= k * b.band());
  }
  Matrix penta = Matrix::Zero(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = std::max(0, i - 2); j <= std::min(19, i + 2); ++j) penta(i, j) = 0.1 * (1 + (i + j) % 3);
  penta = 0.5 * (penta + penta.transpose()).eval();
  auto pr = chebyshev_banded(BandedMatrix(penta, 2), [](double x) { return std::exp(x); }, 4, -2, 2);
  CHECK(observed_band(pr.matrix.matrix()) == 8);

  auto sign = NormalizingFunction::smooth_sign(0.5);
  auto r = chebyshev_banded(b, [&](double x) { return sign(x); }, 40, -2, 2);
  auto spec = eigensolve(SymMatrix(b.matrix()));
  REQUIRE(spectral_gap(spec, 0.5));
  Matrix exact = apply_function(spec, [](double x) { return x > 0 ? 1.0 : -1.0; }).matrix();
  CHECK(operator_norm(Matrix(r.matrix.matrix() - exact)) <= r.sup_error_bound);
  CHECK(r.sup_error_bound < 0.5);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = Matrix::Zero(10, 10);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 10; ++i)
      for (int j = i; j <= std::min(9, i + 1); ++j) m(i, j) = m(j, i) = u(rng);
    auto f = [](double x) { return std::tanh(3 * x); };
    auto rr = chebyshev_banded(BandedMatrix(m, 1), f, 12, -1.5, 1.5);
    auto sp = eigensolve(SymMatrix(m));
    CHECK(operator_norm(Matrix(rr.matrix.matrix() - apply_function(sp, f).matrix())) <= rr.sup_error_bound);
  }
  CHECK(code_of([&] { chebyshev_banded(b, [](double x) { return x; }, -1, -2, 2); }) ==
        ErrorCode::InvalidInput);
}
