#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>

#include "ukhlab/error.hpp"
#include "ukhlab/sobolev.hpp"

using namespace ukh;
using i128 = __int128;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

// Lagrange form: a_j = prod_{m != j} (1 + m) / (m - j), nodes m = 1..k+1.
std::pair<i128, i128> lagrange_coefficient(int k, int j) {
  i128 num = 1, den = 1;
  for (int m = 1; m <= k + 1; ++m) {
    if (m == j) continue;
    num *= 1 + m;
    den *= m - j;
    const auto g = std::gcd(static_cast<long long>(num < 0 ? -num : num), static_cast<long long>(den < 0 ? -den : den));
    num /= g;
    den /= g;
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return {num, den};
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

// Schatten norm from the eigenvalues of K^T K.
double schatten_oracle(const Matrix& k, double s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.transpose() * k);
  double acc = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) acc += std::pow(std::max(0.0, es.eigenvalues()(i)), s / 2);
  return std::pow(acc, 1 / s);
}

}  // namespace

TEST_CASE("reflection coefficients for small orders", "[sobolev]") {
  CHECK(reflection_coefficients(0).coefficients == std::vector<Rational>{Rational::make(1, 1)});
  CHECK(reflection_coefficients(1).coefficients == std::vector<Rational>{Rational::make(3, 1), Rational::make(-2, 1)});
  CHECK(reflection_coefficients(2).coefficients ==
        std::vector<Rational>{Rational::make(6, 1), Rational::make(-8, 1), Rational::make(3, 1)});
  CHECK(code_of([] { reflection_coefficients(13); }) == ErrorCode::Unsupported);
  CHECK(code_of([] { reflection_coefficients(-1); }) == ErrorCode::InvalidInput);
}

TEST_CASE("reflection coefficients satisfy the moment equations exactly", "[sobolev]") {
  for (int k = 0; k <= 12; ++k) {
    const auto rc = reflection_coefficients(k);
    REQUIRE(rc.coefficients.size() == static_cast<std::size_t>(k + 1));
    for (int j = 1; j <= k + 1; ++j) {
      const auto [num, den] = lagrange_coefficient(k, j);
      CHECK(static_cast<i128>(rc.coefficients[j - 1].num) == num);
      CHECK(static_cast<i128>(rc.coefficients[j - 1].den) == den);
    }
    for (int i = 0; i <= k; ++i) {
      // All coefficients are integers, so the moment sums are exact in i128.
      i128 sum = 0;
      for (int j = 1; j <= k + 1; ++j) {
        REQUIRE(rc.coefficients[j - 1].den == 1);
        i128 pw = 1;
        for (int e = 0; e < i; ++e) pw *= -j;
        sum += pw * rc.coefficients[j - 1].num;
      }
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("reflection reproduces polynomials of degree at most k", "[sobolev]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k <= 12; ++k) {
    std::vector<double> coeff(k + 1);
    for (auto& c : coeff) c = u(rng);
    auto poly = [&](double x) {
      double v = 0;
      for (int i = k; i >= 0; --i) v = v * x + coeff[i];
      return v;
    };
    const double h = 1.0 / 64;
    const std::int64_t depth = 8;
    std::vector<double> samples((k + 1) * depth + 1);
    for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = poly(static_cast<double>(j) * h);
    const auto ext = extend_reflect(samples, k, depth);
    REQUIRE(ext.first_index == -depth);
    REQUIRE(ext.values.size() == samples.size() + depth);
    for (std::int64_t q = 1; q <= depth; ++q) {
      CHECK(std::abs(ext.values[depth - q] - poly(-static_cast<double>(q) * h)) <= 1e-10);
    }
    for (std::size_t j = 0; j < samples.size(); ++j) CHECK(ext.values[depth + j] == samples[j]);
  }
}

TEST_CASE("reflection examples and depth errors", "[sobolev]") {
  const double h = 0.01;
  std::vector<double> ones(20, 1.0), lin(20), sq(20);
  for (int j = 0; j < 20; ++j) {
    lin[j] = j * h;
    sq[j] = j * h * j * h;
  }
  for (int k = 0; k <= 5; ++k) {
    for (double v : extend_reflect(ones, k).values) CHECK(v == Catch::Approx(1).margin(1e-12));
  }
  CHECK(extend_reflect(lin, 1, 1).values[0] == Catch::Approx(-h).margin(1e-15));
  CHECK(extend_reflect(sq, 2, 1).values[0] == Catch::Approx(h * h).margin(1e-15));
  CHECK(code_of([&] { extend_reflect(lin, 2, 7); }) == ErrorCode::InvalidInput);
  CHECK(code_of([&] { extend_reflect({1.0, 2.0}, 3); }) == ErrorCode::InvalidInput);
}

TEST_CASE("reflection of smooth functions is C^k at the boundary", "[sobolev]") {
  auto u = [](double x) { return std::exp(x) * std::sin(3 * x) + std::cos(x); };
  for (int k = 1; k <= 4; ++k) {
    auto err_at = [&](double h) {
      std::vector<double> samples((k + 1) + 1);
      for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = u(static_cast<double>(j) * h);
      return std::abs(extend_reflect(samples, k, 1).values[0] - u(-h));
    };
    const double ratio = err_at(1e-2) / err_at(5e-3);
    INFO("k " << k << " ratio " << ratio);
    CHECK(ratio >= 0.8 * std::pow(2.0, k + 1));
  }
}

TEST_CASE("torus Schatten norm against the closed form", "[sobolev]") {
  const auto start = std::chrono::steady_clock::now();
  TorusEmbeddingSpec s{1, 2 * std::numbers::pi, 1, 1, 2, 1000000};
  const auto r = torus_schatten_norm(s);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double exact = std::sqrt(std::numbers::pi / std::tanh(std::numbers::pi));
  REQUIRE_FALSE(r.divergent);
  CHECK(r.value <= exact);
  CHECK(exact <= r.value + r.tail_bound);
  CHECK(r.tail_bound <= 1e-6);
  CHECK(std::abs(r.value - 1.775767) <= 1e-5);
  CHECK(seconds < 10);
}

TEST_CASE("torus partial sums and upper bounds are monotone", "[sobolev]") {
  const std::vector<TorusEmbeddingSpec> fixtures{
      {1, 2 * std::numbers::pi, 1, 1, 2, 1}, {1, 3.0, 2, 0.75, 3, 1}, {2, 2 * std::numbers::pi, 1, 1.5, 2, 1},
      {2, 1.0, 3, 2, 1.5, 1},                {3, 5.0, 1, 2, 2, 1}};
  for (auto spec : fixtures) {
    double prev_sum = -1, prev_upper = INFINITY;
    for (std::int64_t k : {1, 2, 4, 8, 16, 32, 64}) {
      spec.cutoff = k;
      const auto r = torus_schatten_norm(spec);
      REQUIRE_FALSE(r.divergent);
      CHECK(r.partial_sum > prev_sum);
      const double upper = r.partial_sum + r.tail_sum;
      CHECK(upper <= prev_upper * (1 + 1e-14));
      prev_sum = r.partial_sum;
      prev_upper = upper;
    }
  }
}

TEST_CASE("torus shell enumeration matches brute force", "[sobolev]") {
  for (int n = 1; n <= 3; ++n) {
    TorusEmbeddingSpec spec{n, 4.0, 2, 1.5, 3, 6};
    double brute = 0;
    const int k = 6;
    std::vector<int> idx(n, -k);
    while (true) {
      double n2 = 0;
      for (int v : idx) n2 += v * v;
      brute += 2 * std::pow(1 + std::pow(2 * std::numbers::pi / 4.0, 2) * n2, -4.5 / 2);
      int c = 0;
      for (; c < n; ++c) {
        if (idx[c] < k) {
          ++idx[c];
          break;
        }
        idx[c] = -k;
      }
      if (c == n) break;
    }
    CHECK(torus_schatten_norm(spec).partial_sum == Catch::Approx(brute).epsilon(1e-13));
  }
}

TEST_CASE("torus convergence criterion", "[sobolev]") {
  CHECK(convergence_classify(1, 1, 2));
  CHECK_FALSE(convergence_classify(2, 1, 2));
  CHECK(convergence_classify(3, 0.5, 7));
  const auto d = torus_schatten_norm({2, 1.0, 1, 1, 2, 10});
  CHECK(d.divergent);
  CHECK_FALSE(d.reason.empty());
  const auto big = torus_schatten_norm({1, 2 * std::numbers::pi, 1, 50, 1, 100});
  CHECK(big.value == Catch::Approx(1).margin(1e-12));
  CHECK(code_of([] { torus_schatten_norm({3, 1.0, 1, 2, 2, 1000000}); }) == ErrorCode::Unsupported);
  CHECK(code_of([] { torus_schatten_norm({1, -1.0, 1, 2, 2, 10}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("matrix Schatten norms", "[sobolev]") {
  CHECK(schatten_norm_matrix(Matrix::Identity(3, 3), 1) == Catch::Approx(3));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 4;
  CHECK(schatten_norm_matrix(d, 2) == Catch::Approx(5));
  CHECK(code_of([&] { schatten_norm_matrix(d, 0.5); }) == ErrorCode::InvalidInput);

  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix k = random_matrix(rng, 6, 6);
    for (double s : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      CHECK(schatten_norm_matrix(k, s) == Catch::Approx(schatten_oracle(k, s)).epsilon(1e-9));
    }
    CHECK(schatten_norm_matrix(k, 4) <= schatten_norm_matrix(k, 2) * (1 + 1e-12));
    CHECK(schatten_norm_matrix(k, 2) <= schatten_norm_matrix(k, 1) * (1 + 1e-12));
    const Matrix u = random_orthogonal(rng, 6), v = random_orthogonal(rng, 6);
    CHECK(std::abs(schatten_norm_matrix(u * k * v, 3) - schatten_norm_matrix(k, 3)) <= 1e-8);
    // Row permutation and sign flips leave the singular values unchanged.
    Matrix p = k;
    p.row(0).swap(p.row(4));
    p.row(2) *= -1;
    CHECK(schatten_norm_matrix(p, 2.5) == Catch::Approx(schatten_norm_matrix(k, 2.5)).epsilon(1e-12));
  }
}
