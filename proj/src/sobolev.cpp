#include "ukhlab/sobolev.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "ukhlab/error.hpp"

namespace ukh {

namespace {

using BigRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

std::int64_t narrow(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    fail(ErrorCode::Unsupported, "reflection coefficient does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

// Compensated running sum.
struct Neumaier {
  double sum = 0, comp = 0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

std::vector<double> ReflectionCoefficients::values() const {
  std::vector<double> out;
  out.reserve(coefficients.size());
  for (const auto& a : coefficients) out.push_back(a.to_double());
  return out;
}

ReflectionCoefficients reflection_coefficients(int k) {
  require(k >= 0, "reflection order must be nonnegative");
  if (k > defaults::kMaxReflectionOrder) {
    fail(ErrorCode::Unsupported, "reflection order " + std::to_string(k) + " exceeds " +
                                     std::to_string(defaults::kMaxReflectionOrder));
  }
  const int size = k + 1;
  // Row i: sum_j a_j (-j)^i = 1.
  std::vector<std::vector<BigRational>> a(size, std::vector<BigRational>(size + 1));
  for (int i = 0; i < size; ++i) {
    for (int j = 1; j <= size; ++j) {
      BigRational pw = 1;
      for (int e = 0; e < i; ++e) pw *= -j;
      a[i][j - 1] = pw;
    }
    a[i][size] = 1;
  }
  for (int col = 0; col < size; ++col) {
    int pivot = col;
    while (pivot < size && a[pivot][col] == 0) ++pivot;
    if (pivot == size) fail(ErrorCode::NumericalFailure, "singular moment system");
    std::swap(a[pivot], a[col]);
    for (int row = 0; row < size; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const BigRational factor = a[row][col] / a[col][col];
      for (int c = col; c <= size; ++c) a[row][c] -= factor * a[col][c];
    }
  }
  ReflectionCoefficients out;
  out.order = k;
  for (int j = 0; j < size; ++j) {
    const BigRational v = a[j][size] / a[j][j];
    out.coefficients.push_back(Rational::make(narrow(boost::multiprecision::numerator(v)),
                                              narrow(boost::multiprecision::denominator(v))));
  }
  return out;
}

ExtendedSamples extend_reflect(const std::vector<double>& samples, int k, std::int64_t depth) {
  require(!samples.empty(), "no samples");
  for (double v : samples) require(std::isfinite(v), "samples must be finite");
  const auto coeffs = reflection_coefficients(k).values();
  const auto last = static_cast<std::int64_t>(samples.size()) - 1;
  const std::int64_t reach = k + 1;
  const std::int64_t max_depth = last / reach;
  if (depth == 0) depth = max_depth;
  require(depth >= 0, "depth must be nonnegative");
  if (depth < 1 || depth > max_depth) {
    fail(ErrorCode::InvalidInput, "insufficient sample depth: extending " + std::to_string(std::max<std::int64_t>(depth, 1)) +
                                      " points needs " + std::to_string(reach * std::max<std::int64_t>(depth, 1) + 1) +
                                      " samples, got " + std::to_string(samples.size()));
  }
  ExtendedSamples out;
  out.first_index = -depth;
  out.values.resize(static_cast<std::size_t>(depth) + samples.size());
  for (std::int64_t q = 1; q <= depth; ++q) {
    double s = 0;
    for (std::int64_t j = 1; j <= reach; ++j) s += coeffs[j - 1] * samples[j * q];
    out.values[depth - q] = s;
  }
  for (std::size_t j = 0; j < samples.size(); ++j) out.values[depth + j] = samples[j];
  return out;
}

bool convergence_classify(int n, double t, double p) {
  require(n >= 1 && t > 0 && p >= 1, "need n >= 1, t > 0, p >= 1");
  return p * t > n;
}

TorusSchattenResult torus_schatten_norm(const TorusEmbeddingSpec& spec, double max_points) {
  require(spec.n >= 1, "dimension must be at least 1");
  require(spec.r > 0 && std::isfinite(spec.r), "side length must be positive");
  require(spec.m >= 1, "bundle rank must be at least 1");
  require(spec.t > 0 && std::isfinite(spec.t), "degree gain must be positive");
  require(spec.p >= 1 && std::isfinite(spec.p), "Schatten exponent must be at least 1");
  require(spec.cutoff >= 1, "cutoff must be at least 1");
  TorusSchattenResult out;
  out.cutoff = spec.cutoff;
  if (!convergence_classify(spec.n, spec.t, spec.p)) {
    out.divergent = true;
    out.reason = "sum of <k>^{-pt} over Z^n converges iff p > n/t; here p t = " +
                 std::to_string(spec.p * spec.t) + " <= n = " + std::to_string(spec.n);
    return out;
  }
  const int n = spec.n;
  const double points = std::pow(2.0 * static_cast<double>(spec.cutoff) + 1, n);
  if (points > max_points) {
    fail(ErrorCode::Unsupported, "lattice of " + std::to_string(points) + " points exceeds the limit " +
                                     std::to_string(max_points));
  }
  const double w = 2 * std::numbers::pi / spec.r;
  const double w2 = w * w;
  const double expo = -spec.p * spec.t / 2;
  const double m = static_cast<double>(spec.m);
  auto term = [&](double norm2) { return std::pow(1 + w2 * norm2, expo); };

  // Nonnegative orthant; a point with z nonzero coordinates stands for 2^z
  // lattice points. Shell s: the first coordinate equal to s sits at position
  // i, earlier coordinates lie in [0, s-1], later ones in [0, s].
  Neumaier total;
  total.add(term(0));
  std::vector<std::int64_t> k(n);
  for (std::int64_t s = 1; s <= spec.cutoff; ++s) {
    Neumaier shell;
    for (int i = 0; i < n; ++i) {
      std::fill(k.begin(), k.end(), 0);
      k[i] = s;
      while (true) {
        double norm2 = 0;
        int nonzero = 0;
        for (int c = 0; c < n; ++c) {
          norm2 += static_cast<double>(k[c]) * static_cast<double>(k[c]);
          nonzero += k[c] != 0;
        }
        shell.add(std::ldexp(term(norm2), nonzero));
        int c = n - 1;
        for (; c >= 0; --c) {
          if (c == i) continue;
          const std::int64_t hi = c < i ? s - 1 : s;
          if (k[c] < hi) {
            ++k[c];
            break;
          }
          k[c] = 0;
        }
        if (c < 0) break;
      }
    }
    total.add(shell.value());
  }
  out.partial_sum = m * total.value();
  // Shell s holds at most 2n (2s+1)^{n-1} <= 2n 3^{n-1} s^{n-1} points, each
  // term at most (2 pi s / r)^{-pt}; compare the sum over s > K with the
  // integral from K.
  const double pt = spec.p * spec.t;
  const double c = 2.0 * n * std::pow(3.0, n - 1) * std::pow(w, -pt);
  out.tail_sum = m * c * std::pow(static_cast<double>(spec.cutoff), n - pt) / (pt - n);
  out.value = std::pow(out.partial_sum, 1 / spec.p);
  out.tail_bound = std::pow(out.partial_sum + out.tail_sum, 1 / spec.p) - out.value;
  return out;
}

double schatten_norm_matrix(const Matrix& k, double s) {
  require(s >= 1 && std::isfinite(s), "Schatten exponent must be at least 1");
  require(k.size() > 0, "matrix is empty");
  require(k.allFinite(), "matrix has non-finite entries");
  const Eigen::JacobiSVD<Matrix> svd(k);
  const Vector sigma = svd.singularValues();
  const double top = sigma.maxCoeff();
  if (top == 0) return 0;
  Neumaier acc;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) acc.add(std::pow(sigma(i) / top, s));
  return top * std::pow(acc.value(), 1 / s);
}

}  // namespace ukh
