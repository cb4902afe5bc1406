#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ukhlab/defaults.hpp"

namespace ukh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

// Real symmetric matrix; construction checks |A - A^T|_max <= tol * |A|_max.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix a, double tol = defaults::kSymmetryTol);
  static SymMatrix diagonal(const std::vector<double>& d);

  const Matrix& matrix() const { return a_; }
  Eigen::Index order() const { return a_.rows(); }

 private:
  Matrix a_;
};

// Square matrix whose entries vanish for |i - j| > band.
class BandedMatrix {
 public:
  BandedMatrix(Matrix a, std::int64_t band);

  const Matrix& matrix() const { return a_; }
  std::int64_t band() const { return band_; }
  Eigen::Index order() const { return a_.rows(); }

 private:
  Matrix a_;
  std::int64_t band_;
};

// Smallest b with entries vanishing outside |i - j| <= b.
std::int64_t observed_band(const Matrix& a, double tol = 0.0);

struct Spectrum {
  Vector values;      // ascending
  Matrix vectors;     // orthonormal columns
  double residual = 0;       // |AV - V Lambda|_max
  double orthogonality = 0;  // |V^T V - I|_max
  double norm = 0;           // max |lambda|
};

Spectrum eigensolve(const SymMatrix& a, double tol = defaults::kEigenResidualTol);

// V f(Lambda) V^T.
SymMatrix apply_function(const Spectrum& spectrum, const std::function<double(double)>& f);

// T (T^T T + I)^{-1/2}; symmetric input gives a symmetric result.
Matrix bounded_transform(const Matrix& t);

double operator_norm(const Matrix& a);
double operator_norm(const CMatrix& a);

// (D - iI)(D + iI)^{-1}; unitarity residual checked.
CMatrix cayley(const SymMatrix& d);
CMatrix cayley_hermitian(const CMatrix& d);

// Sum of sign(lambda) |lambda|^{-s} over |lambda| > zero_tol; the default
// threshold is kRelativeZeroTol * |A|.
double eta(const Spectrum& spectrum, double s, std::optional<double> zero_tol = std::nullopt);

// True iff no eigenvalue lies in (-c, c).
bool spectral_gap(const Spectrum& spectrum, double c);

class NormalizingFunction {
 public:
  enum class Kind { SmoothSign, ScaledArctan, ChebyshevSign };

  // Odd smooth step, exactly +-1 outside (-c, c).
  static NormalizingFunction smooth_sign(double c);
  // (2 / pi) arctan(x); never equal to +-1, so never gap-admissible.
  static NormalizingFunction scaled_arctan();
  // Degree-k Chebyshev-Lobatto interpolant of the smooth step on [-c, c],
  // made odd and clipped to [-1, 1]; +-1 outside.
  static NormalizingFunction chebyshev_sign(int degree, double c);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double gap() const { return gap_; }
  int degree() const { return degree_; }
  std::string name() const;
  // 1 - chi^2 vanishes outside (-c, c).
  bool admissible_for_gap(double c) const;

 private:
  NormalizingFunction(Kind kind, double gap, int degree);
  Kind kind_;
  double gap_ = 0;
  int degree_ = 0;
  std::vector<double> nodes_, values_, weights_;   // barycentric data
};

// Chebyshev coefficients of f on [a, b] from the k+1 Chebyshev-Gauss nodes.
std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, int degree,
                                           double a, double b);
double chebyshev_eval(const std::vector<double>& coefficients, double x, double a, double b);

struct ChebyshevResult {
  BandedMatrix matrix;
  std::vector<double> coefficients;
  // Largest |f - p| over the sample grid plus the largest jump of f - p
  // between neighbouring samples.
  double sup_error_bound = 0;
};

ChebyshevResult chebyshev_banded(const BandedMatrix& b, const std::function<double(double)>& f,
                                 int degree, double lo, double hi,
                                 int samples = defaults::kChebyshevErrorSamples);

}  // namespace ukh
