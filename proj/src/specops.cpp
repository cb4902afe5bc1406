#include "ukhlab/specops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ukhlab/error.hpp"

namespace ukh {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Smooth step on [0, 1] built from exp(-1/u); 0 at 0, 1 at 1, odd about 1/2.
double smooth_step(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double smooth_sign_value(double x, double c) {
  if (x >= c) return 1;
  if (x <= -c) return -1;
  // Evaluate on |x| so the result is odd bit for bit.
  const double v = 2 * smooth_step((std::abs(x) + c) / (2 * c)) - 1;
  return x < 0 ? -v : v;
}

void unitarity_check(const CMatrix& u) {
  const auto n = u.rows();
  const double r = (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (r > 1e-8) fail(ErrorCode::NumericalFailure, "Cayley transform unitarity residual " + sci(r));
}

}  // namespace

SymMatrix::SymMatrix(Matrix a, double tol) : a_(std::move(a)) {
  require(a_.rows() >= 1 && a_.rows() == a_.cols(), "symmetric matrix must be square and nonempty");
  require(a_.allFinite(), "matrix has non-finite entries");
  const double scale = a_.cwiseAbs().maxCoeff();
  const double asym = (a_ - a_.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    fail(ErrorCode::InvalidInput, "matrix is not symmetric: |A - A^T|_max = " + sci(asym));
  }
  a_ = 0.5 * (a_ + a_.transpose());
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  Vector v = Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
  return SymMatrix(v.asDiagonal().toDenseMatrix());
}

std::int64_t observed_band(const Matrix& a, double tol) {
  std::int64_t band = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (std::abs(a(i, j)) > tol) band = std::max<std::int64_t>(band, std::abs(i - j));
    }
  }
  return band;
}

BandedMatrix::BandedMatrix(Matrix a, std::int64_t band) : a_(std::move(a)), band_(band) {
  require(a_.rows() >= 1 && a_.rows() == a_.cols(), "banded matrix must be square and nonempty");
  require(band_ >= 0, "band must be nonnegative");
  const auto actual = observed_band(a_);
  if (actual > band_) {
    fail(ErrorCode::InvalidInput, "matrix has entries at distance " + std::to_string(actual) +
                                      " from the diagonal, beyond the declared band " +
                                      std::to_string(band_));
  }
}

Spectrum eigensolve(const SymMatrix& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigensolver did not converge");
  Spectrum s;
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  s.norm = s.values.cwiseAbs().maxCoeff();
  const auto n = a.order();
  s.residual = (a.matrix() * s.vectors - s.vectors * s.values.asDiagonal()).cwiseAbs().maxCoeff();
  s.orthogonality = (s.vectors.transpose() * s.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (s.residual > tol * std::max(s.norm, 1e-300) && s.residual > 0) {
    fail(ErrorCode::NumericalFailure, "eigen residual " + sci(s.residual) + " exceeds " +
                                          sci(tol) + " * |A|");
  }
  if (s.orthogonality > tol) {
    fail(ErrorCode::NumericalFailure, "eigenvector orthogonality defect " + sci(s.orthogonality));
  }
  return s;
}

SymMatrix apply_function(const Spectrum& spectrum, const std::function<double(double)>& f) {
  Vector fv(spectrum.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv[i] = f(spectrum.values[i]);
    if (!std::isfinite(fv[i])) {
      fail(ErrorCode::InvalidInput, "function is undefined at eigenvalue " + sci(spectrum.values[i]));
    }
  }
  Matrix out = spectrum.vectors * fv.asDiagonal() * spectrum.vectors.transpose();
  return SymMatrix(0.5 * (out + out.transpose()), 1.0);
}

Matrix bounded_transform(const Matrix& t) {
  require(t.rows() >= 1 && t.cols() >= 1, "matrix is empty");
  require(t.allFinite(), "matrix has non-finite entries");
  const double scale = t.cwiseAbs().maxCoeff();
  if (t.rows() == t.cols() &&
      (t - t.transpose()).cwiseAbs().maxCoeff() <= defaults::kSymmetryTol * scale) {
    auto s = eigensolve(SymMatrix(t));
    return apply_function(s, [](double x) { return x / std::hypot(1.0, x); }).matrix();
  }
  // T (1 + T^T T)^{-1/2} = U diag(s / sqrt(1 + s^2)) V^T; the Gram matrix
  // loses the small singular values once |T| is large.
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sv = svd.singularValues();
  Vector f(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) f(i) = sv(i) / std::hypot(1.0, sv(i));
  return svd.matrixU() * f.asDiagonal() * svd.matrixV().transpose();
}

double operator_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double operator_norm(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

CMatrix cayley(const SymMatrix& d) { return cayley_hermitian(d.matrix().cast<std::complex<double>>()); }

CMatrix cayley_hermitian(const CMatrix& d) {
  require(d.rows() >= 1 && d.rows() == d.cols(), "matrix must be square and nonempty");
  const double scale = d.cwiseAbs().maxCoeff();
  const double asym = (d - d.adjoint()).cwiseAbs().maxCoeff();
  if (asym > defaults::kSymmetryTol * scale)
    fail(ErrorCode::InvalidInput, "matrix is not Hermitian: |D - D*|_max = " + sci(asym));
  const auto n = d.rows();
  const std::complex<double> i(0, 1);
  const CMatrix id = CMatrix::Identity(n, n);
  // (D - i) and (D + i)^{-1} commute.
  CMatrix u = (d + i * id).partialPivLu().solve(d - i * id);
  unitarity_check(u);
  return u;
}

double eta(const Spectrum& spectrum, double s, std::optional<double> zero_tol) {
  const double tol = zero_tol ? *zero_tol : defaults::kRelativeZeroTol * spectrum.norm;
  require(tol >= 0, "zero tolerance must be nonnegative");
  double sum = 0, comp = 0;
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    const double l = spectrum.values[i];
    if (std::abs(l) <= tol) continue;
    const double term = (l > 0 ? 1.0 : -1.0) * std::pow(std::abs(l), -s);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

bool spectral_gap(const Spectrum& spectrum, double c) {
  require(c > 0, "gap must be positive");
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    if (std::abs(spectrum.values[i]) < c) return false;
  }
  return true;
}

NormalizingFunction::NormalizingFunction(Kind kind, double gap, int degree)
    : kind_(kind), gap_(gap), degree_(degree) {}

NormalizingFunction NormalizingFunction::smooth_sign(double c) {
  require(c > 0, "normalizing gap must be positive");
  return {Kind::SmoothSign, c, 0};
}

NormalizingFunction NormalizingFunction::scaled_arctan() { return {Kind::ScaledArctan, 0, 0}; }

NormalizingFunction NormalizingFunction::chebyshev_sign(int degree, double c) {
  require(c > 0, "normalizing gap must be positive");
  require(degree >= 1, "Chebyshev degree must be at least 1");
  NormalizingFunction f(Kind::ChebyshevSign, c, degree);
  for (int j = 0; j <= degree; ++j) {
    const double x = c * std::cos(std::numbers::pi * j / degree);
    f.nodes_.push_back(x);
    f.values_.push_back(smooth_sign_value(x, c));
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == degree) w *= 0.5;
    f.weights_.push_back(w);
  }
  return f;
}

double NormalizingFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::SmoothSign: return smooth_sign_value(x, gap_);
    case Kind::ScaledArctan: return 2.0 / std::numbers::pi * std::atan(x);
    case Kind::ChebyshevSign: {
      if (x >= gap_) return 1;
      if (x <= -gap_) return -1;
      auto interp = [this](double y) {
        double num = 0, den = 0;
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
          if (y == nodes_[j]) return values_[j];
          const double q = weights_[j] / (y - nodes_[j]);
          num += q * values_[j];
          den += q;
        }
        return num / den;
      };
      const double v = 0.5 * (interp(x) - interp(-x));
      return std::clamp(v, -1.0, 1.0);
    }
  }
  return 0;
}

std::string NormalizingFunction::name() const {
  switch (kind_) {
    case Kind::SmoothSign: return "smooth-sign";
    case Kind::ScaledArctan: return "scaled-arctan";
    case Kind::ChebyshevSign: return "chebyshev-sign";
  }
  return "unknown";
}

bool NormalizingFunction::admissible_for_gap(double c) const {
  if (kind_ == Kind::ScaledArctan) return false;
  return gap_ <= c;
}

std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, int degree,
                                           double a, double b) {
  require(degree >= 0, "Chebyshev degree must be nonnegative");
  require(b > a, "Chebyshev interval must have b > a");
  const int n = degree + 1;
  std::vector<double> fx(n), coeff(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double theta = std::numbers::pi * (j + 0.5) / n;
    fx[j] = f(0.5 * (b - a) * std::cos(theta) + 0.5 * (b + a));
    if (!std::isfinite(fx[j])) fail(ErrorCode::InvalidInput, "function is not finite on the interval");
  }
  for (int m = 0; m < n; ++m) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += fx[j] * std::cos(m * std::numbers::pi * (j + 0.5) / n);
    coeff[m] = 2.0 * s / n;
  }
  coeff[0] *= 0.5;
  return coeff;
}

double chebyshev_eval(const std::vector<double>& c, double x, double a, double b) {
  const double y = (2 * x - (a + b)) / (b - a);
  // Clenshaw recurrence.
  double b1 = 0, b2 = 0;
  for (std::size_t m = c.size(); m-- > 1;) {
    const double t = 2 * y * b1 - b2 + c[m];
    b2 = b1;
    b1 = t;
  }
  return y * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

ChebyshevResult chebyshev_banded(const BandedMatrix& bm, const std::function<double(double)>& f,
                                 int degree, double lo, double hi, int samples) {
  require(degree >= 0, "Chebyshev degree must be nonnegative");
  require(samples >= 2, "need at least two error samples");
  auto coeff = chebyshev_coefficients(f, degree, lo, hi);
  const auto n = bm.order();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix x = (2 * bm.matrix() - (lo + hi) * id) / (hi - lo);
  Matrix t_prev = id, t_cur = x;
  Matrix p = coeff[0] * id;
  if (degree >= 1) p += coeff[1] * x;
  for (int m = 2; m <= degree; ++m) {
    Matrix t_next = 2 * x * t_cur - t_prev;
    p += coeff[m] * t_next;
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  double worst = 0, jump = 0, prev = 0;
  for (int i = 0; i < samples; ++i) {
    const double s = lo + (hi - lo) * i / (samples - 1);
    const double e = std::abs(f(s) - chebyshev_eval(coeff, s, lo, hi));
    worst = std::max(worst, e);
    if (i > 0) jump = std::max(jump, std::abs(e - prev));
    prev = e;
  }
  const auto band = std::min<std::int64_t>(static_cast<std::int64_t>(degree) * bm.band(), n - 1);
  return {BandedMatrix(std::move(p), std::max<std::int64_t>(band, 0)), std::move(coeff), worst + jump};
}

}  // namespace ukh
