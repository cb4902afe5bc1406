#include "ukhlab/index.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ukhlab/error.hpp"

namespace ukh {

namespace {

constexpr double kPi = std::numbers::pi;
// Cayley coefficients below this (max-abs) are dropped when truncating to a
// banded operator.
constexpr double kCayleyTruncation = 1e-12;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Tall section of psi_- + psi_+ A: rows [-W-p, W+p], columns [-W, W].
CMatrix compressed_section(const LaurentOperator& a, std::int64_t w, std::int64_t pad) {
  const int r = a.rank();
  const std::int64_t cols = 2 * w + 1, rows = 2 * (w + pad) + 1;
  CMatrix m = CMatrix::Zero(rows * r, cols * r);
  for (std::int64_t j = -w; j <= w; ++j) {
    const std::int64_t cj = (j + w) * r;
    if (j < 0) m.block((j + w + pad) * r, cj, r, r) += CMatrix::Identity(r, r);
    for (const auto& [k, c] : a.coefficients()) {
      const std::int64_t i = j + k;
      if (i < 0 || i > w + pad) continue;
      m.block((i + w + pad) * r, cj, r, r) += c;
    }
  }
  return m;
}

// Same section for the adjoint psi_- + U^* psi_+.
CMatrix compressed_adjoint_section(const LaurentOperator& a, std::int64_t w, std::int64_t pad) {
  const int r = a.rank();
  const auto adj = a.adjoint();
  const std::int64_t cols = 2 * w + 1, rows = 2 * (w + pad) + 1;
  CMatrix m = CMatrix::Zero(rows * r, cols * r);
  for (std::int64_t j = -w; j <= w; ++j) {
    const std::int64_t cj = (j + w) * r;
    if (j < 0) {
      m.block((j + w + pad) * r, cj, r, r) += CMatrix::Identity(r, r);
      continue;
    }
    for (const auto& [k, c] : adj.coefficients()) {
      const std::int64_t i = j + k;
      if (i < -w - pad || i > w + pad) continue;
      m.block((i + w + pad) * r, cj, r, r) += c;
    }
  }
  return m;
}

void count_small(const CMatrix& m, double tol, std::int64_t& small, double& smallest_kept) {
  const Eigen::BDCSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  small = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] < tol) {
      ++small;
    } else {
      smallest_kept = std::min(smallest_kept, s[i]);
    }
  }
}

void simpson(double lambda, double a, double b, int panels, double& out) {
  const double h = (b - a) / panels;
  auto f = [&](double t) { return std::exp(-2 * lambda * t); };
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  out = s * h / 3;
}

}  // namespace

LaurentOperator::LaurentOperator(int rank) : rank_(rank) {
  require(rank >= 1, "operator rank must be at least 1");
}

LaurentOperator::LaurentOperator(int rank, std::map<std::int64_t, CMatrix> coefficients)
    : rank_(rank) {
  require(rank >= 1, "operator rank must be at least 1");
  for (auto& [k, c] : coefficients) {
    require(c.rows() == rank && c.cols() == rank,
            "coefficient " + std::to_string(k) + " is not " + std::to_string(rank) + "x" + std::to_string(rank));
    require(c.allFinite(), "coefficient " + std::to_string(k) + " has non-finite entries");
    if (c.cwiseAbs().maxCoeff() == 0) continue;
    coeffs_.emplace(k, std::move(c));
  }
}

LaurentOperator LaurentOperator::identity(int rank) {
  return LaurentOperator(rank, {{0, CMatrix::Identity(rank, rank)}});
}

LaurentOperator LaurentOperator::shift(std::int64_t power) {
  return LaurentOperator(1, {{power, CMatrix::Identity(1, 1)}});
}

LaurentOperator LaurentOperator::scalar(const std::map<std::int64_t, Complex>& coefficients) {
  std::map<std::int64_t, CMatrix> c;
  for (const auto& [k, v] : coefficients) c.emplace(k, CMatrix::Constant(1, 1, v));
  return LaurentOperator(1, std::move(c));
}

std::int64_t LaurentOperator::band() const {
  std::int64_t b = 0;
  for (const auto& [k, c] : coeffs_) b = std::max(b, std::abs(k));
  return b;
}

CMatrix LaurentOperator::coefficient(std::int64_t k) const {
  const auto it = coeffs_.find(k);
  return it == coeffs_.end() ? CMatrix::Zero(rank_, rank_) : it->second;
}

CMatrix LaurentOperator::symbol(double theta) const {
  CMatrix s = CMatrix::Zero(rank_, rank_);
  for (const auto& [k, c] : coeffs_) s += std::polar(1.0, static_cast<double>(k) * theta) * c;
  return s;
}

std::vector<CMatrix> LaurentOperator::symbol_samples(int count) const {
  require(count >= 1, "need at least one sample");
  std::vector<CMatrix> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) out.push_back(symbol(2 * kPi * j / count));
  return out;
}

LaurentOperator LaurentOperator::adjoint() const {
  std::map<std::int64_t, CMatrix> c;
  for (const auto& [k, v] : coeffs_) c.emplace(-k, v.adjoint());
  return LaurentOperator(rank_, std::move(c));
}

LaurentOperator LaurentOperator::direct_sum(const LaurentOperator& other) const {
  const int r = rank_ + other.rank_;
  std::map<std::int64_t, CMatrix> c;
  auto block = [&](std::int64_t k) -> CMatrix& {
    auto it = c.find(k);
    if (it == c.end()) it = c.emplace(k, CMatrix::Zero(r, r)).first;
    return it->second;
  };
  for (const auto& [k, v] : coeffs_) block(k).topLeftCorner(rank_, rank_) = v;
  for (const auto& [k, v] : other.coeffs_) block(k).bottomRightCorner(other.rank_, other.rank_) = v;
  return LaurentOperator(r, std::move(c));
}

LaurentOperator operator*(const LaurentOperator& a, const LaurentOperator& b) {
  require(a.rank_ == b.rank_, "operators have different ranks");
  std::map<std::int64_t, CMatrix> c;
  for (const auto& [j, x] : a.coeffs_) {
    for (const auto& [k, y] : b.coeffs_) {
      auto it = c.find(j + k);
      if (it == c.end()) it = c.emplace(j + k, CMatrix::Zero(a.rank_, a.rank_)).first;
      it->second += x * y;
    }
  }
  return LaurentOperator(a.rank_, std::move(c));
}

WindowIndexResult compressed_index(const LaurentOperator& u, const IndexOptions& options) {
  require(!options.windows.empty(), "no windows");
  require(options.kernel_tol > 0, "kernel threshold must be positive");
  require(options.stabilization >= 1, "stabilization count must be positive");
  WindowIndexResult out;
  out.band = u.band();
  const std::int64_t pad = 2 * out.band;
  for (std::size_t i = 0; i < options.windows.size(); ++i) {
    const auto w = options.windows[i];
    if (w <= 4 * out.band) {
      fail(ErrorCode::InvalidInput, "window " + std::to_string(w) + " must exceed four times the band " +
                                        std::to_string(out.band));
    }
    require(i == 0 || w > options.windows[i - 1], "windows must be increasing");
    WindowCounts wc;
    wc.window = w;
    wc.smallest_kept = INFINITY;
    count_small(compressed_section(u, w, pad), options.kernel_tol, wc.kernel, wc.smallest_kept);
    count_small(compressed_adjoint_section(u, w, pad), options.kernel_tol, wc.cokernel, wc.smallest_kept);
    out.windows.push_back(wc);
  }
  const auto k = static_cast<std::size_t>(options.stabilization);
  if (out.windows.size() >= k) {
    const auto idx = out.windows.back().index();
    bool same = true;
    for (std::size_t i = out.windows.size() - k; i < out.windows.size(); ++i) same = same && out.windows[i].index() == idx;
    if (same) out.stabilized_index = idx;
  }
  if (!out.stabilized_index) {
    out.note = "index did not stabilize over the last " + std::to_string(options.stabilization) + " windows";
  }
  return out;
}

std::int64_t winding_number(const std::vector<CMatrix>& samples) {
  require(samples.size() >= 3, "need at least three symbol samples");
  std::vector<Complex> dets;
  dets.reserve(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    require(samples[j].rows() >= 1 && samples[j].rows() == samples[j].cols(), "symbol samples must be square");
    const Complex d = samples[j].determinant();
    if (!(std::abs(d) > 0) || !std::isfinite(std::abs(d))) {
      fail(ErrorCode::InvalidInput, "symbol is not invertible at sample " + std::to_string(j));
    }
    dets.push_back(d);
  }
  double total = 0;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    const double step = std::arg(dets[(j + 1) % dets.size()] / dets[j]);
    if (std::abs(step) >= kPi / 2) {
      fail(ErrorCode::InvalidInput, "symbol grid too coarse: argument jumps by " + sci(step) + " after sample " +
                                        std::to_string(j));
    }
    total += step;
  }
  return std::llround(total / (2 * kPi));
}

HermitianLineOperator HermitianLineOperator::from_banded(LaurentOperator op) {
  const auto adj = op.adjoint();
  double scale = 0, diff = 0;
  for (const auto& [k, c] : op.coefficients()) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  for (std::int64_t k = -op.band(); k <= op.band(); ++k) {
    diff = std::max(diff, (op.coefficient(k) - adj.coefficient(k)).cwiseAbs().maxCoeff());
  }
  if (diff > defaults::kSymmetryTol * std::max(scale, 1.0)) {
    fail(ErrorCode::InvalidInput, "operator is not self-adjoint: c_{-k} != c_k^*");
  }
  HermitianLineOperator h;
  h.kind = Kind::Banded;
  h.banded = std::move(op);
  return h;
}

HermitianLineOperator HermitianLineOperator::momentum(int copies) {
  require(copies >= 1, "need at least one copy");
  HermitianLineOperator h;
  h.kind = Kind::Momentum;
  h.copies = copies;
  return h;
}

HermitianLineOperator HermitianLineOperator::direct_sum(const HermitianLineOperator& other) const {
  if (kind != other.kind) fail(ErrorCode::Unsupported, "direct sum of banded and momentum operators");
  if (kind == Kind::Momentum) return momentum(copies + other.copies);
  return from_banded(banded.direct_sum(other.banded));
}

PmIndexResult pm_index(const HermitianLineOperator& d, const IndexOptions& options) {
  require(!options.windows.empty(), "no windows");
  const int r = d.rank();
  const std::int64_t wmax = *std::max_element(options.windows.begin(), options.windows.end());
  std::int64_t ring = std::max<std::int64_t>(64, 4 * wmax);
  if (d.kind == HermitianLineOperator::Kind::Banded) ring = std::max(ring, 8 * d.banded.band() + 8);
  const std::int64_t n = ring * r;
  CMatrix dr = CMatrix::Zero(n, n);
  if (d.kind == HermitianLineOperator::Kind::Banded) {
    // Antiperiodic ring: u_{n+L} = -u_n.
    for (std::int64_t i = 0; i < ring; ++i) {
      for (const auto& [k, c] : d.banded.coefficients()) {
        std::int64_t j = i - k;
        double sign = 1;
        while (j < 0) {
          j += ring;
          sign = -sign;
        }
        while (j >= ring) {
          j -= ring;
          sign = -sign;
        }
        dr.block(i * r, j * r, r, r) += sign * c;
      }
    }
  } else {
    // Antiperiodic Fourier modes e^{-i theta_j n}, theta_j = 2 pi (j + 1/2) / L,
    // carry the symbol value -cot(theta_j / 2).
    CMatrix f(ring, ring);
    Eigen::VectorXcd sym(ring);
    for (std::int64_t j = 0; j < ring; ++j) {
      const double theta = 2 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(ring);
      sym(j) = -1 / std::tan(theta / 2);
      for (std::int64_t m = 0; m < ring; ++m) {
        f(m, j) = std::polar(1 / std::sqrt(static_cast<double>(ring)), -theta * static_cast<double>(m));
      }
    }
    const CMatrix scalar = f * sym.asDiagonal() * f.adjoint();
    for (std::int64_t i = 0; i < ring; ++i)
      for (std::int64_t j = 0; j < ring; ++j)
        for (int a = 0; a < r; ++a) dr(i * r + a, j * r + a) = scalar(i, j);
    dr = (0.5 * (dr + dr.adjoint())).eval();
  }
  const CMatrix u = cayley_hermitian(dr);
  std::map<std::int64_t, CMatrix> coeffs;
  const std::int64_t half = ring / 2;
  for (std::int64_t k = -half + 1; k < half; ++k) {
    CMatrix c = k >= 0 ? CMatrix(u.block(k * r, 0, r, r)) : CMatrix(-u.block((ring + k) * r, 0, r, r));
    coeffs.emplace(k, std::move(c));
  }
  PmIndexResult out;
  out.ring_size = ring;
  std::int64_t band = 0;
  for (const auto& [k, c] : coeffs) {
    if (c.cwiseAbs().maxCoeff() > kCayleyTruncation) band = std::max(band, std::abs(k));
  }
  if (band >= ring / 4) {
    fail(ErrorCode::NumericalFailure, "Cayley transform does not decay on the ring of size " + std::to_string(ring));
  }
  std::map<std::int64_t, CMatrix> kept;
  for (auto& [k, c] : coeffs) {
    if (std::abs(k) <= band) {
      kept.emplace(k, std::move(c));
    } else {
      out.truncation = std::max(out.truncation, c.cwiseAbs().maxCoeff());
    }
  }
  out.cayley_band = band;
  // Slowly decaying Cayley coefficients widen the band; windows that are too
  // narrow for it are shifted by 4 b.
  IndexOptions opts = options;
  const bool widen = std::any_of(opts.windows.begin(), opts.windows.end(), [&](std::int64_t w) { return w <= 4 * band; });
  if (widen) {
    for (auto& w : opts.windows) w += 4 * band;
  }
  out.index = compressed_index(LaurentOperator(r, std::move(kept)), opts);
  if (widen) {
    out.index.note += (out.index.note.empty() ? "" : "; ") + std::string("windows widened by 4 x Cayley band ") +
                      std::to_string(band);
  }
  return out;
}

SpectralFlowResult spectral_flow(const std::vector<SymMatrix>& path, std::optional<double> zero_tol) {
  require(path.size() >= 2, "path needs at least two samples");
  const auto order = path.front().order();
  double scale = 0;
  for (const auto& a : path) {
    require(a.order() == order, "path samples have different orders");
    scale = std::max(scale, a.matrix().cwiseAbs().maxCoeff());
  }
  std::vector<Spectrum> spectra;
  spectra.reserve(path.size());
  for (const auto& a : path) spectra.push_back(eigensolve(a));
  double norm = 0;
  for (const auto& s : spectra) norm = std::max(norm, s.norm);
  const double tol = zero_tol ? *zero_tol : defaults::kRelativeZeroTol * std::max(norm, 1.0);
  require(tol >= 0, "zero tolerance must be nonnegative");
  auto near_zero = [&](const Spectrum& s) {
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
      if (std::abs(s.values[i]) <= tol) return true;
    return false;
  };
  auto negatives = [](const Spectrum& s) {
    std::int64_t c = 0;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) c += s.values[i] < 0;
    return c;
  };
  if (near_zero(spectra.front())) fail(ErrorCode::InvalidInput, "path start is not invertible");
  if (near_zero(spectra.back())) fail(ErrorCode::InvalidInput, "path end is not invertible");
  SpectralFlowResult out;
  std::size_t prev = 0;
  // Sorted eigenvalue branches that keep one sign along the path; the gap for
  // the resolution check is measured on these only.
  std::vector<bool> steady(static_cast<std::size_t>(order), true);
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    if (near_zero(spectra[i])) continue;
    for (Eigen::Index j = 0; j < order; ++j) {
      if ((spectra[i].values[j] < 0) != (spectra.front().values[j] < 0)) steady[static_cast<std::size_t>(j)] = false;
    }
  }
  double gap = INFINITY;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    if (near_zero(spectra[i])) {
      out.skipped.push_back(i);
      continue;
    }
    for (Eigen::Index j = 0; j < order; ++j) {
      if (steady[static_cast<std::size_t>(j)]) gap = std::min(gap, std::abs(spectra[i].values[j]));
    }
    if (i > 0) {
      const auto delta = negatives(spectra[prev]) - negatives(spectra[i]);
      if (delta != 0) out.crossings.push_back({i, delta});
      out.flow += delta;
    }
    prev = i;
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (operator_norm(Matrix(path[i].matrix() - path[i - 1].matrix())) >= gap / 4) out.resolution_ok = false;
  }
  return out;
}

ApsResult aps_positive_count(const ApsModel& model) {
  require(model.horizon > 0 && model.step > 0 && model.step <= model.horizon, "need 0 < step <= horizon");
  require(model.divergence > 0 && model.stabilization > 0, "thresholds must be positive");
  require(model.max_doublings >= 1, "need at least one doubling");
  const auto spec = eigensolve(model.a);
  const double tol = model.zero_tol ? *model.zero_tol : defaults::kRelativeZeroTol * std::max(spec.norm, 1.0);
  ApsResult out;
  int panels = static_cast<int>(std::ceil(model.horizon / model.step));
  panels += panels % 2;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    const double l = spec.values[i];
    if (std::abs(l) <= tol) {
      fail(ErrorCode::InvalidInput, "boundary operator is not invertible: eigenvalue " + sci(l));
    }
    double total = 0, inc = 0, t = model.horizon;
    simpson(l, 0, t, panels, total);
    int verdict = 0;   // 1 decays, -1 diverges
    if (!(total <= model.divergence)) verdict = -1;
    for (int d = 0; d < model.max_doublings && verdict == 0; ++d) {
      simpson(l, t, 2 * t, panels, inc);
      total += inc;
      t *= 2;
      if (!(total <= model.divergence)) {
        verdict = -1;
      } else if (inc <= model.stabilization * total) {
        verdict = 1;
      }
    }
    if (verdict == 0) {
      fail(ErrorCode::NumericalFailure, "quadrature for eigenvalue " + sci(l) + " neither stabilized nor diverged");
    }
    out.eigenvalues.push_back(l);
    out.integrals.push_back(total);
    out.decaying.push_back(verdict == 1);
    out.quadrature_count += verdict == 1;
    out.eigenvalue_count += l > 0;
  }
  out.agree = out.quadrature_count == out.eigenvalue_count;
  if (!out.agree) {
    fail(ErrorCode::NumericalFailure, "quadrature count " + std::to_string(out.quadrature_count) +
                                          " disagrees with eigenvalue count " + std::to_string(out.eigenvalue_count));
  }
  return out;
}

RhoProjection rho_projection(const SymMatrix& d, double c, const NormalizingFunction& chi) {
  require(c > 0, "gap must be positive");
  const auto spec = eigensolve(d);
  if (!spectral_gap(spec, c)) fail(ErrorCode::InvalidInput, "operator has spectrum inside (-c, c), c = " + sci(c));
  if (!chi.admissible_for_gap(c)) {
    fail(ErrorCode::InvalidInput, chi.name() + " is not admissible: 1 - chi^2 must vanish outside (-c, c)");
  }
  const auto n = d.order();
  RhoProjection out;
  out.p = 0.5 * (Matrix::Identity(n, n) + apply_function(spec, [&](double x) { return chi(x); }).matrix());
  out.trace = out.p.trace();
  out.idempotency = (out.p * out.p - out.p).cwiseAbs().maxCoeff();
  if (out.idempotency > defaults::kProjectionTol) {
    fail(ErrorCode::NumericalFailure, "projection defect " + sci(out.idempotency));
  }
  return out;
}

RhoApsReport rho_aps_consistency(const ApsModel& model, const NormalizingFunction& chi, double angle_tol) {
  const auto proj = rho_projection(model.a, chi.gap(), chi);
  const auto aps = aps_positive_count(model);
  RhoApsReport out;
  out.trace = proj.trace;
  out.aps_count = aps.quadrature_count;
  out.eigenvalue_count = aps.eigenvalue_count;
  out.trace_matches = std::abs(proj.trace - static_cast<double>(aps.quadrature_count)) <= 1e-8;

  const auto spec = eigensolve(model.a);
  std::vector<Eigen::Index> pos;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i)
    if (spec.values[i] > 0) pos.push_back(i);
  const auto pspec = eigensolve(SymMatrix(0.5 * (proj.p + proj.p.transpose())));
  std::vector<Eigen::Index> range;
  for (Eigen::Index i = 0; i < pspec.values.size(); ++i)
    if (pspec.values[i] > 0.5) range.push_back(i);
  if (pos.size() != range.size()) {
    out.max_angle_sine = 1;
    return out;
  }
  if (pos.empty()) {
    out.subspaces_match = true;
    return out;
  }
  const auto n = model.a.order();
  const auto k = static_cast<Eigen::Index>(pos.size());
  Matrix q1(n, k), q2(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    q1.col(j) = spec.vectors.col(pos[j]);
    q2.col(j) = pspec.vectors.col(range[j]);
  }
  const Matrix resid = q1 - q2 * (q2.transpose() * q1);
  const Eigen::JacobiSVD<Matrix> svd(resid);
  out.max_angle_sine = svd.singularValues().maxCoeff();
  out.subspaces_match = out.max_angle_sine <= angle_tol;
  return out;
}

RandomLaurentFixture random_shift_polynomial(std::mt19937_64& rng, int max_band) {
  require(max_band >= 1, "band must be at least 1");
  const int degree = std::uniform_int_distribution<int>(1, max_band)(rng);
  const int lead = std::uniform_int_distribution<int>(0, degree)(rng);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<Complex> poly{1.0};
  std::int64_t inside = 0;
  for (int i = 0; i < degree; ++i) {
    const bool in = unit(rng) < 0.5;
    const double mod = in ? 0.65 * unit(rng) : 1.35 + 1.65 * unit(rng);
    inside += in;
    const Complex root = std::polar(mod, 2 * kPi * unit(rng));
    std::vector<Complex> next(poly.size() + 1, 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j];
      next[j] -= root * poly[j];
    }
    poly = std::move(next);
  }
  double scale = 0;
  for (const auto& c : poly) scale += std::abs(c);
  const Complex phase = std::polar(1.0 / scale, 2 * kPi * unit(rng));
  std::map<std::int64_t, Complex> coeffs;
  for (std::size_t j = 0; j < poly.size(); ++j) coeffs[static_cast<std::int64_t>(j) - lead] = phase * poly[j];
  return {LaurentOperator::scalar(coeffs), inside - lead};
}

}  // namespace ukh
