#include "ukhlab/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ukhlab/error.hpp"

namespace ukh {

namespace {

// Number of grid cells in t; throws unless t is a multiple of h.
std::int64_t grid_steps(double t, double h) {
  require(std::isfinite(t), "time must be finite");
  const double q = t / h;
  const double n = std::round(q);
  if (std::abs(q - n) > 1e-9 * std::max(1.0, std::abs(q))) {
    fail(ErrorCode::InvalidInput, "time is not a multiple of the grid step");
  }
  return static_cast<std::int64_t>(n);
}

// out[j] = in[j - n]; nonzero content shifted outside the array is an error.
std::vector<Complex> translate(const std::vector<Complex>& in, std::int64_t n) {
  const auto size = static_cast<std::int64_t>(in.size());
  std::vector<Complex> out(in.size(), Complex(0, 0));
  for (std::int64_t j = 0; j < size; ++j) {
    if (in[j] == Complex(0, 0)) continue;
    const auto k = j + n;
    if (k < 0 || k >= size) {
      fail(ErrorCode::InvalidInput, "evolution carries the state outside the grid window");
    }
    out[k] = in[j];
  }
  return out;
}

}  // namespace

double SpinorGridState::norm() const {
  double s = 0;
  for (const auto& v : up) s += std::norm(v);
  for (const auto& v : um) s += std::norm(v);
  return std::sqrt(s * h);
}

std::vector<std::int64_t> SpinorGridState::support_indices(double threshold) const {
  std::vector<std::int64_t> out;
  for (std::int64_t j = 0; j < size(); ++j) {
    if (std::abs(up[j]) > threshold || std::abs(um[j]) > threshold) out.push_back(j);
  }
  return out;
}

std::optional<std::pair<std::int64_t, std::int64_t>> SpinorGridState::support(double threshold) const {
  const auto idx = support_indices(threshold);
  if (idx.empty()) return std::nullopt;
  return std::make_pair(idx.front(), idx.back());
}

void SpinorGridState::validate() const {
  require(h > 0 && std::isfinite(h), "grid step must be positive");
  require(std::isfinite(x0), "grid origin must be finite");
  require(!up.empty(), "grid state is empty");
  require(up.size() == um.size(), "spinor components have different lengths");
  for (const auto* v : {&up, &um}) {
    for (const auto& z : *v) require(std::isfinite(z.real()) && std::isfinite(z.imag()), "state has non-finite values");
  }
}

BoundaryCondition BoundaryCondition::chirality(int sign) {
  require(sign == 1 || sign == -1, "chirality sign must be +1 or -1");
  return {BoundaryKind::Chirality, sign};
}

const char* to_string(BoundaryKind kind) noexcept {
  switch (kind) {
    case BoundaryKind::FreeLine: return "free-line";
    case BoundaryKind::Chirality: return "chirality";
    case BoundaryKind::PeriodicShift: return "periodic-shift";
  }
  return "unknown";
}

double propagation_speed(const std::vector<CMatrix>& samples) {
  require(!samples.empty(), "no coefficient samples");
  double c = 0;
  for (const auto& a : samples) {
    require(a.rows() >= 1 && a.rows() == a.cols(), "coefficient samples must be square");
    c = std::max(c, operator_norm(a));
  }
  return c;
}

SpinorGridState evolve(const SpinorGridState& state, double t, const BoundaryCondition& bc) {
  state.validate();
  const auto n = grid_steps(t, state.h);
  SpinorGridState out = state;
  if (n == 0) return out;
  const auto size = state.size();
  switch (bc.kind) {
    case BoundaryKind::FreeLine:
      out.up = translate(state.up, n);
      out.um = translate(state.um, -n);
      return out;
    case BoundaryKind::Chirality: {
      require(bc.sign == 1 || bc.sign == -1, "chirality sign must be +1 or -1");
      // Unfolded line: w[size + m] = u+[m] for m >= 0, w[size - 1 - j] =
      // sign * u-[j]; evolution is the right shift of w.
      std::vector<Complex> w(2 * state.up.size());
      for (std::int64_t j = 0; j < size; ++j) {
        w[size + j] = state.up[j];
        w[size - 1 - j] = static_cast<double>(bc.sign) * state.um[j];
      }
      const auto moved = translate(w, n);
      for (std::int64_t j = 0; j < size; ++j) {
        out.up[j] = moved[size + j];
        out.um[j] = static_cast<double>(bc.sign) * moved[size - 1 - j];
      }
      return out;
    }
    case BoundaryKind::PeriodicShift: {
      if (std::abs(state.x0) > 1e-12 || std::abs(static_cast<double>(size) * state.h - 1) > 1e-12) {
        fail(ErrorCode::InvalidInput, "periodic-shift model needs the grid x0 = 0, N h = 1");
      }
      for (std::int64_t j = 0; j < size; ++j) {
        const auto k = ((j + n) % size + size) % size;
        out.up[j] = state.up[k];
        out.um[j] = state.um[k];
      }
      return out;
    }
  }
  return out;
}

PropagationReport propagation_report(const SpinorGridState& initial, const SpinorGridState& evolved,
                                     double t, double speed) {
  initial.validate();
  evolved.validate();
  require(initial.size() == evolved.size() && initial.h == evolved.h && initial.x0 == evolved.x0,
          "states live on different grids");
  require(speed >= 0, "propagation speed must be nonnegative");
  const auto hull = initial.support();
  require(hull.has_value(), "initial state has empty support");
  PropagationReport r;
  r.initial_support = *hull;
  r.evolved_support = evolved.support();
  r.t = t;
  r.speed = speed;
  r.speed_bound = speed * std::abs(t);
  std::int64_t cells = 0;
  for (auto j : evolved.support_indices()) {
    if (j < hull->first) cells = std::max(cells, hull->first - j);
    if (j > hull->second) cells = std::max(cells, j - hull->second);
  }
  r.measured_growth = static_cast<double>(cells) * initial.h;
  const double allowed = r.speed_bound + initial.h;
  r.contained = r.measured_growth <= allowed * (1 + 1e-12);
  r.violation = r.contained ? 0.0 : r.measured_growth - allowed;
  return r;
}

BandlimitedResult bandlimited_calculus(std::int64_t sites, double h, double r, double dt,
                                       const std::vector<BandlimitedSample>& samples, double speed) {
  require(sites >= 1, "model needs at least one site");
  require(h > 0 && r >= 0 && dt > 0, "h and dt must be positive and R nonnegative");
  require(speed > 0, "propagation speed must be positive");
  BandlimitedResult out;
  out.matrix = CMatrix::Zero(sites, sites);
  const double scale = dt / std::sqrt(2 * std::numbers::pi);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& [t, v] = samples[s];
    if (v == Complex(0, 0)) continue;
    if (std::abs(t) > r * (1 + 1e-12)) {
      fail(ErrorCode::InvalidInput, "sample " + std::to_string(s) + " is nonzero outside [-R, R]");
    }
    const auto k = grid_steps(t, h);
    for (std::int64_t j = 0; j < sites; ++j) {
      const auto col = ((j + k) % sites + sites) % sites;
      out.matrix(j, col) += scale * v;
    }
  }
  for (std::int64_t i = 0; i < sites; ++i) {
    for (std::int64_t j = 0; j < sites; ++j) {
      if (out.matrix(i, j) == Complex(0, 0)) continue;
      const auto d = std::abs(i - j);
      out.band = std::max(out.band, std::min(d, sites - d));
    }
  }
  out.certified_band = static_cast<std::int64_t>(std::floor(speed * r / h + 1e-9)) + 1;
  out.within_certificate = out.band <= out.certified_band;
  return out;
}

}  // namespace ukh
