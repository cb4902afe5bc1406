#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ukhlab/defaults.hpp"
#include "ukhlab/specops.hpp"

namespace ukh {

using Complex = std::complex<double>;

// Two-component grid function: u+ and u- sampled at x0 + j h, j = 0..N-1.
struct SpinorGridState {
  double x0 = 0;
  double h = 1;
  std::vector<Complex> up;
  std::vector<Complex> um;

  std::int64_t size() const { return static_cast<std::int64_t>(up.size()); }
  double x(std::int64_t j) const { return x0 + static_cast<double>(j) * h; }
  double norm() const;
  // Indices where either component exceeds the threshold.
  std::vector<std::int64_t> support_indices(double threshold = defaults::kSupportThreshold) const;
  // Smallest index interval containing the support.
  std::optional<std::pair<std::int64_t, std::int64_t>> support(
      double threshold = defaults::kSupportThreshold) const;
  void validate() const;
};

enum class BoundaryKind { FreeLine, Chirality, PeriodicShift };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::FreeLine;
  int sign = 1;   // chirality only: u+ = sign * u- at the left end

  static BoundaryCondition free_line() { return {BoundaryKind::FreeLine, 1}; }
  static BoundaryCondition chirality(int sign);
  static BoundaryCondition periodic_shift() { return {BoundaryKind::PeriodicShift, 1}; }
};

const char* to_string(BoundaryKind kind) noexcept;

// Largest operator norm over the coefficient samples a(x) of a first-order
// symbol a(x) xi.
double propagation_speed(const std::vector<CMatrix>& coefficient_samples);

// Exact evolution for a grid-aligned time t.
//   free line: u+ moves right, u- moves left by t / h cells; content may not
//     leave the window.
//   chirality: half-line starting at x0; u- reaching the wall re-enters as
//     sign * u+ (characteristics unfolded through the wall).
//   periodic shift: scalar model on [0, 1) applied to each component;
//     output(x) = u~(x + t) with u~ the 1-periodic continuation, a circular
//     shift that moves support by distance ~1 in time t.
SpinorGridState evolve(const SpinorGridState& state, double t, const BoundaryCondition& bc);

struct PropagationReport {
  std::pair<std::int64_t, std::int64_t> initial_support{0, 0};
  std::optional<std::pair<std::int64_t, std::int64_t>> evolved_support;
  double t = 0;
  double speed = 0;
  double speed_bound = 0;      // c_D |t|
  double measured_growth = 0;  // largest distance of evolved support from the initial hull
  bool contained = true;       // growth <= c_D |t| + h
  double violation = 0;        // growth - (c_D |t| + h) when positive
};

PropagationReport propagation_report(const SpinorGridState& initial, const SpinorGridState& evolved,
                                     double t, double speed);

struct BandlimitedSample {
  double t = 0;
  Complex value;
};

struct BandlimitedResult {
  CMatrix matrix;
  std::int64_t band = 0;            // largest circular distance of a nonzero entry
  std::int64_t certified_band = 0;  // floor(c_D R / h) + 1
  bool within_certificate = true;
};

// (2 pi)^{-1/2} sum_j dt f^(t_j) T_{t_j} on the periodic translation model
// with N sites, (T_t u)_j = u_{j + t/h}. Nodes must be multiples of h and
// samples outside [-R, R] must vanish.
BandlimitedResult bandlimited_calculus(std::int64_t sites, double h, double r, double dt,
                                       const std::vector<BandlimitedSample>& samples,
                                       double speed = 1.0);

}  // namespace ukh
