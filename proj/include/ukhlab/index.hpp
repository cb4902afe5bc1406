#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ukhlab/defaults.hpp"
#include "ukhlab/specops.hpp"

namespace ukh {

using Complex = std::complex<double>;

// Translation-invariant operator on l^2(Z, C^r): (U u)_n = sum_k c_k u_{n-k}.
// Its symbol is sigma(theta) = sum_k c_k e^{i k theta}, so the bilateral
// shift S (c_1 = 1) has symbol e^{i theta}.
class LaurentOperator {
 public:
  explicit LaurentOperator(int rank = 1);
  LaurentOperator(int rank, std::map<std::int64_t, CMatrix> coefficients);

  static LaurentOperator identity(int rank = 1);
  static LaurentOperator shift(std::int64_t power = 1);
  // Scalar operator from diagonal coefficients.
  static LaurentOperator scalar(const std::map<std::int64_t, Complex>& coefficients);

  int rank() const { return rank_; }
  std::int64_t band() const;
  const std::map<std::int64_t, CMatrix>& coefficients() const { return coeffs_; }
  // Zero block for absent k.
  CMatrix coefficient(std::int64_t k) const;
  CMatrix symbol(double theta) const;
  std::vector<CMatrix> symbol_samples(int count) const;
  LaurentOperator adjoint() const;
  LaurentOperator direct_sum(const LaurentOperator& other) const;
  friend LaurentOperator operator*(const LaurentOperator& a, const LaurentOperator& b);

 private:
  int rank_;
  std::map<std::int64_t, CMatrix> coeffs_;
};

struct WindowCounts {
  std::int64_t window = 0;
  std::int64_t kernel = 0;
  std::int64_t cokernel = 0;
  double smallest_kept = 0;   // smallest singular value above the threshold
  std::int64_t index() const { return kernel - cokernel; }
};

struct WindowIndexResult {
  std::vector<WindowCounts> windows;
  std::optional<std::int64_t> stabilized_index;   // empty means "unstable"
  std::int64_t band = 0;
  std::string note;
};

struct IndexOptions {
  std::vector<std::int64_t> windows{defaults::kIndexWindows.begin(), defaults::kIndexWindows.end()};
  double kernel_tol = defaults::kKernelSingularTol;
  int stabilization = defaults::kStabilizationWindows;
};

// dim ker - dim coker of psi_- + psi_+ U with psi_+ the projection onto
// n >= 0, computed on [-W, W] with rows padded by twice the band. Index of
// the shift is -1.
WindowIndexResult compressed_index(const LaurentOperator& u, const IndexOptions& options = {});

// Total increment of arg det(sigma) / 2 pi over uniform samples of the circle.
std::int64_t winding_number(const std::vector<CMatrix>& symbol_samples);

// Self-adjoint translation-invariant operator for the partitioned-manifold
// index: either a Hermitian banded Laurent operator or the unbounded scalar
// momentum symbol -cot(theta / 2), whose Cayley transform is the shift.
struct HermitianLineOperator {
  enum class Kind { Banded, Momentum };
  Kind kind = Kind::Banded;
  LaurentOperator banded;
  int copies = 1;   // Momentum only: direct sum of this many copies

  static HermitianLineOperator from_banded(LaurentOperator op);
  static HermitianLineOperator momentum(int copies = 1);
  int rank() const { return kind == Kind::Banded ? banded.rank() : copies; }
  HermitianLineOperator direct_sum(const HermitianLineOperator& other) const;
};

struct PmIndexResult {
  WindowIndexResult index;
  std::int64_t ring_size = 0;
  std::int64_t cayley_band = 0;
  double truncation = 0;   // largest dropped Cayley coefficient norm
};

// Cayley transform (D - i)(D + i)^{-1} computed densely on an antiperiodic
// ring, truncated to a banded Laurent operator, then compressed_index.
PmIndexResult pm_index(const HermitianLineOperator& d, const IndexOptions& options = {});

struct FlowCrossing {
  std::size_t sample = 0;   // crossing between sample - 1 and sample
  std::int64_t delta = 0;
};

struct SpectralFlowResult {
  std::int64_t flow = 0;
  std::vector<FlowCrossing> crossings;
  std::vector<std::size_t> skipped;   // interior samples with an eigenvalue near 0
  // Consecutive steps < gap / 4, gap taken over eigenvalue branches that
  // never change sign.
  bool resolution_ok = true;
};

SpectralFlowResult spectral_flow(const std::vector<SymMatrix>& path, std::optional<double> zero_tol = std::nullopt);

struct ApsModel {
  SymMatrix a;
  double horizon = defaults::kApsHorizon;
  double step = defaults::kApsStep;
  double divergence = defaults::kApsDivergence;
  double stabilization = defaults::kApsStabilization;
  int max_doublings = defaults::kApsMaxDoublings;
  std::optional<double> zero_tol;

  explicit ApsModel(SymMatrix a_) : a(std::move(a_)) {}
};

struct ApsResult {
  std::int64_t quadrature_count = 0;
  std::int64_t eigenvalue_count = 0;
  bool agree = true;
  std::vector<double> eigenvalues;
  std::vector<double> integrals;   // last quadrature value per eigenvalue
  std::vector<bool> decaying;
};

ApsResult aps_positive_count(const ApsModel& model);

struct RhoProjection {
  Matrix p;
  double trace = 0;
  double idempotency = 0;   // |P^2 - P|_max
};

RhoProjection rho_projection(const SymMatrix& d, double c, const NormalizingFunction& chi);

struct RhoApsReport {
  double trace = 0;
  std::int64_t aps_count = 0;
  std::int64_t eigenvalue_count = 0;
  double max_angle_sine = 0;
  bool trace_matches = false;
  bool subspaces_match = false;
  bool consistent() const { return trace_matches && subspaces_match; }
};

RhoApsReport rho_aps_consistency(const ApsModel& model, const NormalizingFunction& chi,
                                 double angle_tol = defaults::kAngleTol);

// Scalar shift polynomial z^{-m} prod (z - r_i) with roots kept at least
// 0.35 away from the unit circle; winding = #{|r_i| < 1} - m.
struct RandomLaurentFixture {
  LaurentOperator op;
  std::int64_t winding = 0;
};

RandomLaurentFixture random_shift_polynomial(std::mt19937_64& rng, int max_band);

}  // namespace ukh
