#pragma once

#include <array>
#include <cstdint>

// Every default tolerance, window list and cutoff used by the library and the
// CLI. Each entry can be overridden per call (C++ arguments) or per invocation
// (CLI flags); nothing else in the code base hard-codes these numbers.
namespace ukh::defaults {

// Symmetric input check: |A - A^T|_max <= kSymmetryTol * |A|_max.
inline constexpr double kSymmetryTol = 1e-12;
// Spectrum residual and orthogonality bound, relative to |A|.
inline constexpr double kEigenResidualTol = 1e-8;
// Relative zero threshold for eta and kernel counting: zero_tol = this * |A|.
inline constexpr double kRelativeZeroTol = 1e-9;
// Singular values below this count as kernel in compressed index windows.
inline constexpr double kKernelSingularTol = 1e-8;
// Window sizes for compressed / partitioned-manifold index.
inline constexpr std::array<std::int64_t, 3> kIndexWindows{16, 32, 64};
// Number of trailing windows that must agree for a stabilized index.
inline constexpr int kStabilizationWindows = 3;
// Samples used to estimate the Chebyshev sup error on [a, b].
inline constexpr int kChebyshevErrorSamples = 20001;
// Support threshold for grid states.
inline constexpr double kSupportThreshold = 1e-12;
// Torus Schatten lattice cutoff.
inline constexpr std::int64_t kTorusCutoff = 1000000;
// Largest lattice enumerated by the torus sum, (2K+1)^n.
inline constexpr double kTorusMaxPoints = 4e9;
// Largest order for exact reflection coefficients.
inline constexpr int kMaxReflectionOrder = 12;
// APS quadrature: initial horizon, step, divergence threshold, relative
// stabilization increment and maximum number of horizon doublings.
inline constexpr double kApsHorizon = 1.0;
inline constexpr double kApsStep = 1e-2;
inline constexpr double kApsDivergence = 1e12;
inline constexpr double kApsStabilization = 1e-10;
inline constexpr int kApsMaxDoublings = 200;
// Projection idempotency bound for rho projections.
inline constexpr double kProjectionTol = 1e-8;
// Principal-angle bound for the APS / rho subspace comparison.
inline constexpr double kAngleTol = 1e-8;
// Classification: radii for divergence-one flow certificates, capacity,
// Folner ratio threshold and end-counting radius.
inline constexpr std::int64_t kFlowRadiusMin = 2;
inline constexpr std::int64_t kFlowRadiusMax = 6;
inline constexpr std::int64_t kFlowCapacity = 2;
inline constexpr double kFolnerEpsilon = 0.05;
inline constexpr std::int64_t kEndsRadius = 6;
// Largest window radius tried when searching for a Folner witness.
inline constexpr std::int64_t kFolnerMaxRadius = 4096;

}  // namespace ukh::defaults
