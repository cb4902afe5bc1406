#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ukhlab/defaults.hpp"
#include "ukhlab/sequence.hpp"
#include "ukhlab/specops.hpp"

namespace ukh {

// a_1..a_{k+1} with sum_j a_j (-j)^i = 1 for i = 0..k.
struct ReflectionCoefficients {
  int order = 0;
  std::vector<Rational> coefficients;

  std::vector<double> values() const;
};

// Exact rational Vandermonde solve; orders above kMaxReflectionOrder are
// unsupported.
ReflectionCoefficients reflection_coefficients(int k);

struct ExtendedSamples {
  std::int64_t first_index = 0;   // grid index of values[0]; negative
  std::vector<double> values;     // u on first_index .. M
};

// samples[j] = u(j h), j = 0..M. Negative samples e(-q h) = sum_j a_j u(j q h)
// for q = 1..depth; depth 0 picks the largest depth the samples allow.
ExtendedSamples extend_reflect(const std::vector<double>& samples, int k, std::int64_t depth = 0);

struct TorusEmbeddingSpec {
  int n = 1;
  double r = 1;
  std::int64_t m = 1;
  double t = 1;
  double p = 1;
  std::int64_t cutoff = defaults::kTorusCutoff;
};

struct TorusSchattenResult {
  bool divergent = false;
  std::string reason;
  double value = 0;        // (partial sum)^{1/p}
  double tail_bound = 0;   // (partial + tail)^{1/p} - value
  double partial_sum = 0;  // sum over |k|_inf <= K of m <k>^{-pt}
  double tail_sum = 0;     // bound on the remaining sum
  std::int64_t cutoff = 0;
};

bool convergence_classify(int n, double t, double p);

// Schatten p-norm of H^t -> L^2 on the n-torus of side r with rank-m bundle:
// (sum_{k in Z^n} m (1 + (2 pi |k| / r)^2)^{-pt/2})^{1/p}, summed over
// |k|_inf shells with an integral-comparison tail.
TorusSchattenResult torus_schatten_norm(const TorusEmbeddingSpec& spec,
                                        double max_points = defaults::kTorusMaxPoints);

// (sum sigma_i^s)^{1/s} over the singular values.
double schatten_norm_matrix(const Matrix& k, double s);

}  // namespace ukh
