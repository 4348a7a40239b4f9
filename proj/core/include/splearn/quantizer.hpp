#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace splearn {

/// J-point optimal quadratic quantizer of the Student-t with `df` degrees of
/// freedom: Voronoi points with weights from the CDF at cell midpoints.
struct Quantizer {
  std::vector<double> points;   // strictly increasing
  std::vector<double> weights;  // midpoint-CDF masses, sum to 1
  double df = 0.0;
  double distortion = 0.0;      // E[min_j (T - t_j)^2]
  int iterations = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Builds the quantizer by fixed-point iteration on the Lloyd stationarity
/// conditions (point = conditional mean of its cell), Newton-accelerated, from
/// a companded quantile initialization. Deterministic; `seed` only perturbs
/// the initialization on a retry after a stall. Requires df > 2 so the
/// quadratic distortion is finite.
Quantizer build_quantizer(int points, double df, std::uint64_t seed = 0);

/// Process-wide synchronized cache keyed on (J, df rounded to 1e-6); df moves
/// every iteration (df = 2 a_n) and a rebuild per step would be wasteful.
std::shared_ptr<const Quantizer> cached_quantizer(int points, double df);

}  // namespace splearn
