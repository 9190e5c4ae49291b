#pragma once

// Deterministic sampling of compact box domains: Latin hypercube designs,
// initial-condition pairs for trajectory checks, and uniform grids for the
// Jacobian-based certifiers.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gcs/models.hpp"

namespace gcs {

struct SamplePair {
  Vector a;
  Vector b;
};

/// `count` points, one per stratum in every coordinate, from a seeded RNG.
std::vector<Vector> latin_hypercube(const Domain& domain, std::size_t count, std::uint64_t seed);

/// Initial-condition pairs: domain corners and face midpoints paired with
/// Latin hypercube points, then LHS-LHS pairs, with every fourth pair a
/// close pair (a, a + small perturbation). Pairs with a == b are dropped.
/// Requires a compact domain.
std::vector<SamplePair> sample_pairs(const Domain& domain, std::size_t count, std::uint64_t seed);

/// Corners, face midpoints and `interior` LHS points (used for single
/// initial conditions, e.g. entry-time checks).
std::vector<Vector> sample_points(const Domain& domain, std::size_t interior, std::uint64_t seed);

struct GridSpec {
  std::size_t points_per_axis = 9;
  /// When false, only strictly interior points are generated.
  bool include_boundary = true;

  /// 9 points per axis for n <= 3, 5 for n <= 6, 3 beyond.
  static GridSpec default_for(Eigen::Index n);
  void validate() const;
};

/// Tensor grid over the region (all corners included when the boundary is).
std::vector<Vector> grid_points(const Domain& region, const GridSpec& grid);

}  // namespace gcs
