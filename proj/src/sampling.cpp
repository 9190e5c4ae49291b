#include "gcs/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "gcs/errors.hpp"

namespace gcs {

std::vector<Vector> latin_hypercube(const Domain& domain, std::size_t count, std::uint64_t seed) {
  if (!domain.is_compact()) throw ConfigError("sampling requires a compact domain");
  const auto n = domain.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> pts(count, Vector(n));
  std::vector<std::size_t> perm(count);
  for (Eigen::Index d = 0; d < n; ++d) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const double lo = domain.lower()[d], width = domain.upper()[d] - domain.lower()[d];
    for (std::size_t i = 0; i < count; ++i) {
      const double u = (static_cast<double>(perm[i]) + unit(rng)) / static_cast<double>(count);
      pts[i][d] = lo + width * u;
    }
  }
  return pts;
}

std::vector<SamplePair> sample_pairs(const Domain& domain, std::size_t count, std::uint64_t seed) {
  if (!domain.is_compact()) throw ConfigError("sampling requires a compact domain");
  std::vector<Vector> special;
  if (domain.dim() <= 6) special = domain.corners();
  for (auto& m : domain.face_midpoints()) special.push_back(std::move(m));

  const auto first = latin_hypercube(domain, count, seed);
  const auto second = latin_hypercube(domain, count, seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 rng(seed + 17);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const Vector width = domain.upper() - domain.lower();

  std::vector<SamplePair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SamplePair p;
    if (i < special.size() && i % 4 != 3) {
      p = {special[i], first[i]};
    } else if (i % 4 == 3) {
      Vector b = first[i];
      for (Eigen::Index d = 0; d < b.size(); ++d) b[d] += 0.05 * width[d] * sym(rng);
      b = b.cwiseMax(domain.lower()).cwiseMin(domain.upper());
      p = {first[i], b};
    } else {
      p = {first[i], second[i]};
    }
    if ((p.a - p.b).cwiseAbs().maxCoeff() > 0.0) pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<Vector> sample_points(const Domain& domain, std::size_t interior, std::uint64_t seed) {
  std::vector<Vector> pts;
  if (domain.dim() <= 6) pts = domain.corners();
  for (auto& m : domain.face_midpoints()) pts.push_back(std::move(m));
  for (auto& p : latin_hypercube(domain, interior, seed)) pts.push_back(std::move(p));
  return pts;
}

GridSpec GridSpec::default_for(Eigen::Index n) {
  GridSpec g;
  g.points_per_axis = n <= 3 ? 9 : (n <= 6 ? 5 : 3);
  return g;
}

void GridSpec::validate() const {
  if (points_per_axis < 3) throw ConfigError("grid needs at least 3 points per axis");
}

std::vector<Vector> grid_points(const Domain& region, const GridSpec& grid) {
  grid.validate();
  if (!region.is_compact()) throw ConfigError("grid requires a compact region");
  const auto n = region.dim();
  const std::size_t m = grid.points_per_axis;

  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < n; ++d) {
    const double lo = region.lower()[d], hi = region.upper()[d];
    auto& axis = axes[static_cast<std::size_t>(d)];
    if (hi == lo) {
      axis.push_back(lo);
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double s = grid.include_boundary ? static_cast<double>(i) / static_cast<double>(m - 1)
                                             : static_cast<double>(i + 1) / static_cast<double>(m + 1);
      axis.push_back(lo + (hi - lo) * s);
    }
    if (grid.include_boundary) axis.back() = hi;
  }

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<Vector> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < total; ++k) {
    Vector p(n);
    for (Eigen::Index d = 0; d < n; ++d) p[d] = axes[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
    pts.push_back(std::move(p));
    for (std::size_t d = 0; d < idx.size(); ++d) {
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
    }
  }
  return pts;
}

}  // namespace gcs
