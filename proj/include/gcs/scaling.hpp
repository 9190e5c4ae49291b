#pragma once

// Jacobian-based sufficient conditions evaluated on grids: suprema of matrix
// measures, the S0 / S- partition conditions and the diagonal scalings they
// yield, nested contraction, and interior contraction with boundary
// repulsion.
//
// "For all x" is replaced by a finite grid (corners included), so a grid
// Pass is evidence rather than proof.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcs/certify.hpp"
#include "gcs/measure.hpp"
#include "gcs/models.hpp"
#include "gcs/sampling.hpp"

namespace gcs {

/// Threshold separating strict inequalities from round-off.
inline constexpr double kStrictMargin = 1e-10;

struct GridSupResult {
  double value = 0.0;
  Vector argmax;
  double t = 0.0;
  std::size_t points = 0;
};

/// max over grid points of `region` and over `t_samples` of
/// matrix_measure(norm, J(t, x)). Throws ConfigError if the region is not
/// inside the model domain or the grid is empty.
GridSupResult grid_sup_measure(const SystemModel& model, const NormKind& norm, const GridSpec& grid,
                               const Domain& region, const std::vector<double>& t_samples);
/// Over the model domain, with jacobian_time_samples(model, 10, 16).
GridSupResult grid_sup_measure(const SystemModel& model, const NormKind& norm, const GridSpec& grid);

/// Index sets are 0-based. zmap sends each i in S0 to some z(i) in S-; an
/// empty zmap is inferred by the partition checks.
struct Partition {
  std::vector<Eigen::Index> s0;
  std::vector<Eigen::Index> sminus;
  std::map<Eigen::Index, Eigen::Index> zmap;

  /// Throws ConfigError unless S0 and S- are non-empty, disjoint, cover
  /// {0..n-1}, and zmap maps S0 into S-.
  void validate(Eigen::Index n) const;
};

struct PartitionViolation {
  int condition = 0;
  Eigen::Index index = 0;
  Vector point;
  double t = 0.0;
  double value = 0.0;
};

struct PartitionReport {
  Verdict verdict = Verdict::Fail;
  bool cond1 = false;  // S0 coefficients <= 0
  bool cond2 = false;  // S- coefficients < 0
  bool cond3 = false;  // coupling entry from S0 to S-
  /// -max over S- and grid of the coefficients.
  double delta = 0.0;
  /// max over S0 and grid of the coefficients.
  double max_s0 = 0.0;
  std::map<Eigen::Index, Eigen::Index> zmap;
  /// First violation found for each failed condition.
  std::vector<PartitionViolation> violations;
};

struct PartitionOptions {
  std::optional<Domain> region;
  std::vector<double> t_samples;
  /// Similarity P applied before taking coefficients (row form only).
  std::optional<Matrix> similarity;
};

/// Column conditions: c_k <= 0 (k in S0), c_j < 0 (j in S-), J_{z(i) i} > 0.
PartitionReport check_partition_mu1(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                                    const PartitionOptions& opts = {});
/// Row conditions on P J P^-1: d_j <= 0 (j in S0), d_k < 0 (k in S-), J_{j z(j)} != 0.
PartitionReport check_partition_muinf(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                                      const PartitionOptions& opts = {});

/// Diagonal of D: ones except d_{z(i)} = 1 - eps for i in S0.
Vector construct_scaling_mu1(const Partition& partition, double eps, Eigen::Index n);
/// Row-form mirror: ones except d_{z(j)} = 1 / (1 - eps).
Vector construct_scaling_muinf(const Partition& partition, double eps, Eigen::Index n);

struct ScalingResult {
  NormTag tag = NormTag::L1;
  Vector d;
  std::optional<Matrix> similarity;
  double epsilon_used = 0.0;
  double delta = 0.0;
  double grid_sup_mu = 0.0;
  Vector argmax;
  Verdict verdict = Verdict::Fail;
  PartitionReport partition;

  /// The certified norm: diag(d) (times the similarity, if any).
  NormKind norm() const;
};

struct ScalingOptions {
  PartitionOptions partition;
  /// Replaces the grid-derived delta.
  std::optional<double> delta;
  /// Use this epsilon instead of the automatic search.
  std::optional<double> epsilon;
  double initial_epsilon = 0.25;
};

/// Checks the partition, picks the largest epsilon (from 0.25 down) with
/// S0 coefficients < 0 and S- coefficients < -delta/2 on the grid, and
/// evaluates the grid supremum of the scaled measure. Verdict Pass iff the
/// partition holds and grid_sup_mu < 0.
ScalingResult select_scaling(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                             NormTag tag, const ScalingOptions& opts = {});

/// Deviation s of |y|_norm from |y|_reference: max |(|y|_norm / |y|_ref) - 1|
/// over basis vectors and `random_directions` random vectors (exact for
/// diagonal scalings of the same base norm).
double norm_deviation(const NormKind& norm, const NormKind& reference, Eigen::Index n,
                      std::size_t random_directions = 64, std::uint64_t seed = 7);

class NestedFamily {
 public:
  using RegionFn = std::function<Domain(double)>;
  using NormFn = std::function<NormKind(double)>;

  /// Throws ConfigError unless zeta_grid is strictly decreasing in (0, 1/2]
  /// and region(z1) is inside region(z2) whenever z1 >= z2.
  static NestedFamily create(std::string name, std::vector<double> zeta_grid, RegionFn region, NormFn norm,
                             NormKind reference);

  const std::string& name() const { return name_; }
  const std::vector<double>& zeta_grid() const { return zeta_grid_; }
  Domain region(double zeta) const { return region_(zeta); }
  NormKind norm(double zeta) const { return norm_(zeta); }
  const NormKind& reference() const { return reference_; }
  /// Largest zeta in (0, max grid zeta] whose region contains x (0 if none).
  double depth(const Vector& x) const;

 private:
  NestedFamily() = default;
  std::string name_;
  std::vector<double> zeta_grid_;
  RegionFn region_;
  NormFn norm_;
  NormKind reference_ = NormKind::l1();
};

/// Regions {x in domain : x >= zeta}; L1 norms scaled by
/// protein_scaling(alphas, eps(zeta)), measured against eps = 0.
NestedFamily protein_family(const SystemModel& model, const ProteinSynthesisParams& p,
                            std::vector<double> zeta_grid);
/// eps(zeta) used by protein_family.
double protein_family_epsilon(const ProteinSynthesisParams& p, double zeta);

/// Regions [zeta p, (1 - zeta) p]; L1 norms scaled by a diagonal that makes
/// every column coefficient negative on the region, measured against L1.
NestedFamily phosphorelay_family(const PhosphorelayParams& p, std::vector<double> zeta_grid);
Vector phosphorelay_family_scaling(const PhosphorelayParams& p, double zeta);

struct EntryCheck {
  std::vector<double> tau_grid{0.5, 1.0, 2.0, 4.0};
  std::size_t pair_samples = 16;
  double horizon = 20.0;
  double t1 = 0.0;
  std::uint64_t seed = 1;
  SolverConfig solver = certify_solver_defaults();
};

struct NestedZetaRow {
  double zeta = 0.0;
  double grid_sup_mu = 0.0;
  double deviation = 0.0;
  bool from_entry = false;
};

struct NestedReport {
  Verdict verdict = Verdict::Fail;
  std::vector<NestedZetaRow> rows;
  bool measure_ok = false;
  bool deviation_ok = false;
  bool entry_ok = false;
  /// (tau, zeta(tau)) with zeta(tau) the largest zeta whose region every
  /// sampled trajectory occupies on [t1 + tau, t1 + horizon].
  std::vector<std::pair<double, double>> entry;
  std::string diagnostic;
};

NestedReport check_nested_contraction(const SystemModel& model, const NestedFamily& family, const GridSpec& grid,
                                      const EntryCheck& entry);

struct Face {
  Eigen::Index axis = 0;
  bool upper = false;
};

struct IcOptions {
  std::vector<double> tau_grid{0.1, 0.5, 1.0};
  /// Starting points on the boundary; generated from the grid points on
  /// critical faces when empty.
  std::vector<Vector> boundary_samples;
  SolverConfig solver = certify_solver_defaults();
};

struct IcReport {
  Verdict verdict = Verdict::Fail;
  double interior_sup_mu = 0.0;
  bool interior_ok = false;
  /// Faces with a relative-interior grid point where mu >= -kStrictMargin.
  std::vector<Face> critical_faces;
  /// (tau, d(tau)): min over boundary samples of the distance from x(tau)
  /// to the critical faces.
  std::vector<std::pair<double, double>> distance;
  bool repulsion_ok = false;
  bool distance_monotone = false;
  std::size_t boundary_samples = 0;
};

/// Interior grid points must have mu < 0; trajectories started on faces
/// where the measure vanishes must move off them. Time-invariant models only.
IcReport check_interior_contractive(const SystemModel& model, const NormKind& norm, const GridSpec& grid,
                                    const IcOptions& opts = {});

struct EquilibriumOptions {
  double horizon = 200.0;
  std::size_t starts = 20;
  std::uint64_t seed = 3;
  std::size_t max_newton = 50;
  SolverConfig solver{};
};

struct EquilibriumReport {
  Vector e;
  /// |f(e)|_inf
  double residual = 0.0;
  bool interior = false;
  /// max distance (inf-norm) between the refined limits of the starts and e.
  double spread = 0.0;
  std::size_t starts = 0;
};

/// Integrates from the domain center, refines with Newton, and checks that
/// every random start converges to the same point within tol. Throws
/// NumericalError on Newton failure or on two distinct limits.
EquilibriumReport unique_equilibrium(const SystemModel& model, double tol, const EquilibriumOptions& opts = {});

}  // namespace gcs
