#pragma once

// The variational system x' = f(x), dx' = J(x) dx and the tangent-vector
// (Finsler-type) decay check built on it.

#include <iosfwd>
#include <vector>

#include "gcs/certify.hpp"
#include "gcs/integrate.hpp"
#include "gcs/measure.hpp"
#include "gcs/models.hpp"
#include "gcs/sampling.hpp"

namespace gcs {

struct VariationalSeries {
  std::vector<double> times;
  std::vector<Vector> x;
  std::vector<Vector> dx;
  SolverStats stats;
};

/// The 2n-dimensional augmented model; dx is unconstrained. Time-invariant
/// models only.
SystemModel make_variational_model(const SystemModel& model);

/// Integrates the augmented system from (x0, dx0) on [0, horizon]. With no
/// sample times, 201 uniform samples are reported.
VariationalSeries integrate_variational(const SystemModel& model, const Vector& x0, const Vector& dx0,
                                        double horizon, const SolverConfig& cfg = {},
                                        std::vector<double> sample_times = {});

/// 9 Chebyshev-Lobatto points (1 - cos(pi k / 8)) / 2 on [0, 1].
std::vector<double> default_r_samples();

struct FinslerOptions {
  double tau = 0.5;
  double horizon = 10.0;
  /// Spacing of the t grid; zero selects horizon / 200.
  double time_step = 0.0;
  std::vector<double> r_samples = default_r_samples();
  double rate_floor = 1e-4;
  double numeric_slack = 1e-9;
  double distance_floor = 1e-13;
  SolverConfig solver = certify_solver_defaults();
  std::size_t jobs = 1;
};

struct FinslerReport {
  Verdict verdict = Verdict::Fail;
  /// Common rate l-hat over all r samples.
  double rate = 0.0;
  /// min over samples of log(bound at rate_floor) - log(|dx|).
  double worst_margin = 0.0;
  /// Per-r fitted rates, in r_samples order.
  std::vector<double> rates;
  std::size_t comparisons = 0;
};

/// For each r: x(0) = (1 - r) a + r b, dx(0) = b - a; certifies
/// |dx(t + tau)| <= e^{-t l} |dx(0)| for t >= 0 with a common l > rate_floor.
/// Throws ConfigError when a == b or either point is outside the domain.
FinslerReport check_finsler_decay(const SystemModel& model, const Vector& a, const Vector& b, const NormKind& norm,
                                  const FinslerOptions& opts = {});

/// Aggregate over pairs: Pass iff every pair passes; rate is the minimum.
FinslerReport check_finsler_pairs(const SystemModel& model, const std::vector<SamplePair>& pairs,
                                  const NormKind& norm, const FinslerOptions& opts = {});

struct SegmentBound {
  /// |x(t, b) - x(t, a)|
  double direct = 0.0;
  /// Trapezoid quadrature of |w(t, r)| over the r samples.
  double integral = 0.0;
};

/// Compares the flow distance at time t with the integral of the tangent
/// vectors along the segment from a to b.
SegmentBound segment_integral_bound(const SystemModel& model, const Vector& a, const Vector& b, const NormKind& norm,
                                    double t, const std::vector<double>& r_samples = default_r_samples(),
                                    const SolverConfig& cfg = certify_solver_defaults());

/// Writes `t,x1..xn,dx1..dxn,|dx|` with a header row.
void write_variational_csv(std::ostream& out, const VariationalSeries& series, const NormKind& norm);

}  // namespace gcs
