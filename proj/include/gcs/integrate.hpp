#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output and location
// of switching-surface crossings.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gcs/measure.hpp"
#include "gcs/models.hpp"

namespace gcs {

struct SolverConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  /// Switching-time location accuracy.
  double event_tol = 1e-12;
  /// States may leave the model domain by at most this much.
  double domain_slack = 1e-7;
  std::size_t max_steps = 2'000'000;
  /// When positive, take fixed steps of this size with no error control.
  double fixed_step = 0.0;

  /// Throws ConfigError unless tolerances are positive and rel_tol >= 1e-12.
  void validate() const;
};

struct SolverStats {
  std::size_t steps = 0;
  std::size_t rejections = 0;
  std::size_t rhs_evaluations = 0;
};

struct Trajectory {
  std::string model;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;
  /// Located switching-surface crossing times.
  std::vector<double> events;
  /// State at t1.
  Vector final_state;
  SolverStats stats;

  std::size_t size() const { return times.size(); }
};

/// `count` equally spaced times covering [t0, t1] (count >= 2).
std::vector<double> uniform_times(double t0, double t1, std::size_t count);

/// Integrates the model from (t0, x0) to t1, reporting the dense-output
/// solution at `sample_times` (sorted and de-duplicated; all must lie in
/// [t0, t1]).
///
/// Throws ConfigError when x0 is outside the domain or the times are
/// inconsistent, and NumericalError on step-size underflow or when the
/// state leaves the domain by more than `cfg.domain_slack`.
Trajectory integrate(const SystemModel& model, double t0, const Vector& x0, double t1,
                     const SolverConfig& cfg, std::vector<double> sample_times);

/// (t, |x(t, t0, a) - x(t, t0, b)|) at the requested times.
std::vector<std::pair<double, double>> flow_distance(const SystemModel& model, double t0,
                                                     const Vector& a, const Vector& b,
                                                     const NormKind& norm,
                                                     const std::vector<double>& sample_times,
                                                     const SolverConfig& cfg = {});

/// Writes `t,x1,...,xn` with a header row and 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace gcs
