#pragma once

// Empirical checks of the generalized contraction properties over sampled
// initial-condition pairs.
//
// A Pass is a falsification-style certificate: no counterexample was found
// at the chosen sampling. The definitions quantify over all pairs, all
// initial times and all elapsed times, which no finite check can cover.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcs/integrate.hpp"
#include "gcs/measure.hpp"
#include "gcs/models.hpp"
#include "gcs/sampling.hpp"

namespace gcs {

enum class CertificateKind { SOST, SO, ST, NE, SWE, Entrainment };
enum class Verdict { Pass, Fail };

/// Equivalent ways to state the SOST bound:
///  Standard:     |x(t2+tau) - y(t2+tau)| <= (1+eps) e^{-(t2-t1) l} |a-b|, t2 >= t1
///  TauOvershoot: the same with eps replaced by tau
///  Delayed:      |x(t) - y(t)| <= (1+eps) e^{-(t-t1) l} |a-b|, t >= t1 + tau
enum class SostForm { Standard, TauOvershoot, Delayed };

std::string to_string(CertificateKind kind);
std::string to_string(Verdict v);
/// Accepts "sost", "so", "st", "ne", "swe", "entrainment" (case-insensitive).
CertificateKind parse_certificate_kind(const std::string& s);

/// Solver settings used by the trajectory checks (tighter than the
/// integrator defaults so that distance ratios are not dominated by
/// integration error).
SolverConfig certify_solver_defaults();

struct CertificateQuery {
  CertificateKind kind = CertificateKind::SOST;
  NormKind norm = NormKind::l1();
  double tau = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double horizon = 10.0;
  std::size_t pair_samples = 64;
  std::vector<double> t1_samples{0.0};
  /// Spacing of the t2 grid; zero selects horizon / 200.
  double time_step = 0.0;
  std::uint64_t seed = 1;
  SostForm sost_form = SostForm::Standard;
  /// Fitted rates at or below this value do not certify.
  double rate_floor = 1e-4;
  /// Relative slack on every bound comparison.
  double numeric_slack = 1e-9;
  /// Distances below this are round-off and are excluded from rate fitting.
  double distance_floor = 1e-13;
  SolverConfig solver = certify_solver_defaults();
  std::size_t jobs = 1;
  /// Explicit pairs; when empty the sampler draws `pair_samples` pairs.
  std::vector<SamplePair> pairs;

  /// Throws ConfigError on violated invariants (tau > 0 for ST/SOST,
  /// epsilon > 0 for SO/SOST, horizon > tau, ...).
  void validate() const;
  double step() const { return time_step > 0.0 ? time_step : horizon / 200.0; }
};

struct Witness {
  Vector a;
  Vector b;
  double t1 = 0.0;
  double t2 = 0.0;
  /// Observed distance and the bound it was compared against.
  double observed = 0.0;
  double bound = 0.0;
};

struct GcsCertificateReport {
  CertificateKind kind = CertificateKind::SOST;
  std::string norm;
  double tau = 0.0;
  double epsilon = 0.0;
  Verdict verdict = Verdict::Fail;
  /// Fitted rate l-hat (NaN for NE).
  double rate = 0.0;
  /// min over comparisons of log(bound) - log(observed), where the bound
  /// uses rate_floor as the decay rate.
  double worst_margin = 0.0;
  std::optional<Witness> witness;
  std::uint64_t seed = 0;
  std::size_t pairs_checked = 0;
  std::size_t comparisons = 0;

  bool passed() const { return verdict == Verdict::Pass; }
};

GcsCertificateReport check_sost(const SystemModel& model, const CertificateQuery& q);
GcsCertificateReport check_st(const SystemModel& model, const CertificateQuery& q);
GcsCertificateReport check_so(const SystemModel& model, const CertificateQuery& q);
GcsCertificateReport check_ne(const SystemModel& model, const CertificateQuery& q);
/// Dispatches on q.kind (SOST, SO, ST, NE).
GcsCertificateReport check_certificate(const SystemModel& model, const CertificateQuery& q);

struct SweReport {
  double delta = 0.0;
  double horizon = 0.0;
  /// Largest grid time tau0 with amplification <= 1 + delta on [t0, t0 + tau0].
  double tau0 = 0.0;
  /// Grid estimate of sup ||J|| in the induced norm.
  double lipschitz = 0.0;
  /// ln(1 + delta) / L, the Gronwall lower bound on tau0.
  double gronwall_tau0 = 0.0;
  double max_amplification = 0.0;
  Verdict verdict = Verdict::Fail;
  std::uint64_t seed = 0;
};

/// Small-window expansion: q.kind must be SWE, q.delta > 0.
SweReport check_swe(const SystemModel& model, const CertificateQuery& q);

struct EntrainmentOptions {
  /// Forcing period; defaults to the model's period. Time-invariant models
  /// may be checked with any positive period.
  std::optional<double> period;
  double t0 = 0.0;
  double horizon = 30.0;
  double tol = 1e-4;
  /// Residuals are taken over t in [t0 + horizon - (window_periods + 1) T, t0 + horizon - T].
  std::size_t window_periods = 4;
  std::size_t samples_per_period = 50;
  SolverConfig solver = certify_solver_defaults();
};

struct EntrainmentReport {
  double period = 0.0;
  /// max_t |x(t + T) - x(t)|_inf per initial condition.
  std::vector<double> residuals;
  double max_residual = 0.0;
  /// max over initial conditions and window times of |x_i(t) - x_0(t)|_inf.
  double orbit_spread = 0.0;
  /// Last period of the first trajectory.
  std::vector<double> orbit_times;
  std::vector<Vector> orbit_states;
  std::vector<Vector> final_states;
  Verdict verdict = Verdict::Fail;
};

EntrainmentReport check_entrainment(const SystemModel& model, const std::vector<Vector>& x0_samples,
                                    const EntrainmentOptions& opts);

/// Time samples for Jacobian sweeps: one period for periodic models, the
/// listed t1 values otherwise.
std::vector<double> jacobian_time_samples(const SystemModel& model, double horizon, std::size_t count);

}  // namespace gcs
