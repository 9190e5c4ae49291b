#include "gcs/integrate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "gcs/errors.hpp"

namespace gcs {

void SolverConfig::validate() const {
  if (!(rel_tol >= 1e-12) || !(abs_tol > 0.0) || !(max_step > 0.0) || !(event_tol > 0.0) ||
      !(domain_slack >= 0.0) || max_steps == 0 || !(fixed_step >= 0.0)) {
    throw ConfigError("solver config: tolerances must be positive with rel_tol >= 1e-12");
  }
}

std::vector<double> uniform_times(double t0, double t1, std::size_t count) {
  if (count < 2 || !(t1 >= t0)) throw ConfigError("uniform_times: need count >= 2 and t1 >= t0");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = t1;
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau with Hairer's dense-output coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Step {
  double t = 0.0;
  double h = 0.0;
  Vector x_new;
  Vector k7;
  double err = 0.0;
  std::array<Vector, 5> cont;  // dense-output coefficients

  Vector interpolate(double s) const {
    const double theta = (s - t) / h;
    const double theta1 = 1.0 - theta;
    return cont[0] + theta * (cont[1] + theta1 * (cont[2] + theta * (cont[3] + theta1 * cont[4])));
  }
};

class Dopri5 {
 public:
  Dopri5(const SystemModel& model, const SolverConfig& cfg) : model_(model), cfg_(cfg) {}

  Vector rhs(double t, const Vector& x) {
    ++evals_;
    return model_.f(t, x);
  }

  Step attempt(double t, const Vector& x, const Vector& k1, double h) {
    const Vector k2 = rhs(t + c2 * h, x + h * (a21 * k1));
    const Vector k3 = rhs(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const Vector k4 = rhs(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = rhs(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = rhs(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Step s;
    s.t = t;
    s.h = h;
    s.x_new = x + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    s.k7 = rhs(t + h, s.x_new);

    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * s.k7);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double sk = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(x[i]), std::abs(s.x_new[i]));
      acc += (err[i] / sk) * (err[i] / sk);
    }
    s.err = std::sqrt(acc / static_cast<double>(x.size()));

    const Vector ydiff = s.x_new - x;
    const Vector bspl = h * k1 - ydiff;
    s.cont[0] = x;
    s.cont[1] = ydiff;
    s.cont[2] = bspl;
    s.cont[3] = ydiff - h * s.k7 - bspl;
    s.cont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * s.k7);
    return s;
  }

  double initial_step(double t, const Vector& x, const Vector& f0, double span) {
    const auto n = static_cast<double>(x.size());
    const Vector sk = (cfg_.abs_tol + cfg_.rel_tol * x.array().abs()).matrix();
    const double dnf = std::sqrt((f0.array() / sk.array()).square().sum() / n);
    const double dny = std::sqrt((x.array() / sk.array()).square().sum() / n);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min({h, cfg_.max_step, span});
    const Vector f1 = rhs(t + h, x + h * f0);
    const double der2 = std::sqrt(((f1 - f0).array() / sk.array()).square().sum() / n) / h;
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, cfg_.max_step, span});
  }

  std::size_t evaluations() const { return evals_; }

 private:
  const SystemModel& model_;
  const SolverConfig& cfg_;
  std::size_t evals_ = 0;
};

// Earliest crossing of a switching surface inside the step, if any.
std::optional<double> locate_event(const SystemModel& model, const Step& step, const Vector& x0,
                                   double event_tol) {
  std::optional<double> earliest;
  for (const auto& g : model.switching()) {
    const double g0 = g(x0);
    const double g1 = g(step.x_new);
    if (g0 == 0.0) continue;
    if (g1 != 0.0 && (g0 > 0.0) == (g1 > 0.0)) continue;
    double lo = step.t, hi = step.t + step.h;
    while (hi - lo > event_tol) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(step.interpolate(mid));
      if ((gm > 0.0) == (g0 > 0.0) && gm != 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (hi - step.t <= event_tol) continue;  // crossing at the step start: already handled
    if (!earliest || hi < *earliest) earliest = hi;
  }
  return earliest;
}

std::string describe_state(const Vector& x) {
  std::ostringstream out;
  out.precision(10);
  out << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ")";
  return out.str();
}

}  // namespace

Trajectory integrate(const SystemModel& model, double t0, const Vector& x0, double t1,
                     const SolverConfig& cfg, std::vector<double> sample_times) {
  cfg.validate();
  if (x0.size() != model.dim()) throw ConfigError("initial state has the wrong dimension");
  if (!x0.allFinite()) throw ConfigError("initial state is not finite");
  if (!model.domain().contains(x0, 1e-12)) {
    throw ConfigError("initial state " + describe_state(x0) + " is outside the domain of " + model.name());
  }
  if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) throw ConfigError("integrate: need t1 >= t0");
  std::sort(sample_times.begin(), sample_times.end());
  sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());
  if (!sample_times.empty() && (sample_times.front() < t0 || sample_times.back() > t1)) {
    throw ConfigError("sample times must lie in [t0, t1]");
  }

  Trajectory traj;
  traj.model = model.name();
  traj.t0 = t0;
  traj.t1 = t1;
  traj.times = sample_times;
  traj.states.reserve(sample_times.size());

  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] <= t0) {
    traj.states.push_back(x0);
    ++next;
  }

  Dopri5 stepper(model, cfg);
  double t = t0;
  Vector x = x0;
  if (t1 == t0) {
    traj.final_state = x0;
    return traj;
  }

  Vector k1 = stepper.rhs(t, x);
  const bool fixed = cfg.fixed_step > 0.0;
  double h = fixed ? cfg.fixed_step : stepper.initial_step(t, x, k1, t1 - t0);
  double facold = 1e-4;
  std::optional<double> forced_end;  // step truncated to a located event
  int refinements = 0;

  constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;

  while (t < t1) {
    if (traj.stats.steps + traj.stats.rejections >= cfg.max_steps) {
      throw NumericalError("maximum number of steps exceeded at t=" + format_double(t));
    }
    double step = forced_end ? *forced_end - t : std::min({h, cfg.max_step, t1 - t});
    if (t + step > t1 || (t1 - (t + step)) < 1e-14 * std::max(1.0, std::abs(t1))) step = t1 - t;
    if (step <= 1e-14 * std::max(1.0, std::abs(t))) {
      throw NumericalError("step size underflow at t=" + format_double(t) + ", last valid state " +
                           describe_state(x));
    }

    Step s = stepper.attempt(t, x, k1, step);
    if (!s.x_new.allFinite()) {
      throw NumericalError("non-finite state produced at t=" + format_double(t));
    }
    const bool accept = fixed || forced_end || s.err <= 1.0;
    if (!accept) {
      ++traj.stats.rejections;
      const double fac11 = std::pow(s.err, expo1);
      h = step / std::min(facc1, fac11 / safe);
      continue;
    }

    bool crossed = false;
    if (!model.switching().empty()) {
      // The interpolant of a step that straddles a switching surface is
      // polluted by the other branch, so the located time is refined on
      // successively shorter steps.
      const auto te = locate_event(model, s, x, cfg.event_tol);
      if (te && *te < t + step - cfg.event_tol && refinements < 60) {
        forced_end = *te;
        ++refinements;
        continue;
      }
      crossed = te.has_value();
    }

    ++traj.stats.steps;
    const double t_new = step == t1 - t ? t1 : t + step;
    while (next < sample_times.size() && sample_times[next] <= t_new) {
      Vector xs = sample_times[next] == t_new ? s.x_new : s.interpolate(sample_times[next]);
      if (!model.domain().contains(xs, cfg.domain_slack)) {
        throw NumericalError("trajectory left the domain of " + model.name() + " at t=" +
                             format_double(sample_times[next]) + ": " + describe_state(xs));
      }
      traj.states.push_back(std::move(xs));
      ++next;
    }
    if (!model.domain().contains(s.x_new, cfg.domain_slack)) {
      throw NumericalError("trajectory left the domain of " + model.name() + " at t=" +
                           format_double(t_new) + ": " + describe_state(s.x_new));
    }

    if (forced_end || crossed) {
      if (crossed) traj.events.push_back(t_new);
      refinements = 0;
      x = s.x_new;
      t = t_new;
      k1 = stepper.rhs(t, x);
      forced_end.reset();
      continue;
    }

    if (!fixed) {
      const double fac11 = std::pow(std::max(s.err, 1e-300), expo1);
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      facold = std::max(s.err, 1e-4);
      h = step / fac;
    }
    x = s.x_new;
    k1 = s.k7;
    t = t_new;
  }

  traj.final_state = x;
  traj.stats.rhs_evaluations = stepper.evaluations();
  return traj;
}

std::vector<std::pair<double, double>> flow_distance(const SystemModel& model, double t0,
                                                     const Vector& a, const Vector& b,
                                                     const NormKind& norm,
                                                     const std::vector<double>& sample_times,
                                                     const SolverConfig& cfg) {
  if (sample_times.empty()) return {};
  const double t1 = *std::max_element(sample_times.begin(), sample_times.end());
  const Trajectory ta = integrate(model, t0, a, t1, cfg, sample_times);
  const Trajectory tb = integrate(model, t0, b, t1, cfg, sample_times);
  std::vector<std::pair<double, double>> out;
  out.reserve(ta.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    out.emplace_back(ta.times[i], vector_norm(norm, ta.states[i] - tb.states[i]));
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto n = traj.states.empty() ? traj.final_state.size() : traj.states.front().size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(traj.states[k][i]);
    out << "\n";
  }
}

}  // namespace gcs
