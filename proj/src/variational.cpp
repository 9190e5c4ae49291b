#include "gcs/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "gcs/errors.hpp"
#include "parallel.hpp"

namespace gcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_time_invariant(const SystemModel& model) {
  if (!model.time_invariant()) throw ConfigError("the variational checks apply to time-invariant models only");
}

double absolute_slack(const SystemModel& model, const SolverConfig& cfg, const NormKind& norm, double dx_scale) {
  const auto n = model.dim();
  const double unit = std::max(1.0, vector_norm(norm, Vector::Ones(n)));
  return 100.0 * (cfg.abs_tol + cfg.rel_tol * std::max(1.0, dx_scale)) * unit;
}

}  // namespace

SystemModel make_variational_model(const SystemModel& model) {
  require_time_invariant(model);
  const auto n = model.dim();
  Vector lo(2 * n), hi(2 * n);
  lo << model.domain().lower(), Vector::Constant(n, -kInf);
  hi << model.domain().upper(), Vector::Constant(n, kInf);

  ModelDefinition def;
  def.name = model.name() + "_variational";
  def.domain = Domain::box(lo, hi);
  def.f = [model, n](double t, const Vector& s) -> Vector {
    const Vector x = s.head(n);
    Vector out(2 * n);
    out << model.f(t, x), model.jacobian(t, x) * s.tail(n);
    return out;
  };
  def.jacobian = [model, n](double t, const Vector& s) -> Matrix {
    const Vector x = s.head(n);
    const Vector dx = s.tail(n);
    const Matrix j = model.jacobian(t, x);
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = j;
    out.bottomRightCorner(n, n) = j;
    // d(J(x) dx)/dx by central differences of J.
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      Vector xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      out.block(n, k, n, 1) = (model.jacobian(t, xp) - model.jacobian(t, xm)) * dx / (2.0 * h);
    }
    return out;
  };
  def.time_invariant = true;
  for (const auto& g : model.switching()) {
    def.switching.push_back([g, n](const Vector& s) { return g(s.head(n)); });
  }
  def.params = model.params();
  return SystemModel(std::move(def));
}

VariationalSeries integrate_variational(const SystemModel& model, const Vector& x0, const Vector& dx0, double horizon,
                                        const SolverConfig& cfg, std::vector<double> sample_times) {
  require_time_invariant(model);
  const auto n = model.dim();
  if (x0.size() != n || dx0.size() != n) throw ConfigError("x0 and dx0 must match the model dimension");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive");
  if (sample_times.empty()) sample_times = uniform_times(0.0, horizon, 201);
  Vector s0(2 * n);
  s0 << x0, dx0;
  const auto traj = integrate(make_variational_model(model), 0.0, s0, horizon, cfg, std::move(sample_times));
  VariationalSeries out;
  out.times = traj.times;
  out.stats = traj.stats;
  for (const auto& s : traj.states) {
    out.x.push_back(s.head(n));
    out.dx.push_back(s.tail(n));
  }
  return out;
}

std::vector<double> default_r_samples() {
  std::vector<double> r;
  for (int k = 0; k <= 8; ++k) r.push_back(0.5 * (1.0 - std::cos(std::numbers::pi * k / 8.0)));
  r.front() = 0.0;
  r.back() = 1.0;
  return r;
}

FinslerReport check_finsler_decay(const SystemModel& model, const Vector& a, const Vector& b, const NormKind& norm,
                                  const FinslerOptions& opts) {
  require_time_invariant(model);
  const auto n = model.dim();
  if (a.size() != n || b.size() != n) throw ConfigError("a and b must match the model dimension");
  if (a == b) throw ConfigError("a and b must differ");
  if (!model.domain().contains(a) || !model.domain().contains(b)) throw ConfigError("a and b must lie in the domain");
  if (!(opts.tau >= 0.0) || !(opts.horizon > opts.tau)) throw ConfigError("need 0 <= tau < horizon");
  if (opts.r_samples.empty()) throw ConfigError("r_samples must be non-empty");
  for (double r : opts.r_samples)
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("r samples must lie in [0, 1]");
  if (!(opts.rate_floor > 0.0)) throw ConfigError("rate_floor must be positive");
  opts.solver.validate();

  const double h = opts.time_step > 0.0 ? opts.time_step : opts.horizon / 200.0;
  std::vector<double> t2s;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (t + opts.tau > opts.horizon * (1.0 + 1e-12)) break;
    t2s.push_back(t);
  }
  std::vector<double> eval;
  for (double t : t2s) eval.push_back(std::min(t + opts.tau, opts.horizon));

  const Vector dx0 = b - a;
  const double d0 = vector_norm(norm, dx0);
  const double abs_slack = absolute_slack(model, opts.solver, norm, dx0.cwiseAbs().maxCoeff());

  struct PerR {
    double rate = kInf;
    double margin = kInf;
    std::size_t comparisons = 0;
  };
  std::vector<PerR> res(opts.r_samples.size());
  detail::parallel_for(res.size(), opts.jobs, [&](std::size_t i) {
    const double r = opts.r_samples[i];
    const Vector x0 = (1.0 - r) * a + r * b;
    const auto series = integrate_variational(model, x0, dx0, opts.horizon, opts.solver, eval);
    PerR out;
    for (std::size_t k = 0; k < t2s.size(); ++k) {
      auto it = std::lower_bound(series.times.begin(), series.times.end(), eval[k]);
      const double d = vector_norm(norm, series.dx[static_cast<std::size_t>(it - series.times.begin())]);
      ++out.comparisons;
      if (d < opts.distance_floor) continue;
      const double bound = d0 * std::exp(-t2s[k] * opts.rate_floor);
      out.margin = std::min(out.margin, std::log(bound + abs_slack) - std::log(d));
      if (t2s[k] > 0.0) {
        out.rate = std::min(out.rate, (std::log(d0 * (1.0 + opts.numeric_slack) + abs_slack) - std::log(d)) / t2s[k]);
      }
    }
    res[i] = out;
  });

  FinslerReport rep;
  rep.rate = kInf;
  rep.worst_margin = kInf;
  for (const auto& p : res) {
    rep.rates.push_back(p.rate);
    rep.rate = std::min(rep.rate, p.rate);
    rep.worst_margin = std::min(rep.worst_margin, p.margin);
    rep.comparisons += p.comparisons;
  }
  rep.verdict = rep.worst_margin >= -opts.numeric_slack && rep.rate > opts.rate_floor ? Verdict::Pass : Verdict::Fail;
  return rep;
}

FinslerReport check_finsler_pairs(const SystemModel& model, const std::vector<SamplePair>& pairs, const NormKind& norm,
                                  const FinslerOptions& opts) {
  if (pairs.empty()) throw ConfigError("no pairs to check");
  FinslerReport agg;
  agg.rate = kInf;
  agg.worst_margin = kInf;
  agg.verdict = Verdict::Pass;
  for (const auto& p : pairs) {
    if (p.a == p.b) continue;
    const auto r = check_finsler_decay(model, p.a, p.b, norm, opts);
    agg.rate = std::min(agg.rate, r.rate);
    agg.worst_margin = std::min(agg.worst_margin, r.worst_margin);
    agg.comparisons += r.comparisons;
    agg.rates.push_back(r.rate);
    if (r.verdict == Verdict::Fail) agg.verdict = Verdict::Fail;
  }
  if (agg.rates.empty()) throw ConfigError("degenerate samples: no pair with a != b");
  return agg;
}

SegmentBound segment_integral_bound(const SystemModel& model, const Vector& a, const Vector& b, const NormKind& norm,
                                    double t, const std::vector<double>& r_samples, const SolverConfig& cfg) {
  require_time_invariant(model);
  if (r_samples.size() < 2) throw ConfigError("quadrature needs at least two r samples");
  std::vector<double> rs = r_samples;
  std::sort(rs.begin(), rs.end());
  if (rs.front() != 0.0 || rs.back() != 1.0) throw ConfigError("r samples must include both endpoints");
  const Vector dx0 = b - a;
  std::vector<double> w;
  for (double r : rs) {
    const auto s = integrate_variational(model, (1.0 - r) * a + r * b, dx0, t, cfg, {t});
    w.push_back(vector_norm(norm, s.dx.back()));
  }
  SegmentBound out;
  for (std::size_t i = 0; i + 1 < rs.size(); ++i) out.integral += 0.5 * (w[i] + w[i + 1]) * (rs[i + 1] - rs[i]);
  const auto ta = integrate(model, 0.0, a, t, cfg, {t});
  const auto tb = integrate(model, 0.0, b, t, cfg, {t});
  out.direct = vector_norm(norm, tb.final_state - ta.final_state);
  return out;
}

void write_variational_csv(std::ostream& out, const VariationalSeries& series, const NormKind& norm) {
  const auto n = series.x.empty() ? Eigen::Index{0} : series.x.front().size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  for (Eigen::Index i = 0; i < n; ++i) out << ",dx" << (i + 1);
  out << ",norm_dx\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << format_double(series.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(series.x[k][i]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(series.dx[k][i]);
    out << "," << format_double(vector_norm(norm, series.dx[k])) << "\n";
  }
}

}  // namespace gcs
