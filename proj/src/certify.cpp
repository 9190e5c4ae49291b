#include "gcs/certify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "gcs/errors.hpp"
#include "parallel.hpp"

namespace gcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One bound comparison: observed distance d at elapsed time `elapsed`
// against factor * e^{-elapsed l} * |a - b|.
struct Comparison {
  double t2 = 0.0;
  double t_eval = 0.0;
  double elapsed = 0.0;
  double factor = 1.0;
};

struct Sample {
  double rate = kInf;
  double margin = kInf;
  Witness rate_witness;
  Witness margin_witness;
  bool has_rate = false;
  bool has_margin = false;
  std::size_t comparisons = 0;
};

// Absolute allowance for integration error in a distance, in units of the
// chosen norm.
double absolute_slack(const SystemModel& model, const CertificateQuery& q) {
  const auto& dom = model.domain();
  double scale = 1.0;
  for (Eigen::Index i = 0; i < dom.dim(); ++i) {
    if (std::isfinite(dom.upper()[i])) scale = std::max(scale, std::abs(dom.upper()[i]));
    if (std::isfinite(dom.lower()[i])) scale = std::max(scale, std::abs(dom.lower()[i]));
  }
  const double unit = std::max(1.0, vector_norm(q.norm, Vector::Ones(dom.dim())));
  return 100.0 * (q.solver.abs_tol + q.solver.rel_tol * scale) * unit;
}

std::vector<double> time_grid(double t1, double horizon, double h) {
  const auto k = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  std::vector<double> g;
  g.reserve(k + 1);
  for (std::size_t i = 0; i <= k; ++i) g.push_back(std::min(t1 + static_cast<double>(i) * h, t1 + horizon));
  g.back() = t1 + horizon;
  return g;
}

std::vector<Comparison> comparisons_for(const CertificateQuery& q, double t1) {
  const double h = q.step();
  const double end = t1 + q.horizon;
  const auto grid = time_grid(t1, q.horizon, h);
  std::vector<Comparison> out;
  auto push = [&](double t2, double te, double elapsed, double factor) {
    out.push_back({t2, te, elapsed, factor});
  };
  switch (q.kind) {
    case CertificateKind::NE:
      for (double t : grid) push(t, t, 0.0, 1.0);
      break;
    case CertificateKind::SO:
      for (double t : grid) push(t, t, t - t1, 1.0 + q.epsilon);
      break;
    case CertificateKind::ST:
    case CertificateKind::SOST: {
      const double eps = q.kind == CertificateKind::ST ? 0.0 : q.epsilon;
      if (q.kind == CertificateKind::SOST && q.sost_form == SostForm::Delayed) {
        push(t1 + q.tau, t1 + q.tau, q.tau, 1.0 + eps);
        for (double t : grid)
          if (t > t1 + q.tau) push(t, t, t - t1, 1.0 + eps);
        break;
      }
      const double factor = (q.kind == CertificateKind::SOST && q.sost_form == SostForm::TauOvershoot)
                                ? 1.0 + q.tau
                                : 1.0 + eps;
      for (double t2 : grid) {
        const double te = t2 + q.tau;
        if (te > end + 1e-12 * std::max(1.0, std::abs(end))) break;
        push(t2, std::min(te, end), t2 - t1, factor);
      }
      break;
    }
    default:
      throw ConfigError("comparison grid requested for " + to_string(q.kind));
  }
  return out;
}

Sample check_pair(const SystemModel& model, const CertificateQuery& q, const SamplePair& pair,
                  double abs_slack) {
  Sample s;
  const double d0 = vector_norm(q.norm, pair.a - pair.b);
  for (double t1 : q.t1_samples) {
    const auto comps = comparisons_for(q, t1);
    std::vector<double> times;
    times.reserve(comps.size() + 1);
    times.push_back(t1);
    for (const auto& c : comps) times.push_back(c.t_eval);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const auto dist = flow_distance(model, t1, pair.a, pair.b, q.norm, times, q.solver);

    for (const auto& c : comps) {
      auto it = std::lower_bound(dist.begin(), dist.end(), c.t_eval,
                                 [](const auto& p, double t) { return p.first < t; });
      if (it == dist.end() || it->first != c.t_eval) throw NumericalError("missing distance sample");
      const double d = it->second;
      ++s.comparisons;
      if (d < q.distance_floor) continue;
      const double base = c.factor * d0;
      const double rate_for_margin = q.kind == CertificateKind::NE ? 0.0 : q.rate_floor;
      const double bound = base * std::exp(-c.elapsed * rate_for_margin);
      const double margin = std::log(bound + abs_slack) - std::log(d);
      Witness w{pair.a, pair.b, t1, c.t2, d, bound};
      if (margin < s.margin) {
        s.margin = margin;
        s.margin_witness = w;
        s.has_margin = true;
      }
      if (q.kind != CertificateKind::NE && c.elapsed > 0.0) {
        const double rate = (std::log(base * (1.0 + q.numeric_slack) + abs_slack) - std::log(d)) / c.elapsed;
        if (rate < s.rate) {
          s.rate = rate;
          s.rate_witness = w;
          s.has_rate = true;
        }
      }
    }
  }
  return s;
}

GcsCertificateReport run_check(const SystemModel& model, const CertificateQuery& q) {
  q.validate();
  if (q.norm.dimension() && *q.norm.dimension() != model.dim())
    throw ConfigError("norm scaling dimension does not match the model");
  std::vector<SamplePair> pairs = q.pairs;
  if (pairs.empty()) {
    pairs = sample_pairs(model.domain(), q.pair_samples, q.seed);
  } else {
    pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                               [](const SamplePair& p) { return p.a == p.b; }),
                pairs.end());
  }
  if (pairs.empty()) throw ConfigError("degenerate samples: no pair with a != b");
  for (const auto& p : pairs) {
    if (p.a.size() != model.dim() || p.b.size() != model.dim())
      throw ConfigError("sample pair dimension does not match the model");
  }

  const double abs_slack = absolute_slack(model, q);
  std::vector<Sample> results(pairs.size());
  detail::parallel_for(pairs.size(), q.jobs,
                       [&](std::size_t i) { results[i] = check_pair(model, q, pairs[i], abs_slack); });

  GcsCertificateReport r;
  r.kind = q.kind;
  r.norm = q.norm.describe();
  r.tau = q.tau;
  r.epsilon = q.epsilon;
  r.seed = q.seed;
  r.pairs_checked = pairs.size();
  r.rate = q.kind == CertificateKind::NE ? std::numeric_limits<double>::quiet_NaN() : kInf;
  r.worst_margin = kInf;
  std::optional<Witness> rate_w, margin_w;
  for (const auto& s : results) {
    r.comparisons += s.comparisons;
    if (s.has_margin && s.margin < r.worst_margin) {
      r.worst_margin = s.margin;
      margin_w = s.margin_witness;
    }
    if (s.has_rate && s.rate < r.rate) {
      r.rate = s.rate;
      rate_w = s.rate_witness;
    }
  }
  const bool margin_ok = r.worst_margin >= -q.numeric_slack;
  const bool rate_ok = q.kind == CertificateKind::NE || r.rate > q.rate_floor;
  r.verdict = margin_ok && rate_ok ? Verdict::Pass : Verdict::Fail;
  if (!margin_ok || q.kind == CertificateKind::NE) {
    r.witness = margin_w;
  } else {
    r.witness = rate_w ? rate_w : margin_w;
  }
  return r;
}

}  // namespace

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::SOST: return "SOST";
    case CertificateKind::SO: return "SO";
    case CertificateKind::ST: return "ST";
    case CertificateKind::NE: return "NE";
    case CertificateKind::SWE: return "SWE";
    case CertificateKind::Entrainment: return "Entrainment";
  }
  return "?";
}

std::string to_string(Verdict v) { return v == Verdict::Pass ? "Pass" : "Fail"; }

CertificateKind parse_certificate_kind(const std::string& s) {
  std::string l;
  for (char c : s) l.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (l == "sost") return CertificateKind::SOST;
  if (l == "so") return CertificateKind::SO;
  if (l == "st") return CertificateKind::ST;
  if (l == "ne") return CertificateKind::NE;
  if (l == "swe") return CertificateKind::SWE;
  if (l == "entrainment") return CertificateKind::Entrainment;
  throw ConfigError("unknown certificate kind '" + s + "'");
}

SolverConfig certify_solver_defaults() {
  SolverConfig c;
  c.rel_tol = 1e-10;
  c.abs_tol = 1e-12;
  return c;
}

void CertificateQuery::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!finite_nonneg(tau)) throw ConfigError("tau must be finite and non-negative");
  if (!finite_nonneg(epsilon)) throw ConfigError("epsilon must be finite and non-negative");
  if (!(delta >= 0.0)) throw ConfigError("delta must be non-negative");
  if (time_step < 0.0 || !std::isfinite(time_step)) throw ConfigError("time_step must be non-negative");
  if (t1_samples.empty()) throw ConfigError("at least one t1 sample is required");
  for (double t : t1_samples)
    if (!std::isfinite(t)) throw ConfigError("t1 samples must be finite");
  if (pairs.empty() && pair_samples == 0) throw ConfigError("pair_samples must be positive");
  if (!(rate_floor > 0.0) || !(numeric_slack >= 0.0) || !(distance_floor >= 0.0))
    throw ConfigError("rate_floor must be positive and slacks non-negative");
  if (jobs == 0) throw ConfigError("jobs must be at least 1");
  solver.validate();
  switch (kind) {
    case CertificateKind::SOST:
      if (!(tau > 0.0)) throw ConfigError("SOST requires tau > 0");
      if (sost_form != SostForm::TauOvershoot && !(epsilon > 0.0)) throw ConfigError("SOST requires epsilon > 0");
      if (!(horizon > tau)) throw ConfigError("horizon must exceed tau");
      break;
    case CertificateKind::ST:
      if (!(tau > 0.0)) throw ConfigError("ST requires tau > 0");
      if (!(horizon > tau)) throw ConfigError("horizon must exceed tau");
      break;
    case CertificateKind::SO:
      if (!(epsilon > 0.0)) throw ConfigError("SO requires epsilon > 0");
      break;
    case CertificateKind::SWE:
      if (!(delta > 0.0)) throw ConfigError("SWE requires delta > 0");
      break;
    case CertificateKind::NE:
      break;
    case CertificateKind::Entrainment:
      throw ConfigError("entrainment is checked with check_entrainment");
  }
}

GcsCertificateReport check_sost(const SystemModel& model, const CertificateQuery& q) {
  CertificateQuery c = q;
  c.kind = CertificateKind::SOST;
  return run_check(model, c);
}

GcsCertificateReport check_st(const SystemModel& model, const CertificateQuery& q) {
  CertificateQuery c = q;
  c.kind = CertificateKind::ST;
  c.epsilon = 0.0;
  return run_check(model, c);
}

GcsCertificateReport check_so(const SystemModel& model, const CertificateQuery& q) {
  CertificateQuery c = q;
  c.kind = CertificateKind::SO;
  c.tau = 0.0;
  return run_check(model, c);
}

GcsCertificateReport check_ne(const SystemModel& model, const CertificateQuery& q) {
  CertificateQuery c = q;
  c.kind = CertificateKind::NE;
  return run_check(model, c);
}

GcsCertificateReport check_certificate(const SystemModel& model, const CertificateQuery& q) {
  switch (q.kind) {
    case CertificateKind::SOST: return check_sost(model, q);
    case CertificateKind::SO: return check_so(model, q);
    case CertificateKind::ST: return check_st(model, q);
    case CertificateKind::NE: return check_ne(model, q);
    default: throw ConfigError("check_certificate does not handle " + to_string(q.kind));
  }
}

std::vector<double> jacobian_time_samples(const SystemModel& model, double horizon, std::size_t count) {
  if (model.time_invariant()) return {0.0};
  count = std::max<std::size_t>(count, 2);
  std::vector<double> ts;
  const double span = model.period() ? *model.period() : horizon;
  const double step = span / static_cast<double>(model.period() ? count : count - 1);
  for (std::size_t i = 0; i < count; ++i) ts.push_back(static_cast<double>(i) * step);
  return ts;
}

SweReport check_swe(const SystemModel& model, const CertificateQuery& query) {
  CertificateQuery q = query;
  q.kind = CertificateKind::SWE;
  q.validate();
  std::vector<SamplePair> pairs = q.pairs.empty() ? sample_pairs(model.domain(), q.pair_samples, q.seed) : q.pairs;
  pairs.erase(std::remove_if(pairs.begin(), pairs.end(), [](const SamplePair& p) { return p.a == p.b; }),
              pairs.end());
  if (pairs.empty()) throw ConfigError("degenerate samples: no pair with a != b");

  const double abs_slack = absolute_slack(model, q);
  const double h = q.step();
  struct PairSwe {
    double tau0 = kInf;
    double amp = 0.0;
  };
  std::vector<PairSwe> res(pairs.size());
  detail::parallel_for(pairs.size(), q.jobs, [&](std::size_t i) {
    const auto& p = pairs[i];
    const double d0 = vector_norm(q.norm, p.a - p.b);
    PairSwe out;
    for (double t0 : q.t1_samples) {
      const auto grid = time_grid(t0, q.horizon, h);
      const auto dist = flow_distance(model, t0, p.a, p.b, q.norm, grid, q.solver);
      double tau0 = q.horizon;
      for (std::size_t k = 0; k < dist.size(); ++k) {
        out.amp = std::max(out.amp, dist[k].second / d0);
        if (dist[k].second > (1.0 + q.delta) * (1.0 + q.numeric_slack) * d0 + abs_slack) {
          tau0 = k == 0 ? 0.0 : dist[k - 1].first - t0;
          break;
        }
      }
      out.tau0 = std::min(out.tau0, tau0);
    }
    res[i] = out;
  });

  SweReport r;
  r.delta = q.delta;
  r.horizon = q.horizon;
  r.seed = q.seed;
  r.tau0 = q.horizon;
  for (const auto& p : res) {
    r.tau0 = std::min(r.tau0, p.tau0);
    r.max_amplification = std::max(r.max_amplification, p.amp);
  }
  double lip = 0.0;
  const auto pts = grid_points(model.domain(), GridSpec::default_for(model.dim()));
  for (double t : jacobian_time_samples(model, q.horizon, 16)) {
    for (const auto& x : pts) lip = std::max(lip, induced_norm(q.norm, model.jacobian(t, x)));
  }
  r.lipschitz = lip;
  r.gronwall_tau0 = lip > 0.0 ? std::log1p(q.delta) / lip : kInf;
  r.verdict = r.tau0 > 0.0 ? Verdict::Pass : Verdict::Fail;
  return r;
}

EntrainmentReport check_entrainment(const SystemModel& model, const std::vector<Vector>& x0_samples,
                                    const EntrainmentOptions& opts) {
  double period = 0.0;
  if (opts.period) {
    period = *opts.period;
  } else if (model.period()) {
    period = *model.period();
  } else if (model.time_invariant()) {
    period = 1.0;
  } else {
    throw ConfigError("entrainment requires a periodic model or an explicit period");
  }
  if (!(std::isfinite(period) && period > 0.0)) throw ConfigError("period must be positive");
  if (x0_samples.empty()) throw ConfigError("entrainment needs at least one initial condition");
  if (opts.window_periods == 0 || opts.samples_per_period == 0)
    throw ConfigError("window_periods and samples_per_period must be positive");
  if (!(opts.tol > 0.0)) throw ConfigError("tol must be positive");
  const double wp = static_cast<double>(opts.window_periods);
  if (!(opts.horizon >= (wp + 1.0) * period))
    throw ConfigError("horizon must cover the residual window plus one period");

  const double end = opts.t0 + opts.horizon;
  const double w0 = end - (wp + 1.0) * period;
  const std::size_t nwin = opts.window_periods * opts.samples_per_period + 1;
  std::vector<double> window(nwin);
  for (std::size_t k = 0; k < nwin; ++k)
    window[k] = w0 + wp * period * static_cast<double>(k) / static_cast<double>(nwin - 1);
  std::vector<double> times = window;
  for (double t : window) times.push_back(std::min(t + period, end));
  for (std::size_t k = 0; k <= opts.samples_per_period; ++k)
    times.push_back(end - period + period * static_cast<double>(k) / static_cast<double>(opts.samples_per_period));
  for (auto& t : times) t = std::clamp(t, opts.t0, end);

  EntrainmentReport r;
  r.period = period;
  std::vector<std::vector<Vector>> window_states;
  for (std::size_t i = 0; i < x0_samples.size(); ++i) {
    const Trajectory traj = integrate(model, opts.t0, x0_samples[i], end, opts.solver, times);
    auto at = [&](double t) -> const Vector& {
      auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
      return traj.states[static_cast<std::size_t>(it - traj.times.begin())];
    };
    double res = 0.0;
    std::vector<Vector> ws;
    ws.reserve(nwin);
    for (double t : window) {
      res = std::max(res, (at(std::min(t + period, end)) - at(t)).cwiseAbs().maxCoeff());
      ws.push_back(at(t));
    }
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
    r.final_states.push_back(traj.final_state);
    window_states.push_back(std::move(ws));
    if (i == 0) {
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] >= end - period) {
          r.orbit_times.push_back(traj.times[k]);
          r.orbit_states.push_back(traj.states[k]);
        }
      }
    }
  }
  for (std::size_t i = 1; i < window_states.size(); ++i) {
    for (std::size_t k = 0; k < nwin; ++k)
      r.orbit_spread = std::max(r.orbit_spread, (window_states[i][k] - window_states[0][k]).cwiseAbs().maxCoeff());
  }
  r.verdict = r.max_residual < opts.tol && r.orbit_spread < opts.tol ? Verdict::Pass : Verdict::Fail;
  return r;
}

}  // namespace gcs
