#include "gcs/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "gcs/errors.hpp"
#include "gcs/integrate.hpp"

namespace gcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_region(const SystemModel& model, const Domain& region) {
  if (region.dim() != model.dim()) throw ConfigError("region dimension does not match the model");
  if (!model.domain().contains(region)) throw ConfigError("region must lie inside the model domain");
}

std::vector<double> default_times(const SystemModel& model) { return jacobian_time_samples(model, 10.0, 16); }

double coefficient(NormTag tag, const Matrix& a, Eigen::Index j) {
  return tag == NormTag::L1 ? coeff_c(a, j) : coeff_d(a, j);
}

struct GridJacobian {
  Vector x;
  double t;
  Matrix j;
};

std::vector<GridJacobian> transformed_jacobians(const SystemModel& model, const Domain& region,
                                                const GridSpec& grid, const std::vector<double>& ts,
                                                const std::optional<Matrix>& p) {
  const auto pts = grid_points(region, grid);
  if (pts.empty()) throw ConfigError("empty grid");
  std::optional<Matrix> pinv;
  if (p) {
    if (p->rows() != model.dim() || p->cols() != model.dim())
      throw ConfigError("similarity matrix dimension does not match the model");
    pinv = NormKind::scaled(NormTag::L1, *p).scaling_inverse();
  }
  std::vector<GridJacobian> out;
  out.reserve(pts.size() * ts.size());
  for (double t : ts) {
    for (const auto& x : pts) {
      Matrix j = model.jacobian(t, x);
      if (p) j = (*p) * j * (*pinv);
      out.push_back({x, t, std::move(j)});
    }
  }
  return out;
}

PartitionReport check_partition(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                                const PartitionOptions& opts, NormTag tag) {
  const auto n = model.dim();
  partition.validate(n);
  const Domain region = opts.region.value_or(model.domain());
  require_region(model, region);
  const auto ts = opts.t_samples.empty() ? default_times(model) : opts.t_samples;
  const auto jac = transformed_jacobians(model, region, grid, ts, opts.similarity);

  PartitionReport r;
  r.cond1 = r.cond2 = true;
  r.max_s0 = -kInf;
  double max_sminus = -kInf;
  for (const auto& g : jac) {
    for (auto k : partition.s0) {
      const double c = coefficient(tag, g.j, k);
      r.max_s0 = std::max(r.max_s0, c);
      if (c > kStrictMargin && r.cond1) {
        r.cond1 = false;
        r.violations.push_back({1, k, g.x, g.t, c});
      }
    }
    for (auto j : partition.sminus) {
      const double c = coefficient(tag, g.j, j);
      max_sminus = std::max(max_sminus, c);
      if (!(c < -kStrictMargin) && r.cond2) {
        r.cond2 = false;
        r.violations.push_back({2, j, g.x, g.t, c});
      }
    }
  }
  r.delta = -max_sminus;

  // Coupling entry between i in S0 and z(i) in S-.
  auto coupling = [tag](const Matrix& a, Eigen::Index i, Eigen::Index z) {
    return tag == NormTag::L1 ? a(z, i) : std::abs(a(i, z));
  };
  auto first_failure = [&](Eigen::Index i, Eigen::Index z) -> const GridJacobian* {
    for (const auto& g : jac)
      if (!(coupling(g.j, i, z) > kStrictMargin)) return &g;
    return nullptr;
  };
  r.cond3 = true;
  for (auto i : partition.s0) {
    auto given = partition.zmap.find(i);
    std::vector<Eigen::Index> candidates =
        given != partition.zmap.end() ? std::vector<Eigen::Index>{given->second} : partition.sminus;
    const GridJacobian* failure = nullptr;
    bool found = false;
    for (auto z : candidates) {
      const GridJacobian* f = first_failure(i, z);
      if (!f) {
        r.zmap[i] = z;
        found = true;
        break;
      }
      if (!failure) failure = f;
    }
    if (!found) {
      r.cond3 = false;
      r.violations.push_back({3, i, failure->x, failure->t, coupling(failure->j, i, candidates.front())});
    }
  }
  r.verdict = r.cond1 && r.cond2 && r.cond3 ? Verdict::Pass : Verdict::Fail;
  return r;
}

Vector scaling_recipe(const Partition& partition, double eps, Eigen::Index n, bool inverse) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  partition.validate(n);
  Vector d = Vector::Ones(n);
  for (auto i : partition.s0) {
    auto it = partition.zmap.find(i);
    if (it == partition.zmap.end()) throw ConfigError("partition zmap must be set to construct a scaling");
    d[it->second] = inverse ? 1.0 / (1.0 - eps) : 1.0 - eps;
  }
  return d;
}

Vector newton_refine(const SystemModel& model, Vector x, std::size_t max_iter) {
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector fx = model.f(0.0, x);
    if (!fx.allFinite()) break;
    if (fx.cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, x.cwiseAbs().maxCoeff())) return x;
    const Matrix j = model.jacobian(0.0, x);
    Eigen::FullPivLU<Matrix> lu(j);
    if (!lu.isInvertible()) throw NumericalError("singular Jacobian during Newton refinement");
    const Vector step = lu.solve(fx);
    x -= step;
    if (!x.allFinite()) break;
    if (step.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) return x;
  }
  const Vector fx = model.f(0.0, x);
  if (x.allFinite() && fx.allFinite() && fx.cwiseAbs().maxCoeff() <= 1e-10) return x;
  throw NumericalError("Newton refinement did not converge");
}

}  // namespace

GridSupResult grid_sup_measure(const SystemModel& model, const NormKind& norm, const GridSpec& grid,
                               const Domain& region, const std::vector<double>& t_samples) {
  require_region(model, region);
  if (norm.dimension() && *norm.dimension() != model.dim())
    throw ConfigError("norm scaling dimension does not match the model");
  const auto pts = grid_points(region, grid);
  const auto ts = t_samples.empty() ? default_times(model) : t_samples;
  if (pts.empty()) throw ConfigError("empty grid");
  GridSupResult r;
  r.value = -kInf;
  for (double t : ts) {
    for (const auto& x : pts) {
      const double mu = matrix_measure(norm, model.jacobian(t, x));
      if (mu > r.value || r.argmax.size() == 0) {
        r.value = mu;
        r.argmax = x;
        r.t = t;
      }
      ++r.points;
    }
  }
  return r;
}

GridSupResult grid_sup_measure(const SystemModel& model, const NormKind& norm, const GridSpec& grid) {
  return grid_sup_measure(model, norm, grid, model.domain(), default_times(model));
}

void Partition::validate(Eigen::Index n) const {
  if (s0.empty() || sminus.empty()) throw ConfigError("partition sets S0 and S- must be non-empty");
  std::set<Eigen::Index> seen;
  for (auto v : s0) {
    if (v < 0 || v >= n) throw ConfigError("partition index out of range");
    if (!seen.insert(v).second) throw ConfigError("partition sets must be disjoint");
  }
  for (auto v : sminus) {
    if (v < 0 || v >= n) throw ConfigError("partition index out of range");
    if (!seen.insert(v).second) throw ConfigError("partition sets must be disjoint");
  }
  if (static_cast<Eigen::Index>(seen.size()) != n) throw ConfigError("partition sets must cover every index");
  for (const auto& [i, z] : zmap) {
    if (std::find(s0.begin(), s0.end(), i) == s0.end()) throw ConfigError("zmap key must belong to S0");
    if (std::find(sminus.begin(), sminus.end(), z) == sminus.end())
      throw ConfigError("zmap value must belong to S-");
  }
}

PartitionReport check_partition_mu1(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                                    const PartitionOptions& opts) {
  return check_partition(model, grid, partition, opts, NormTag::L1);
}

PartitionReport check_partition_muinf(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                                      const PartitionOptions& opts) {
  return check_partition(model, grid, partition, opts, NormTag::LInf);
}

Vector construct_scaling_mu1(const Partition& partition, double eps, Eigen::Index n) {
  return scaling_recipe(partition, eps, n, false);
}

Vector construct_scaling_muinf(const Partition& partition, double eps, Eigen::Index n) {
  return scaling_recipe(partition, eps, n, true);
}

NormKind ScalingResult::norm() const {
  if (similarity) return NormKind::scaled(tag, Matrix(d.asDiagonal()) * (*similarity));
  return NormKind::diagonal(tag, d);
}

ScalingResult select_scaling(const SystemModel& model, const GridSpec& grid, const Partition& partition,
                             NormTag tag, const ScalingOptions& opts) {
  const auto n = model.dim();
  ScalingResult r;
  r.tag = tag;
  r.similarity = opts.partition.similarity;
  r.partition = tag == NormTag::L1 ? check_partition_mu1(model, grid, partition, opts.partition)
                                   : check_partition_muinf(model, grid, partition, opts.partition);
  r.delta = opts.delta.value_or(r.partition.delta);
  if (opts.delta && !(*opts.delta > 0.0)) throw ConfigError("delta must be positive");
  r.d = Vector::Ones(n);

  const Domain region = opts.partition.region.value_or(model.domain());
  const auto ts = opts.partition.t_samples.empty() ? default_times(model) : opts.partition.t_samples;
  auto finish = [&]() {
    const auto sup = grid_sup_measure(model, r.norm(), grid, region, ts);
    r.grid_sup_mu = sup.value;
    r.argmax = sup.argmax;
    r.verdict = r.partition.verdict == Verdict::Pass && r.grid_sup_mu < -kStrictMargin && r.epsilon_used > 0.0
                    ? Verdict::Pass
                    : Verdict::Fail;
    return r;
  };
  if (r.partition.verdict != Verdict::Pass) return finish();

  Partition p = partition;
  p.zmap = r.partition.zmap;
  const Matrix base = opts.partition.similarity.value_or(Matrix::Identity(n, n));
  const auto pts = grid_points(region, grid);
  std::vector<Matrix> jac;
  jac.reserve(pts.size() * ts.size());
  for (double t : ts)
    for (const auto& x : pts) jac.push_back(model.jacobian(t, x));

  auto make_d = [&](double eps) {
    return tag == NormTag::L1 ? construct_scaling_mu1(p, eps, n) : construct_scaling_muinf(p, eps, n);
  };
  auto admissible = [&](double eps) {
    const Matrix s = Matrix(make_d(eps).asDiagonal()) * base;
    const Matrix sinv = NormKind::scaled(tag, s).scaling_inverse().value();
    for (const auto& j : jac) {
      const Matrix jt = s * j * sinv;
      for (auto k : p.s0)
        if (!(coefficient(tag, jt, k) < -kStrictMargin)) return false;
      for (auto k : p.sminus)
        if (!(coefficient(tag, jt, k) < -r.delta / 2.0)) return false;
    }
    return true;
  };

  if (opts.epsilon) {
    r.epsilon_used = *opts.epsilon;
    r.d = make_d(*opts.epsilon);
    return finish();
  }
  if (!(opts.initial_epsilon > 0.0 && opts.initial_epsilon < 1.0))
    throw ConfigError("initial epsilon must lie in (0, 1)");
  double eps = opts.initial_epsilon;
  while (eps > 1e-12 && !admissible(eps)) eps /= 2.0;
  if (eps <= 1e-12) return finish();
  if (eps < opts.initial_epsilon) {
    double lo = eps, hi = std::min(2.0 * eps, opts.initial_epsilon);
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (admissible(mid) ? lo : hi) = mid;
    }
    eps = lo;
  }
  r.epsilon_used = eps;
  r.d = make_d(eps);
  return finish();
}

double norm_deviation(const NormKind& norm, const NormKind& reference, Eigen::Index n, std::size_t random_directions,
                      std::uint64_t seed) {
  double s = 0.0;
  auto probe = [&](const Vector& y) {
    const double ref = vector_norm(reference, y);
    if (ref > 0.0) s = std::max(s, std::abs(vector_norm(norm, y) / ref - 1.0));
  };
  for (Eigen::Index i = 0; i < n; ++i) probe(Vector::Unit(n, i));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < random_directions; ++k) {
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = normal(rng);
    probe(y);
  }
  return s;
}

NestedFamily NestedFamily::create(std::string name, std::vector<double> zeta_grid, RegionFn region, NormFn norm,
                                  NormKind reference) {
  if (zeta_grid.empty()) throw ConfigError("zeta grid must be non-empty");
  for (std::size_t i = 0; i < zeta_grid.size(); ++i) {
    const double z = zeta_grid[i];
    if (!(z > 0.0 && z <= 0.5)) throw ConfigError("zeta values must lie in (0, 1/2]");
    if (i > 0 && !(z < zeta_grid[i - 1])) throw ConfigError("zeta grid must be strictly decreasing");
  }
  if (!region || !norm) throw ConfigError("nested family needs region and norm functions");
  for (std::size_t i = 0; i + 1 < zeta_grid.size(); ++i) {
    if (!region(zeta_grid[i + 1]).contains(region(zeta_grid[i]))) {
      std::ostringstream msg;
      msg << "family regions are not nested at zeta = " << zeta_grid[i] << ", " << zeta_grid[i + 1];
      throw ConfigError(msg.str());
    }
  }
  NestedFamily f;
  f.name_ = std::move(name);
  f.zeta_grid_ = std::move(zeta_grid);
  f.region_ = std::move(region);
  f.norm_ = std::move(norm);
  f.reference_ = std::move(reference);
  return f;
}

double NestedFamily::depth(const Vector& x) const {
  const double top = zeta_grid_.front();
  // Small slack absorbs integration overshoot at the outer faces.
  constexpr double slack = 1e-9;
  if (region_(top).contains(x, slack)) return top;
  double lo = 0.0, hi = top;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (region_(mid).contains(x, slack) ? lo : hi) = mid;
  }
  return lo;
}

double protein_family_epsilon(const ProteinSynthesisParams& p, double zeta) {
  const std::size_t n = p.alphas.size();
  const double target = protein_g_prime(zeta, p.k);
  double min_alpha = kInf, min_head = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    min_alpha = std::min(min_alpha, p.alphas[i]);
    if (i + 1 < n) min_head = std::min(min_head, p.alphas[i]);
  }
  auto lhs = [&](double eps) {
    double v = p.alphas[n - 1];
    for (std::size_t i = 0; i + 1 < n; ++i) v *= p.alphas[i] - eps;
    return v;
  };
  double eps_star;
  if (n == 1) {
    eps_star = lhs(0.0) > target ? kInf : 0.0;
  } else if (!(lhs(0.0) > target)) {
    eps_star = 0.0;
  } else {
    double lo = 0.0, hi = min_head;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lhs(mid) > target ? lo : hi) = mid;
    }
    eps_star = lo;
  }
  return std::min({eps_star / 2.0, zeta, min_alpha / 2.0});
}

NestedFamily protein_family(const SystemModel& model, const ProteinSynthesisParams& p, std::vector<double> zeta_grid) {
  const Vector upper = model.domain().upper();
  if (upper.size() != static_cast<Eigen::Index>(p.alphas.size()))
    throw ConfigError("protein family parameters do not match the model");
  auto region = [upper](double zeta) {
    return Domain::box(Vector::Constant(upper.size(), zeta).cwiseMin(upper), upper);
  };
  auto norm = [p](double zeta) {
    return NormKind::diagonal(NormTag::L1, protein_scaling(p.alphas, protein_family_epsilon(p, zeta)));
  };
  return NestedFamily::create("protein_synthesis", std::move(zeta_grid), region, norm,
                              NormKind::diagonal(NormTag::L1, protein_scaling(p.alphas, 0.0)));
}

Vector phosphorelay_family_scaling(const PhosphorelayParams& p, double zeta) {
  const std::size_t n = p.etas.size();
  Vector d = Vector::Ones(static_cast<Eigen::Index>(n));
  if (n < 2) return d;
  // Column i of the scaled Jacobian gains (1 - 1/q_i) of the inflow term and
  // loses (q_{i+1} - 1) of the outflow term; the bounds hold on the region.
  const double b0 = p.etas[0] * (1.0 - zeta) * p.ps[1];
  std::vector<double> q(n, 1.0);
  q[1] = 1.0 + std::min(zeta, p.input.floor() / (2.0 * b0));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = p.etas[i - 1] * zeta * p.ps[i - 1];
    const double b = p.etas[i] * (1.0 - zeta) * p.ps[i + 1];
    q[i + 1] = 1.0 + (1.0 - 1.0 / q[i]) * a / (2.0 * b);
  }
  for (std::size_t i = 1; i < n; ++i) d[static_cast<Eigen::Index>(i)] = d[static_cast<Eigen::Index>(i - 1)] * q[i];
  return d;
}

NestedFamily phosphorelay_family(const PhosphorelayParams& p, std::vector<double> zeta_grid) {
  const auto n = static_cast<Eigen::Index>(p.ps.size());
  const Vector ps = Eigen::Map<const Vector>(p.ps.data(), n);
  auto region = [ps](double zeta) { return Domain::box(zeta * ps, (1.0 - zeta) * ps); };
  auto norm = [p](double zeta) { return NormKind::diagonal(NormTag::L1, phosphorelay_family_scaling(p, zeta)); };
  return NestedFamily::create("phosphorelay", std::move(zeta_grid), region, norm, NormKind::l1());
}

NestedReport check_nested_contraction(const SystemModel& model, const NestedFamily& family, const GridSpec& grid,
                                      const EntryCheck& entry) {
  if (entry.tau_grid.empty()) throw ConfigError("entry check needs a tau grid");
  for (std::size_t i = 0; i < entry.tau_grid.size(); ++i) {
    if (!(entry.tau_grid[i] > 0.0)) throw ConfigError("tau values must be positive");
    if (i > 0 && !(entry.tau_grid[i] > entry.tau_grid[i - 1])) throw ConfigError("tau grid must be increasing");
  }
  if (!(entry.horizon > entry.tau_grid.back())) throw ConfigError("entry horizon must exceed every tau");
  for (double z : family.zeta_grid()) require_region(model, family.region(z));

  NestedReport r;
  std::ostringstream diag;

  // Entry: zeta(tau) from sampled trajectories.
  const auto starts = sample_points(model.domain(), entry.pair_samples, entry.seed);
  auto times = uniform_times(entry.t1, entry.t1 + entry.horizon, 401);
  for (double tau : entry.tau_grid) times.push_back(entry.t1 + tau);
  std::sort(times.begin(), times.end());
  std::vector<double> zeta_tau(entry.tau_grid.size(), family.zeta_grid().front());
  for (const auto& x0 : starts) {
    const auto traj = integrate(model, entry.t1, x0, entry.t1 + entry.horizon, entry.solver, times);
    // Suffix minima of the depth along the trajectory.
    std::vector<double> suffix(traj.size());
    double m = kInf;
    for (std::size_t k = traj.size(); k-- > 0;) {
      m = std::min(m, family.depth(traj.states[k]));
      suffix[k] = m;
    }
    for (std::size_t i = 0; i < entry.tau_grid.size(); ++i) {
      auto it = std::lower_bound(traj.times.begin(), traj.times.end(), entry.t1 + entry.tau_grid[i]);
      zeta_tau[i] = std::min(zeta_tau[i], suffix[static_cast<std::size_t>(it - traj.times.begin())]);
    }
  }
  r.entry_ok = true;
  for (std::size_t i = 0; i < zeta_tau.size(); ++i) {
    r.entry.emplace_back(entry.tau_grid[i], zeta_tau[i]);
    if (!(zeta_tau[i] > 0.0)) {
      r.entry_ok = false;
      diag << "no region entered by tau = " << entry.tau_grid[i] << "; ";
    }
    if (i > 0 && zeta_tau[i] < zeta_tau[i - 1]) {
      r.entry_ok = false;
      diag << "zeta(tau) decreases at tau = " << entry.tau_grid[i] << "; ";
    }
  }

  // Measure and norm deviation on the zeta grid and at the entered zetas.
  const auto ts = jacobian_time_samples(model, entry.horizon, 16);
  const auto n = model.dim();
  r.measure_ok = true;
  r.deviation_ok = true;
  auto add_row = [&](double zeta, bool from_entry) {
    NestedZetaRow row;
    row.zeta = zeta;
    row.from_entry = from_entry;
    row.grid_sup_mu = grid_sup_measure(model, family.norm(zeta), grid, family.region(zeta), ts).value;
    row.deviation = norm_deviation(family.norm(zeta), family.reference(), n);
    if (!(row.grid_sup_mu < -kStrictMargin)) {
      r.measure_ok = false;
      diag << "measure sup " << row.grid_sup_mu << " >= 0 at zeta = " << zeta << "; ";
    }
    r.rows.push_back(row);
  };
  for (double z : family.zeta_grid()) add_row(z, false);
  for (double z : zeta_tau)
    if (z > 0.0) add_row(z, true);

  double prev = kInf;
  for (const auto& row : r.rows) {
    if (row.from_entry) continue;
    if (!(row.deviation < 1.0) || row.deviation > prev + 1e-12) {
      r.deviation_ok = false;
      diag << "norm deviation " << row.deviation << " does not shrink at zeta = " << row.zeta << "; ";
    }
    prev = row.deviation;
  }
  r.diagnostic = diag.str();
  r.verdict = r.measure_ok && r.deviation_ok && r.entry_ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

IcReport check_interior_contractive(const SystemModel& model, const NormKind& norm, const GridSpec& grid,
                                    const IcOptions& opts) {
  if (!model.time_invariant()) throw ConfigError("interior contraction check requires a time-invariant model");
  const Domain& dom = model.domain();
  const auto n = model.dim();
  if (opts.tau_grid.empty()) throw ConfigError("tau grid must be non-empty");
  for (std::size_t i = 0; i < opts.tau_grid.size(); ++i) {
    if (!(opts.tau_grid[i] > 0.0)) throw ConfigError("tau values must be positive");
    if (i > 0 && !(opts.tau_grid[i] > opts.tau_grid[i - 1])) throw ConfigError("tau grid must be increasing");
  }

  IcReport r;
  GridSpec interior = grid;
  interior.include_boundary = false;
  r.interior_sup_mu = grid_sup_measure(model, norm, interior, dom, {0.0}).value;
  r.interior_ok = r.interior_sup_mu < -kStrictMargin;

  // A face is critical when the measure fails to be negative at a grid
  // point lying on that face only.
  auto faces_of = [&](const Vector& x) {
    std::vector<Face> f;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x[i] == dom.lower()[i]) f.push_back({i, false});
      if (x[i] == dom.upper()[i]) f.push_back({i, true});
    }
    return f;
  };
  auto same = [](const Face& a, const Face& b) { return a.axis == b.axis && a.upper == b.upper; };
  const auto pts = grid_points(dom, grid);
  for (const auto& x : pts) {
    const auto f = faces_of(x);
    if (f.size() != 1) continue;
    if (matrix_measure(norm, model.jacobian(0.0, x)) >= -kStrictMargin &&
        std::none_of(r.critical_faces.begin(), r.critical_faces.end(), [&](const Face& c) { return same(c, f[0]); }))
      r.critical_faces.push_back(f[0]);
  }
  auto on_critical = [&](const Vector& x) {
    for (const auto& f : faces_of(x))
      for (const auto& c : r.critical_faces)
        if (same(f, c)) return true;
    return false;
  };
  auto critical_distance = [&](const Vector& x) {
    double d = kInf;
    for (const auto& c : r.critical_faces) d = std::min(d, dom.face_distance(x, c.axis, c.upper));
    return d;
  };

  std::vector<Vector> samples = opts.boundary_samples;
  if (samples.empty()) {
    for (const auto& x : pts)
      if (on_critical(x)) samples.push_back(x);
  }
  for (const auto& x : samples)
    if (!dom.contains(x, 0.0) || !dom.on_boundary(x, 1e-12))
      throw ConfigError("boundary samples must lie on the domain boundary");
  r.boundary_samples = samples.size();

  std::vector<double> dist(opts.tau_grid.size(), kInf);
  if (!r.critical_faces.empty()) {
    for (const auto& x0 : samples) {
      const auto traj = integrate(model, 0.0, x0, opts.tau_grid.back(), opts.solver, opts.tau_grid);
      for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = std::min(dist[i], critical_distance(traj.states[i]));
    }
  }
  r.repulsion_ok = true;
  r.distance_monotone = true;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    r.distance.emplace_back(opts.tau_grid[i], dist[i]);
    if (!(dist[i] > kStrictMargin)) r.repulsion_ok = false;
    if (i > 0 && dist[i] < dist[i - 1]) r.distance_monotone = false;
  }
  r.verdict = r.interior_ok && r.repulsion_ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

EquilibriumReport unique_equilibrium(const SystemModel& model, double tol, const EquilibriumOptions& opts) {
  if (!model.time_invariant()) throw ConfigError("equilibrium search requires a time-invariant model");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(opts.horizon > 0.0)) throw ConfigError("horizon must be positive");
  const Domain& dom = model.domain();

  auto limit_from = [&](const Vector& x0) {
    const auto traj = integrate(model, 0.0, x0, opts.horizon, opts.solver, {opts.horizon});
    return newton_refine(model, traj.final_state, opts.max_newton);
  };

  EquilibriumReport r;
  r.e = limit_from(dom.center());
  r.residual = model.f(0.0, r.e).cwiseAbs().maxCoeff();
  r.interior = dom.contains(r.e, 0.0) && dom.boundary_distance(r.e) > tol;
  for (const auto& x0 : latin_hypercube(dom, opts.starts, opts.seed)) {
    const Vector e = limit_from(x0);
    r.spread = std::max(r.spread, (e - r.e).cwiseAbs().maxCoeff());
    ++r.starts;
  }
  if (r.spread > tol) {
    std::ostringstream msg;
    msg << "inconsistent equilibria: starts converge to points " << r.spread << " apart";
    throw NumericalError(msg.str());
  }
  return r;
}

}  // namespace gcs
