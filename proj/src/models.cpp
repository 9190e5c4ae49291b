#include "gcs/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gcs/errors.hpp"

namespace gcs {

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(DomainKind kind, Vector lower, Vector upper)
    : kind_(kind), lower_(std::move(lower)), upper_(std::move(upper)) {}

Domain Domain::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ConfigError("domain bounds must be non-empty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      std::ostringstream msg;
      msg << "domain bound " << i << " is invalid: [" << lower[i] << ", " << upper[i] << "]";
      throw ConfigError(msg.str());
    }
  }
  return Domain(DomainKind::Box, std::move(lower), std::move(upper));
}

Domain Domain::positive_orthant_box(Vector upper) {
  const auto n = upper.size();
  Domain d = box(Vector::Zero(n), std::move(upper));
  d.kind_ = DomainKind::PositiveOrthantBox;
  return d;
}

bool Domain::is_compact() const { return lower_.allFinite() && upper_.allFinite(); }

bool Domain::contains(const Vector& x, double slack) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!(x[i] >= lower_[i] - slack && x[i] <= upper_[i] + slack)) return false;
  }
  return true;
}

bool Domain::contains(const Domain& other) const {
  if (other.dim() != dim()) return false;
  return (other.lower_.array() >= lower_.array()).all() &&
         (other.upper_.array() <= upper_.array()).all();
}

Vector Domain::center() const { return 0.5 * (lower_ + upper_); }

double Domain::face_distance(const Vector& x, Eigen::Index axis, bool upper_face) const {
  return upper_face ? upper_[axis] - x[axis] : x[axis] - lower_[axis];
}

double Domain::boundary_distance(const Vector& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < dim(); ++i) {
    d = std::min({d, x[i] - lower_[i], upper_[i] - x[i]});
  }
  return d;
}

bool Domain::on_boundary(const Vector& x, double tol) const { return boundary_distance(x) <= tol; }

std::vector<Vector> Domain::corners() const {
  const auto n = dim();
  if (n > 20) throw ConfigError("too many dimensions to enumerate domain corners");
  std::vector<Vector> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (mask >> i) & 1U ? upper_[i] : lower_[i];
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vector> Domain::face_midpoints() const {
  std::vector<Vector> out;
  const Vector c = center();
  for (Eigen::Index i = 0; i < dim(); ++i) {
    Vector lo = c;
    lo[i] = lower_[i];
    Vector hi = c;
    hi[i] = upper_[i];
    out.push_back(std::move(lo));
    out.push_back(std::move(hi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// InputSignal

InputSignal InputSignal::constant(double value) {
  if (!std::isfinite(value)) throw ConfigError("constant input must be finite");
  InputSignal s;
  s.kind_ = InputKind::Constant;
  s.offset_ = value;
  return s;
}

InputSignal InputSignal::sinusoid(double offset, double amplitude, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("sinusoid period must be positive");
  if (!(amplitude >= 0.0) || !(offset > amplitude)) {
    throw ConfigError("sinusoid input requires offset > amplitude >= 0");
  }
  InputSignal s;
  s.kind_ = InputKind::SinusoidPlusOffset;
  s.offset_ = offset;
  s.amplitude_ = amplitude;
  s.period_ = period;
  return s;
}

InputSignal InputSignal::table(std::vector<std::pair<double, double>> points,
                               std::optional<double> period) {
  if (points.empty()) throw ConfigError("input table is empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second)) {
      throw ConfigError("input table has non-finite entries");
    }
    if (i > 0 && !(points[i].first > points[i - 1].first)) {
      throw ConfigError("input table times must be strictly increasing");
    }
  }
  if (period) {
    if (!(*period > 0.0)) throw ConfigError("input table period must be positive");
    if (points.front().first != 0.0 || std::abs(points.back().first - *period) > 1e-12) {
      throw ConfigError("periodic input table must span exactly [0, period]");
    }
  }
  InputSignal s;
  s.kind_ = InputKind::UserTable;
  s.period_ = period;
  s.points_ = std::move(points);
  return s;
}

double InputSignal::operator()(double t) const {
  switch (kind_) {
    case InputKind::Constant:
      return offset_;
    case InputKind::SinusoidPlusOffset:
      return offset_ + amplitude_ * std::sin(2.0 * std::numbers::pi * t / *period_);
    case InputKind::UserTable: {
      if (period_) t = t - *period_ * std::floor(t / *period_);
      if (t <= points_.front().first) return points_.front().second;
      if (t >= points_.back().first) return points_.back().second;
      auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                 [](double v, const auto& p) { return v < p.first; });
      const auto& [t1, u1] = *it;
      const auto& [t0, u0] = *(it - 1);
      return u0 + (u1 - u0) * (t - t0) / (t1 - t0);
    }
  }
  return offset_;
}

double InputSignal::floor() const {
  switch (kind_) {
    case InputKind::Constant:
      return offset_;
    case InputKind::SinusoidPlusOffset:
      return offset_ - amplitude_;
    case InputKind::UserTable: {
      double m = points_.front().second;
      for (const auto& p : points_) m = std::min(m, p.second);
      return m;
    }
  }
  return offset_;
}

std::optional<double> InputSignal::period() const { return period_; }

// ---------------------------------------------------------------------------
// ClassK

ClassK ClassK::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ConfigError("class-K table needs at least two points");
  if (points.front().first != 0.0 || points.front().second != 0.0) {
    throw ConfigError("class-K table must start at (0, 0)");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first) || !(points[i].second > points[i - 1].second)) {
      throw ConfigError("class-K table must be strictly increasing in both columns");
    }
  }
  ClassK k(ClassKForm::Table);
  k.points_ = std::move(points);
  return k;
}

double ClassK::operator()(double t) const {
  switch (form_) {
    case ClassKForm::Linear:
      return t;
    case ClassKForm::Quadratic:
      return t * t;
    case ClassKForm::Saturating:
      return -std::expm1(-t);
    case ClassKForm::Table: {
      const auto& p = points_;
      if (t <= 0.0) return 0.0;
      std::size_t hi = 1;
      while (hi + 1 < p.size() && p[hi].first < t) ++hi;
      const auto& [t0, a0] = p[hi - 1];
      const auto& [t1, a1] = p[hi];
      return a0 + (a1 - a0) * (t - t0) / (t1 - t0);
    }
  }
  return t;
}

std::string ClassK::describe() const {
  switch (form_) {
    case ClassKForm::Linear:
      return "t";
    case ClassKForm::Quadratic:
      return "t^2";
    case ClassKForm::Saturating:
      return "1-exp(-t)";
    case ClassKForm::Table:
      return "table";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SystemModel

SystemModel::SystemModel(ModelDefinition def) : def_(std::move(def)) {
  if (!def_.f || !def_.jacobian) throw ConfigError("model '" + def_.name + "' lacks f or jacobian");
  if (def_.period && !(*def_.period > 0.0)) throw ConfigError("model period must be positive");
}

// ---------------------------------------------------------------------------
// Zoo

namespace {

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " must be positive and finite");
}

void require_positive(const std::vector<double>& v, const std::string& what) {
  if (v.empty()) throw ConfigError(what + " must be non-empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    require_positive(v[i], what + "[" + std::to_string(i + 1) + "]");
  }
}

void add_indexed(std::map<std::string, double>& params, const std::string& base,
                 const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) params[base + std::to_string(i + 1)] = v[i];
}

void add_input(std::map<std::string, double>& params, const std::string& base, const InputSignal& u) {
  params[base + "_floor"] = u.floor();
  if (u.kind() != InputKind::UserTable) {
    params[base + "_offset"] = u.offset();
    params[base + "_amplitude"] = u.amplitude();
  }
  if (u.period()) params[base + "_period"] = *u.period();
}

}  // namespace

SystemModel make_scalar_classK(const ClassK& alpha) {
  ModelDefinition def;
  def.name = "scalar_classK";
  def.domain = Domain::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  def.f = [alpha](double t, const Vector& x) -> Vector { return -alpha(t) * x; };
  def.jacobian = [alpha](double t, const Vector&) -> Matrix { return Matrix::Constant(1, 1, -alpha(t)); };
  def.time_invariant = false;
  return SystemModel(std::move(def));
}

double protein_g(double u, double k) { return (1.0 + u) / (k + u); }

double protein_g_prime(double u, double k) { return (k - 1.0) / ((k + u) * (k + u)); }

Vector protein_scaling(const std::vector<double>& alphas, double eps) {
  const auto n = static_cast<Eigen::Index>(alphas.size());
  Vector d(n);
  double prod = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = prod;
    if (i + 1 < n) {
      if (!(alphas[i] - eps > 0.0)) throw ConfigError("protein scaling requires eps < alpha_i");
      prod *= alphas[i] - eps;
    }
  }
  return d;
}

SystemModel make_protein_synthesis(const ProteinSynthesisParams& p) {
  require_positive(p.alphas, "alpha");
  if (!(p.k > 1.0) || !std::isfinite(p.k)) throw ConfigError("protein synthesis requires k > 1");
  if (!(p.r >= 1.0) || !std::isfinite(p.r)) throw ConfigError("protein synthesis requires r >= 1");

  const auto n = static_cast<Eigen::Index>(p.alphas.size());
  Vector upper(n);
  double prod = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    prod *= p.alphas[i];
    upper[i] = p.r / prod;
  }

  ModelDefinition def;
  def.name = "protein_synthesis";
  def.domain = Domain::positive_orthant_box(upper);
  const Vector alpha = Eigen::Map<const Vector>(p.alphas.data(), n);
  const double k = p.k;
  def.f = [alpha, k, n](double, const Vector& x) -> Vector {
    Vector dx(n);
    dx[0] = protein_g(x[n - 1], k) - alpha[0] * x[0];
    for (Eigen::Index i = 1; i < n; ++i) dx[i] = x[i - 1] - alpha[i] * x[i];
    return dx;
  };
  def.jacobian = [alpha, k, n](double, const Vector& x) -> Matrix {
    Matrix j = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) j(i, i) = -alpha[i];
    for (Eigen::Index i = 1; i < n; ++i) j(i, i - 1) = 1.0;
    j(0, n - 1) += protein_g_prime(x[n - 1], k);
    return j;
  };
  add_indexed(def.params, "alpha", p.alphas);
  def.params["k"] = p.k;
  def.params["r"] = p.r;
  return SystemModel(std::move(def));
}

Matrix phosphorelay_L(const PhosphorelayParams& p, const Vector& x) {
  const auto n = static_cast<Eigen::Index>(p.etas.size());
  Matrix l = Matrix::Zero(n, n);
  // Internal fluxes eta_i x_i (p_{i+1} - x_{i+1}) from site i to i+1.
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d_own = p.etas[i] * (p.ps[i + 1] - x[i + 1]);  // d flux / d x_i
    const double d_next = -p.etas[i] * x[i];                    // d flux / d x_{i+1}
    l(i, i) -= d_own;
    l(i + 1, i) += d_own;
    l(i, i + 1) -= d_next;
    l(i + 1, i + 1) += d_next;
  }
  return l;
}

SystemModel make_phosphorelay(const PhosphorelayParams& p) {
  require_positive(p.etas, "eta");
  require_positive(p.ps, "p");
  if (p.etas.size() != p.ps.size()) throw ConfigError("eta and p must have equal length");
  if (!(p.input.floor() > 0.0)) throw ConfigError("phosphorelay input must have a positive floor");

  const auto n = static_cast<Eigen::Index>(p.etas.size());
  ModelDefinition def;
  const bool rfm = std::all_of(p.ps.begin(), p.ps.end(), [](double v) { return v == 1.0; });
  def.name = rfm ? "rfm" : "phosphorelay";
  def.domain = Domain::box(Vector::Zero(n), Eigen::Map<const Vector>(p.ps.data(), n));
  def.time_invariant = p.input.is_constant();
  def.period = p.input.period();
  def.f = [p, n](double t, const Vector& x) -> Vector {
    Vector dx(n);
    double inflow = p.input(t) * (p.ps[0] - x[0]);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double outflow =
          i + 1 < n ? p.etas[i] * x[i] * (p.ps[i + 1] - x[i + 1]) : p.etas[i] * x[i];
      dx[i] = inflow - outflow;
      inflow = outflow;
    }
    return dx;
  };
  def.jacobian = [p, n](double t, const Vector& x) -> Matrix {
    Matrix j = phosphorelay_L(p, x);
    j(0, 0) -= p.input(t);
    j(n - 1, n - 1) -= p.etas[n - 1];
    return j;
  };
  add_indexed(def.params, "eta", p.etas);
  add_indexed(def.params, "p", p.ps);
  add_input(def.params, "c", p.input);
  return SystemModel(std::move(def));
}

SystemModel make_rfm(const std::vector<double>& etas, const InputSignal& input) {
  return make_phosphorelay({etas, std::vector<double>(etas.size(), 1.0), input});
}

SystemModel make_transcriptional_module(const TranscriptionalParams& p) {
  require_positive(p.delta, "delta");
  require_positive(p.k1, "k1");
  require_positive(p.k2, "k2");
  require_positive(p.eT, "eT");
  const double bound = p.k1 * p.eT / p.delta;
  const double xmax = p.xmax == 0.0 ? std::max(10.0, bound) : p.xmax;
  if (!(xmax >= bound) || !std::isfinite(xmax)) {
    throw ConfigError("xmax must be at least k1*eT/delta for the truncated box to be invariant");
  }

  ModelDefinition def;
  def.name = "transcriptional";
  Vector upper(2);
  upper << xmax, p.eT;
  def.domain = Domain::positive_orthant_box(upper);
  def.f = [p](double, const Vector& s) -> Vector {
    const double x = s[0], y = s[1];
    const double binding = p.k2 * (p.eT - y) * x;
    Vector dx(2);
    dx << -p.delta * x + p.k1 * y - binding, -p.k1 * y + binding;
    return dx;
  };
  def.jacobian = [p](double, const Vector& s) -> Matrix {
    const double x = s[0], y = s[1];
    Matrix j(2, 2);
    j << -p.delta - p.k2 * (p.eT - y), p.k1 + p.k2 * x,  //
        p.k2 * (p.eT - y), -p.k1 - p.k2 * x;
    return j;
  };
  def.params = {{"delta", p.delta}, {"k1", p.k1}, {"k2", p.k2}, {"eT", p.eT}, {"xmax", xmax}};
  return SystemModel(std::move(def));
}

SystemModel make_multi_transcriptional(const MultiTranscriptionalParams& p) {
  require_positive(p.delta, "delta");
  require_positive(p.k1s, "k1");
  require_positive(p.k2s, "k2");
  require_positive(p.eTs, "eT");
  if (p.k1s.size() != p.k2s.size() || p.k1s.size() != p.eTs.size()) {
    throw ConfigError("k1, k2 and eT must have equal length");
  }
  const auto m = static_cast<Eigen::Index>(p.k1s.size());
  double bound = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) bound += p.k1s[i] * p.eTs[i];
  bound /= p.delta;
  const double xmax = p.xmax == 0.0 ? std::max(10.0, bound) : p.xmax;
  if (!(xmax >= bound) || !std::isfinite(xmax)) {
    throw ConfigError("xmax must be at least sum(k1i*eTi)/delta for the truncated box to be invariant");
  }

  ModelDefinition def;
  def.name = "multi_transcriptional";
  Vector upper(m + 1);
  upper[0] = xmax;
  for (Eigen::Index i = 0; i < m; ++i) upper[i + 1] = p.eTs[i];
  def.domain = Domain::positive_orthant_box(upper);
  def.f = [p, m](double, const Vector& s) -> Vector {
    Vector dx(m + 1);
    const double x = s[0];
    dx[0] = -p.delta * x;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double y = s[i + 1];
      const double binding = p.k2s[i] * (p.eTs[i] - y) * x;
      dx[0] += p.k1s[i] * y - binding;
      dx[i + 1] = -p.k1s[i] * y + binding;
    }
    return dx;
  };
  def.jacobian = [p, m](double, const Vector& s) -> Matrix {
    Matrix j = Matrix::Zero(m + 1, m + 1);
    const double x = s[0];
    j(0, 0) = -p.delta;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double free_sites = p.k2s[i] * (p.eTs[i] - s[i + 1]);
      j(0, 0) -= free_sites;
      j(0, i + 1) = p.k1s[i] + p.k2s[i] * x;
      j(i + 1, 0) = free_sites;
      j(i + 1, i + 1) = -p.k1s[i] - p.k2s[i] * x;
    }
    return j;
  };
  def.params["delta"] = p.delta;
  def.params["xmax"] = xmax;
  add_indexed(def.params, "k1_", p.k1s);
  add_indexed(def.params, "k2_", p.k2s);
  add_indexed(def.params, "eT_", p.eTs);
  return SystemModel(std::move(def));
}

SystemModel make_irreversible_binding(const IrreversibleBindingParams& p) {
  if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) throw ConfigError("delta must be non-negative");
  require_positive(p.k2, "k2");
  require_positive(p.eT, "eT");
  if (!(p.zT > p.eT) || !std::isfinite(p.zT)) throw ConfigError("irreversible binding requires zT > eT");
  if (!(p.input.floor() > 0.0)) throw ConfigError("irreversible binding input must have a positive floor");

  ModelDefinition def;
  def.name = "irreversible_binding";
  Vector upper(2);
  upper << p.zT, p.eT;
  def.domain = Domain::positive_orthant_box(upper);
  def.time_invariant = p.input.is_constant();
  def.period = p.input.period();
  def.f = [p](double t, const Vector& s) -> Vector {
    const double x1 = s[0], x2 = s[1];
    const double binding = p.k2 * (p.eT - x2) * x1;
    Vector dx(2);
    dx << (p.zT - x1 - x2) * p.input(t) - p.delta * x1 - binding, binding;
    return dx;
  };
  def.jacobian = [p](double t, const Vector& s) -> Matrix {
    const double x1 = s[0], x2 = s[1];
    const double u = p.input(t);
    Matrix j(2, 2);
    j << -u - p.delta - p.k2 * (p.eT - x2), -u + p.k2 * x1,  //
        p.k2 * (p.eT - x2), -p.k2 * x1;
    return j;
  };
  def.params = {{"delta", p.delta}, {"k2", p.k2}, {"zT", p.zT}, {"eT", p.eT}};
  add_input(def.params, "u", p.input);
  return SystemModel(std::move(def));
}

IrreversibleBindingParams figure1_params() {
  return {2.0, 1.0, 4.0, 3.0, InputSignal::sinusoid(2.0, 1.0, 1.0)};
}

Vector figure1_initial_state() {
  Vector x(2);
  x << 2.0, 0.25;
  return x;
}

SystemModel make_piecewise_shift() {
  ModelDefinition def;
  def.name = "piecewise_shift";
  def.domain = Domain::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  def.f = [](double, const Vector& x) -> Vector {
    const double v = x[0];
    if (std::abs(v) < 0.5) return Vector::Constant(1, -2.0 * v);
    return Vector::Constant(1, v > 0.0 ? -1.0 : 1.0);
  };
  def.jacobian = [](double, const Vector& x) -> Matrix {
    return Matrix::Constant(1, 1, std::abs(x[0]) < 0.5 ? -2.0 : 0.0);
  };
  def.switching = {[](const Vector& x) { return x[0] - 0.5; },
                   [](const Vector& x) { return x[0] + 0.5; }};
  return SystemModel(std::move(def));
}

SystemModel make_linear(const Matrix& a, const Domain& domain, std::string name) {
  require_square(a, "linear model");
  if (a.rows() != domain.dim()) throw ConfigError("linear model dimension does not match domain");
  ModelDefinition def;
  def.name = std::move(name);
  def.domain = domain;
  def.f = [a](double, const Vector& x) -> Vector { return a * x; };
  def.jacobian = [a](double, const Vector&) -> Matrix { return a; };
  return SystemModel(std::move(def));
}

}  // namespace gcs
