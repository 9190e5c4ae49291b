#pragma once

// The model zoo: every example system as a SystemModel carrying its vector
// field, analytic Jacobian, state domain and (optional) forcing period.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcs/measure.hpp"

namespace gcs {

enum class DomainKind { Box, PositiveOrthantBox };

/// Axis-aligned box [lower, upper]. Bounds may be infinite only for
/// auxiliary (non-grid) uses such as the tangent part of the variational
/// system.
class Domain {
 public:
  static Domain box(Vector lower, Vector upper);
  /// [0, upper_1] x ... x [0, upper_n].
  static Domain positive_orthant_box(Vector upper);

  DomainKind kind() const { return kind_; }
  Eigen::Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  bool is_compact() const;

  bool contains(const Vector& x, double slack = 0.0) const;
  bool contains(const Domain& other) const;
  Vector center() const;
  /// Distance (in coordinate units) from x to the face {x_axis = lower} or
  /// {x_axis = upper}.
  double face_distance(const Vector& x, Eigen::Index axis, bool upper_face) const;
  /// Distance to the nearest face, i.e. dist_inf(x, boundary).
  double boundary_distance(const Vector& x) const;
  bool on_boundary(const Vector& x, double tol) const;

  /// All 2^n vertices (n <= 20).
  std::vector<Vector> corners() const;
  /// Centers of the 2n faces.
  std::vector<Vector> face_midpoints() const;

 private:
  Domain(DomainKind kind, Vector lower, Vector upper);

  DomainKind kind_;
  Vector lower_;
  Vector upper_;
};

enum class InputKind { Constant, SinusoidPlusOffset, UserTable };

/// Exogenous scalar input u(t) used by forced models.
class InputSignal {
 public:
  static InputSignal constant(double value);
  /// offset + amplitude * sin(2 pi t / period); requires offset > amplitude >= 0.
  static InputSignal sinusoid(double offset, double amplitude, double period);
  /// Piecewise-linear table. With a period the table is wrapped (its time
  /// column must then start at 0 and end at `period`); otherwise the end
  /// values are held.
  static InputSignal table(std::vector<std::pair<double, double>> points,
                           std::optional<double> period = std::nullopt);

  InputKind kind() const { return kind_; }
  double operator()(double t) const;
  /// Guaranteed lower bound u0 on u(t).
  double floor() const;
  std::optional<double> period() const;
  bool is_constant() const { return kind_ == InputKind::Constant; }

  double offset() const { return offset_; }
  double amplitude() const { return amplitude_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  InputSignal() = default;

  InputKind kind_ = InputKind::Constant;
  double offset_ = 0.0;
  double amplitude_ = 0.0;
  std::optional<double> period_;
  std::vector<std::pair<double, double>> points_;
};

enum class ClassKForm { Linear, Quadratic, Saturating, Table };

/// A class-K function alpha: R+ -> R+ (continuous, strictly increasing,
/// alpha(0) = 0).
class ClassK {
 public:
  static ClassK linear() { return ClassK(ClassKForm::Linear); }        // alpha(t) = t
  static ClassK quadratic() { return ClassK(ClassKForm::Quadratic); }  // alpha(t) = t^2
  static ClassK saturating() { return ClassK(ClassKForm::Saturating); }  // 1 - e^{-t}
  /// Strictly increasing table through the origin, linearly interpolated and
  /// extended past the last point with the last slope.
  static ClassK table(std::vector<std::pair<double, double>> points);

  ClassKForm form() const { return form_; }
  double operator()(double t) const;
  std::string describe() const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  explicit ClassK(ClassKForm form) : form_(form) {}

  ClassKForm form_;
  std::vector<std::pair<double, double>> points_;
};

/// Everything needed to define a model. Consumed once by SystemModel.
struct ModelDefinition {
  using Field = std::function<Vector(double, const Vector&)>;
  using JacobianFn = std::function<Matrix(double, const Vector&)>;
  using SwitchFn = std::function<double(const Vector&)>;

  std::string name;
  Domain domain = Domain::box(Vector::Zero(1), Vector::Ones(1));
  Field f;
  JacobianFn jacobian;
  bool time_invariant = true;
  std::optional<double> period;
  std::map<std::string, double> params;
  /// Scalar functions whose zero sets are surfaces across which the right
  /// hand side changes formula; the integrator locates crossings.
  std::vector<SwitchFn> switching;
};

/// Immutable model: x' = f(t, x) with Jacobian J(t, x) on a box domain.
class SystemModel {
 public:
  explicit SystemModel(ModelDefinition def);

  const std::string& name() const { return def_.name; }
  Eigen::Index dim() const { return def_.domain.dim(); }
  const Domain& domain() const { return def_.domain; }
  bool time_invariant() const { return def_.time_invariant; }
  std::optional<double> period() const { return def_.period; }
  const std::map<std::string, double>& params() const { return def_.params; }
  const std::vector<ModelDefinition::SwitchFn>& switching() const { return def_.switching; }

  Vector f(double t, const Vector& x) const { return def_.f(t, x); }
  Matrix jacobian(double t, const Vector& x) const { return def_.jacobian(t, x); }

 private:
  ModelDefinition def_;
};

// ---------------------------------------------------------------------------
// Zoo constructors. Invalid parameters throw ConfigError.

/// x' = -alpha(t) x on [-1, 1].
SystemModel make_scalar_classK(const ClassK& alpha);

struct ProteinSynthesisParams {
  std::vector<double> alphas;
  double k = 2.0;
  /// Domain is the invariant box Omega_r = r * prod_i [0, 1/(alpha_1...alpha_i)].
  double r = 1.0;
};
/// Feedback loop x1' = g(x_n) - a1 x1, x_i' = x_{i-1} - a_i x_i with
/// g(u) = (1 + u) / (k + u).
SystemModel make_protein_synthesis(const ProteinSynthesisParams& p);
double protein_g(double u, double k);
double protein_g_prime(double u, double k);
/// D_eps = diag(1, a1 - eps, (a1 - eps)(a2 - eps), ...). Requires eps < min a_i.
Vector protein_scaling(const std::vector<double>& alphas, double eps);

struct PhosphorelayParams {
  std::vector<double> etas;
  std::vector<double> ps;
  InputSignal input = InputSignal::constant(1.0);
};
/// Serial phosphate relay on [0, p_1] x ... x [0, p_n].
SystemModel make_phosphorelay(const PhosphorelayParams& p);
/// Ribosome flow model: phosphorelay with p_i = 1.
SystemModel make_rfm(const std::vector<double>& etas, const InputSignal& input);
/// Metzler tridiagonal part L(x) of the phosphorelay Jacobian,
/// J = L(x) - diag(c(t), 0, ..., 0, eta_n).
Matrix phosphorelay_L(const PhosphorelayParams& p, const Vector& x);

struct TranscriptionalParams {
  double delta = 1.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double eT = 1.0;
  /// Truncation of x in [0, inf); must be at least k1 eT / delta so the box
  /// stays forward invariant. Zero selects max(10, k1 eT / delta).
  double xmax = 0.0;
};
SystemModel make_transcriptional_module(const TranscriptionalParams& p);

struct MultiTranscriptionalParams {
  double delta = 1.0;
  std::vector<double> k1s;
  std::vector<double> k2s;
  std::vector<double> eTs;
  /// Zero selects max(10, sum_i k1i eTi / delta).
  double xmax = 0.0;
};
/// Transcription factor driving n downstream modules; state (x, y_1..y_n).
SystemModel make_multi_transcriptional(const MultiTranscriptionalParams& p);

struct IrreversibleBindingParams {
  double delta = 2.0;
  double k2 = 1.0;
  double zT = 4.0;
  double eT = 3.0;
  InputSignal input = InputSignal::constant(2.0);
};
SystemModel make_irreversible_binding(const IrreversibleBindingParams& p);
/// Parameter set used for the entrainment figure:
/// delta = 2, k2 = 1, zT = 4, eT = 3, u(t) = 2 + sin(2 pi t).
IrreversibleBindingParams figure1_params();
/// Initial condition of the entrainment figure, x(0) = (2, 1/4).
Vector figure1_initial_state();

/// x' = -2x for |x| < 1/2, -x/|x| for 1/2 <= |x| <= 1, on [-1, 1].
SystemModel make_piecewise_shift();

/// x' = A x on the given domain.
SystemModel make_linear(const Matrix& a, const Domain& domain, std::string name = "linear");

}  // namespace gcs
