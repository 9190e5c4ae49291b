#pragma once

// Vector norms, induced matrix norms and matrix measures (logarithmic norms)
// for the L1 and L-infinity families, optionally scaled by an invertible
// matrix P: |z|_{*,P} = |P z|_* and mu_{*,P}(A) = mu_*(P A P^{-1}).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class NormTag { L1, LInf };

/// A vector norm from the L1 / L-infinity family with optional scaling.
///
/// The scaling matrix is checked for numerical invertibility on
/// construction; its inverse is cached so that repeated measure
/// evaluations on a grid do not refactorize P.
class NormKind {
 public:
  /// Reciprocal-condition floor: P is rejected when cond_1(P) > 1e12.
  static constexpr double kMaxCondition = 1e12;

  static NormKind l1() { return NormKind(NormTag::L1); }
  static NormKind linf() { return NormKind(NormTag::LInf); }
  /// Throws ConfigError when P is not square, not finite, singular, or
  /// ill-conditioned.
  static NormKind scaled(NormTag tag, const Matrix& p);
  static NormKind diagonal(NormTag tag, const Vector& d);

  NormTag tag() const { return tag_; }
  bool is_scaled() const { return scaling_.has_value(); }
  const std::optional<Matrix>& scaling() const { return scaling_; }
  const std::optional<Matrix>& scaling_inverse() const { return inverse_; }
  /// Dimension fixed by the scaling matrix, or nullopt for unscaled norms.
  std::optional<Eigen::Index> dimension() const;

  /// Text form "l1", "linf", "l1:diag(d1,...,dn)" or "linf:P(a,b;c,d)";
  /// parse_norm reads it back.
  std::string describe() const;

 private:
  explicit NormKind(NormTag tag) : tag_(tag) {}

  NormTag tag_;
  std::optional<Matrix> scaling_;
  std::optional<Matrix> inverse_;
};

/// |v| for the given kind (|P v| when scaled).
/// Inverse of NormKind::describe. Throws ConfigError on malformed input.
NormKind parse_norm(const std::string& spec);

double vector_norm(const NormKind& kind, const Vector& v);

/// Column coefficient c_j(A) = A_jj + sum_{i != j} |A_ij| (0-based j).
double coeff_c(const Matrix& a, Eigen::Index j);
/// Row coefficient d_j(A) = A_jj + sum_{k != j} |A_jk| (0-based j).
double coeff_d(const Matrix& a, Eigen::Index j);

/// P A P^{-1} for scaled kinds, A otherwise.
Matrix scaled_matrix(const NormKind& kind, const Matrix& a);

/// mu_1(A) = max_j c_j(A), mu_inf(A) = max_j d_j(A), applied to P A P^{-1}
/// for scaled kinds.
double matrix_measure(const NormKind& kind, const Matrix& a);

/// Operator norm induced by the kind on R^{n x n}.
double induced_norm(const NormKind& kind, const Matrix& a);

/// Default ladder 1e-2, 1e-3, ..., 1e-6.
std::vector<double> default_eps_ladder();

/// Test oracle computing the measure from its limit definition
/// (||I + eps A|| - 1) / eps, linearly extrapolated from the last two
/// ladder values to eps = 0.
///
/// The induced norm is evaluated directly from absolute column / row
/// sums of the (scaled) matrix I + eps A and does not go through the
/// c_j / d_j coefficients.
double mu_limit_oracle(const NormKind& kind, const Matrix& a,
                       std::span<const double> eps_ladder);
double mu_limit_oracle(const NormKind& kind, const Matrix& a);

/// Throws ConfigError unless `a` is square, non-empty and finite.
void require_square(const Matrix& a, const char* what);

}  // namespace gcs
