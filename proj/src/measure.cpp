#include "gcs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gcs/errors.hpp"

namespace gcs {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw ConfigError(msg.str());
  }
  if (!a.allFinite()) {
    throw ConfigError(std::string(what) + ": matrix has non-finite entries");
  }
}

NormKind NormKind::scaled(NormTag tag, const Matrix& p) {
  require_square(p, "scaling matrix");
  Eigen::PartialPivLU<Matrix> lu(p);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kMaxCondition)) {
    std::ostringstream msg;
    msg << "scaling matrix is singular or ill-conditioned (rcond=" << rcond << ")";
    throw ConfigError(msg.str());
  }
  NormKind kind(tag);
  kind.scaling_ = p;
  kind.inverse_ = lu.inverse();
  return kind;
}

NormKind NormKind::diagonal(NormTag tag, const Vector& d) {
  if (d.size() == 0) throw ConfigError("diagonal scaling must be non-empty");
  return scaled(tag, Matrix(d.asDiagonal()));
}

std::optional<Eigen::Index> NormKind::dimension() const {
  if (!scaling_) return std::nullopt;
  return scaling_->rows();
}

std::string NormKind::describe() const {
  std::string base = tag_ == NormTag::L1 ? "l1" : "linf";
  if (!scaling_) return base;
  const Matrix& p = *scaling_;
  const bool diag = p.isDiagonal(0.0);
  std::ostringstream out;
  out.precision(17);
  out << base << (diag ? ":diag(" : ":P(");
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (diag) {
      out << (i ? "," : "") << p(i, i);
      continue;
    }
    out << (i ? ";" : "");
    for (Eigen::Index j = 0; j < p.cols(); ++j) out << (j ? "," : "") << p(i, j);
  }
  out << ")";
  return out.str();
}

NormKind parse_norm(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string base = spec.substr(0, colon);
  NormTag tag;
  if (base == "l1") {
    tag = NormTag::L1;
  } else if (base == "linf") {
    tag = NormTag::LInf;
  } else {
    throw ConfigError("unknown norm '" + spec + "' (expected l1 or linf, optionally scaled)");
  }
  if (colon == std::string::npos) return tag == NormTag::L1 ? NormKind::l1() : NormKind::linf();

  const std::string rest = spec.substr(colon + 1);
  const bool diag = rest.rfind("diag(", 0) == 0;
  const bool full = rest.rfind("P(", 0) == 0;
  if ((!diag && !full) || rest.back() != ')') throw ConfigError("malformed norm scaling in '" + spec + "'");
  const std::string body = rest.substr(diag ? 5 : 2, rest.size() - (diag ? 6 : 3));

  auto parse_row = [&](const std::string& text) {
    std::vector<double> row;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        throw ConfigError("malformed number '" + item + "' in norm '" + spec + "'");
      }
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw ConfigError("malformed number '" + item + "' in norm '" + spec + "'");
      row.push_back(v);
    }
    return row;
  };
  if (diag) {
    const auto d = parse_row(body);
    return NormKind::diagonal(tag, Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size())));
  }
  std::vector<std::vector<double>> rows;
  std::stringstream ss(body);
  std::string line;
  while (std::getline(ss, line, ';')) rows.push_back(parse_row(line));
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError("norm scaling matrix must be square in '" + spec + "'");
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return NormKind::scaled(tag, p);
}

namespace {

void check_dim(const NormKind& kind, Eigen::Index n, const char* what) {
  if (auto d = kind.dimension(); d && *d != n) {
    std::ostringstream msg;
    msg << what << ": dimension " << n << " does not match scaling dimension " << *d;
    throw ConfigError(msg.str());
  }
}

double raw_norm(NormTag tag, const Vector& v) {
  return tag == NormTag::L1 ? v.lpNorm<1>() : v.lpNorm<Eigen::Infinity>();
}

}  // namespace

double vector_norm(const NormKind& kind, const Vector& v) {
  check_dim(kind, v.size(), "vector_norm");
  if (kind.is_scaled()) return raw_norm(kind.tag(), *kind.scaling() * v);
  return raw_norm(kind.tag(), v);
}

double coeff_c(const Matrix& a, Eigen::Index j) {
  if (j < 0 || j >= a.cols()) throw ConfigError("coeff_c: column index out of range");
  double sum = a(j, j);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (i != j) sum += std::abs(a(i, j));
  }
  return sum;
}

double coeff_d(const Matrix& a, Eigen::Index j) {
  if (j < 0 || j >= a.rows()) throw ConfigError("coeff_d: row index out of range");
  double sum = a(j, j);
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (k != j) sum += std::abs(a(j, k));
  }
  return sum;
}

Matrix scaled_matrix(const NormKind& kind, const Matrix& a) {
  require_square(a, "matrix");
  check_dim(kind, a.rows(), "matrix");
  if (!kind.is_scaled()) return a;
  return *kind.scaling() * a * *kind.scaling_inverse();
}

double matrix_measure(const NormKind& kind, const Matrix& a) {
  const Matrix b = scaled_matrix(kind, a);
  double mu = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    mu = std::max(mu, kind.tag() == NormTag::L1 ? coeff_c(b, j) : coeff_d(b, j));
  }
  return mu;
}

double induced_norm(const NormKind& kind, const Matrix& a) {
  const Matrix b = scaled_matrix(kind, a).cwiseAbs();
  if (kind.tag() == NormTag::L1) return b.colwise().sum().maxCoeff();
  return b.rowwise().sum().maxCoeff();
}

std::vector<double> default_eps_ladder() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

double mu_limit_oracle(const NormKind& kind, const Matrix& a, std::span<const double> eps_ladder) {
  require_square(a, "mu_limit_oracle");
  if (eps_ladder.empty()) throw ConfigError("mu_limit_oracle: empty eps ladder");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0) || (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))) {
      throw ConfigError("mu_limit_oracle: eps ladder must be positive and strictly decreasing");
    }
  }
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  auto quotient = [&](double eps) { return (induced_norm(kind, id + eps * a) - 1.0) / eps; };

  if (eps_ladder.size() == 1) return quotient(eps_ladder[0]);
  const double e1 = eps_ladder[eps_ladder.size() - 2];
  const double e2 = eps_ladder.back();
  const double q1 = quotient(e1);
  const double q2 = quotient(e2);
  return q2 - e2 * (q1 - q2) / (e1 - e2);
}

double mu_limit_oracle(const NormKind& kind, const Matrix& a) {
  const auto ladder = default_eps_ladder();
  return mu_limit_oracle(kind, a, ladder);
}

}  // namespace gcs
