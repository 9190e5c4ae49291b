#include "gcs/registry.hpp"

#include <functional>
#include <set>

#include "gcs/errors.hpp"

namespace gcs {
namespace {

using nlohmann::json;

// Reads typed values out of a parameter object and remembers which keys
// were consumed so that leftovers can be reported.
class ParamReader {
 public:
  ParamReader(const json& j, std::string model) : j_(j), model_(std::move(model)) {
    if (!j_.is_null() && !j_.is_object()) throw ConfigError("params for " + model_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(model_ + "." + key + " must be a number");
    return v.get<double>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(model_ + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(model_ + "." + key + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json* raw(const std::string& key) {
    used_.insert(key);
    return has(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    if (!j_.is_object()) return;
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown parameter '" + key + "' for model " + model_);
    }
  }

 private:
  const json& j_;
  std::string model_;
  std::set<std::string> used_;
};

std::vector<std::pair<double, double>> parse_points(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of [t, value] pairs");
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ConfigError(what + " must be an array of [t, value] pairs");
    pts.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return pts;
}

InputSignal input_or(ParamReader& r, const std::string& key, InputSignal fallback) {
  const json* j = r.raw(key);
  return j ? parse_input(*j) : fallback;
}

struct Entry {
  ModelSummary summary;
  std::function<SystemModel(const json&)> make;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{"scalar_classK", "x' = -alpha(t) x on [-1, 1]", json{{"alpha", "linear"}}},
       [](const json& p) {
         ParamReader r(p, "scalar_classK");
         const json* a = r.raw("alpha");
         r.finish();
         return make_scalar_classK(a ? parse_class_k(*a) : ClassK::linear());
       }},
      {{"protein_synthesis", "protein synthesis feedback loop with g(u) = (1 + u)/(k + u)",
        json{{"alphas", {1.0, 1.0}}, {"k", 2.0}, {"r", 1.0}}},
       [](const json& p) { return make_protein_synthesis(parse_protein_params(p)); }},
      {{"phosphorelay", "serial phosphorelay on [0, p1] x ... x [0, pn]",
        json{{"etas", {1.0, 1.0, 1.0}}, {"ps", {1.0, 1.0, 1.0}}, {"c", 1.0}}},
       [](const json& p) { return make_phosphorelay(parse_phosphorelay_params(p, false)); }},
      {{"rfm", "ribosome flow model (phosphorelay with unit capacities)",
        json{{"etas", {1.0, 1.0, 1.0}}, {"c", 1.0}}},
       [](const json& p) { return make_phosphorelay(parse_phosphorelay_params(p, true)); }},
      {{"transcriptional", "transcription factor binding a single downstream module",
        json{{"delta", 1.0}, {"k1", 1.0}, {"k2", 1.0}, {"eT", 1.0}, {"xmax", 0.0}}},
       [](const json& p) {
         ParamReader r(p, "transcriptional");
         TranscriptionalParams t;
         t.delta = r.number("delta", t.delta);
         t.k1 = r.number("k1", t.k1);
         t.k2 = r.number("k2", t.k2);
         t.eT = r.number("eT", t.eT);
         t.xmax = r.number("xmax", t.xmax);
         r.finish();
         return make_transcriptional_module(t);
       }},
      {{"multi_transcriptional", "transcription factor driving several downstream modules",
        json{{"delta", 1.0}, {"k1s", {1.0, 1.0, 1.0}}, {"k2s", {1.0, 1.0, 1.0}}, {"eTs", {1.0, 1.0, 1.0}},
             {"xmax", 0.0}}},
       [](const json& p) {
         ParamReader r(p, "multi_transcriptional");
         MultiTranscriptionalParams t;
         t.delta = r.number("delta", t.delta);
         t.k1s = r.numbers("k1s", {1.0, 1.0, 1.0});
         t.k2s = r.numbers("k2s", {1.0, 1.0, 1.0});
         t.eTs = r.numbers("eTs", {1.0, 1.0, 1.0});
         t.xmax = r.number("xmax", t.xmax);
         r.finish();
         return make_multi_transcriptional(t);
       }},
      {{"irreversible_binding", "irreversible binding to a downstream species with input u(t)",
        json{{"delta", 2.0}, {"k2", 1.0}, {"zT", 4.0}, {"eT", 3.0}, {"u", 2.0}}},
       [](const json& p) { return make_irreversible_binding(parse_irreversible_params(p)); }},
      {{"piecewise_shift", "x' = -2x for |x| < 1/2, -sign(x) otherwise, on [-1, 1]", json::object()},
       [](const json& p) {
         ParamReader r(p, "piecewise_shift");
         r.finish();
         return make_piecewise_shift();
       }},
      {{"linear", "x' = A x on a box", json{{"A", {{-1.0}}}, {"lower", {-1.0}}, {"upper", {1.0}}}},
       [](const json& p) {
         ParamReader r(p, "linear");
         static const json default_a = {{-1.0}};
         const json* a = r.raw("A");
         if (!a) a = &default_a;
         if (!a->is_array() || a->empty()) throw ConfigError("linear.A must be a non-empty array of rows");
         const auto n = static_cast<Eigen::Index>(a->size());
         const auto lo = r.numbers("lower", std::vector<double>(static_cast<std::size_t>(n), -1.0));
         const auto hi = r.numbers("upper", std::vector<double>(static_cast<std::size_t>(n), 1.0));
         r.finish();
         Matrix m(n, n);
         for (Eigen::Index i = 0; i < n; ++i) {
           const auto& row = (*a)[static_cast<std::size_t>(i)];
           if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
             throw ConfigError("linear.A must be square");
           for (Eigen::Index k = 0; k < n; ++k) {
             if (!row[static_cast<std::size_t>(k)].is_number()) throw ConfigError("linear.A entries must be numbers");
             m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
           }
         }
         if (static_cast<Eigen::Index>(lo.size()) != n || static_cast<Eigen::Index>(hi.size()) != n)
           throw ConfigError("linear.lower and linear.upper must match the size of A");
         return make_linear(m, Domain::box(Eigen::Map<const Vector>(lo.data(), n), Eigen::Map<const Vector>(hi.data(), n)));
       }},
  };
  return entries;
}

}  // namespace

std::vector<ModelSummary> model_summaries() {
  std::vector<ModelSummary> out;
  for (const auto& e : registry()) out.push_back(e.summary);
  return out;
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.summary.name);
  return out;
}

SystemModel make_model(const std::string& name, const json& params) {
  for (const auto& e : registry()) {
    if (e.summary.name == name) return e.make(params);
  }
  throw ConfigError("unknown model '" + name + "'");
}

InputSignal parse_input(const json& j) {
  if (j.is_number()) return InputSignal::constant(j.get<double>());
  if (!j.is_object()) throw ConfigError("input signal must be a number or an object");
  ParamReader r(j, "input");
  if (r.has("constant")) {
    const double v = r.number("constant", 0.0);
    r.finish();
    return InputSignal::constant(v);
  }
  if (r.has("table")) {
    const auto pts = parse_points(*r.raw("table"), "input.table");
    std::optional<double> period;
    if (r.has("period")) period = r.number("period", 0.0);
    r.finish();
    return InputSignal::table(pts, period);
  }
  if (r.has("offset") || r.has("amplitude")) {
    const double off = r.number("offset", 0.0);
    const double amp = r.number("amplitude", 0.0);
    const double period = r.number("period", 1.0);
    r.finish();
    return InputSignal::sinusoid(off, amp, period);
  }
  throw ConfigError("input signal object needs 'constant', 'table' or 'offset'/'amplitude'");
}

ClassK parse_class_k(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "linear") return ClassK::linear();
    if (s == "quadratic") return ClassK::quadratic();
    if (s == "saturating") return ClassK::saturating();
    throw ConfigError("unknown class-K form '" + s + "'");
  }
  if (j.is_object()) {
    ParamReader r(j, "alpha");
    const json* t = r.raw("table");
    r.finish();
    if (!t) throw ConfigError("class-K object needs a 'table'");
    return ClassK::table(parse_points(*t, "alpha.table"));
  }
  throw ConfigError("class-K spec must be a string or a table object");
}

ProteinSynthesisParams parse_protein_params(const json& params) {
  ParamReader r(params, "protein_synthesis");
  ProteinSynthesisParams p;
  p.alphas = r.numbers("alphas", {1.0, 1.0});
  p.k = r.number("k", p.k);
  p.r = r.number("r", p.r);
  r.finish();
  return p;
}

PhosphorelayParams parse_phosphorelay_params(const json& params, bool rfm) {
  const std::string name = rfm ? "rfm" : "phosphorelay";
  ParamReader r(params, name);
  PhosphorelayParams p;
  p.etas = r.numbers("etas", {1.0, 1.0, 1.0});
  if (rfm) {
    p.ps.assign(p.etas.size(), 1.0);
  } else {
    p.ps = r.numbers("ps", std::vector<double>(p.etas.size(), 1.0));
  }
  p.input = input_or(r, "c", InputSignal::constant(1.0));
  r.finish();
  return p;
}

IrreversibleBindingParams parse_irreversible_params(const json& params) {
  ParamReader r(params, "irreversible_binding");
  IrreversibleBindingParams p;
  p.delta = r.number("delta", p.delta);
  p.k2 = r.number("k2", p.k2);
  p.zT = r.number("zT", p.zT);
  p.eT = r.number("eT", p.eT);
  p.input = input_or(r, "u", p.input);
  r.finish();
  return p;
}

}  // namespace gcs
