// gcs: command-line front end for the contraction checks.
//
// Exit codes: 0 pass / success, 1 fail verdict, 2 usage or configuration
// error, 3 numerical failure.

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcs/certify.hpp"
#include "gcs/errors.hpp"
#include "gcs/integrate.hpp"
#include "gcs/measure.hpp"
#include "gcs/models.hpp"
#include "gcs/registry.hpp"
#include "gcs/report_io.hpp"
#include "gcs/sampling.hpp"
#include "gcs/scaling.hpp"
#include "gcs/variational.hpp"

namespace {

using nlohmann::json;
using namespace gcs;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct OptSpec {
  const char* key;
  const char* help;
};

struct CommandSpec {
  const char* name;
  const char* help;
  std::vector<OptSpec> options;
};

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> specs = {
      {"list-models", "list registered models and their default parameters", {}},
      {"simulate",
       "integrate one trajectory",
       {{"x0", "initial state, comma separated (default: domain center)"},
        {"t0", "initial time"},
        {"horizon", "integration length"},
        {"samples", "number of uniform output samples"},
        {"rel_tol", "relative tolerance"},
        {"abs_tol", "absolute tolerance"}}},
      {"measure",
       "grid supremum of the matrix measure",
       {{"norm", "l1, linf, l1:diag(...), linf:P(a,b;c,d)"},
        {"grid", "points per axis"},
        {"t", "time samples, comma separated"}}},
      {"certify",
       "trajectory-based certificate",
       {{"kind", "sost, so, st, ne or swe"},
        {"norm", "norm specification"},
        {"tau", "transient length"},
        {"epsilon", "overshoot"},
        {"delta", "expansion allowance for swe"},
        {"horizon", "time horizon"},
        {"pairs", "number of initial-condition pairs"},
        {"t1", "initial times, comma separated"},
        {"time_step", "spacing of the t2 grid"},
        {"form", "standard, tau-overshoot or delayed"},
        {"rate_floor", "smallest certifiable rate"},
        {"rel_tol", "relative tolerance"},
        {"abs_tol", "absolute tolerance"}}},
      {"scaling",
       "partition conditions, diagonal scalings, nested and interior contraction",
       {{"mode", "partition-mu1, partition-muinf, construct, nested or ic"},
        {"tag", "l1 or linf (construct)"},
        {"s0", "S0 indices (1-based), comma separated"},
        {"sminus", "S- indices (1-based), comma separated"},
        {"zmap", "i:z pairs (1-based), comma separated"},
        {"epsilon", "fixed epsilon for construct"},
        {"delta", "user-supplied delta for construct"},
        {"similarity", "similarity matrix rows separated by ';'"},
        {"grid", "points per axis"},
        {"zeta", "zeta grid, decreasing, comma separated"},
        {"tau_grid", "tau values, increasing, comma separated"},
        {"norm", "norm specification (ic)"},
        {"horizon", "entry-check horizon (nested)"},
        {"pairs", "number of sampled starts (nested)"},
        {"equilibrium", "also locate the equilibrium (ic): true or false"}}},
      {"entrain",
       "entrainment to a periodic excitation",
       {{"x0", "initial states: points separated by ';', coordinates by ','"},
        {"starts", "number of sampled initial states when x0 is absent"},
        {"period", "forcing period (default: the model's)"},
        {"t0", "initial time"},
        {"horizon", "integration length"},
        {"tol", "residual tolerance"},
        {"window_periods", "number of periods in the residual window"},
        {"samples", "samples per period"}}},
      {"variational",
       "variational system and tangent decay check",
       {{"mode", "integrate or finsler"},
        {"x0", "initial state (integrate)"},
        {"dx0", "initial tangent vector (integrate)"},
        {"a", "segment start (finsler)"},
        {"b", "segment end (finsler)"},
        {"norm", "norm specification"},
        {"tau", "transient length (finsler)"},
        {"horizon", "integration length"},
        {"samples", "number of output samples (integrate)"},
        {"time_step", "spacing of the t grid (finsler)"}}},
      {"fig1",
       "irreversible binding under u(t) = 2 + sin(2 pi t): trajectory and entrainment report",
       {{"horizon", "integration length"}, {"samples", "number of output samples"}}},
  };
  return specs;
}

const CommandSpec& command_spec(const std::string& name) {
  for (const auto& c : commands())
    if (name == c.name) return c;
  throw ConfigError("unknown command '" + name + "'");
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  for (auto& c : f)
    if (c == '_') c = '-';
  return f;
}

// ---------------------------------------------------------------------------
// Option access. Values come from the config file (JSON) or the command
// line (strings); both are accepted.

class Options {
 public:
  explicit Options(json j) : j_(std::move(j)) {}

  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  double number(const std::string& k, double fallback) const {
    if (!has(k)) return fallback;
    return to_number(j_.at(k), k);
  }

  std::size_t count(const std::string& k, std::size_t fallback) const {
    if (!has(k)) return fallback;
    const double v = number(k, 0.0);
    if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw ConfigError("option " + k + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& k, const std::string& fallback) const {
    if (!has(k)) return fallback;
    const auto& v = j_.at(k);
    if (!v.is_string()) throw ConfigError("option " + k + " must be a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& k, bool fallback) const {
    if (!has(k)) return fallback;
    const auto& v = j_.at(k);
    if (v.is_boolean()) return v.get<bool>();
    const auto s = text(k, "");
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("option " + k + " must be true or false");
  }

  std::vector<double> numbers(const std::string& k) const {
    if (!has(k)) return {};
    const auto& v = j_.at(k);
    std::vector<double> out;
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(to_number(e, k));
      return out;
    }
    if (v.is_number()) return {v.get<double>()};
    std::stringstream ss(text(k, ""));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, k));
    return out;
  }

  std::vector<std::vector<double>> rows(const std::string& k) const {
    if (!has(k)) return {};
    const auto& v = j_.at(k);
    std::vector<std::vector<double>> out;
    if (v.is_array()) {
      for (const auto& row : v) {
        if (!row.is_array()) throw ConfigError("option " + k + " must be an array of arrays");
        std::vector<double> r;
        for (const auto& e : row) r.push_back(to_number(e, k));
        out.push_back(r);
      }
      return out;
    }
    std::stringstream ss(text(k, ""));
    std::string line;
    while (std::getline(ss, line, ';')) {
      std::vector<double> r;
      std::stringstream ls(line);
      std::string item;
      while (std::getline(ls, item, ',')) r.push_back(parse_double(item, k));
      out.push_back(r);
    }
    return out;
  }

 private:
  static double parse_double(std::string s, const std::string& k) {
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw ConfigError("option " + k + ": '" + s + "' is not a number");
    return v;
  }

  static double to_number(const json& v, const std::string& k) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_double(v.get<std::string>(), k);
    throw ConfigError("option " + k + " must be a number");
  }

  json j_;
};

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector state_option(const Options& o, const std::string& k, const SystemModel& model, const Vector& fallback) {
  if (!o.has(k)) return fallback;
  const Vector v = to_vector(o.numbers(k));
  if (v.size() != model.dim()) throw ConfigError("option " + k + " must have " + std::to_string(model.dim()) + " entries");
  return v;
}

NormKind norm_option(const Options& o, const SystemModel& model) {
  const NormKind n = parse_norm(o.text("norm", "l1"));
  if (n.dimension() && *n.dimension() != model.dim()) throw ConfigError("norm scaling dimension does not match the model");
  return n;
}

GridSpec grid_option(const Options& o, const SystemModel& model) {
  GridSpec g = GridSpec::default_for(model.dim());
  g.points_per_axis = o.count("grid", g.points_per_axis);
  g.validate();
  return g;
}

std::vector<Eigen::Index> index_option(const Options& o, const std::string& k, Eigen::Index n) {
  std::vector<Eigen::Index> out;
  for (double v : o.numbers(k)) {
    if (v != static_cast<double>(static_cast<long long>(v)) || v < 1 || v > static_cast<double>(n))
      throw ConfigError("option " + k + " must list indices in 1.." + std::to_string(n));
    out.push_back(static_cast<Eigen::Index>(v) - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct Context {
  std::string command;
  std::string model_name;
  json params = json::object();
  Options opts{json::object()};
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string out;
  std::string format;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(Context& ctx, json report) {
  report["command"] = ctx.command;
  if (!ctx.model_name.empty()) report["model"] = ctx.model_name;
  report["seed"] = ctx.seed;
  Output out(ctx.out);
  out.stream() << report.dump(2) << "\n";
}

SystemModel require_model(const Context& ctx) {
  if (ctx.model_name.empty()) throw ConfigError("a model is required (--model or \"model\" in the config)");
  return make_model(ctx.model_name, ctx.params);
}

int verdict_code(Verdict v) { return v == Verdict::Pass ? kExitPass : kExitFail; }

SolverConfig solver_option(const Options& o, SolverConfig base) {
  base.rel_tol = o.number("rel_tol", base.rel_tol);
  base.abs_tol = o.number("abs_tol", base.abs_tol);
  base.validate();
  return base;
}

int run_list_models(Context& ctx) {
  const auto models = model_summaries();
  if (ctx.format == "csv") {
    Output out(ctx.out);
    out.stream() << "name,description\n";
    for (const auto& m : models) out.stream() << m.name << ",\"" << m.description << "\"\n";
    return kExitPass;
  }
  json arr = json::array();
  for (const auto& m : models) arr.push_back({{"name", m.name}, {"description", m.description}, {"defaults", m.defaults}});
  emit_json(ctx, {{"models", arr}});
  return kExitPass;
}

int run_simulate(Context& ctx) {
  const auto model = require_model(ctx);
  const auto& o = ctx.opts;
  const double t0 = o.number("t0", 0.0);
  const double horizon = o.number("horizon", 10.0);
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  const std::size_t samples = o.count("samples", 201);
  if (samples < 2) throw ConfigError("samples must be at least 2");
  const Vector x0 = state_option(o, "x0", model, model.domain().center());
  const auto traj = integrate(model, t0, x0, t0 + horizon, solver_option(o, SolverConfig{}),
                              uniform_times(t0, t0 + horizon, samples));
  if (ctx.format == "csv") {
    Output out(ctx.out);
    write_trajectory_csv(out.stream(), traj);
    return kExitPass;
  }
  json states = json::array();
  for (const auto& x : traj.states) states.push_back(json_vector(x));
  json times = json::array();
  for (double t : traj.times) times.push_back(json_number(t));
  json events = json::array();
  for (double t : traj.events) events.push_back(json_number(t));
  emit_json(ctx, {{"t", times}, {"x", states}, {"events", events}, {"steps", traj.stats.steps},
                  {"rejections", traj.stats.rejections}});
  return kExitPass;
}

int run_measure(Context& ctx) {
  const auto model = require_model(ctx);
  const auto& o = ctx.opts;
  const NormKind norm = norm_option(o, model);
  const GridSpec grid = grid_option(o, model);
  auto ts = o.numbers("t");
  if (ts.empty()) ts = jacobian_time_samples(model, 10.0, 16);
  const auto sup = grid_sup_measure(model, norm, grid, model.domain(), ts);
  const Verdict v = sup.value < -kStrictMargin ? Verdict::Pass : Verdict::Fail;
  if (ctx.format == "csv") {
    Output out(ctx.out);
    write_margin_table(out.stream(), model, norm, grid, model.domain(), ts.front());
  } else {
    json r = to_json(sup);
    r["norm"] = norm.describe();
    r["verdict"] = to_string(v);
    r["note"] = "grid supremum; evidence rather than proof";
    emit_json(ctx, r);
  }
  return verdict_code(v);
}

SostForm parse_form(const std::string& s) {
  if (s == "standard") return SostForm::Standard;
  if (s == "tau-overshoot") return SostForm::TauOvershoot;
  if (s == "delayed") return SostForm::Delayed;
  throw ConfigError("unknown SOST form '" + s + "'");
}

int run_certify(Context& ctx) {
  const auto model = require_model(ctx);
  const auto& o = ctx.opts;
  if (!o.has("kind")) throw ConfigError("certify needs --kind");
  CertificateQuery q;
  q.kind = parse_certificate_kind(o.text("kind", ""));
  q.norm = norm_option(o, model);
  q.tau = o.number("tau", 0.0);
  q.epsilon = o.number("epsilon", 0.0);
  q.delta = o.number("delta", 0.0);
  q.horizon = o.number("horizon", q.horizon);
  q.pair_samples = o.count("pairs", q.pair_samples);
  if (o.has("t1")) q.t1_samples = o.numbers("t1");
  q.time_step = o.number("time_step", 0.0);
  q.sost_form = parse_form(o.text("form", "standard"));
  q.rate_floor = o.number("rate_floor", q.rate_floor);
  q.solver = solver_option(o, q.solver);
  q.seed = ctx.seed;
  q.jobs = ctx.jobs;

  if (q.kind == CertificateKind::SWE) {
    const auto r = check_swe(model, q);
    if (ctx.format == "csv") {
      Output out(ctx.out);
      out.stream() << "kind,delta,horizon,tau0,lipschitz,gronwall_tau0,max_amplification,verdict\n"
                   << "SWE," << format_double(r.delta) << "," << format_double(r.horizon) << ","
                   << format_double(r.tau0) << "," << format_double(r.lipschitz) << ","
                   << format_double(r.gronwall_tau0) << "," << format_double(r.max_amplification) << ","
                   << to_string(r.verdict) << "\n";
    } else {
      json j = to_json(r);
      j["norm"] = q.norm.describe();
      emit_json(ctx, j);
    }
    return verdict_code(r.verdict);
  }
  if (q.kind == CertificateKind::Entrainment) throw ConfigError("use the entrain command for entrainment");
  const auto r = check_certificate(model, q);
  if (ctx.format == "csv") {
    Output out(ctx.out);
    write_certificate_csv(out.stream(), r);
  } else {
    json j = to_json(r);
    j["note"] = "sampled check: no counterexample found at this sampling";
    emit_json(ctx, j);
  }
  return verdict_code(r.verdict);
}

Partition partition_option(const Options& o, Eigen::Index n) {
  Partition p;
  p.s0 = index_option(o, "s0", n);
  p.sminus = index_option(o, "sminus", n);
  if (o.has("zmap")) {
    const std::string spec = o.text("zmap", "");
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("zmap entries must look like i:z");
      Options pair(json{{"i", item.substr(0, colon)}, {"z", item.substr(colon + 1)}});
      const auto i = index_option(pair, "i", n), z = index_option(pair, "z", n);
      p.zmap[i.front()] = z.front();
    }
  }
  p.validate(n);
  return p;
}

std::optional<Matrix> similarity_option(const Options& o, Eigen::Index n) {
  if (!o.has("similarity")) return std::nullopt;
  const auto rows = o.rows("similarity");
  if (static_cast<Eigen::Index>(rows.size()) != n) throw ConfigError("similarity must be n x n");
  Matrix p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError("similarity must be n x n");
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return p;
}

NestedFamily family_for(const Context& ctx, const SystemModel& model, std::vector<double> zetas) {
  if (ctx.model_name == "protein_synthesis") return protein_family(model, parse_protein_params(ctx.params), zetas);
  if (ctx.model_name == "phosphorelay") return phosphorelay_family(parse_phosphorelay_params(ctx.params, false), zetas);
  if (ctx.model_name == "rfm") return phosphorelay_family(parse_phosphorelay_params(ctx.params, true), zetas);
  throw ConfigError("no nested family is built in for model " + ctx.model_name);
}

int run_scaling(Context& ctx) {
  const auto model = require_model(ctx);
  const auto& o = ctx.opts;
  const auto n = model.dim();
  const std::string mode = o.text("mode", "");
  const GridSpec grid = grid_option(o, model);

  if (mode == "partition-mu1" || mode == "partition-muinf") {
    const bool mu1 = mode == "partition-mu1";
    PartitionOptions popts;
    popts.similarity = similarity_option(o, n);
    if (mu1 && popts.similarity) throw ConfigError("similarity applies to partition-muinf only");
    const auto r = mu1 ? check_partition_mu1(model, grid, partition_option(o, n), popts)
                       : check_partition_muinf(model, grid, partition_option(o, n), popts);
    if (ctx.format == "csv") {
      Output out(ctx.out);
      const NormTag tag = mu1 ? NormTag::L1 : NormTag::LInf;
      const NormKind norm = popts.similarity ? NormKind::scaled(tag, *popts.similarity)
                                             : (mu1 ? NormKind::l1() : NormKind::linf());
      write_margin_table(out.stream(), model, norm, grid, model.domain());
    } else {
      emit_json(ctx, to_json(r));
    }
    return verdict_code(r.verdict);
  }
  if (mode == "construct") {
    const std::string tag_text = o.text("tag", "l1");
    if (tag_text != "l1" && tag_text != "linf") throw ConfigError("tag must be l1 or linf");
    ScalingOptions sopts;
    sopts.partition.similarity = similarity_option(o, n);
    if (o.has("delta")) sopts.delta = o.number("delta", 0.0);
    if (o.has("epsilon")) sopts.epsilon = o.number("epsilon", 0.0);
    const auto r = select_scaling(model, grid, partition_option(o, n), tag_text == "l1" ? NormTag::L1 : NormTag::LInf,
                                  sopts);
    if (ctx.format == "csv") {
      Output out(ctx.out);
      write_margin_table(out.stream(), model, r.norm(), grid, model.domain());
    } else {
      json j = to_json(r);
      j["scaled_norm"] = r.norm().describe();
      emit_json(ctx, j);
    }
    return verdict_code(r.verdict);
  }
  if (mode == "nested") {
    auto zetas = o.numbers("zeta");
    if (zetas.empty()) zetas = {0.2, 0.1, 0.05};
    const auto family = family_for(ctx, model, zetas);
    EntryCheck entry;
    if (o.has("tau_grid")) entry.tau_grid = o.numbers("tau_grid");
    entry.horizon = o.number("horizon", entry.horizon);
    entry.pair_samples = o.count("pairs", entry.pair_samples);
    entry.seed = ctx.seed;
    const auto r = check_nested_contraction(model, family, grid, entry);
    if (ctx.format == "csv") {
      Output out(ctx.out);
      out.stream() << "zeta,grid_sup_mu,deviation,from_entry\n";
      for (const auto& row : r.rows)
        out.stream() << format_double(row.zeta) << "," << format_double(row.grid_sup_mu) << ","
                     << format_double(row.deviation) << "," << (row.from_entry ? 1 : 0) << "\n";
    } else {
      emit_json(ctx, to_json(r));
    }
    return verdict_code(r.verdict);
  }
  if (mode == "ic") {
    const NormKind norm = norm_option(o, model);
    IcOptions ic;
    if (o.has("tau_grid")) ic.tau_grid = o.numbers("tau_grid");
    const auto r = check_interior_contractive(model, norm, grid, ic);
    std::optional<EquilibriumReport> eq;
    if (o.flag("equilibrium", false) && r.verdict == Verdict::Pass) {
      EquilibriumOptions eopts;
      eopts.seed = ctx.seed;
      eq = unique_equilibrium(model, 1e-6, eopts);
    }
    if (ctx.format == "csv") {
      Output out(ctx.out);
      out.stream() << "tau,d\n";
      for (const auto& [tau, d] : r.distance) out.stream() << format_double(tau) << "," << format_double(d) << "\n";
    } else {
      json j = to_json(r);
      j["norm"] = norm.describe();
      if (eq) j["equilibrium"] = to_json(*eq);
      emit_json(ctx, j);
    }
    return verdict_code(r.verdict);
  }
  throw ConfigError("scaling needs --mode partition-mu1, partition-muinf, construct, nested or ic");
}

int run_entrain(Context& ctx) {
  const auto model = require_model(ctx);
  const auto& o = ctx.opts;
  EntrainmentOptions e;
  if (o.has("period")) e.period = o.number("period", 0.0);
  e.t0 = o.number("t0", e.t0);
  e.horizon = o.number("horizon", e.horizon);
  e.tol = o.number("tol", e.tol);
  e.window_periods = o.count("window_periods", e.window_periods);
  e.samples_per_period = o.count("samples", e.samples_per_period);
  std::vector<Vector> x0s;
  for (const auto& row : o.rows("x0")) {
    if (static_cast<Eigen::Index>(row.size()) != model.dim()) throw ConfigError("x0 points must match the model dimension");
    x0s.push_back(to_vector(row));
  }
  if (x0s.empty()) x0s = latin_hypercube(model.domain(), o.count("starts", 4), ctx.seed);
  const auto r = check_entrainment(model, x0s, e);
  if (ctx.format == "csv") {
    Output out(ctx.out);
    Trajectory orbit;
    orbit.times = r.orbit_times;
    orbit.states = r.orbit_states;
    write_trajectory_csv(out.stream(), orbit);
  } else {
    emit_json(ctx, to_json(r));
  }
  return verdict_code(r.verdict);
}

int run_variational(Context& ctx) {
  const auto model = require_model(ctx);
  const auto& o = ctx.opts;
  const std::string mode = o.text("mode", "");
  const NormKind norm = norm_option(o, model);
  if (mode == "integrate") {
    const Vector x0 = state_option(o, "x0", model, model.domain().center());
    const Vector dx0 = state_option(o, "dx0", model, Vector::Unit(model.dim(), 0));
    const double horizon = o.number("horizon", 10.0);
    const std::size_t samples = o.count("samples", 201);
    if (!(horizon > 0.0) || samples < 2) throw ConfigError("need horizon > 0 and samples >= 2");
    const auto s = integrate_variational(model, x0, dx0, horizon, certify_solver_defaults(),
                                         uniform_times(0.0, horizon, samples));
    if (ctx.format == "csv") {
      Output out(ctx.out);
      write_variational_csv(out.stream(), s, norm);
    } else {
      json t = json::array(), x = json::array(), dx = json::array(), nd = json::array();
      for (std::size_t k = 0; k < s.times.size(); ++k) {
        t.push_back(json_number(s.times[k]));
        x.push_back(json_vector(s.x[k]));
        dx.push_back(json_vector(s.dx[k]));
        nd.push_back(json_number(vector_norm(norm, s.dx[k])));
      }
      emit_json(ctx, {{"t", t}, {"x", x}, {"dx", dx}, {"norm_dx", nd}, {"norm", norm.describe()}});
    }
    return kExitPass;
  }
  if (mode == "finsler") {
    if (!o.has("a") || !o.has("b")) throw ConfigError("finsler needs --a and --b");
    const Vector a = state_option(o, "a", model, Vector());
    const Vector b = state_option(o, "b", model, Vector());
    FinslerOptions f;
    f.tau = o.number("tau", f.tau);
    f.horizon = o.number("horizon", f.horizon);
    f.time_step = o.number("time_step", 0.0);
    f.jobs = ctx.jobs;
    const auto r = check_finsler_decay(model, a, b, norm, f);
    if (ctx.format == "csv") {
      Output out(ctx.out);
      out.stream() << "r,rate\n";
      for (std::size_t i = 0; i < r.rates.size(); ++i)
        out.stream() << format_double(f.r_samples[i]) << "," << format_double(r.rates[i]) << "\n";
    } else {
      json j = to_json(r);
      j["norm"] = norm.describe();
      emit_json(ctx, j);
    }
    return verdict_code(r.verdict);
  }
  throw ConfigError("variational needs --mode integrate or finsler");
}

int run_fig1(Context& ctx) {
  const auto& o = ctx.opts;
  const auto model = make_irreversible_binding(figure1_params());
  ctx.model_name = model.name();
  const double horizon = o.number("horizon", 30.0);
  const std::size_t samples = o.count("samples", 3001);
  if (!(horizon >= 5.0)) throw ConfigError("fig1 horizon must be at least 5 periods");
  if (samples < 2) throw ConfigError("samples must be at least 2");
  const auto traj = integrate(model, 0.0, figure1_initial_state(), horizon, certify_solver_defaults(),
                              uniform_times(0.0, horizon, samples));
  EntrainmentOptions e;
  e.horizon = horizon;
  const auto rep = check_entrainment(model, {figure1_initial_state()}, e);
  json report = to_json(rep);
  report["x_final"] = json_vector(traj.final_state);

  if (ctx.format == "json") {
    json t = json::array(), x = json::array();
    for (std::size_t k = 0; k < traj.size(); ++k) {
      t.push_back(json_number(traj.times[k]));
      x.push_back(json_vector(traj.states[k]));
    }
    emit_json(ctx, {{"entrainment", report}, {"t", t}, {"x", x}});
  } else {
    {
      Output out(ctx.out);
      write_trajectory_csv(out.stream(), traj);
    }
    report["command"] = ctx.command;
    report["model"] = ctx.model_name;
    report["seed"] = ctx.seed;
    if (ctx.out.empty()) {
      std::cerr << report.dump(2) << "\n";
    } else {
      std::ofstream rep_out(ctx.out + ".entrainment.json");
      if (!rep_out) throw ConfigError("cannot write entrainment report next to " + ctx.out);
      rep_out << report.dump(2) << "\n";
    }
  }
  return verdict_code(rep.verdict);
}

int dispatch(Context& ctx) {
  if (ctx.command == "list-models") return run_list_models(ctx);
  if (ctx.command == "simulate") return run_simulate(ctx);
  if (ctx.command == "measure") return run_measure(ctx);
  if (ctx.command == "certify") return run_certify(ctx);
  if (ctx.command == "scaling") return run_scaling(ctx);
  if (ctx.command == "entrain") return run_entrain(ctx);
  if (ctx.command == "variational") return run_variational(ctx);
  if (ctx.command == "fig1") return run_fig1(ctx);
  throw ConfigError("unknown command '" + ctx.command + "'");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "model" && key != "params" && key != "command" && key != "options")
      throw ConfigError("unknown config key '" + key + "'");
  }
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"Generalized contraction checks for nonlinear ODE models"};
  app.require_subcommand(0, 1);
  std::string config_path, model_name, params_text, format, out_path;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--model", model_name, "registered model name");
  app.add_option("--params", params_text, "model parameters as a JSON object");
  auto* seed_opt = app.add_option("--seed", seed, "sampling seed");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> handles;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    subs[c.name] = sub;
    for (const auto& opt : c.options) {
      handles[c.name][opt.key] = sub->add_option(flag_name(opt.key), values[c.name][opt.key], opt.help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  Context ctx;
  json config = json::object();
  if (!config_path.empty()) config = load_config(config_path);
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) ctx.command = name;
  if (ctx.command.empty()) {
    if (!config.contains("command") || !config["command"].is_string()) {
      std::cerr << app.help();
      throw ConfigError("no command given");
    }
    ctx.command = config["command"].get<std::string>();
  }
  const auto& spec = command_spec(ctx.command);

  json opts = config.value("options", json::object());
  if (!opts.is_object()) throw ConfigError("config options must be an object");
  for (const auto& [key, _] : opts.items()) {
    const bool known = std::any_of(spec.options.begin(), spec.options.end(),
                                   [&](const OptSpec& s) { return key == s.key; }) ||
                       key == "seed" || key == "jobs" || key == "format" || key == "out";
    if (!known) throw ConfigError("option '" + key + "' is not valid for " + ctx.command);
  }
  for (const auto& [key, handle] : handles[ctx.command]) {
    if (handle->count() > 0) opts[key] = values[ctx.command][key];
  }
  Options o(opts);

  ctx.model_name = model_name.empty() ? config.value("model", std::string()) : model_name;
  if (!params_text.empty()) {
    try {
      ctx.params = json::parse(params_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("--params is not valid JSON: ") + e.what());
    }
  } else if (config.contains("params")) {
    ctx.params = config["params"];
  }
  ctx.seed = seed_opt->count() > 0 ? seed : static_cast<std::uint64_t>(o.count("seed", 1));
  ctx.jobs = jobs_opt->count() > 0 ? jobs : o.count("jobs", 1);
  if (ctx.jobs == 0) throw ConfigError("jobs must be at least 1");
  ctx.out = out_path.empty() ? o.text("out", "") : out_path;
  const bool trace = ctx.command == "simulate" || ctx.command == "fig1";
  ctx.format = format.empty() ? o.text("format", trace ? "csv" : "json") : format;
  if (ctx.format != "json" && ctx.format != "csv") throw ConfigError("format must be json or csv");
  ctx.opts = o;
  return dispatch(ctx);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gcs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gcs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
