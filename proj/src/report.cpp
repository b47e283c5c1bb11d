#include "kstab/report.hpp"

#include <chrono>
#include <fstream>
#include <iterator>

#include "kstab/error.hpp"
#include "kstab/filtration.hpp"
#include "kstab/stability.hpp"
#include "kstab/surface.hpp"

namespace kstab {

using nlohmann::json;

namespace {

json exact(const Rational& q) { return to_string(q); }

json exact(const DivisorClass& d) {
  json out = json::array();
  for (const auto& c : d.coefficients()) out.push_back(to_string(c));
  return out;
}

StabilityOptions stability_options(const Tolerances& tol, std::uint64_t seed) {
  StabilityOptions o;
  o.quadrature.tolerance = tol.quadrature;
  o.optimizer.tolerance = tol.optimizer;
  o.optimizer.seed = seed;
  o.gradient_tolerance = tol.gradient;
  return o;
}

json tolerances_json(const Tolerances& tol, const StabilityOptions& o) {
  return {{"quadrature", tol.quadrature},
          {"optimizer", tol.optimizer},
          {"gradient", tol.gradient},
          {"argmax_epsilon", o.argmax_epsilon},
          {"argmax_radius", o.argmax_radius}};
}

json norm_json(const NormResult& r) {
  return {{"norm", r.value},
          {"maximizers", r.maximizers},
          {"argmax_clusters", r.maximizers.size()},
          {"box_bound", r.box_bound},
          {"converged", r.converged}};
}

json beta_json(const BetaReport& b) {
  json ratio = b.stability_ratio ? json(*b.stability_ratio) : json(nullptr);
  return {{"entropy_term", exact(b.entropy)},
          {"entropy_term_float", b.entropy_term},
          {"derivative_term", b.derivative_term},
          {"beta", b.beta},
          {"norm", b.norm},
          {"stability_ratio", ratio},
          {"stability_ratio_defined", b.stability_ratio.has_value()}};
}

struct Executor {
  const JobConfig& job;
  const StabilityOptions& opt;

  json operator()(const VolumeTask& t) const {
    const Rational v = job.model->volume(t.cls);
    return {{"class", exact(t.cls)}, {"volume", exact(v)}, {"volume_float", to_double(v)}};
  }

  json operator()(const ZariskiTask& t) const {
    const auto& surface = dynamic_cast<const SurfaceModel&>(*job.model);
    const auto z = surface.zariski(t.cls);
    json neg = json::array();
    for (const auto& [curve, coef] : z.negative) neg.push_back({{"curve", curve.name}, {"coefficient", exact(coef)}});
    return {{"class", exact(t.cls)},
            {"positive", exact(z.positive)},
            {"negative", neg},
            {"volume", exact(surface.lattice().dot(z.positive, z.positive))}};
  }

  json operator()(const GammaTask& t) const {
    const Threshold g = gamma_threshold(*job.model, t.cls, t.valuation, 1e-12);
    return {{"valuation", t.valuation.name()},
            {"gamma", g.value},
            {"exact", g.exact ? exact(*g.exact) : json(nullptr)}};
  }

  json operator()(const STask& t) const {
    return {{"S", expected_order_S(*job.model, t.line_bundle, FiltrationSpec(t.support, t.shifts), opt.quadrature)}};
  }

  json operator()(const NormTask& t) const { return norm_json(norm(*job.model, t.line_bundle, t.measure, opt)); }

  json operator()(const BetaTask& t) const {
    json out = beta_json(beta(*job.model, t.line_bundle, t.measure, opt));
    out["evidence"] = kEvidenceLabel;
    return out;
  }

  json operator()(const DeltaTask& t) const {
    const auto d = delta_anticanonical(*job.model, t.candidates, opt.quadrature);
    json rows = json::array();
    for (const auto& c : d.candidates)
      rows.push_back({{"valuation", c.valuation.name()},
                      {"log_discrepancy", exact(c.valuation.log_discrepancy())},
                      {"S", c.expected_order},
                      {"ratio", c.ratio}});
    return {{"delta", d.value},
            {"witness", d.witness.name()},
            {"candidates", rows},
            {"evidence", "minimum over the listed candidates; an upper bound for delta"}};
  }

  json operator()(const MASolveTask& t) const {
    const auto s = ma_solve(*job.model, t.line_bundle, t.measure, opt);
    const auto atoms = t.measure.atoms();
    json masses = json::array(), flat = json::array(), sided = json::array();
    double total = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      masses.push_back({{"valuation", atoms[i].valuation.name()}, {"mass", s.measure_out[i]}});
      total += s.measure_out[i];
    }
    for (const auto& k : s.one_sided) {
      flat.push_back(atoms[k.index].valuation.name());
      sided.push_back({{"valuation", atoms[k.index].valuation.name()}, {"forward", k.forward}, {"backward", k.backward}});
    }
    return {{"t_star", s.t_star},
            {"measure_out", masses},
            {"mass_sum", total},
            {"residual", s.residual},
            {"flat_directions", flat},
            {"one_sided", sided},
            {"value", s.value},
            {"argmax_clusters", s.argmax.maximizers.size()},
            {"evidence", kEvidenceLabel}};
  }

  json operator()(const ProbeTask& t) const {
    const auto r = divisorial_stability_probe(*job.model, t.line_bundle, t.measures, t.epsilon, opt);
    json entries = json::array();
    for (const auto& b : r.entries) entries.push_back(beta_json(b));
    auto opt_json = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    return {{"epsilon", t.epsilon},
            {"entries", entries},
            {"min_ratio", opt_json(r.min_ratio)},
            {"min_index", opt_json(r.min_index)},
            {"witness_index", opt_json(r.witness)},
            {"verdict", describe(r.verdict)},
            {"evidence", kEvidenceLabel}};
  }

  json operator()(const FiniteKTask& t) const {
    const FiltrationSpec spec(t.support, t.shifts);
    const double s = expected_order_S(*job.model, t.line_bundle, spec, opt.quadrature);
    json rows = json::array();
    for (long k : t.ks) {
      const auto p = filtration_volume_finite_k(*job.model, t.line_bundle, spec, k);
      const double v = p.volume / static_cast<double>(k);
      rows.push_back({{"k", k}, {"sections", p.jumps.size()}, {"normalized_volume", v}, {"error", std::abs(v - s)}});
    }
    return {{"S", s}, {"levels", rows}};
  }
};

json error_json(const std::exception& e) {
  std::string kind = "internal";
  json err;
  if (const auto* s = dynamic_cast<const SchemaError*>(&e)) {
    kind = "schema";
    err["path"] = s->path();
  } else if (dynamic_cast<const GeometryError*>(&e)) {
    kind = "geometry";
  } else if (dynamic_cast<const ConvergenceError*>(&e)) {
    kind = "convergence";
  }
  err["kind"] = kind;
  err["message"] = e.what();
  return err;
}

json envelope(const std::string& hash) {
  return {{"toolkit", kToolkitName}, {"version", kToolkitVersion}, {"config_hash", hash}};
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return 2;
  if (dynamic_cast<const GeometryError*>(&e)) return 3;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
  return 1;
}

RunResult run_job(const JobConfig& job, const std::string& config_hash, const RunOptions& options) {
  Tolerances tol = job.tolerances;
  RunResult out{json::array(), 0};
  try {
    for (const auto& [key, value] : options.tolerance_overrides) {
      if (!(value > 0)) throw SchemaError("--tolerance-override." + key, "tolerance must be positive");
      if (key == "quadrature") tol.quadrature = value;
      else if (key == "optimizer") tol.optimizer = value;
      else if (key == "gradient") tol.gradient = value;
      else throw SchemaError("--tolerance-override." + key, "unknown tolerance (expected quadrature, optimizer or gradient)");
    }
  } catch (const SchemaError& e) {
    json err = envelope(config_hash);
    err["task_index"] = nullptr;
    err["error"] = error_json(e);
    out.report.push_back(err);
    out.exit_code = 2;
    return out;
  }
  const std::uint64_t seed = options.seed.value_or(job.seed);
  const StabilityOptions opt = stability_options(tol, seed);
  const Executor exec{job, opt};

  for (std::size_t i = 0; i < job.tasks.size(); ++i) {
    const Task& task = job.tasks[i];
    json entry = envelope(config_hash);
    entry["task_index"] = i;
    entry["kind"] = task.kind;
    entry["inputs"] = task.inputs;
    const auto start = std::chrono::steady_clock::now();
    try {
      entry["outputs"] = std::visit(exec, task.body);
    } catch (const std::exception& e) {
      entry["error"] = error_json(e);
      out.report.push_back(entry);
      out.exit_code = exit_code_for(e);
      return out;
    }
    entry["tolerances"] = tolerances_json(tol, opt);
    entry["seed"] = seed;
    if (options.timing)
      entry["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report.push_back(std::move(entry));
  }
  return out;
}

RunResult run_config_file(const std::filesystem::path& path, const RunOptions& options) {
  std::string bytes;
  std::ifstream in(path, std::ios::binary);
  if (in) bytes.assign(std::istreambuf_iterator<char>(in), {});
  const std::string hash = fnv1a_hex(bytes);
  try {
    if (!in) throw SchemaError("", "cannot read config '" + path.string() + "'");
    json doc;
    try {
      doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
      throw SchemaError("", "invalid JSON in '" + path.string() + "': " + e.what());
    }
    return run_job(parse_config(doc), hash, options);
  } catch (const std::exception& e) {
    json err = envelope(hash);
    err["task_index"] = nullptr;
    err["error"] = error_json(e);
    return {json::array({err}), exit_code_for(e)};
  }
}

}  // namespace kstab
