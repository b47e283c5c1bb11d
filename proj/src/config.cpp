#include "kstab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "kstab/error.hpp"
#include "kstab/stability.hpp"
#include "kstab/surface.hpp"
#include "kstab/toric.hpp"

namespace kstab {

using nlohmann::json;

namespace {

// A JSON value together with its location, so every complaint names the field.
class Node {
 public:
  Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const json& value() const { return *value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const { throw SchemaError(path_, message); }

  void require_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_->is_object()) fail("expected an object");
    for (const auto& [key, _] : value_->items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        Node(*value_, child_path(key)).fail("unknown field");
  }

  std::optional<Node> find(std::string_view key) const {
    const auto it = value_->find(key);
    if (it == value_->end()) return std::nullopt;
    return Node(*it, child_path(key));
  }

  Node at(std::string_view key) const {
    auto n = find(key);
    if (!n) Node(*value_, child_path(key)).fail("missing required field");
    return *n;
  }

  std::size_t size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  Node operator[](std::size_t i) const { return Node((*value_)[i], path_ + "[" + std::to_string(i) + "]"); }

  std::string string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  long integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    return value_->get<long>();
  }

  Rational rational() const { return parse_json_rational(*value_, path_); }

  // Reals may be written as JSON numbers or as exact rationals.
  double real() const {
    if (value_->is_string()) return to_double(rational());
    if (!value_->is_number()) fail("expected a number");
    const double x = value_->get<double>();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
  }

  template <class F>
  auto list(F&& item) const {
    std::vector<decltype(item((*this)[0]))> out;
    const std::size_t n = size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(item((*this)[i]));
    return out;
  }

  std::vector<Rational> rationals(std::size_t expected) const {
    auto v = list([](const Node& n) { return n.rational(); });
    if (v.size() != expected)
      fail("expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
    return v;
  }

 private:
  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* value_;
  std::string path_;
};

std::vector<std::string> unique_names(const Node& n) {
  auto names = n.list([](const Node& x) { return x.string(); });
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!seen.insert(names[i]).second) n[i].fail("duplicate name '" + names[i] + "'");
  return names;
}

std::vector<Curve> parse_curves(const Node& n, const std::string& id, std::size_t rank) {
  return n.list([&](const Node& c) {
    c.require_object({"name", "class"});
    return Curve{c.at("name").string(), DivisorClass(id, c.at("class").rationals(rank))};
  });
}

SurfaceLattice parse_lattice(const Node& n, std::initializer_list<std::string_view> extra_fields) {
  std::vector<std::string_view> allowed{"name",           "basis",           "intersection_matrix",
                                        "canonical_class", "negative_curves", "sample_curves"};
  allowed.insert(allowed.end(), extra_fields.begin(), extra_fields.end());
  if (!n.value().is_object()) n.fail("expected an object");
  for (const auto& [key, _] : n.value().items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) n.at(key).fail("unknown field");

  const std::string id = n.at("name").string();
  const auto labels = unique_names(n.at("basis"));
  const std::size_t r = labels.size();
  if (r == 0) n.at("basis").fail("basis is empty");
  const Node m = n.at("intersection_matrix");
  if (m.size() != r) m.fail("expected " + std::to_string(r) + " rows");
  RationalMatrix form;
  for (std::size_t i = 0; i < r; ++i) form.push_back(m[i].rationals(r));
  auto canonical = n.at("canonical_class").rationals(r);
  auto negative = n.find("negative_curves") ? parse_curves(n.at("negative_curves"), id, r) : std::vector<Curve>{};
  auto samples = parse_curves(n.at("sample_curves"), id, r);
  return SurfaceLattice(id, labels, std::move(form), std::move(canonical), std::move(negative), std::move(samples));
}

std::shared_ptr<const GeometryModel> parse_surface(const Node& n) {
  SurfaceLattice base = parse_lattice(n, {"type", "birational_models", "valuations"});
  std::vector<BirationalModel> models;
  if (auto bm = n.find("birational_models")) {
    for (std::size_t i = 0; i < bm->size(); ++i) {
      const Node b = (*bm)[i];
      SurfaceLattice lat = parse_lattice(b, {"pullback"});
      const Node p = b.at("pullback");
      if (p.size() != lat.rank()) p.fail("expected " + std::to_string(lat.rank()) + " rows");
      RationalMatrix pull;
      for (std::size_t r = 0; r < lat.rank(); ++r) pull.push_back(p[r].rationals(base.rank()));
      models.push_back({std::move(lat), std::move(pull)});
    }
  }
  auto rank_of = [&](const std::string& id, const Node& where) -> std::size_t {
    if (id == base.id()) return base.rank();
    for (const auto& m : models)
      if (m.lattice.id() == id) return m.lattice.rank();
    where.fail("unknown model '" + id + "'");
  };

  // Unspecified log discrepancies come from the model itself, so build it once without them.
  const SurfaceModel bare(base, models);
  std::vector<Valuation> vals;
  if (auto vs = n.find("valuations")) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < vs->size(); ++i) {
      const Node v = (*vs)[i];
      v.require_object({"name", "center", "log_discrepancy"});
      const std::string name = v.at("name").string();
      if (name == kTrivialValuationName) v.at("name").fail("the name 'trivial' is reserved");
      if (!seen.insert(name).second) v.at("name").fail("duplicate valuation '" + name + "'");
      const Node c = v.at("center");
      if (!c.value().is_object() || c.value().empty()) c.fail("expected a non-empty object of model id to class");
      SurfaceCenter center;
      for (const auto& [id, _] : c.value().items()) {
        const Node cls = c.at(id);
        center.classes.emplace_back(id, cls.rationals(rank_of(id, cls)));
      }
      Rational a;
      if (auto given = v.find("log_discrepancy")) {
        a = given->rational();
      } else {
        const DivisorClass& first = center.classes.front();
        a = first.basis_id() == base.id() ? Rational(1) : bare.log_discrepancy(first.basis_id(), first);
      }
      vals.emplace_back(name, a, std::move(center));
    }
  }
  return std::make_shared<SurfaceModel>(std::move(base), std::move(models), std::move(vals));
}

std::shared_ptr<const GeometryModel> parse_toric(const Node& n) {
  n.require_object({"type", "name", "rays", "ray_names", "cones", "valuations"});
  const std::string id = n.at("name").string();
  const Node rn = n.at("rays");
  auto rays = rn.list([](const Node& r) { return r.list([](const Node& x) { return x.integer(); }); });
  if (rays.empty()) rn.fail("no rays");
  for (std::size_t i = 0; i < rays.size(); ++i)
    if (rays[i].size() != rays[0].size()) rn[i].fail("rays differ in dimension");
  const std::size_t dim = rays[0].size();
  auto names = unique_names(n.at("ray_names"));
  if (names.size() != rays.size()) n.at("ray_names").fail("expected one name per ray");
  std::vector<std::vector<std::size_t>> cones;
  if (auto cn = n.find("cones"))
    cones = cn->list([&](const Node& c) {
      return c.list([&](const Node& x) {
        const long k = x.integer();
        if (k < 0 || static_cast<std::size_t>(k) >= rays.size()) x.fail("ray index out of range");
        return static_cast<std::size_t>(k);
      });
    });
  // Declared valuations need the fan for their default log discrepancy.
  const ToricModel bare(id, rays, names, cones);
  std::vector<Valuation> extra;
  if (auto vs = n.find("valuations")) {
    for (std::size_t i = 0; i < vs->size(); ++i) {
      const Node v = (*vs)[i];
      v.require_object({"name", "vector", "log_discrepancy"});
      const std::string name = v.at("name").string();
      if (name == kTrivialValuationName) v.at("name").fail("the name 'trivial' is reserved");
      if (std::find(names.begin(), names.end(), name) != names.end())
        v.at("name").fail("name '" + name + "' is already a ray");
      auto w = v.at("vector").list([](const Node& x) { return x.integer(); });
      if (w.size() != dim) v.at("vector").fail("expected " + std::to_string(dim) + " entries");
      Rational a;
      if (auto given = v.find("log_discrepancy")) {
        a = given->rational();
      } else {
        try {
          a = bare.log_discrepancy(w);
        } catch (const GeometryError& e) {
          v.at("vector").fail(e.what());
        }
      }
      extra.emplace_back(name, a, MonomialCenter{std::move(w)});
    }
  }
  return std::make_shared<ToricModel>(id, std::move(rays), std::move(names), std::move(cones), std::move(extra));
}

struct Context {
  const GeometryModel& model;
  const DivisorClass& line_bundle;
};

DivisorClass parse_class(const Node& n, const GeometryModel& model) {
  if (n.value().is_string() && n.value().get<std::string>() == "anticanonical") return -model.canonical_class();
  return model.make_class(n.rationals(model.class_rank()));
}

Valuation resolve(const Node& n, const GeometryModel& model) {
  const std::string name = n.string();
  if (name == kTrivialValuationName) return Valuation::trivial();
  for (const auto& v : model.valuations())
    if (v.name() == name) return v;
  n.fail("unknown valuation '" + name + "'");
}

DivisorialMeasure parse_measure(const Node& n, const GeometryModel& model) {
  n.require_object({"atoms"});
  const Node atoms = n.at("atoms");
  std::vector<Atom> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Node a = atoms[i];
    a.require_object({"valuation", "mass"});
    Valuation v = resolve(a.at("valuation"), model);
    if (!seen.insert(v.name()).second) a.at("valuation").fail("valuation '" + v.name() + "' appears twice");
    const Rational mass = a.at("mass").rational();
    if (sgn(mass) < 0 || mass > 1) a.at("mass").fail("mass must lie in [0, 1]");
    out.push_back({std::move(v), mass});
  }
  if (out.empty()) atoms.fail("a measure needs at least one atom");
  Rational total = 0;
  for (const auto& a : out) total += a.mass;
  if (total != 1) atoms.fail("masses sum to " + to_string(total) + ", not 1");
  return DivisorialMeasure(std::move(out));
}

std::pair<std::vector<Valuation>, std::vector<double>> parse_support(const Node& p, const GeometryModel& model) {
  const Node vn = p.at("support");
  auto support = vn.list([&](const Node& x) { return resolve(x, model); });
  if (support.empty()) vn.fail("support is empty");
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (support[i].name() == support[j].name()) vn[i].fail("valuation '" + support[i].name() + "' appears twice");
  std::vector<double> shifts(support.size(), 0.0);
  if (auto sn = p.find("t")) {
    shifts = sn->list([](const Node& x) { return x.real(); });
    if (shifts.size() != support.size()) sn->fail("expected one shift per valuation");
  }
  return {std::move(support), std::move(shifts)};
}

TaskBody parse_body(const std::string& kind, const Node& p, const Context& ctx) {
  const GeometryModel& model = ctx.model;
  auto bundle = [&](std::string_view key) {
    auto n = p.find(key);
    return n ? parse_class(*n, model) : ctx.line_bundle;
  };
  if (kind == "volume") {
    p.require_object({"class"});
    return VolumeTask{bundle("class")};
  }
  if (kind == "zariski") {
    p.require_object({"class"});
    if (!dynamic_cast<const SurfaceModel*>(&model)) p.fail("zariski needs a surface model");
    return ZariskiTask{bundle("class")};
  }
  if (kind == "gamma") {
    p.require_object({"class", "valuation"});
    Valuation v = resolve(p.at("valuation"), model);
    if (v.is_trivial()) p.at("valuation").fail("gamma needs a non-trivial valuation");
    return GammaTask{bundle("class"), std::move(v)};
  }
  if (kind == "S") {
    p.require_object({"line_bundle", "support", "t"});
    auto [support, shifts] = parse_support(p, model);
    return STask{bundle("line_bundle"), std::move(support), std::move(shifts)};
  }
  if (kind == "norm" || kind == "beta" || kind == "ma_solve") {
    p.require_object({"line_bundle", "measure"});
    DivisorialMeasure mu = parse_measure(p.at("measure"), model);
    if (kind == "norm") return NormTask{bundle("line_bundle"), std::move(mu)};
    if (kind == "beta") return BetaTask{bundle("line_bundle"), std::move(mu)};
    return MASolveTask{bundle("line_bundle"), std::move(mu)};
  }
  if (kind == "delta") {
    p.require_object({"candidates", "height"});
    std::vector<Valuation> cands;
    if (auto c = p.find("candidates")) {
      cands = c->list([&](const Node& x) { return resolve(x, model); });
      for (std::size_t i = 0; i < cands.size(); ++i)
        if (cands[i].is_trivial()) (*c)[i].fail("the trivial valuation is not a delta candidate");
    }
    if (auto h = p.find("height")) {
      const auto* toric = dynamic_cast<const ToricModel*>(&model);
      if (!toric) h->fail("height applies to toric models only");
      const long height = h->integer();
      if (height < 1 || height > 20) h->fail("height must lie in [1, 20]");
      for (auto& v : toric_delta_candidates(*toric, height))
        if (std::none_of(cands.begin(), cands.end(), [&](const Valuation& c) { return c.name() == v.name(); }))
          cands.push_back(std::move(v));
    }
    if (!p.find("candidates") && !p.find("height")) {
      for (const auto& v : model.valuations())
        if (!v.is_trivial()) cands.push_back(v);
    }
    if (cands.empty()) p.fail("no delta candidates");
    return DeltaTask{std::move(cands)};
  }
  if (kind == "probe") {
    p.require_object({"line_bundle", "measures", "epsilon"});
    auto ms = p.at("measures").list([&](const Node& m) { return parse_measure(m, model); });
    const double eps = p.find("epsilon") ? p.at("epsilon").real() : 0.0;
    return ProbeTask{bundle("line_bundle"), std::move(ms), eps};
  }
  if (kind == "finite_k") {
    p.require_object({"line_bundle", "support", "t", "k"});
    if (!dynamic_cast<const ToricModel*>(&model)) p.fail("finite_k needs a toric model");
    auto [support, shifts] = parse_support(p, model);
    const Node kn = p.at("k");
    auto ks = kn.list([](const Node& x) {
      const long k = x.integer();
      if (k < 1 || k > 400) x.fail("k must lie in [1, 400]");
      return k;
    });
    if (ks.empty()) kn.fail("no k values");
    return FiniteKTask{bundle("line_bundle"), std::move(support), std::move(shifts), std::move(ks)};
  }
  throw SchemaError(p.path(), "unknown task kind '" + kind + "'");
}

}  // namespace

Rational parse_json_rational(const json& value, const std::string& path) {
  if (value.is_number_integer()) return Rational(value.get<long>());
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path, "malformed rational \"" + value.get<std::string>() + "\": " + e.what());
    }
  }
  throw SchemaError(path, "expected an integer or a \"p/q\" string");
}

std::shared_ptr<const GeometryModel> parse_model(const json& model, const std::string& path) {
  const Node n(model, path);
  if (!model.is_object()) n.fail("expected an object");
  const std::string type = n.at("type").string();
  if (type == "surface") return parse_surface(n);
  if (type == "toric") return parse_toric(n);
  n.at("type").fail("unknown model type '" + type + "' (expected surface or toric)");
}

JobConfig parse_config(const json& document) {
  const Node root(document, "");
  root.require_object({"description", "model", "line_bundle", "tasks", "tolerances", "seed"});
  JobConfig job;
  if (auto d = root.find("description")) job.description = d->string();
  if (auto t = root.find("tolerances")) {
    t->require_object({"quadrature", "optimizer", "gradient"});
    auto positive = [](const Node& x) {
      const double v = x.real();
      if (!(v > 0)) x.fail("tolerance must be positive");
      return v;
    };
    if (auto q = t->find("quadrature")) job.tolerances.quadrature = positive(*q);
    if (auto o = t->find("optimizer")) job.tolerances.optimizer = positive(*o);
    if (auto g = t->find("gradient")) job.tolerances.gradient = positive(*g);
  }
  if (auto s = root.find("seed")) {
    const long seed = s->integer();
    if (seed < 0) s->fail("seed must be non-negative");
    job.seed = static_cast<std::uint64_t>(seed);
  }

  // Kinds are checked before the model is built so that typos surface first.
  const Node tasks = root.at("tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Node t = tasks[i];
    t.require_object({"kind", "params"});
    const std::string kind = t.at("kind").string();
    if (std::find(std::begin(kTaskKinds), std::end(kTaskKinds), kind) == std::end(kTaskKinds))
      t.at("kind").fail("unknown task kind '" + kind + "'");
  }

  job.model = parse_model(root.at("model").value(), "model");
  job.line_bundle = root.find("line_bundle") ? parse_class(root.at("line_bundle"), *job.model)
                                             : -job.model->canonical_class();
  const Context ctx{*job.model, job.line_bundle};
  static const json empty = json::object();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Node t = tasks[i];
    const std::string kind = t.at("kind").string();
    const auto params = t.find("params");
    const Node p = params ? *params : Node(empty, t.path() + ".params");
    job.tasks.push_back({kind, p.value(), parse_body(kind, p, ctx)});
  }
  return job;
}

JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("", "cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", "invalid JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace kstab
