#include "kstab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kstab/error.hpp"

namespace kstab {

namespace {

// a + ε·b for an infinitesimal ε > 0, ordered lexicographically
struct Lex {
  Rational value;
  Rational slope;
};

int sign(const Lex& x) {
  const int s = sgn(x.value);
  return s != 0 ? s : sgn(x.slope);
}

std::string names_of(const std::vector<Curve>& curves, const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i : idx) out += (out.empty() ? "" : ", ") + curves[i].name;
  return "{" + out + "}";
}

// Smallest u > 0 with a + 2bu + cu² = 0, given that the quadratic is lexicographically positive
// at u = 0+.
std::optional<Threshold> first_positive_root(const Rational& a, const Rational& b, const Rational& c) {
  if (sgn(c) == 0) {
    if (sgn(b) >= 0) return std::nullopt;
    Rational u = -a / (2 * b);
    return Threshold{to_double(u), u};
  }
  const Rational disc = b * b - a * c;
  if (sgn(disc) < 0) return std::nullopt;
  if (sgn(a) == 0) {
    if (sgn(c) >= 0) return std::nullopt;
    Rational u = -2 * b / c;
    return Threshold{to_double(u), u};
  }
  if (auto root = exact_sqrt(disc)) {
    std::optional<Rational> best;
    for (const Rational& r : {Rational((-b + *root) / c), Rational((-b - *root) / c)})
      if (sgn(r) > 0 && (!best || r < *best)) best = r;
    if (!best) return std::nullopt;
    return Threshold{to_double(*best), *best};
  }
  const double bd = to_double(b), cd = to_double(c), ad = to_double(a);
  const double sd = std::sqrt(to_double(disc));
  const double q = -(bd + std::copysign(sd, bd));
  double best = INFINITY;
  for (double r : {q / cd, ad / q})
    if (r > 0 && r < best) best = r;
  if (!std::isfinite(best)) return std::nullopt;
  return Threshold{best, std::nullopt};
}

}  // namespace

// Zariski chamber of base + ε·direction: support, coefficients a0 + ε·a1, positive part p0 + ε·p1.
struct SurfaceLattice::Chamber {
  std::vector<std::size_t> support;
  std::vector<Rational> a0, a1;
  DivisorClass p0, p1;
};

SurfaceLattice::SurfaceLattice(std::string id, std::vector<std::string> labels, RationalMatrix form,
                               std::vector<Rational> canonical, std::vector<Curve> negative_curves,
                               std::vector<Curve> sample_curves)
    : id_(std::move(id)),
      labels_(std::move(labels)),
      form_(std::move(form)),
      negative_(std::move(negative_curves)),
      samples_(std::move(sample_curves)) {
  const std::size_t r = form_.size();
  if (r == 0) throw GeometryError("surface '" + id_ + "' has an empty lattice");
  if (labels_.size() != r) throw GeometryError("surface '" + id_ + "': label count differs from rank");
  for (std::size_t i = 0; i < r; ++i) {
    if (form_[i].size() != r) throw GeometryError("surface '" + id_ + "': intersection matrix is not square");
    for (std::size_t j = 0; j < i; ++j)
      if (form_[i][j] != form_[j][i])
        throw GeometryError("surface '" + id_ + "': intersection matrix is not symmetric");
  }
  const Inertia in = inertia(form_);
  if (in.positive != 1 || in.negative != r - 1)
    throw GeometryError("surface '" + id_ + "': intersection form has signature (" +
                        std::to_string(in.positive) + ", " + std::to_string(in.negative) +
                        "), Hodge index requires (1, " + std::to_string(r - 1) + ")");
  canonical_ = make_class(std::move(canonical));

  std::set<std::string> names;
  for (const auto& c : negative_) {
    if (c.cls.basis_id() != id_ || c.cls.rank() != r)
      throw GeometryError("curve '" + c.name + "' is not in the basis of '" + id_ + "'");
    if (sgn(dot(c.cls, c.cls)) >= 0)
      throw GeometryError("negative curve '" + c.name + "' has non-negative self-intersection");
    if (!names.insert(c.name).second) throw GeometryError("curve '" + c.name + "' declared twice");
  }
  bool positive_sample = false;
  for (const auto& c : samples_) {
    if (c.cls.basis_id() != id_ || c.cls.rank() != r)
      throw GeometryError("curve '" + c.name + "' is not in the basis of '" + id_ + "'");
    const int s = sgn(dot(c.cls, c.cls));
    if (s < 0)
      throw GeometryError("sample curve '" + c.name + "' has negative square; declare it as a negative curve");
    positive_sample = positive_sample || s > 0;
    if (!names.insert(c.name).second) throw GeometryError("curve '" + c.name + "' declared twice");
  }
  if (!positive_sample)
    throw GeometryError("surface '" + id_ + "' needs a sample curve with positive square");
}

DivisorClass SurfaceLattice::make_class(std::vector<Rational> coefficients) const {
  if (coefficients.size() != rank())
    throw GeometryError("class has " + std::to_string(coefficients.size()) + " coordinates, '" +
                        id_ + "' has rank " + std::to_string(rank()));
  return DivisorClass(id_, std::move(coefficients));
}

Rational SurfaceLattice::dot(const DivisorClass& a, const DivisorClass& b) const {
  if (a.basis_id() != id_ || a.rank() != rank())
    throw GeometryError("basis mismatch: class in '" + a.basis_id() + "' used on '" + id_ + "'");
  a.require_same_basis(b);
  // hot path: reuse scratch values to avoid allocating GMP temporaries
  thread_local Rational row, product;
  Rational s = 0;
  const std::size_t r = rank();
  for (std::size_t i = 0; i < r; ++i) {
    if (sgn(a[i]) == 0) continue;
    row = 0;
    for (std::size_t j = 0; j < r; ++j) {
      if (sgn(b[j]) == 0 || sgn(form_[i][j]) == 0) continue;
      mpq_mul(product.get_mpq_t(), form_[i][j].get_mpq_t(), b[j].get_mpq_t());
      mpq_add(row.get_mpq_t(), row.get_mpq_t(), product.get_mpq_t());
    }
    mpq_mul(product.get_mpq_t(), a[i].get_mpq_t(), row.get_mpq_t());
    mpq_add(s.get_mpq_t(), s.get_mpq_t(), product.get_mpq_t());
  }
  return s;
}

SurfaceLattice::Chamber SurfaceLattice::chamber(const DivisorClass& base,
                                                const DivisorClass& direction) const {
  const std::size_t nc = negative_.size();
  std::vector<Rational> d0(nc), d1(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    d0[k] = dot(base, negative_[k].cls);
    d1[k] = dot(direction, negative_[k].cls);
  }
  Chamber ch{{}, {}, {}, base, direction};
  std::vector<bool> in(nc, false);
  for (;;) {
    if (!ch.support.empty()) {
      const std::size_t m = ch.support.size();
      RationalMatrix gram(m, std::vector<Rational>(m));
      std::vector<Rational> rhs0(m), rhs1(m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
          gram[i][j] = dot(negative_[ch.support[i]].cls, negative_[ch.support[j]].cls);
        rhs0[i] = d0[ch.support[i]];
        rhs1[i] = d1[ch.support[i]];
      }
      if (inertia(gram).negative != m)
        throw NotPseudoeffective("Gram matrix of " + names_of(negative_, ch.support) +
                                 " is not negative definite (incomplete curve list or class not "
                                 "pseudoeffective)");
      ch.a0 = *solve(gram, rhs0);
      ch.a1 = *solve(gram, rhs1);
      ch.p0 = base;
      ch.p1 = direction;
      for (std::size_t i = 0; i < m; ++i) {
        ch.p0 -= ch.a0[i] * negative_[ch.support[i]].cls;
        ch.p1 -= ch.a1[i] * negative_[ch.support[i]].cls;
      }
    }
    bool grown = false;
    for (std::size_t k = 0; k < nc; ++k) {
      if (in[k]) continue;
      if (sign(Lex{dot(ch.p0, negative_[k].cls), dot(ch.p1, negative_[k].cls)}) < 0) {
        ch.support.push_back(k);
        in[k] = true;
        grown = true;
      }
    }
    if (!grown) break;
  }
  for (std::size_t i = 0; i < ch.support.size(); ++i)
    if (sign(Lex{ch.a0[i], ch.a1[i]}) < 0)
      throw NotPseudoeffective("coefficient of curve '" + negative_[ch.support[i]].name +
                               "' is forced negative");
  for (const auto& s : samples_)
    if (sign(Lex{dot(ch.p0, s.cls), dot(ch.p1, s.cls)}) < 0)
      throw NotPseudoeffective("positive part meets sample curve '" + s.name + "' negatively");
  return ch;
}

ZariskiDecomposition SurfaceLattice::zariski(const DivisorClass& d) const {
  const Chamber ch = chamber(d, DivisorClass::zero(id_, rank()));
  if (sgn(dot(ch.p0, ch.p0)) < 0)
    throw GeometryError("nef part of " + d.to_string() +
                        " has negative square; the declared curve list is incomplete");
  ZariskiDecomposition z{ch.p0, {}};
  for (std::size_t i = 0; i < ch.support.size(); ++i)
    if (sgn(ch.a0[i]) > 0) z.negative.emplace_back(negative_[ch.support[i]], ch.a0[i]);
  return z;
}

Rational SurfaceLattice::volume(const DivisorClass& d) const {
  try {
    const auto p = zariski(d).positive;
    return dot(p, p);
  } catch (const NotPseudoeffective&) {
    return 0;
  }
}

Rational SurfaceLattice::positive_product(const DivisorClass& d, const DivisorClass& h) const {
  ZariskiDecomposition z;
  try {
    z = zariski(d);
  } catch (const NotPseudoeffective&) {
    throw GeometryError("class " + d.to_string() + " is not big");
  }
  if (sgn(dot(z.positive, z.positive)) <= 0) throw GeometryError("class " + d.to_string() + " is not big");
  return dot(z.positive, h);
}

LineWalk SurfaceLattice::walk(const DivisorClass& start, const DivisorClass& direction,
                              std::optional<Rational> length) const {
  LineWalk out;
  Rational s = 0;
  for (int guard = 0; guard < 100000; ++guard) {
    Chamber ch;
    try {
      ch = chamber(start + s * direction, direction);
    } catch (const NotPseudoeffective&) {
      out.bigness_lost = Threshold{to_double(s), s};
      return out;
    }
    const Rational a = dot(ch.p0, ch.p0), b = dot(ch.p0, ch.p1), c = dot(ch.p1, ch.p1);
    if (sign(Lex{a, 2 * b}) <= 0) {
      out.bigness_lost = Threshold{to_double(s), s};
      return out;
    }

    std::optional<Rational> wall, stop_exact;
    auto take = [](std::optional<Rational>& slot, Rational u) {
      if (!slot || u < *slot) slot = std::move(u);
    };
    std::vector<bool> in(negative_.size(), false);
    for (std::size_t i = 0; i < ch.support.size(); ++i) {
      in[ch.support[i]] = true;
      if (sgn(ch.a1[i]) < 0) take(wall, -ch.a0[i] / ch.a1[i]);
    }
    for (std::size_t k = 0; k < negative_.size(); ++k) {
      if (in[k]) continue;
      const Rational x1 = dot(ch.p1, negative_[k].cls);
      if (sgn(x1) < 0) take(wall, -dot(ch.p0, negative_[k].cls) / x1);
    }
    for (const auto& sc : samples_) {
      const Rational x1 = dot(ch.p1, sc.cls);
      if (sgn(x1) < 0) take(stop_exact, -dot(ch.p0, sc.cls) / x1);
    }
    std::optional<Threshold> stop;
    if (stop_exact) stop = Threshold{to_double(*stop_exact), *stop_exact};
    if (auto root = first_positive_root(a, b, c)) {
      const bool earlier = !stop || (root->exact && stop->exact ? *root->exact < *stop->exact
                                                                : root->value < stop->value);
      if (earlier) stop = root;
    }

    bool stop_first = stop.has_value();
    if (stop && wall) {
      stop_first = stop->exact ? *stop->exact <= *wall : stop->value <= to_double(*wall);
    } else if (wall) {
      stop_first = false;
    }

    if (stop_first) {
      Threshold at = *stop;
      if (at.exact) {
        at.exact = *at.exact + s;
        at.value = to_double(*at.exact);
      } else {
        at.value += to_double(s);
      }
      if (length && at.value >= to_double(*length) && (!at.exact || *at.exact >= *length)) return out;
      out.bigness_lost = at;
      return out;
    }
    if (!wall) return out;
    s += *wall;
    if (length && s >= *length) return out;
    out.walls.push_back(s);
  }
  throw ConvergenceError("chamber walk on '" + id_ + "' did not terminate");
}

// ---------------------------------------------------------------------------------------------

SurfaceModel::SurfaceModel(SurfaceLattice base, std::vector<BirationalModel> models,
                           std::vector<Valuation> valuations)
    : base_(std::move(base)), models_(std::move(models)), valuations_(std::move(valuations)) {
  std::set<std::string> ids{base_.id()};
  for (const auto& m : models_) {
    if (!ids.insert(m.lattice.id()).second)
      throw GeometryError("model id '" + m.lattice.id() + "' used twice");
    if (m.pullback.size() != m.lattice.rank())
      throw GeometryError("pullback to '" + m.lattice.id() + "' has wrong row count");
    for (const auto& row : m.pullback)
      if (row.size() != base_.rank())
        throw GeometryError("pullback to '" + m.lattice.id() + "' has wrong column count");
    for (std::size_t i = 0; i < base_.rank(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        std::vector<Rational> ei(base_.rank()), ej(base_.rank());
        ei[i] = 1;
        ej[j] = 1;
        const auto pi = pull_to(m.lattice.id(), base_.make_class(ei));
        const auto pj = pull_to(m.lattice.id(), base_.make_class(ej));
        if (m.lattice.dot(pi, pj) != base_.form()[i][j])
          throw GeometryError("pullback to '" + m.lattice.id() + "' does not preserve intersections");
      }
  }

  std::set<std::string> names;
  for (const auto& v : valuations_) {
    if (v.is_trivial() || !v.surface_center())
      throw GeometryError("valuation '" + v.name() + "' is not a surface divisorial valuation");
    for (const auto& c : v.surface_center()->classes) {
      const auto& lat = lattice_of(c.basis_id());
      if (c.rank() != lat.rank())
        throw GeometryError("center of '" + v.name() + "' has wrong rank on '" + lat.id() + "'");
    }
    if (!names.insert(v.name()).second) throw GeometryError("valuation '" + v.name() + "' declared twice");
  }
  if (names.count(kTrivialValuationName)) throw GeometryError("'trivial' is a reserved valuation name");

  auto add = [&](const std::string& name, const DivisorClass& cls, Rational a) {
    if (name == kTrivialValuationName || !names.insert(name).second) return;
    valuations_.emplace_back(name, std::move(a), SurfaceCenter{{cls}});
  };
  for (const auto& c : base_.negative_curves()) add(c.name, c.cls, 1);
  for (const auto& c : base_.sample_curves()) add(c.name, c.cls, 1);
  for (const auto& m : models_)
    for (const auto& c : m.lattice.negative_curves()) {
      bool exceptional = true;
      for (std::size_t j = 0; j < base_.rank() && exceptional; ++j) {
        std::vector<Rational> e(base_.rank());
        e[j] = 1;
        exceptional = sgn(m.lattice.dot(c.cls, pull_to(m.lattice.id(), base_.make_class(e)))) == 0;
      }
      if (exceptional) add(c.name, c.cls, log_discrepancy(m.lattice.id(), c.cls));
    }
}

const SurfaceLattice& SurfaceModel::lattice_of(const std::string& model_id) const {
  if (model_id == base_.id()) return base_;
  for (const auto& m : models_)
    if (m.lattice.id() == model_id) return m.lattice;
  throw GeometryError("unknown model '" + model_id + "'");
}

DivisorClass SurfaceModel::pull_to(const std::string& model_id, const DivisorClass& d) const {
  require_own_class(d);
  if (model_id == base_.id()) return d;
  for (const auto& m : models_) {
    if (m.lattice.id() != model_id) continue;
    std::vector<Rational> out(m.lattice.rank());
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < d.rank(); ++j)
        if (sgn(d[j]) != 0) out[i] += m.pullback[i][j] * d[j];
    return DivisorClass(model_id, std::move(out));
  }
  throw GeometryError("unknown model '" + model_id + "'");
}

Rational SurfaceModel::log_discrepancy(const std::string& model_id, const DivisorClass& center) const {
  if (model_id == base_.id()) return 1;
  const SurfaceLattice& y = lattice_of(model_id);
  auto is_exceptional = [&](const DivisorClass& c) {
    for (std::size_t j = 0; j < base_.rank(); ++j) {
      std::vector<Rational> e(base_.rank());
      e[j] = 1;
      if (sgn(y.dot(c, pull_to(model_id, base_.make_class(e)))) != 0) return false;
    }
    return true;
  };
  std::vector<const Curve*> exc;
  for (const auto& c : y.negative_curves())
    if (is_exceptional(c.cls)) exc.push_back(&c);

  const DivisorClass relative = y.canonical() - pull_to(model_id, base_.canonical());
  std::vector<Rational> coeff;
  if (!exc.empty()) {
    RationalMatrix gram(exc.size(), std::vector<Rational>(exc.size()));
    std::vector<Rational> rhs(exc.size());
    for (std::size_t i = 0; i < exc.size(); ++i) {
      for (std::size_t j = 0; j < exc.size(); ++j) gram[i][j] = y.dot(exc[i]->cls, exc[j]->cls);
      rhs[i] = y.dot(relative, exc[i]->cls);
    }
    auto sol = solve(gram, rhs);
    if (!sol) throw GeometryError("exceptional curves of '" + model_id + "' have a singular Gram matrix");
    coeff = std::move(*sol);
  }
  DivisorClass rest = relative;
  for (std::size_t i = 0; i < exc.size(); ++i) rest -= coeff[i] * exc[i]->cls;
  if (!rest.is_zero())
    throw GeometryError("K_Y - pi^*K_X on '" + model_id +
                        "' is not supported on the declared exceptional curves");

  if (!is_exceptional(center)) return 1;
  for (std::size_t i = 0; i < exc.size(); ++i)
    if (exc[i]->cls == center) {
      Rational a = 1 + coeff[i];
      if (sgn(a) < 0) throw GeometryError("negative log discrepancy on '" + model_id + "'");
      return a;
    }
  throw GeometryError("exceptional center " + center.to_string() + " on '" + model_id +
                      "' is not a declared negative curve; give its log discrepancy explicitly");
}

const SurfaceLattice& SurfaceModel::common_lattice(std::span<const Valuation* const> vals) const {
  std::vector<const SurfaceCenter*> centers;
  for (const Valuation* v : vals) {
    if (v->is_trivial()) continue;
    const auto* c = v->surface_center();
    if (!c) throw GeometryError("valuation '" + v->name() + "' is not a surface valuation");
    centers.push_back(c);
  }
  auto all_on = [&](const std::string& id) {
    return std::all_of(centers.begin(), centers.end(), [&](const SurfaceCenter* c) { return c->on(id); });
  };
  if (all_on(base_.id())) return base_;
  for (const auto& m : models_)
    if (all_on(m.lattice.id())) return m.lattice;
  std::string names;
  for (const Valuation* v : vals)
    if (!v->is_trivial()) names += (names.empty() ? "" : ", ") + v->name();
  throw GeometryError("valuations {" + names + "} have no common model; declare their transforms");
}

void SurfaceModel::check_support(std::span<const Valuation> support) const {
  std::vector<const Valuation*> vals;
  for (const auto& v : support) vals.push_back(&v);
  common_lattice(vals);
}

DivisorClass SurfaceModel::twisted_class(const SurfaceLattice& on, const DivisorClass& l,
                                         std::span<const Twist> twists) const {
  DivisorClass d = pull_to(on.id(), l);
  for (const auto& t : twists) {
    if (t.valuation->is_trivial() || sgn(t.amount) == 0) continue;
    d -= t.amount * *t.valuation->surface_center()->on(on.id());
  }
  return d;
}

namespace {
std::vector<const Valuation*> active(std::span<const Twist> twists) {
  std::vector<const Valuation*> out;
  for (const auto& t : twists)
    if (!t.valuation->is_trivial() && sgn(t.amount) != 0) out.push_back(t.valuation);
  return out;
}
}  // namespace

Rational SurfaceModel::volume(const DivisorClass& d) const {
  require_own_class(d);
  return base_.volume(d);
}

ZariskiDecomposition SurfaceModel::zariski(const DivisorClass& d) const {
  require_own_class(d);
  return base_.zariski(d);
}

Rational SurfaceModel::positive_product_against(const DivisorClass& d, const DivisorClass& h) const {
  require_own_class(d);
  require_own_class(h);
  return base_.positive_product(d, h);
}

Rational SurfaceModel::twisted_volume(const DivisorClass& l, std::span<const Twist> twists) const {
  const auto vals = active(twists);
  const SurfaceLattice& on = common_lattice(vals);
  return on.volume(twisted_class(on, l, twists));
}

Rational SurfaceModel::twisted_volume_derivative(const DivisorClass& l, std::span<const Twist> twists,
                                                 const DivisorClass& h) const {
  const auto vals = active(twists);
  const SurfaceLattice& on = common_lattice(vals);
  const DivisorClass d = twisted_class(on, l, twists);
  if (sgn(on.volume(d)) == 0) return 0;
  return 2 * on.dot(on.zariski(d).positive, pull_to(on.id(), h));
}

std::optional<Threshold> SurfaceModel::exact_threshold(const DivisorClass& l, const Valuation& v) const {
  const Valuation* vals[] = {&v};
  const SurfaceLattice& on = common_lattice(vals);
  const LineWalk w = on.walk(pull_to(on.id(), l), -*v.surface_center()->on(on.id()));
  if (!w.bigness_lost)
    throw GeometryError("valuation '" + v.name() + "' never makes " + l.to_string() + " non-big");
  return w.bigness_lost;
}

std::vector<double> SurfaceModel::twist_kinks(const DivisorClass& l, std::span<const Valuation> support,
                                              std::span<const double> shifts, double lo,
                                              double hi) const {
  std::vector<const Valuation*> vals;
  std::vector<double> t;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (!support[i].is_trivial()) {
      vals.push_back(&support[i]);
      t.push_back(shifts[i]);
    }
  std::vector<double> kinks;
  if (vals.empty() || !(lo < hi)) return kinks;
  const SurfaceLattice& on = common_lattice(vals);
  const DivisorClass pulled = pull_to(on.id(), l);

  std::vector<double> cuts{lo, hi};
  for (double x : t)
    if (x > lo && x < hi) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Rational a = from_double(cuts[k]);
    DivisorClass d = pulled;
    DivisorClass dir = DivisorClass::zero(on.id(), on.rank());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (t[i] > cuts[k]) continue;
      const DivisorClass& f = *vals[i]->surface_center()->on(on.id());
      d -= (a - from_double(t[i])) * f;
      dir -= f;
    }
    const LineWalk w = on.walk(d, dir, from_double(cuts[k + 1]) - a);
    for (const auto& s : w.walls) kinks.push_back(to_double(a + s));
    if (w.bigness_lost) {
      kinks.push_back(cuts[k] + w.bigness_lost->value);
      break;
    }
  }
  return kinks;
}

}  // namespace kstab
