#include "kstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kstab/error.hpp"
#include "kstab/surface.hpp"
#include "kstab/toric.hpp"

namespace kstab {

namespace {

constexpr double kZeroNorm = 1e-9;
constexpr double kGradientStep = 1e-6;

double linf(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<double> normalized(std::vector<double> t, double bound) {
  const double lo = *std::min_element(t.begin(), t.end());
  for (double& x : t) x = std::min(x - lo, bound);
  return t;
}

double pairing(std::span<const double> xi, std::span<const double> t) {
  return std::inner_product(xi.begin(), xi.end(), t.begin(), 0.0);
}

}  // namespace

NormResult norm(const ExpectedOrder& s, const DivisorialMeasure& mu, const StabilityOptions& options) {
  const std::size_t m = mu.size();
  if (s.support().size() != m) throw GeometryError("measure and prepared support differ in size");
  const auto xi = mu.masses();
  const auto gamma = s.thresholds();
  const double bound = *std::max_element(gamma.begin(), gamma.end()) + 1;

  // t_0 is pinned at 0 (S is translation equivariant and ξ sums to one); the rest range over
  // [−B, B], which contains every normalized point of [0, B]^m.
  std::vector<double> t(m, 0.0);
  auto lift = [&](std::span<const double> x) -> std::span<const double> {
    std::copy(x.begin(), x.end(), t.begin() + 1);
    return t;
  };
  Objective g = [&](std::span<const double> x) {
    const auto full = lift(x);
    return s(full) - pairing(xi, full);
  };
  const std::vector<double> lower(m - 1, -bound), upper(m - 1, bound);
  const BoxMaximum best = maximize_concave(g, lower, upper, options.optimizer);
  if (!best.converged) throw ConvergenceError("norm maximization did not converge within its iteration budget");

  NormResult out;
  out.value = best.value;
  out.box_bound = bound;
  out.converged = true;

  std::vector<const LocalMaximum*> runs;
  for (const auto& r : best.runs)
    if (r.value >= best.value - options.argmax_epsilon) runs.push_back(&r);
  std::stable_sort(runs.begin(), runs.end(),
                   [](const LocalMaximum* a, const LocalMaximum* b) { return a->value > b->value; });
  for (const LocalMaximum* r : runs) {
    std::vector<double> full(m, 0.0);
    std::copy(r->x.begin(), r->x.end(), full.begin() + 1);
    full = normalized(std::move(full), bound);
    const bool seen = std::any_of(out.maximizers.begin(), out.maximizers.end(), [&](const auto& rep) {
      return linf(rep, full) <= options.argmax_radius;
    });
    if (!seen) out.maximizers.push_back(std::move(full));
  }
  return out;
}

NormResult norm(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                const StabilityOptions& options) {
  const ExpectedOrder s(model, l, mu.support(), options.quadrature);
  return norm(s, mu, options);
}

EnlargementCheck norm_enlarged_support_check(const GeometryModel& model, const DivisorClass& l,
                                             const DivisorialMeasure& mu, std::span<const Valuation> extra,
                                             double tolerance, const StabilityOptions& options) {
  std::vector<Atom> atoms(mu.atoms().begin(), mu.atoms().end());
  for (const auto& v : extra) {
    for (const auto& a : mu.atoms())
      if (a.valuation.name() == v.name())
        throw GeometryError("valuation '" + v.name() + "' is already in the support");
    atoms.push_back({v, Rational(0)});
  }
  const double base = norm(model, l, mu, options).value;
  const double enlarged = extra.empty() ? base : norm(model, l, DivisorialMeasure(std::move(atoms)), options).value;
  return {std::abs(base - enlarged) <= tolerance, base, enlarged};
}

double s_derivative_in_l(const ExpectedOrder& s, std::span<const double> t, const DivisorClass& h,
                         DerivativeMethod method) {
  if (method == DerivativeMethod::Formula) return s.derivative(t, h);

  const GeometryModel& model = s.model();
  const Rational eps(1, 1 << 14);
  const DivisorClass up = s.line_bundle() + eps * h, down = s.line_bundle() - eps * h;
  const bool up_big = is_big(model, up), down_big = is_big(model, down);
  auto at = [&](const DivisorClass& l) {
    const ExpectedOrder shifted(model, l, std::vector<Valuation>(s.support().begin(), s.support().end()),
                                s.options());
    return shifted(t);
  };
  const double e = to_double(eps);
  if (up_big && down_big) return (at(up) - at(down)) / (2 * e);
  if (up_big) return (at(up) - s(t)) / e;
  if (down_big) return (s(t) - at(down)) / e;
  throw GeometryError("direction " + h.to_string() + " leaves the big cone on both sides");
}

double danskin_derivative(const ExpectedOrder& s, const NormResult& argmax, const DivisorClass& h, Side side,
                          DerivativeMethod method) {
  if (argmax.maximizers.empty()) throw ConvergenceError("no maximizer available for the Danskin derivative");
  if (side == Side::Left) return -danskin_derivative(s, argmax, -h, Side::Right, method);
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& t : argmax.maximizers) sup = std::max(sup, s_derivative_in_l(s, t, h, method));
  return sup;
}

double danskin_derivative(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                          const DivisorClass& h, Side side, const StabilityOptions& options) {
  model.require_own_class(h);
  const ExpectedOrder s(model, l, mu.support(), options.quadrature);
  return danskin_derivative(s, norm(s, mu, options), h, side, options.derivative);
}

BetaReport beta(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                const StabilityOptions& options) {
  const ExpectedOrder s(model, l, mu.support(), options.quadrature);
  BetaReport r;
  r.argmax = norm(s, mu, options);
  r.norm = r.argmax.value;
  r.entropy = mu.entropy();
  r.entropy_term = to_double(r.entropy);
  r.derivative_term = danskin_derivative(s, r.argmax, model.canonical_class(), Side::Left, options.derivative);
  r.beta = r.entropy_term + r.derivative_term;
  if (std::abs(r.norm) > kZeroNorm) r.stability_ratio = r.beta / r.norm;
  return r;
}

DeltaResult delta_anticanonical(const GeometryModel& model, std::span<const Valuation> candidates,
                                const QuadratureOptions& options) {
  if (candidates.empty()) throw GeometryError("delta needs at least one candidate valuation");
  const DivisorClass anti = -model.canonical_class();
  if (!is_big(model, anti)) throw GeometryError("the anticanonical class is not big");

  std::vector<DeltaCandidate> rows;
  std::size_t best = 0;
  const double zero = 0;
  for (const auto& v : candidates) {
    if (v.is_trivial()) throw GeometryError("delta candidates must be non-trivial");
    const double s = ExpectedOrder(model, anti, {v}, options)(std::span<const double>(&zero, 1));
    if (!(s > 0)) throw GeometryError("valuation '" + v.name() + "' has non-positive expected order");
    rows.push_back({v, s, to_double(v.log_discrepancy()) / s});
    if (rows.back().ratio < rows[best].ratio - 1e-12) best = rows.size() - 1;
  }
  return {rows[best].ratio, rows[best].valuation, std::move(rows)};
}

std::vector<Valuation> toric_delta_candidates(const ToricModel& model, long height) {
  if (height < 1) throw std::invalid_argument("candidate height must be positive");
  const auto n = static_cast<std::size_t>(model.dimension());
  std::vector<Valuation> out;
  std::vector<long> w(n, -height);
  for (;;) {
    long g = 0;
    for (long x : w) g = std::gcd(g, x);
    if (g == 1) {
      const auto declared = std::find_if(model.valuations().begin(), model.valuations().end(), [&](const Valuation& v) {
        const auto* c = v.monomial_center();
        return c && c->weight == w;
      });
      if (declared != model.valuations().end()) {
        out.push_back(*declared);
      } else {
        std::string name = "w(";
        for (std::size_t i = 0; i < n; ++i) name += (i ? "," : "") + std::to_string(w[i]);
        out.emplace_back(name + ")", model.log_discrepancy(w), MonomialCenter{w});
      }
    }
    std::size_t i = n;
    while (i > 0 && w[i - 1] == height) w[--i] = -height;
    if (i == 0) break;
    ++w[i - 1];
  }
  return out;
}

std::vector<Valuation> surface_delta_candidates(const SurfaceModel& model) {
  std::vector<Valuation> out;
  for (const auto& v : model.valuations())
    if (!v.is_trivial()) out.push_back(v);
  return out;
}

MASolution ma_solve(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                    const StabilityOptions& options) {
  const ExpectedOrder s(model, l, mu.support(), options.quadrature);
  MASolution out;
  out.argmax = norm(s, mu, options);
  out.value = out.argmax.value;
  const auto xi = mu.masses();
  const std::size_t m = xi.size();
  const double h = kGradientStep;

  bool chosen = false;
  for (const auto& t : out.argmax.maximizers) {
    std::vector<double> grad(m);
    std::vector<OneSidedDerivative> kinks;
    std::vector<double> y = t;
    const double s0 = s(t);
    for (std::size_t i = 0; i < m; ++i) {
      y[i] = t[i] + h;
      const double up = s(y);
      y[i] = t[i] - h;
      const double down = s(y);
      y[i] = t[i];
      grad[i] = (up - down) / (2 * h);
      const double forward = (up - s0) / h, backward = (s0 - down) / h;
      if (std::abs(forward - backward) > 10 * options.gradient_tolerance) kinks.push_back({i, forward, backward});
    }
    if (!chosen || (!out.one_sided.empty() && kinks.empty())) {
      out.t_star = t;
      out.measure_out = std::move(grad);
      out.one_sided = std::move(kinks);
      chosen = true;
    }
    if (out.one_sided.empty()) break;
  }
  for (const auto& k : out.one_sided) out.flat_directions.push_back(k.index);
  out.residual = linf(out.measure_out, xi);
  return out;
}

ProbeReport divisorial_stability_probe(const GeometryModel& model, const DivisorClass& l,
                                       std::span<const DivisorialMeasure> measures, double epsilon,
                                       const StabilityOptions& options) {
  ProbeReport r;
  double worst = -options.gradient_tolerance;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    r.entries.push_back(beta(model, l, measures[i], options));
    const BetaReport& b = r.entries.back();
    if (b.stability_ratio && (!r.min_ratio || *b.stability_ratio < *r.min_ratio)) {
      r.min_ratio = b.stability_ratio;
      r.min_index = i;
    }
    const double gap = b.beta - epsilon * b.norm;
    if (gap < worst) {
      worst = gap;
      r.witness = i;
    }
  }
  r.verdict = r.witness ? ProbeVerdict::Unstable : r.min_ratio ? ProbeVerdict::NoViolationFound : ProbeVerdict::Vacuous;
  return r;
}

std::string describe(ProbeVerdict verdict) {
  switch (verdict) {
    case ProbeVerdict::Unstable:
      return "certified instability";
    case ProbeVerdict::NoViolationFound:
      return "evidence only: no violating measure among those probed";
    case ProbeVerdict::Vacuous:
      return "vacuous: no probed measure has nonzero norm";
  }
  return {};
}

}  // namespace kstab
