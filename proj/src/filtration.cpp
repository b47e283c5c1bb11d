#include "kstab/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kstab/error.hpp"
#include "kstab/toric.hpp"

namespace kstab {

FiltrationSpec::FiltrationSpec(std::vector<Valuation> support_in, std::vector<double> shifts_in)
    : support(std::move(support_in)), shifts(std::move(shifts_in)) {
  if (support.empty()) throw GeometryError("filtration support is empty");
  if (support.size() != shifts.size())
    throw GeometryError("filtration has " + std::to_string(support.size()) + " valuations but " +
                        std::to_string(shifts.size()) + " shifts");
  for (double t : shifts)
    if (!std::isfinite(t)) throw GeometryError("filtration shift is not finite");
  require_distinct(support);
}

ExpectedOrder::ExpectedOrder(const GeometryModel& model, DivisorClass l, std::vector<Valuation> support,
                             QuadratureOptions options)
    : model_(&model), l_(std::move(l)), support_(std::move(support)), options_(options) {
  model.require_own_class(l_);
  require_distinct(support_);
  model.check_support(support_);
  const Rational v = model.volume(l_);
  if (sgn(v) <= 0) throw GeometryError("class " + l_.to_string() + " is not big");
  volume_ = to_double(v);
  gamma_.reserve(support_.size());
  for (const auto& val : support_)
    gamma_.push_back(val.is_trivial() ? 0.0 : gamma_threshold(model, l_, val, 1e-12).value);
}

double ExpectedOrder::lambda_max(std::span<const double> t) const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) m = std::min(m, gamma_[i] + t[i]);
  return m;
}

std::vector<double> ExpectedOrder::breakpoints(std::span<const double> t, double lo, double hi) const {
  std::vector<double> b = model_->twist_kinks(l_, support_, t, lo, hi);
  for (std::size_t i = 0; i < t.size(); ++i) {
    b.push_back(t[i]);
    b.push_back(gamma_[i] + t[i]);
  }
  return b;
}

std::vector<Twist> ExpectedOrder::twists_at(double lambda, std::span<const double> t) const {
  std::vector<Twist> tw;
  tw.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!support_[i].is_trivial() && lambda > t[i]) tw.push_back({&support_[i], from_double(lambda - t[i])});
  return tw;
}

// Pieces between breakpoints are polynomials of degree ≤ n, integrated exactly by
// ⌈(n+1)/2⌉ nodes; adaptivity still catches any kink the backend did not report.
int ExpectedOrder::rule_order() const {
  return options_.order > 0 ? options_.order : std::max(2, (model_->dimension() + 2) / 2);
}

double ExpectedOrder::operator()(std::span<const double> t) const {
  if (t.size() != support_.size()) throw GeometryError("shift vector has the wrong length");
  const double t0 = *std::min_element(t.begin(), t.end());
  const double top = lambda_max(t);
  if (!(top > t0)) return t0;
  auto integrand = [&](double lambda) {
    const auto tw = twists_at(lambda, t);
    return to_double(model_->twisted_volume(l_, tw));
  };
  const auto r = integrate_piecewise(integrand, t0, top, breakpoints(t, t0, top),
                                     QuadratureOptions{options_.tolerance * volume_, rule_order(), options_.max_depth});
  return t0 + r.value / volume_;
}

double ExpectedOrder::derivative(std::span<const double> t, const DivisorClass& h) const {
  if (t.size() != support_.size()) throw GeometryError("shift vector has the wrong length");
  model_->require_own_class(h);
  const double t0 = *std::min_element(t.begin(), t.end());
  const double top = lambda_max(t);
  if (!(top > t0)) return 0;
  const double dv = to_double(model_->twisted_volume_derivative(l_, {}, h));
  auto integrand = [&](double lambda) {
    const auto tw = twists_at(lambda, t);
    return to_double(model_->twisted_volume_derivative(l_, tw, h)) -
           dv / volume_ * to_double(model_->twisted_volume(l_, tw));
  };
  const auto r = integrate_piecewise(integrand, t0, top, breakpoints(t, t0, top),
                                     QuadratureOptions{options_.tolerance * volume_, rule_order(), options_.max_depth});
  return r.value / volume_;
}

double expected_order_S(const GeometryModel& model, const DivisorClass& l, const FiltrationSpec& spec,
                        const QuadratureOptions& options) {
  return ExpectedOrder(model, l, spec.support, options)(spec.shifts);
}

namespace {

const ToricModel& require_toric(const GeometryModel& model) {
  const auto* toric = dynamic_cast<const ToricModel*>(&model);
  if (!toric) throw GeometryError("finite-k filtrations need a toric model");
  return *toric;
}

// λ(m) per monomial, in section_basis order.
std::vector<double> monomial_jumps(const ToricModel& model, const DivisorClass& l,
                                   const FiltrationSpec& spec, long k,
                                   const std::vector<LatticePoint>& basis) {
  model.check_support(spec.support);
  const auto p = model.section_polytope(l);
  struct Order {
    const std::vector<long>* weight;  // null for the trivial valuation
    Rational offset;                  // k·min_{P_L}⟨·, w⟩
    double shift;                     // k·t_i
  };
  std::vector<Order> orders;
  for (std::size_t i = 0; i < spec.support.size(); ++i) {
    const auto& v = spec.support[i];
    if (v.is_trivial()) {
      orders.push_back({nullptr, 0, k * spec.shifts[i]});
      continue;
    }
    const auto& w = v.monomial_center()->weight;
    std::vector<Rational> wq(w.begin(), w.end());
    orders.push_back({&w, Rational(k) * p.range(wq).first, k * spec.shifts[i]});
  }
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& m : basis) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : orders) {
      double ord = 0;
      if (o.weight) {
        long s = 0;
        for (std::size_t j = 0; j < m.size(); ++j) s += m[j] * (*o.weight)[j];
        ord = to_double(Rational(s) - o.offset);
      }
      best = std::min(best, ord + o.shift);
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace

JumpingProfile filtration_volume_finite_k(const GeometryModel& model, const DivisorClass& l,
                                          const FiltrationSpec& spec, long k) {
  const auto& toric = require_toric(model);
  const auto basis = toric.section_basis(l, k);
  if (basis.empty()) throw GeometryError("R_k is zero");
  auto jumps = monomial_jumps(toric, l, spec, k, basis);
  std::sort(jumps.begin(), jumps.end(), std::greater<>());
  double sum = 0;
  for (double x : jumps) sum += x;
  return JumpingProfile{k, std::move(jumps), sum / static_cast<double>(basis.size())};
}

double d_infinity(const GeometryModel& model, const DivisorClass& l, const FiltrationSpec& a,
                  const FiltrationSpec& b, long k) {
  const auto& toric = require_toric(model);
  const auto basis = toric.section_basis(l, k);
  const auto ja = monomial_jumps(toric, l, a, k, basis);
  const auto jb = monomial_jumps(toric, l, b, k, basis);
  double d = 0;
  for (std::size_t i = 0; i < ja.size(); ++i) d = std::max(d, std::abs(ja[i] - jb[i]));
  return d;
}

RestrictionCheck restriction_inequality_check(const GeometryModel& model, const DivisorClass& l,
                                              const FiltrationSpec& superset,
                                              std::span<const Valuation> subset, double tolerance,
                                              const QuadratureOptions& options) {
  std::vector<Valuation> sub;
  std::vector<double> shifts;
  for (const auto& v : subset) {
    auto it = std::find_if(superset.support.begin(), superset.support.end(),
                           [&](const Valuation& s) { return s.name() == v.name(); });
    if (it == superset.support.end())
      throw GeometryError("valuation '" + v.name() + "' is not in the superset support");
    sub.push_back(*it);
    shifts.push_back(superset.shifts[static_cast<std::size_t>(it - superset.support.begin())]);
  }
  const double big = expected_order_S(model, l, superset, options);
  const double small = expected_order_S(model, l, FiltrationSpec(std::move(sub), std::move(shifts)), options);
  return RestrictionCheck{big <= small + tolerance, big, small};
}

}  // namespace kstab
