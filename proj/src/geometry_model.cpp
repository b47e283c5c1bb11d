#include "kstab/geometry_model.hpp"

#include <cmath>

#include "kstab/error.hpp"

namespace kstab {

Valuation GeometryModel::valuation(std::string_view name) const {
  if (name == kTrivialValuationName) return Valuation::trivial();
  for (const auto& v : valuations())
    if (v.name() == name) return v;
  throw GeometryError("unknown valuation '" + std::string(name) + "' on model '" + basis_id() + "'");
}

DivisorClass GeometryModel::make_class(std::vector<Rational> coefficients) const {
  if (coefficients.size() != class_rank())
    throw GeometryError("class has " + std::to_string(coefficients.size()) +
                        " coordinates, model '" + basis_id() + "' has rank " +
                        std::to_string(class_rank()));
  return DivisorClass(basis_id(), std::move(coefficients));
}

void GeometryModel::require_own_class(const DivisorClass& d) const {
  if (d.basis_id() != basis_id() || d.rank() != class_rank())
    throw GeometryError("basis mismatch: class in '" + d.basis_id() + "' used on model '" +
                        basis_id() + "'");
}

Rational GeometryModel::twisted_volume_derivative(const DivisorClass& l,
                                                  std::span<const Twist> twists,
                                                  const DivisorClass& h) const {
  require_own_class(l);
  require_own_class(h);
  // f'(0) = [8(f(δ) − f(−δ)) − (f(2δ) − f(−2δ))] / 12δ, exact for quartics.
  const Rational delta(1, 1 << 24);
  auto f = [&](int k) { return twisted_volume(l + Rational(k) * delta * h, twists); };
  return (8 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12 * delta);
}

std::optional<Threshold> GeometryModel::exact_threshold(const DivisorClass&, const Valuation&) const {
  return std::nullopt;
}

std::vector<double> GeometryModel::twist_kinks(const DivisorClass&, std::span<const Valuation>,
                                               std::span<const double>, double, double) const {
  return {};
}

bool is_big(const GeometryModel& model, const DivisorClass& d) {
  model.require_own_class(d);
  return sgn(model.volume(d)) > 0;
}

Threshold gamma_threshold(const GeometryModel& model, const DivisorClass& l, const Valuation& v,
                          double tolerance, ThresholdMethod method) {
  if (v.is_trivial()) throw GeometryError("pseudoeffective threshold of the trivial valuation");
  if (!is_big(model, l)) throw GeometryError("class " + l.to_string() + " is not big");
  model.check_support(std::span<const Valuation>(&v, 1));

  if (method == ThresholdMethod::Auto)
    if (auto exact = model.exact_threshold(l, v)) return *exact;

  auto big_at = [&](double g) {
    const Twist tw{&v, from_double(g)};
    return sgn(model.twisted_volume(l, std::span<const Twist>(&tw, 1))) > 0;
  };
  double lo = 0, hi = 1;
  while (big_at(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > 1e15) throw GeometryError("valuation '" + v.name() + "' never makes the class non-big");
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (big_at(mid) ? lo : hi) = mid;
  }
  return Threshold{0.5 * (lo + hi), std::nullopt};
}

}  // namespace kstab
