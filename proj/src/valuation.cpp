#include "kstab/valuation.hpp"

#include <set>

#include "kstab/error.hpp"

namespace kstab {

const DivisorClass* SurfaceCenter::on(const std::string& basis_id) const {
  for (const auto& c : classes)
    if (c.basis_id() == basis_id) return &c;
  return nullptr;
}

Valuation Valuation::trivial() {
  Valuation v;
  v.name_ = kTrivialValuationName;
  v.log_discrepancy_ = 0;
  return v;
}

Valuation::Valuation(std::string name, Rational log_discrepancy, OrderModel order)
    : name_(std::move(name)), log_discrepancy_(std::move(log_discrepancy)), order_(std::move(order)) {
  if (sgn(log_discrepancy_) < 0)
    throw GeometryError("valuation '" + name_ + "' has negative log discrepancy");
  if (std::holds_alternative<std::monostate>(order_))
    throw GeometryError("valuation '" + name_ + "' has no order model; use Valuation::trivial()");
  if (const auto* s = surface_center(); s && s->classes.empty())
    throw GeometryError("valuation '" + name_ + "' has no center class");
  if (const auto* m = monomial_center()) {
    bool nonzero = false;
    for (long w : m->weight) nonzero = nonzero || w != 0;
    if (!nonzero) throw GeometryError("valuation '" + name_ + "' has zero weight vector");
  }
}

void require_distinct(std::span<const Valuation> valuations) {
  std::set<std::string> seen;
  for (const auto& v : valuations)
    if (!seen.insert(v.name()).second)
      throw GeometryError("valuation '" + v.name() + "' appears twice in a support");
}

DivisorialMeasure::DivisorialMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw GeometryError("divisorial measure has no atoms");
  Rational total = 0;
  for (const auto& a : atoms_) {
    if (sgn(a.mass) < 0 || a.mass > 1)
      throw GeometryError("mass of '" + a.valuation.name() + "' is outside [0, 1]");
    total += a.mass;
  }
  if (total != 1) throw GeometryError("masses sum to " + to_string(total) + ", not 1");
  require_distinct(support());
}

std::vector<Valuation> DivisorialMeasure::support() const {
  std::vector<Valuation> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.valuation);
  return out;
}

std::vector<double> DivisorialMeasure::masses() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(to_double(a.mass));
  return out;
}

Rational DivisorialMeasure::entropy() const {
  Rational h = 0;
  for (const auto& a : atoms_) h += a.mass * a.valuation.log_discrepancy();
  return h;
}

bool DivisorialMeasure::is_trivial_only() const {
  for (const auto& a : atoms_)
    if (!a.valuation.is_trivial() && sgn(a.mass) != 0) return false;
  return true;
}

}  // namespace kstab
