#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kstab/divisor_class.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// Center of a divisorial valuation on a surface: the class of the center divisor on every
/// model where it is realized (the base model and/or declared birational models).
struct SurfaceCenter {
  std::vector<DivisorClass> classes;

  /// The class on the model with basis `basis_id`, or nullptr.
  const DivisorClass* on(const std::string& basis_id) const;
};

/// A monomial valuation on a toric variety, given by a primitive vector of the cocharacter lattice.
struct MonomialCenter {
  std::vector<long> weight;
};

using OrderModel = std::variant<std::monostate, SurfaceCenter, MonomialCenter>;

class Valuation {
 public:
  /// The trivial valuation: A = 0, order 0 on every nonzero section.
  static Valuation trivial();

  /// Throws GeometryError if `log_discrepancy` < 0 or the order model is empty.
  Valuation(std::string name, Rational log_discrepancy, OrderModel order);

  const std::string& name() const noexcept { return name_; }
  const Rational& log_discrepancy() const noexcept { return log_discrepancy_; }
  bool is_trivial() const noexcept { return std::holds_alternative<std::monostate>(order_); }
  const OrderModel& order() const noexcept { return order_; }

  const SurfaceCenter* surface_center() const { return std::get_if<SurfaceCenter>(&order_); }
  const MonomialCenter* monomial_center() const { return std::get_if<MonomialCenter>(&order_); }

 private:
  Valuation() = default;
  std::string name_;
  Rational log_discrepancy_;
  OrderModel order_;
};

inline constexpr const char* kTrivialValuationName = "trivial";

struct Atom {
  Valuation valuation;
  Rational mass;
};

/// Finitely many (valuation, mass) pairs with distinct valuations and masses summing to one.
class DivisorialMeasure {
 public:
  /// Throws GeometryError when masses are outside [0,1], do not sum to 1, or names repeat.
  explicit DivisorialMeasure(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  std::vector<Valuation> support() const;
  std::vector<double> masses() const;
  /// Σ ξ_i A(F_i), exact.
  Rational entropy() const;
  bool is_trivial_only() const;

 private:
  std::vector<Atom> atoms_;
};

/// Throws GeometryError if two valuations share a name.
void require_distinct(std::span<const Valuation> valuations);

}  // namespace kstab
