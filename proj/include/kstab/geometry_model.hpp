#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kstab/divisor_class.hpp"
#include "kstab/rational.hpp"
#include "kstab/valuation.hpp"

namespace kstab {

/// Subtract `amount` times the center of `valuation` (surfaces), or shrink the section polytope
/// by `amount` along the valuation's weight (toric).
struct Twist {
  const Valuation* valuation;
  Rational amount;
};

struct Threshold {
  double value = 0;
  /// Set when the backend found the threshold as a closed-form rational root.
  std::optional<Rational> exact;
};

enum class ThresholdMethod { Auto, Bisection };

/// Volume oracle for a concrete variety. Implementations are immutable after construction.
class GeometryModel {
 public:
  virtual ~GeometryModel() = default;

  /// Basis identifier of classes on this model.
  virtual const std::string& basis_id() const = 0;
  virtual int dimension() const = 0;
  virtual std::size_t class_rank() const = 0;
  virtual const DivisorClass& canonical_class() const = 0;
  virtual std::span<const Valuation> valuations() const = 0;

  /// Named valuation lookup; "trivial" always resolves. Throws GeometryError if unknown.
  Valuation valuation(std::string_view name) const;

  /// Builds a class in this model's basis; throws GeometryError on a rank mismatch.
  DivisorClass make_class(std::vector<Rational> coefficients) const;
  void require_own_class(const DivisorClass& d) const;

  virtual Rational volume(const DivisorClass& d) const = 0;

  /// vol(L − Σ amount_i · F_i). Trivial valuations and zero amounts are ignored.
  virtual Rational twisted_volume(const DivisorClass& l, std::span<const Twist> twists) const = 0;

  /// d/dε at 0 of twisted_volume(l + εh, twists), i.e. n⟨D^{n−1}⟩·h for the twisted class D.
  /// The default is an exact five-point stencil, valid because volume is C¹ and piecewise
  /// polynomial of degree n on the big cone.
  virtual Rational twisted_volume_derivative(const DivisorClass& l, std::span<const Twist> twists,
                                             const DivisorClass& h) const;

  /// Closed-form pseudoeffective threshold, when the backend has one.
  virtual std::optional<Threshold> exact_threshold(const DivisorClass& l, const Valuation& v) const;

  /// Points in [lo, hi] where λ ↦ vol(L − Σ max(λ − t_i, 0) F_i) may fail to be polynomial,
  /// beyond the t_i themselves. Empty by default.
  virtual std::vector<double> twist_kinks(const DivisorClass& l, std::span<const Valuation> support,
                                          std::span<const double> shifts, double lo, double hi) const;

  /// Throws GeometryError if `support` cannot be twisted together on this model.
  virtual void check_support(std::span<const Valuation> support) const = 0;
};

bool is_big(const GeometryModel& model, const DivisorClass& d);

/// sup{γ > 0 : twist(L, v, γ) is big}. Auto uses the backend's closed form when available and
/// falls back to bisection on bigness down to an interval of width `tolerance`.
Threshold gamma_threshold(const GeometryModel& model, const DivisorClass& l, const Valuation& v,
                          double tolerance = 1e-9, ThresholdMethod method = ThresholdMethod::Auto);

}  // namespace kstab
