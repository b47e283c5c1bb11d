#pragma once

#include <span>
#include <vector>

#include "kstab/divisor_class.hpp"
#include "kstab/geometry_model.hpp"
#include "kstab/quadrature.hpp"
#include "kstab/valuation.hpp"

namespace kstab {

/// Support valuations with shifts t; the filtration F^λ R_k = {s : min_i(ord_i(s) + k t_i) ≥ kλ}.
struct FiltrationSpec {
  /// Throws GeometryError if the lengths differ, the support is empty, or names repeat.
  FiltrationSpec(std::vector<Valuation> support, std::vector<double> shifts);

  std::vector<Valuation> support;
  std::vector<double> shifts;
};

/// S_{L,Σ}(t) for a fixed model, class and support, caching vol(L) and the thresholds γ_i.
/// Holds a reference to `model`, which must outlive it.
class ExpectedOrder {
 public:
  /// Throws GeometryError if L is not big or the support cannot be twisted together.
  ExpectedOrder(const GeometryModel& model, DivisorClass l, std::vector<Valuation> support,
                QuadratureOptions options = {});

  /// t₀ + vol(L)⁻¹ ∫_{t₀}^{λ_max} vol(L − Σ max(λ − t_i, 0) F_i) dλ with t₀ = min t_i.
  double operator()(std::span<const double> t) const;

  /// ∇_H S_L(t) at fixed t:
  /// vol(L)⁻¹ ∫ [n⟨D(λ)^{n−1}⟩·H − (n⟨L^{n−1}⟩·H / vol L) vol(D(λ))] dλ.
  double derivative(std::span<const double> t, const DivisorClass& h) const;

  /// min_i(γ_i + t_i), with γ = 0 for the trivial valuation.
  double lambda_max(std::span<const double> t) const;

  const GeometryModel& model() const noexcept { return *model_; }
  const DivisorClass& line_bundle() const noexcept { return l_; }
  std::span<const Valuation> support() const noexcept { return support_; }
  /// γ(L, F_i); 0 for the trivial valuation.
  std::span<const double> thresholds() const noexcept { return gamma_; }
  double volume() const noexcept { return volume_; }
  const QuadratureOptions& options() const noexcept { return options_; }

 private:
  std::vector<double> breakpoints(std::span<const double> t, double lo, double hi) const;
  std::vector<Twist> twists_at(double lambda, std::span<const double> t) const;
  int rule_order() const;

  const GeometryModel* model_;
  DivisorClass l_;
  std::vector<Valuation> support_;
  std::vector<double> gamma_;
  double volume_;
  QuadratureOptions options_;
};

double expected_order_S(const GeometryModel& model, const DivisorClass& l, const FiltrationSpec& spec,
                        const QuadratureOptions& options = {});

struct JumpingProfile {
  long k;
  /// Nonincreasing; one entry per monomial of R_k.
  std::vector<double> jumps;
  /// (dim R_k)⁻¹ Σ λ_{k,i}.
  double volume;
};

/// Toric only: λ(m) = min_i(ord_{w_i}(m) + k t_i) over the monomial basis of R_k, where
/// ord_w(m) = ⟨m, w⟩ − k·min_{P_L}⟨·, w⟩ and the trivial valuation has order 0.
JumpingProfile filtration_volume_finite_k(const GeometryModel& model, const DivisorClass& l,
                                          const FiltrationSpec& spec, long k);

/// max over the monomial basis of |λ_a(m) − λ_b(m)|.
double d_infinity(const GeometryModel& model, const DivisorClass& l, const FiltrationSpec& a,
                  const FiltrationSpec& b, long k);

struct RestrictionCheck {
  bool holds;
  double superset_value;
  double subset_value;
};

/// vol(F_{T,t}) ≤ vol(F_{S,π(t)}) + tolerance, for S ⊆ T given by valuation names.
RestrictionCheck restriction_inequality_check(const GeometryModel& model, const DivisorClass& l,
                                              const FiltrationSpec& superset,
                                              std::span<const Valuation> subset,
                                              double tolerance = 1e-9,
                                              const QuadratureOptions& options = {});

}  // namespace kstab
