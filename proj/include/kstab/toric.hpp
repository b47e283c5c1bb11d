#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kstab/geometry_model.hpp"
#include "kstab/polytope.hpp"

namespace kstab {

/// ⟨m, weight⟩ − min_{P_L}⟨·, weight⟩ ≥ depth.
struct OrderConstraint {
  std::vector<long> weight;
  Rational depth;
};

using LatticePoint = std::vector<long>;

/// Smooth complete toric variety. Classes are ray-coefficient vectors a_ρ (D = Σ a_ρ D_ρ).
class ToricModel final : public GeometryModel {
 public:
  /// `cones` lists the maximal cones by ray index; for n = 2 it may be empty and is then inferred
  /// by angular order. Rays become valuations named by `ray_names` with A = 1; `extra` adds
  /// further monomial valuations.
  ToricModel(std::string id, std::vector<std::vector<long>> rays, std::vector<std::string> ray_names,
             std::vector<std::vector<std::size_t>> cones = {}, std::vector<Valuation> extra = {});

  const std::string& basis_id() const override { return id_; }
  int dimension() const override { return static_cast<int>(n_); }
  std::size_t class_rank() const override { return rays_.size(); }
  const DivisorClass& canonical_class() const override { return canonical_; }
  std::span<const Valuation> valuations() const override { return valuations_; }

  const std::vector<std::vector<long>>& rays() const noexcept { return rays_; }
  const std::vector<std::vector<std::size_t>>& cones() const noexcept { return cones_; }

  /// P_D = {m : ⟨m, v_ρ⟩ ≥ −a_ρ}.
  Polytope section_polytope(const DivisorClass& d) const;
  /// n!·vol(P_D).
  Rational polytope_volume(const DivisorClass& d) const;
  /// n!·vol(P_L ∩ ⋂ {⟨m,w_i⟩ − min_{P_L}⟨·,w_i⟩ ≥ c_i}).
  Rational constrained_volume(const DivisorClass& l, std::span<const OrderConstraint> constraints) const;
  /// Lattice points of k·P_L in lexicographic order. Throws GeometryError if kL is not integral.
  std::vector<LatticePoint> section_basis(const DivisorClass& l, long k) const;
  /// A_X(w) = Σ c_i for w = Σ c_i v_i in a cone containing w. w must be primitive.
  Rational log_discrepancy(std::span<const long> w) const;

  Rational volume(const DivisorClass& d) const override;
  Rational twisted_volume(const DivisorClass& l, std::span<const Twist> twists) const override;
  std::optional<Threshold> exact_threshold(const DivisorClass& l, const Valuation& v) const override;
  std::vector<double> twist_kinks(const DivisorClass& l, std::span<const Valuation> support,
                                  std::span<const double> shifts, double lo,
                                  double hi) const override;
  void check_support(std::span<const Valuation> support) const override;

 private:
  std::vector<HalfSpace> facets_of(const DivisorClass& d) const;
  const MonomialCenter& monomial(const Valuation& v) const;

  std::string id_;
  std::size_t n_ = 0;
  std::vector<std::vector<long>> rays_;
  std::vector<std::vector<std::size_t>> cones_;
  DivisorClass canonical_;
  std::vector<Valuation> valuations_;
  // identifies this fan for per-thread caches; copies share it since they describe the same fan
  std::uint64_t serial_;
};

}  // namespace kstab
