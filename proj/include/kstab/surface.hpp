#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kstab/divisor_class.hpp"
#include "kstab/geometry_model.hpp"
#include "kstab/linalg.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// An irreducible curve declared on a surface lattice.
struct Curve {
  std::string name;
  DivisorClass cls;
};

struct ZariskiDecomposition {
  DivisorClass positive;
  /// Support curves with strictly positive coefficients.
  std::vector<std::pair<Curve, Rational>> negative;
};

/// Result of walking D(s) = start + s·direction for s ≥ 0.
struct LineWalk {
  /// Chamber walls crossed strictly before bigness is lost (or before the length cap).
  std::vector<Rational> walls;
  /// First s where D(s) stops being big; empty if D stays big on the walked range.
  std::optional<Threshold> bigness_lost;
};

/// Néron–Severi lattice of a smooth projective surface with its declared curves.
class SurfaceLattice {
 public:
  /// Validates symmetry, Hodge signature (1, rank − 1), C² < 0 for negative curves, C² ≥ 0 for
  /// sample curves, and that some sample curve has positive square.
  SurfaceLattice(std::string id, std::vector<std::string> labels, RationalMatrix form,
                 std::vector<Rational> canonical, std::vector<Curve> negative_curves,
                 std::vector<Curve> sample_curves);

  const std::string& id() const noexcept { return id_; }
  std::size_t rank() const noexcept { return form_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const RationalMatrix& form() const noexcept { return form_; }
  const DivisorClass& canonical() const noexcept { return canonical_; }
  const std::vector<Curve>& negative_curves() const noexcept { return negative_; }
  const std::vector<Curve>& sample_curves() const noexcept { return samples_; }

  DivisorClass make_class(std::vector<Rational> coefficients) const;
  Rational dot(const DivisorClass& a, const DivisorClass& b) const;

  /// Throws NotPseudoeffective when no decomposition exists against the declared curves.
  ZariskiDecomposition zariski(const DivisorClass& d) const;

  /// P² for the positive part P; 0 off the pseudoeffective cone.
  Rational volume(const DivisorClass& d) const;

  /// P·h. Throws GeometryError if d is not big.
  Rational positive_product(const DivisorClass& d, const DivisorClass& h) const;

  /// Follows start + s·direction through Zariski chambers. Walls are exact; the point where
  /// bigness is lost is exact when it is rational.
  LineWalk walk(const DivisorClass& start, const DivisorClass& direction,
                std::optional<Rational> length = std::nullopt) const;

 private:
  struct Chamber;
  Chamber chamber(const DivisorClass& base, const DivisorClass& direction) const;

  std::string id_;
  std::vector<std::string> labels_;
  RationalMatrix form_;
  DivisorClass canonical_;
  std::vector<Curve> negative_;
  std::vector<Curve> samples_;
};

/// A blowup (or other birational morphism) π: Y → X, given by Y's lattice and the pullback map.
struct BirationalModel {
  SurfaceLattice lattice;
  /// rank_Y × rank_X; column j is π*(e_j).
  RationalMatrix pullback;
};

class SurfaceModel final : public GeometryModel {
 public:
  /// Declared base curves become valuations with A = 1, exceptional curves of birational models
  /// become valuations with A = 1 + ord(K_Y − π*K_X); entries of `valuations` override by name.
  SurfaceModel(SurfaceLattice base, std::vector<BirationalModel> models,
               std::vector<Valuation> valuations = {});

  const SurfaceLattice& lattice() const noexcept { return base_; }
  std::span<const BirationalModel> birational_models() const noexcept { return models_; }

  const std::string& basis_id() const override { return base_.id(); }
  int dimension() const override { return 2; }
  std::size_t class_rank() const override { return base_.rank(); }
  const DivisorClass& canonical_class() const override { return base_.canonical(); }
  std::span<const Valuation> valuations() const override { return valuations_; }

  ZariskiDecomposition zariski(const DivisorClass& d) const;
  Rational positive_product_against(const DivisorClass& d, const DivisorClass& h) const;

  Rational volume(const DivisorClass& d) const override;
  Rational twisted_volume(const DivisorClass& l, std::span<const Twist> twists) const override;
  Rational twisted_volume_derivative(const DivisorClass& l, std::span<const Twist> twists,
                                     const DivisorClass& h) const override;
  std::optional<Threshold> exact_threshold(const DivisorClass& l, const Valuation& v) const override;
  std::vector<double> twist_kinks(const DivisorClass& l, std::span<const Valuation> support,
                                  std::span<const double> shifts, double lo,
                                  double hi) const override;
  void check_support(std::span<const Valuation> support) const override;

  /// A = 1 + coefficient of `center` in K_Y − π*K_X, for a curve on the named model
  /// (the base id or a birational model id).
  Rational log_discrepancy(const std::string& model_id, const DivisorClass& center) const;

  /// π*d on the model with the given id (identity for the base).
  DivisorClass pull_to(const std::string& model_id, const DivisorClass& d) const;

 private:
  const SurfaceLattice& lattice_of(const std::string& model_id) const;
  /// Lattice on which every non-trivial valuation in `vals` has a center.
  const SurfaceLattice& common_lattice(std::span<const Valuation* const> vals) const;
  DivisorClass twisted_class(const SurfaceLattice& on, const DivisorClass& l,
                             std::span<const Twist> twists) const;

  SurfaceLattice base_;
  std::vector<BirationalModel> models_;
  std::vector<Valuation> valuations_;
};

}  // namespace kstab
