#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kstab/divisor_class.hpp"
#include "kstab/filtration.hpp"
#include "kstab/geometry_model.hpp"
#include "kstab/optimize.hpp"
#include "kstab/quadrature.hpp"
#include "kstab/valuation.hpp"

namespace kstab {

class SurfaceModel;
class ToricModel;

enum class DerivativeMethod { Formula, FiniteDifference };
enum class Side { Left, Right };

struct StabilityOptions {
  QuadratureOptions quadrature;
  OptimizerOptions optimizer;
  double gradient_tolerance = 1e-6;
  /// Maximizers within this of the best value count as argmax points.
  double argmax_epsilon = 1e-5;
  /// L∞ radius used to merge argmax points into clusters.
  double argmax_radius = 1e-4;
  DerivativeMethod derivative = DerivativeMethod::Formula;
};

struct NormResult {
  double value = 0;
  /// Cluster representatives, best first, normalized so that min t_i = 0 and t_i ≤ box_bound.
  /// Entries follow the atom order of the measure.
  std::vector<std::vector<double>> maximizers;
  double box_bound = 0;
  bool converged = false;
};

/// sup_t { S_{L,Σ}(t) − ⟨ξ, t⟩ }. Throws ConvergenceError when the optimizer runs out of budget.
NormResult norm(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                const StabilityOptions& options = {});

/// Same, reusing a prepared S_L for the measure's support (in atom order).
NormResult norm(const ExpectedOrder& s, const DivisorialMeasure& mu, const StabilityOptions& options = {});

struct EnlargementCheck {
  bool matches;
  double base;
  double enlarged;
};

/// Norm with `extra` appended at mass zero against the plain norm. Throws GeometryError when
/// `extra` meets the support.
EnlargementCheck norm_enlarged_support_check(const GeometryModel& model, const DivisorClass& l,
                                             const DivisorialMeasure& mu, std::span<const Valuation> extra,
                                             double tolerance = 1e-6, const StabilityOptions& options = {});

/// ∇_H S_L(t) at fixed t, by the volume-derivative formula or by central differences in L.
double s_derivative_in_l(const ExpectedOrder& s, std::span<const double> t, const DivisorClass& h,
                         DerivativeMethod method);

/// One-sided derivative of ‖μ‖ at L in direction H: the right one is the sup of ∇_H S_L over the
/// argmax representatives, the left one is −∇⁺_{−H}.
double danskin_derivative(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                          const DivisorClass& h, Side side, const StabilityOptions& options = {});

double danskin_derivative(const ExpectedOrder& s, const NormResult& argmax, const DivisorClass& h, Side side,
                          DerivativeMethod method);

struct BetaReport {
  Rational entropy;
  double entropy_term = 0;
  double derivative_term = 0;
  double beta = 0;
  double norm = 0;
  /// β/‖μ‖; empty when the norm vanishes.
  std::optional<double> stability_ratio;
  NormResult argmax;
};

/// Σ ξ_i A(F_i) + ∇⁻_{K_X}‖μ‖_L.
BetaReport beta(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                const StabilityOptions& options = {});

struct DeltaCandidate {
  Valuation valuation;
  double expected_order;
  double ratio;
};

struct DeltaResult {
  double value;
  Valuation witness;
  std::vector<DeltaCandidate> candidates;
};

/// min over candidates of A(E)/S_{−K}(E). The first candidate attains ties.
DeltaResult delta_anticanonical(const GeometryModel& model, std::span<const Valuation> candidates,
                                const QuadratureOptions& options = {});

/// Monomial valuations of all primitive w with max |w_i| ≤ height. Vectors matching a declared
/// valuation reuse its name.
std::vector<Valuation> toric_delta_candidates(const ToricModel& model, long height);

/// Every declared or exceptional valuation of the model.
std::vector<Valuation> surface_delta_candidates(const SurfaceModel& model);

struct OneSidedDerivative {
  std::size_t index;
  double forward;
  double backward;
};

struct MASolution {
  std::vector<double> t_star;
  /// ∂S/∂t_i at t_star by symmetric differences.
  std::vector<double> measure_out;
  double residual = 0;
  std::vector<std::size_t> flat_directions;
  std::vector<OneSidedDerivative> one_sided;
  double value = 0;
  NormResult argmax;
};

/// Maximizes S_L(t) − ⟨ξ, t⟩ and reads off the measure as the gradient of S at the optimum,
/// preferring a maximizer where S is differentiable.
MASolution ma_solve(const GeometryModel& model, const DivisorClass& l, const DivisorialMeasure& mu,
                    const StabilityOptions& options = {});

enum class ProbeVerdict { Unstable, NoViolationFound, Vacuous };

struct ProbeReport {
  std::vector<BetaReport> entries;
  /// min β/‖μ‖ over measures of nonzero norm, with its index.
  std::optional<double> min_ratio;
  std::optional<std::size_t> min_index;
  /// Index of the measure with the most negative β − ε‖μ‖, if that is below −slack.
  std::optional<std::size_t> witness;
  ProbeVerdict verdict = ProbeVerdict::Vacuous;
};

/// Instability witnesses are certificates; the absence of one is only evidence of stability.
ProbeReport divisorial_stability_probe(const GeometryModel& model, const DivisorClass& l,
                                       std::span<const DivisorialMeasure> measures, double epsilon,
                                       const StabilityOptions& options = {});

std::string describe(ProbeVerdict verdict);

}  // namespace kstab
