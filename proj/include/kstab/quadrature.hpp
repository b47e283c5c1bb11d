#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kstab {

/// Gauss–Legendre rule with nodes and weights on [−1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  double integrate(const std::function<double(double)>& f, double a, double b) const;
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct QuadratureOptions {
  /// Absolute tolerance on the whole integral.
  double tolerance = 1e-9;
  /// Nodes per rule; 0 lets the caller pick the smallest order exact on its polynomial pieces.
  int order = 0;
  int max_depth = 40;
};

/// Cached rule of the given order.
const GaussLegendre& gauss_legendre(int order);

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  int evaluations = 0;
};

/// Composite Gauss–Legendre over [a, b] split at `breakpoints`; each piece is bisected until the
/// rule on the piece and on its two halves agree within the piece's share of the tolerance.
/// Throws ConvergenceError when the depth budget runs out.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breakpoints,
                                     const QuadratureOptions& options = {});

}  // namespace kstab
