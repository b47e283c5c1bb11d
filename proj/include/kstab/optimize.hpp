#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kstab {

struct OptimizerOptions {
  /// Stop when a full ascent round improves the objective by less than this.
  double tolerance = 1e-8;
  int max_rounds = 60;
  int max_gradient_steps = 200;
  /// Number of starting points when the dimension is at least 2.
  int starts = 3;
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
};

struct LocalMaximum {
  std::vector<double> x;
  double value = 0;
  int evaluations = 0;
  bool converged = false;
};

struct BoxMaximum {
  std::vector<double> x;
  double value = 0;
  std::vector<LocalMaximum> runs;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Maximum of φ over [a, b] for concave φ, by golden-section search down to width `xtol`.
/// Returns (argmax, value).
std::pair<double, double> golden_section_max(const std::function<double(double)>& phi, double a, double b,
                                             double xtol, int* evaluations = nullptr);

/// Maximizes a concave function over a box. Dimension 1 uses golden-section search on the whole
/// interval; higher dimensions run projected supergradient ascent (central differences inside
/// the box, one-sided on its faces) followed by Brent line searches along the axes and
/// the diagonals e_i ± e_j, from the box centre and `starts − 1` seeded random points.
BoxMaximum maximize_concave(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                            const OptimizerOptions& options = {});

}  // namespace kstab
