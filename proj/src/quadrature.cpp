#include "kstab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "kstab/error.hpp"

namespace kstab {

GaussLegendre::GaussLegendre(int order) : nodes_(order), weights_(order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes_[i] = x;
    weights_[i] = 2 / ((1 - x * x) * dp * dp);
  }
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a, double b) const {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(mid + half * nodes_[i]);
  return half * s;
}

const GaussLegendre& gauss_legendre(int order) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex lock;
  const std::scoped_lock guard(lock);
  return cache.try_emplace(order, order).first->second;
}

namespace {

struct Adaptive {
  const std::function<double(double)>& f;
  const GaussLegendre& rule;
  int max_depth;
  QuadratureResult result;

  double piece(double a, double b) {
    result.evaluations += static_cast<int>(rule.nodes().size());
    return rule.integrate(f, a, b);
  }

  void refine(double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = piece(a, m), right = piece(m, b);
    const double err = std::abs(left + right - whole);
    // the second test stops refinement at the rounding floor of the sum itself
    if (err <= tol || err <= 1e-14 * std::abs(left + right) || m <= a || m >= b) {
      result.value += left + right;
      result.error_estimate += err;
      return;
    }
    if (depth >= max_depth)
      throw ConvergenceError("quadrature did not reach tolerance on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    refine(a, m, left, 0.5 * tol, depth + 1);
    refine(m, b, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breakpoints,
                                     const QuadratureOptions& options) {
  if (!(b > a)) return {};
  const GaussLegendre& rule = gauss_legendre(options.order > 0 ? options.order : 4);
  std::vector<double> cuts{a, b};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Adaptive run{f, rule, options.max_depth, {}};
  const double span = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double x0 = cuts[i], x1 = cuts[i + 1];
    const double tol = options.tolerance * (x1 - x0) / span;
    run.refine(x0, x1, run.piece(x0, x1), tol, 0);
  }
  return run.result;
}

}  // namespace kstab
