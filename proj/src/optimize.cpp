#include "kstab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/tools/minima.hpp>

#include "kstab/error.hpp"

namespace kstab {

std::pair<double, double> golden_section_max(const std::function<double(double)>& phi, double a, double b,
                                             double xtol, int* evaluations) {
  constexpr double inv_phi = 0.6180339887498949;
  int evals = 0;
  auto eval = [&](double x) {
    ++evals;
    return phi(x);
  };
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  // the endpoints matter when the maximum sits on the boundary of [a, b]
  double best_x = fc >= fd ? c : d, best = std::max(fc, fd);
  for (double x : {a, b}) {
    const double fx = eval(x);
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }
  if (evaluations) *evaluations += evals;
  return {best_x, best};
}

namespace {

class Ascent {
 public:
  Ascent(const Objective& f, std::span<const double> lo, std::span<const double> hi, const OptimizerOptions& o)
      : f_(f), lo_(lo.begin(), lo.end()), hi_(hi.begin(), hi.end()), opt_(o) {
    for (std::size_t i = 0; i < lo_.size(); ++i) width_ = std::max(width_, hi_[i] - lo_[i]);
  }

  LocalMaximum run(std::vector<double> x) {
    evals_ = 0;
    clamp(x);
    double fx = eval(x);
    double step = 0.1 * width_;
    bool converged = false;
    for (int round = 0; round < opt_.max_rounds; ++round) {
      const double before = fx;
      gradient_phase(x, fx, step);
      coordinate_phase(x, fx);
      if (fx - before < opt_.tolerance) {
        converged = true;
        break;
      }
    }
    return LocalMaximum{std::move(x), fx, evals_, converged};
  }

 private:
  double eval(std::span<const double> x) {
    ++evals_;
    return f_(x);
  }

  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
  }

  std::vector<double> gradient(const std::vector<double>& x) {
    const double h = opt_.fd_step;
    std::vector<double> g(x.size()), y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double up = std::min(x[i] + h, hi_[i]), down = std::max(x[i] - h, lo_[i]);
      if (!(up > down)) continue;
      y[i] = up;
      const double fu = eval(y);
      y[i] = down;
      const double fdn = eval(y);
      y[i] = x[i];
      g[i] = (fu - fdn) / (up - down);
      if ((x[i] <= lo_[i] && g[i] < 0) || (x[i] >= hi_[i] && g[i] > 0)) g[i] = 0;
    }
    return g;
  }

  void gradient_phase(std::vector<double>& x, double& fx, double& step) {
    for (int it = 0; it < opt_.max_gradient_steps; ++it) {
      const auto g = gradient(x);
      double gn = 0;
      for (double gi : g) gn = std::max(gn, std::abs(gi));
      if (gn < 1e-12) return;
      double s = 2 * step;
      bool moved = false;
      std::vector<double> y(x.size());
      double fy = fx;
      while (s > 1e-13 * width_) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s * g[i] / gn;
        clamp(y);
        fy = eval(y);
        if (fy > fx) {
          moved = true;
          break;
        }
        s *= 0.5;
      }
      if (!moved) return;
      step = s;
      const double gain = fy - fx;
      x = y;
      fx = fy;
      if (gain < 0.01 * opt_.tolerance) return;
    }
  }

  // Line search along x + s·u over the part of the line inside the box.
  void line_search(std::vector<double>& x, double& fx, const std::vector<double>& u) {
    double a = -std::numeric_limits<double>::infinity(), b = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (u[i] == 0) continue;
      const double s1 = (lo_[i] - x[i]) / u[i], s2 = (hi_[i] - x[i]) / u[i];
      a = std::max(a, std::min(s1, s2));
      b = std::min(b, std::max(s1, s2));
    }
    if (!(b > a)) return;
    std::vector<double> y = x;
    auto phi = [&](double s) {
      ++evals_;
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i] + s * u[i], lo_[i], hi_[i]);
      return f_(y);
    };
    // Brent's method: golden-section steps safeguarding parabolic ones.
    std::uintmax_t iterations = 200;
    auto [s, neg] = boost::math::tools::brent_find_minima([&](double v) { return -phi(v); }, a, b, 36, iterations);
    double best_s = s, fs = -neg;
    for (double end : {a, b}) {
      const double fe = phi(end);
      if (fe > fs) {
        fs = fe;
        best_s = end;
      }
    }
    if (fs > fx) {
      phi(best_s);
      x = y;
      fx = fs;
    }
  }

  // Coordinate directions, then e_i ± e_j so that ridges oblique to the axes are followed.
  void coordinate_phase(std::vector<double>& x, double& fx) {
    const std::size_t d = x.size();
    std::vector<double> u(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      u[i] = 1;
      line_search(x, fx, u);
      u[i] = 0;
    }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        for (double sign : {1.0, -1.0}) {
          u[i] = 1;
          u[j] = sign;
          line_search(x, fx, u);
          u[i] = u[j] = 0;
        }
  }

  const Objective& f_;
  std::vector<double> lo_, hi_;
  OptimizerOptions opt_;
  double width_ = 0;
  int evals_ = 0;
};

}  // namespace

BoxMaximum maximize_concave(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                            const OptimizerOptions& options) {
  const std::size_t d = lower.size();
  if (upper.size() != d) throw std::invalid_argument("box bounds differ in length");
  for (std::size_t i = 0; i < d; ++i)
    if (!(upper[i] >= lower[i])) throw std::invalid_argument("empty box");

  BoxMaximum out;
  if (d == 0) {
    out.value = f(std::span<const double>{});
    out.runs.push_back({{}, out.value, 1, true});
    out.converged = true;
    return out;
  }
  if (d == 1) {
    int evals = 0;
    const double xtol = 1e-11 * std::max(1.0, upper[0] - lower[0]);
    auto phi = [&](double v) { return f(std::span<const double>(&v, 1)); };
    auto [x, v] = golden_section_max(phi, lower[0], upper[0], xtol, &evals);
    out.x = {x};
    out.value = v;
    out.runs.push_back({{x}, v, evals, true});
    out.converged = true;
    return out;
  }

  std::mt19937_64 rng(options.seed);
  Ascent ascent(f, lower, upper, options);
  std::vector<double> centre(d);
  for (std::size_t i = 0; i < d; ++i) centre[i] = 0.5 * (lower[i] + upper[i]);
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    std::vector<double> x0 = centre;
    if (s > 0)
      for (std::size_t i = 0; i < d; ++i)
        x0[i] = std::uniform_real_distribution<double>(lower[i], upper[i])(rng);
    out.runs.push_back(ascent.run(std::move(x0)));
  }
  const auto best = std::max_element(out.runs.begin(), out.runs.end(),
                                     [](const LocalMaximum& a, const LocalMaximum& b) { return a.value < b.value; });
  out.x = best->x;
  out.value = best->value;
  out.converged = std::all_of(out.runs.begin(), out.runs.end(), [](const LocalMaximum& r) { return r.converged; });
  return out;
}

}  // namespace kstab
