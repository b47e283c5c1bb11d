#include <cmath>

#include "doctest.h"
#include "kstab/optimize.hpp"

using namespace kstab;

TEST_CASE("golden section finds interior and boundary maxima") {
  auto [x, v] = golden_section_max([](double t) { return -(t - 0.3) * (t - 0.3); }, -2, 2, 1e-10);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(v == doctest::Approx(0).epsilon(1e-15));
  auto [xb, vb] = golden_section_max([](double t) { return t; }, -1, 4, 1e-10);
  CHECK(xb == 4);
  CHECK(vb == 4);
}

TEST_CASE("box maximizer on smooth and kinked concave functions") {
  const std::vector<double> lo{-3, -3}, hi{3, 3};
  auto smooth = [](std::span<const double> x) {
    return -(x[0] - 1) * (x[0] - 1) - 2 * (x[1] + 0.5) * (x[1] + 0.5) + 0.5 * x[0] * x[1];
  };
  const auto a = maximize_concave(smooth, lo, hi);
  // ∇ = 0: −2(x−1) + 0.5y = 0, −4(y+0.5) + 0.5x = 0
  const double y = (0.5 * 1 - 2) / (4 - 0.125), x = 1 + 0.25 * y;
  CHECK(a.converged);
  CHECK(a.x[0] == doctest::Approx(x).epsilon(1e-5));
  CHECK(a.x[1] == doctest::Approx(y).epsilon(1e-5));
  CHECK(a.value == doctest::Approx(smooth(std::vector<double>{x, y})).epsilon(1e-10));

  auto kinked = [](std::span<const double> x) { return -std::abs(x[0] - 0.2) - 3 * std::abs(x[0] + x[1]); };
  const auto b = maximize_concave(kinked, lo, hi);
  CHECK(b.value > -1e-8);

  // maximum on a face of the box
  auto tilted = [](std::span<const double> x) { return x[0] + x[1] - 0.1 * x[1] * x[1]; };
  const auto c = maximize_concave(tilted, lo, hi);
  CHECK(c.x[0] == doctest::Approx(3).epsilon(1e-9));
  CHECK(c.x[1] == doctest::Approx(3).epsilon(1e-9));
  CHECK(c.value == doctest::Approx(6 - 0.9).epsilon(1e-10));
}

TEST_CASE("box maximizer is deterministic for a fixed seed") {
  const std::vector<double> lo{-1, -1, -1}, hi{1, 1, 1};
  auto f = [](std::span<const double> x) { return -std::abs(x[0]) - std::abs(x[1] - x[2]) - x[2] * x[2]; };
  OptimizerOptions o;
  o.seed = 7;
  const auto a = maximize_concave(f, lo, hi, o), b = maximize_concave(f, lo, hi, o);
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);
  CHECK(a.runs.size() == 3);
}
