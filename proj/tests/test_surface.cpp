#include <algorithm>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "kstab/error.hpp"
#include "kstab/surface.hpp"

using namespace kstab;
using fixtures::cls;
using fixtures::mat;
using fixtures::q;

namespace {

// Independent oracle: try every subset of negative curves as the support and keep the one that
// satisfies all Zariski conditions.
std::optional<ZariskiDecomposition> brute_force_zariski(const SurfaceLattice& lat, const DivisorClass& d) {
  const auto& curves = lat.negative_curves();
  const std::size_t m = curves.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) idx.push_back(i);
    RationalMatrix g(idx.size(), std::vector<Rational>(idx.size()));
    std::vector<Rational> rhs(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) g[i][j] = lat.dot(curves[idx[i]].cls, curves[idx[j]].cls);
      rhs[i] = lat.dot(d, curves[idx[i]].cls);
    }
    auto a = solve(g, rhs);
    if (!a) continue;
    DivisorClass p = d;
    bool ok = true;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      ok = ok && sgn((*a)[i]) > 0;
      p -= (*a)[i] * curves[idx[i]].cls;
    }
    for (const auto& c : curves) ok = ok && sgn(lat.dot(p, c.cls)) >= 0;
    for (const auto& c : lat.sample_curves()) ok = ok && sgn(lat.dot(p, c.cls)) >= 0;
    if (!ok) continue;
    ZariskiDecomposition z{p, {}};
    for (std::size_t i = 0; i < idx.size(); ++i) z.negative.emplace_back(curves[idx[i]], (*a)[i]);
    return z;
  }
  return std::nullopt;
}

// A rank-3 lattice with two disjoint (−1)-curves: the blowup of P² at two points.
SurfaceLattice bl2_lattice() {
  const std::string id = "Bl2P2";
  return SurfaceLattice(id, {"H", "E1", "E2"}, mat({{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}), q({-3, 1, 1}),
                        {{"E1", cls(id, {0, 1, 0})}, {"E2", cls(id, {0, 0, 1})}, {"L12", cls(id, {1, -1, -1})}},
                        {{"line", cls(id, {1, 0, 0})}, {"f1", cls(id, {1, -1, 0})}, {"f2", cls(id, {1, 0, -1})}});
}

}  // namespace

TEST_CASE("lattice validation") {
  CHECK_THROWS_AS(SurfaceLattice("bad", {"A", "B"}, mat({{1, 0}, {0, 1}}), q({0, 0}), {},
                                 {{"a", cls("bad", {1, 0})}}),
                  GeometryError);
  CHECK_THROWS_AS(SurfaceLattice("bad", {"A", "B"}, mat({{1, 0}, {1, -1}}), q({0, 0}), {},
                                 {{"a", cls("bad", {1, 0})}}),
                  GeometryError);
  CHECK_THROWS_AS(SurfaceLattice("bad", {"H", "E"}, mat({{1, 0}, {0, -1}}), q({-3, 1}),
                                 {{"notneg", cls("bad", {1, 0})}}, {{"a", cls("bad", {1, 0})}}),
                  GeometryError);
  CHECK_THROWS_AS(SurfaceLattice("bad", {"H"}, mat({{1}}), q({-3}), {}, {}), GeometryError);
}

TEST_CASE("is_big examples") {
  const auto p2 = fixtures::p2_surface();
  const auto bl = fixtures::blp2_surface();
  CHECK(is_big(p2, cls("P2", {3})));
  CHECK_FALSE(is_big(p2, cls("P2", {-1})));
  CHECK_FALSE(is_big(bl, cls("BlP2", {1, -2})));
  CHECK_THROWS_AS(is_big(p2, cls("BlP2", {1, 0})), GeometryError);
}

TEST_CASE("zariski examples") {
  const auto bl = fixtures::blp2_surface();
  auto z = bl.zariski(cls("BlP2", {1, 2}));
  CHECK(z.positive == cls("BlP2", {1, 0}));
  REQUIRE(z.negative.size() == 1);
  CHECK(z.negative[0].first.name == "E");
  CHECK(z.negative[0].second == 2);

  const auto p2 = fixtures::p2_surface();
  auto z2 = p2.zariski(cls("P2", {3}));
  CHECK(z2.positive == cls("P2", {3}));
  CHECK(z2.negative.empty());

  auto z3 = bl.zariski(cls("BlP2", {3, -1}));
  CHECK(z3.positive == cls("BlP2", {3, -1}));
  CHECK(z3.negative.empty());

  CHECK_THROWS_AS(bl.zariski(cls("BlP2", {1, -2})), NotPseudoeffective);
  CHECK_THROWS_AS(p2.zariski(cls("P2", {-1})), NotPseudoeffective);
}

TEST_CASE("volume examples") {
  CHECK(fixtures::p2_surface().volume(cls("P2", {3})) == 9);
  const auto bl = fixtures::blp2_surface();
  CHECK(bl.volume(cls("BlP2", {3, -1})) == 8);
  CHECK(bl.volume(cls("BlP2", {1, 2})) == 1);
  CHECK(bl.volume(cls("BlP2", {1, -2})) == 0);
  CHECK(fixtures::f1_surface().volume(cls("F1", {2, 3})) == 8);
  CHECK(fixtures::p1p1_surface().volume(cls("P1xP1", {2, 2})) == 8);
}

TEST_CASE("positive_product_against examples") {
  const auto bl = fixtures::blp2_surface();
  CHECK(fixtures::p2_surface().positive_product_against(cls("P2", {3}), cls("P2", {1})) == 3);
  CHECK(bl.positive_product_against(cls("BlP2", {1, 2}), cls("BlP2", {0, 1})) == 0);
  CHECK(bl.positive_product_against(cls("BlP2", {3, -1}), cls("BlP2", {-3, 1})) == -8);
  CHECK_THROWS_AS(bl.positive_product_against(cls("BlP2", {1, -1}), cls("BlP2", {1, 0})), GeometryError);
}

TEST_CASE("gamma_threshold examples") {
  const auto bl = fixtures::blp2_surface();
  const auto p2 = fixtures::p2_surface();
  auto g1 = gamma_threshold(bl, cls("BlP2", {3, 0}), bl.valuation("E"));
  REQUIRE(g1.exact);
  CHECK(*g1.exact == 3);
  auto g2 = gamma_threshold(p2, cls("P2", {3}), p2.valuation("line"));
  REQUIRE(g2.exact);
  CHECK(*g2.exact == 3);
  auto g3 = gamma_threshold(bl, cls("BlP2", {3, -1}), bl.valuation("E"));
  REQUIRE(g3.exact);
  CHECK(*g3.exact == 2);
  auto g4 = gamma_threshold(bl, cls("BlP2", {3, -1}), bl.valuation("E"), 1e-10, ThresholdMethod::Bisection);
  CHECK(g4.value == doctest::Approx(2).epsilon(1e-9));
  CHECK_FALSE(g4.exact);

  CHECK_THROWS_AS(gamma_threshold(bl, cls("BlP2", {1, -1}), bl.valuation("E")), GeometryError);
  CHECK_THROWS_AS(gamma_threshold(bl, cls("BlP2", {3, -1}), Valuation::trivial()), GeometryError);
}

TEST_CASE("threshold through the blowup model") {
  const auto p2 = fixtures::p2_surface();
  // vol(3H − λE) = 9 − λ² on the blowup; threshold 3.
  auto g = gamma_threshold(p2, cls("P2", {3}), p2.valuation("E"));
  REQUIRE(g.exact);
  CHECK(*g.exact == 3);
  CHECK(p2.valuation("E").log_discrepancy() == 2);
  CHECK(fixtures::blp2_surface().valuation("E").log_discrepancy() == 1);
}

TEST_CASE("exact threshold agrees with bisection") {
  // F1, L = C0 + 2f, twisted by the section C0 + f: nef for λ ≤ 1 with vol (1−λ)(3−λ).
  const auto f1 = fixtures::f1_surface();
  const auto l = cls("F1", {1, 2});
  auto g = gamma_threshold(f1, l, f1.valuation("section"));
  REQUIRE(g.exact);
  CHECK(*g.exact == 1);
  auto b = gamma_threshold(f1, l, f1.valuation("section"), 1e-12, ThresholdMethod::Bisection);
  CHECK(g.value == doctest::Approx(b.value).epsilon(1e-10));
}

TEST_CASE("zariski agrees with the subset oracle on random classes") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-6, 8);
  std::uniform_int_distribution<int> den(1, 4);
  const auto lat = bl2_lattice();
  const auto bl = fixtures::blp2_lattice();
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const SurfaceLattice& l = trial % 2 ? lat : bl;
    std::vector<Rational> c;
    for (std::size_t i = 0; i < l.rank(); ++i) c.emplace_back(coef(rng), den(rng));
    for (auto& x : c) x.canonicalize();
    const DivisorClass d(l.id(), c);
    auto oracle = brute_force_zariski(l, d);
    if (!oracle) {
      CHECK_THROWS_AS(l.zariski(d), NotPseudoeffective);
      CHECK(l.volume(d) == 0);
      continue;
    }
    auto z = l.zariski(d);
    CHECK(z.positive == oracle->positive);
    CHECK(l.volume(d) == l.dot(oracle->positive, oracle->positive));
    DivisorClass sum = z.positive;
    for (const auto& [curve, a] : z.negative) {
      CHECK(sgn(a) > 0);
      CHECK(l.dot(z.positive, curve.cls) == 0);
      sum += a * curve.cls;
    }
    CHECK(sum == d);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("zariski is independent of the curve order") {
  const auto lat = bl2_lattice();
  auto curves = lat.negative_curves();
  std::reverse(curves.begin(), curves.end());
  const SurfaceLattice rev(lat.id(), lat.labels(), lat.form(),
                           {lat.canonical().coefficients().begin(), lat.canonical().coefficients().end()},
                           curves, lat.sample_curves());
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-3, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const DivisorClass d(lat.id(), q({coef(rng), coef(rng), coef(rng)}));
    if (lat.volume(d) == 0) continue;
    CHECK(lat.zariski(d).positive == rev.zariski(d).positive);
  }
}

TEST_CASE("volume is homogeneous of degree two and monotone along effective directions") {
  const auto lat = bl2_lattice();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-4, 6);
  std::uniform_int_distribution<int> num(0, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const DivisorClass d(lat.id(), q({coef(rng), coef(rng), coef(rng)}));
    Rational c(num(rng), 5);
    c.canonicalize();
    CHECK(lat.volume(c * d) == c * c * lat.volume(d));
    for (const auto& curve : lat.negative_curves()) {
      Rational prev = lat.volume(d);
      for (int s = 1; s <= 4; ++s) {
        const Rational v = lat.volume(d + Rational(s, 2) * curve.cls);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("derivative consistency: 2·P·H matches the volume difference quotient") {
  const auto lat = bl2_lattice();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-4, 6);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const DivisorClass d(lat.id(), q({coef(rng) + 6, coef(rng), coef(rng)}));
    const DivisorClass h(lat.id(), q({coef(rng), coef(rng), coef(rng)}));
    if (lat.volume(d) == 0) continue;
    const Rational eps(1, 1000000000);
    const Rational fd = (lat.volume(d + eps * h) - lat.volume(d - eps * h)) / (2 * eps);
    CHECK(std::abs(to_double(2 * lat.positive_product(d, h) - fd)) <= 1e-6);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("exceptional curves have zero positive product against pullbacks") {
  const auto p2 = fixtures::p2_surface();
  for (long k = 1; k <= 5; ++k) {
    const auto pulled = p2.pull_to("P2_blowup", cls("P2", {k}));
    const auto& up = p2.birational_models()[0].lattice;
    CHECK(up.positive_product(pulled, cls("P2_blowup", {0, 1})) == 0);
  }
}

TEST_CASE("volume vanishes exactly at threshold endpoints") {
  const auto bl = fixtures::blp2_surface();
  for (long a = 1; a <= 4; ++a)
    for (long b = 0; b < a; ++b) {
      const auto l = cls("BlP2", {a, -b});
      for (const char* name : {"E", "fiber", "line"}) {
        const auto v = bl.valuation(name);
        auto g = gamma_threshold(bl, l, v);
        REQUIRE(g.exact);
        const Twist tw{&v, *g.exact};
        CHECK(bl.twisted_volume(l, std::span<const Twist>(&tw, 1)) == 0);
        const Twist before{&v, *g.exact - Rational(1, 1000)};
        CHECK(sgn(bl.twisted_volume(l, std::span<const Twist>(&before, 1))) > 0);
      }
    }
}

TEST_CASE("chamber walk reports the wall where E leaves the negative part") {
  // D(s) = H + 2E − s·E: E in the support until s = 2, nef beyond; bigness lost at s = 3.
  const auto bl = fixtures::blp2_lattice();
  auto w = bl.walk(cls("BlP2", {1, 2}), cls("BlP2", {0, -1}));
  REQUIRE(w.walls.size() == 1);
  CHECK(w.walls[0] == 2);
  REQUIRE(w.bigness_lost);
  CHECK(*w.bigness_lost->exact == 3);
}

TEST_CASE("log discrepancy of the exceptional curve follows K_Y − π*K_X") {
  const auto p2 = fixtures::p2_surface();
  CHECK(p2.log_discrepancy("P2_blowup", cls("P2_blowup", {0, 1})) == 2);
  CHECK(p2.log_discrepancy("P2_blowup", cls("P2_blowup", {1, -1})) == 1);
  CHECK(p2.log_discrepancy("P2", cls("P2", {1})) == 1);
}

TEST_CASE("supports without a common model are rejected") {
  const auto p2 = fixtures::p2_surface();
  std::vector<Valuation> ok{p2.valuation("line"), p2.valuation("E")};
  CHECK_NOTHROW(p2.check_support(ok));
  const Valuation lonely("lonely", Rational(1), SurfaceCenter{{cls("P2", {2})}});
  std::vector<Valuation> bad{lonely, p2.valuation("E")};
  CHECK_THROWS_AS(p2.check_support(bad), GeometryError);
}
