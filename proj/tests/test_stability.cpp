#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "kstab/error.hpp"
#include "kstab/stability.hpp"

using namespace kstab;
using fixtures::cls;

namespace {

DivisorialMeasure measure(const GeometryModel& m, std::vector<std::pair<std::string, Rational>> atoms) {
  std::vector<Atom> out;
  for (auto& [name, mass] : atoms) out.push_back({m.valuation(name), mass});
  return DivisorialMeasure(std::move(out));
}

Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

// Random measure on up to three distinct valuations of the model, masses k_i / Σk.
DivisorialMeasure random_measure(const GeometryModel& m, std::mt19937_64& rng, std::size_t max_size = 3) {
  std::vector<Valuation> pool(m.valuations().begin(), m.valuations().end());
  pool.push_back(Valuation::trivial());
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(max_size, pool.size()))(rng);
  std::vector<long> w(k);
  long total = 0;
  for (auto& x : w) total += x = std::uniform_int_distribution<long>(1, 5)(rng);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({pool[i], frac(w[i], total)});
  return DivisorialMeasure(std::move(atoms));
}

}  // namespace

TEST_CASE("norm examples") {
  const auto p2 = fixtures::p2_surface();
  const auto bl = fixtures::blp2_surface();
  const auto l = cls("P2", {3});
  const auto line = norm(p2, l, measure(p2, {{"line", 1}}));
  CHECK(line.value == doctest::Approx(1).epsilon(1e-10));
  REQUIRE(line.maximizers.size() == 1);
  CHECK(line.maximizers[0] == std::vector<double>{0});

  CHECK(norm(p2, l, measure(p2, {{"trivial", 1}})).value == 0);
  CHECK(norm(bl, cls("BlP2", {3, -1}), measure(bl, {{"trivial", 1}})).value == 0);
  CHECK(norm(bl, cls("BlP2", {3, -1}), measure(bl, {{"E", 1}})).value == doctest::Approx(7.0 / 6).epsilon(1e-10));

  // S(a, 0) = 1 − (1 − a/3)³ for the trivial valuation shifted by a ≥ 0, so the maximum of
  // S − a/2 sits at a = 3 − 3/√2 with value 1/√2 − 1/2.
  const auto mixed = norm(p2, l, measure(p2, {{"trivial", frac(1, 2)}, {"line", frac(1, 2)}}));
  CHECK(mixed.value == doctest::Approx(1 / std::sqrt(2.0) - 0.5).epsilon(1e-10));
  REQUIRE(!mixed.maximizers.empty());
  CHECK(mixed.maximizers[0][0] == doctest::Approx(3 - 3 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(mixed.maximizers[0][1] == 0);
  CHECK(mixed.box_bound == doctest::Approx(4));
}

TEST_CASE("norm maximizers are normalized and inside the box") {
  std::mt19937_64 rng(11);
  const auto bl = fixtures::blp2_surface();
  const auto l = cls("BlP2", {3, -1});
  for (int i = 0; i < 10; ++i) {
    const auto mu = random_measure(bl, rng);
    const auto r = norm(bl, l, mu);
    CHECK(r.value >= -1e-12);
    for (const auto& t : r.maximizers) {
      CHECK(*std::min_element(t.begin(), t.end()) == 0);
      CHECK(*std::max_element(t.begin(), t.end()) <= r.box_bound);
    }
  }
}

TEST_CASE("norm_enlarged_support_check examples") {
  const auto p2t = fixtures::p2_toric();
  CHECK(norm_enlarged_support_check(p2t, cls("P2_toric", {0, 0, 3}), measure(p2t, {{"e1", 1}}),
                                    std::vector<Valuation>{p2t.valuation("e2")})
            .matches);
  const auto p2 = fixtures::p2_surface();
  CHECK(norm_enlarged_support_check(p2, cls("P2", {3}), measure(p2, {{"line", 1}}), std::vector<Valuation>{})
            .matches);
  CHECK(norm_enlarged_support_check(p2, cls("P2", {3}), measure(p2, {{"line", 1}}),
                                    std::vector<Valuation>{p2.valuation("E")})
            .matches);
  const auto bl = fixtures::blp2_surface();
  const auto r = norm_enlarged_support_check(bl, cls("BlP2", {3, -1}), measure(bl, {{"E", 1}}),
                                             std::vector<Valuation>{bl.valuation("fiber")});
  CHECK(r.matches);
  CHECK(r.enlarged == doctest::Approx(7.0 / 6).epsilon(1e-8));
  CHECK_THROWS_AS(norm_enlarged_support_check(bl, cls("BlP2", {3, -1}), measure(bl, {{"E", 1}}),
                                              std::vector<Valuation>{bl.valuation("E")}),
                  GeometryError);
}

TEST_CASE("danskin_derivative examples") {
  const auto p2 = fixtures::p2_surface();
  const auto l = cls("P2", {3});
  const auto line = measure(p2, {{"line", 1}});
  CHECK(danskin_derivative(p2, l, line, cls("P2", {-3}), Side::Left) == doctest::Approx(-1).epsilon(1e-8));
  CHECK(danskin_derivative(p2, l, line, l, Side::Right) == doctest::Approx(1).epsilon(1e-8));
  CHECK(danskin_derivative(p2, l, measure(p2, {{"trivial", 1}}), cls("P2", {1}), Side::Right) == 0);

  const auto bl = fixtures::blp2_surface();
  const auto lb = cls("BlP2", {3, -1});
  const auto mu = measure(bl, {{"E", frac(1, 3)}, {"fiber", frac(2, 3)}});
  const double n = norm(bl, lb, mu).value;
  CHECK(danskin_derivative(bl, lb, mu, lb, Side::Left) == doctest::Approx(n).epsilon(1e-6));
  CHECK(danskin_derivative(bl, lb, mu, lb, Side::Right) == doctest::Approx(n).epsilon(1e-6));
}

TEST_CASE("formula and finite-difference derivatives in L agree") {
  std::mt19937_64 rng(5);
  const auto bl = fixtures::blp2_surface();
  const auto tor = fixtures::blp2_toric();
  for (int i = 0; i < 6; ++i) {
    const auto mu = random_measure(bl, rng);
    const ExpectedOrder s(bl, cls("BlP2", {3, -1}), mu.support());
    std::vector<double> t(mu.size());
    for (auto& x : t) x = std::uniform_real_distribution<double>(0, 1.5)(rng);
    const auto h = cls("BlP2", {std::uniform_int_distribution<long>(-2, 2)(rng), 1});
    CHECK(s_derivative_in_l(s, t, h, DerivativeMethod::Formula) ==
          doctest::Approx(s_derivative_in_l(s, t, h, DerivativeMethod::FiniteDifference)).epsilon(1e-6));
  }
  const auto mu = measure(tor, {{"E", frac(1, 2)}, {"e1", frac(1, 2)}});
  const ExpectedOrder s(tor, cls("BlP2_toric", {1, 1, 1, 1}), mu.support());
  const std::vector<double> t{0.2, 0.5};
  const auto h = cls("BlP2_toric", {0, 1, 0, 0});
  CHECK(s_derivative_in_l(s, t, h, DerivativeMethod::Formula) ==
        doctest::Approx(s_derivative_in_l(s, t, h, DerivativeMethod::FiniteDifference)).epsilon(1e-6));
}

TEST_CASE("beta examples") {
  const auto p2 = fixtures::p2_surface();
  const auto bl = fixtures::blp2_surface();
  const auto line = beta(p2, cls("P2", {3}), measure(p2, {{"line", 1}}));
  CHECK(line.entropy == 1);
  CHECK(line.beta == doctest::Approx(0).epsilon(1e-8));
  CHECK(std::abs(line.beta) < 1e-8);
  REQUIRE(line.stability_ratio);

  const auto e = beta(bl, cls("BlP2", {3, -1}), measure(bl, {{"E", 1}}));
  CHECK(e.beta == doctest::Approx(-1.0 / 6).epsilon(1e-8));
  CHECK(e.beta == e.entropy_term + e.derivative_term);

  const auto triv = beta(bl, cls("BlP2", {3, -1}), measure(bl, {{"trivial", 1}}));
  CHECK(triv.beta == 0);
  CHECK(!triv.stability_ratio);
}

TEST_CASE("beta of the exceptional divisor agrees on P2 and on its blowup") {
  const auto p2 = fixtures::p2_surface();
  const auto x = beta(p2, cls("P2", {3}), measure(p2, {{"E", 1}}));
  CHECK(x.entropy == 2);
  CHECK(x.norm == doctest::Approx(2).epsilon(1e-9));
  CHECK(std::abs(x.beta) < 1e-6);

  // on the blowup itself A(E) = 1 and K carries the E coefficient instead
  const auto bl = fixtures::blp2_surface();
  const auto y = beta(bl, cls("BlP2", {3, 0}), measure(bl, {{"E", 1}}));
  CHECK(y.entropy == 1);
  CHECK(y.norm == doctest::Approx(2).epsilon(1e-9));
  CHECK(std::abs(y.beta) < 1e-6);
}

TEST_CASE("delta_anticanonical examples") {
  const auto p2 = fixtures::p2_surface();
  const auto r = delta_anticanonical(p2, surface_delta_candidates(p2));
  CHECK(r.value == doctest::Approx(1).epsilon(1e-10));
  CHECK(r.witness.name() == "line");

  const auto bl = fixtures::blp2_surface();
  const auto b = delta_anticanonical(bl, surface_delta_candidates(bl));
  CHECK(std::abs(b.value - 6.0 / 7) < 1e-8);
  CHECK(b.witness.name() == "E");

  const auto pp = fixtures::p1p1_toric();
  const auto cands = toric_delta_candidates(pp, 1);
  CHECK(cands.size() == 8);
  const auto t = delta_anticanonical(pp, cands);
  CHECK(t.value <= 1 + 1e-10);
  for (const auto& c : t.candidates)
    if (c.valuation.name() == "e1") CHECK(c.ratio == doctest::Approx(1).epsilon(1e-10));

  const auto bt = delta_anticanonical(fixtures::blp2_toric(), toric_delta_candidates(fixtures::blp2_toric(), 2));
  CHECK(std::abs(bt.value - 6.0 / 7) < 1e-8);
  CHECK(bt.witness.name() == "E");
  CHECK_THROWS_AS(delta_anticanonical(bl, std::vector<Valuation>{}), GeometryError);
  CHECK_THROWS_AS(delta_anticanonical(bl, std::vector<Valuation>{Valuation::trivial()}), GeometryError);
}

TEST_CASE("ma_solve examples") {
  const auto p2 = fixtures::p2_surface();
  const auto l = cls("P2", {3});
  const auto triv = ma_solve(p2, l, measure(p2, {{"trivial", 1}}));
  CHECK(triv.t_star == std::vector<double>{0});
  CHECK(triv.measure_out[0] == doctest::Approx(1).epsilon(1e-9));
  CHECK(triv.residual < 1e-9);

  const auto line = ma_solve(p2, l, measure(p2, {{"line", 1}}));
  CHECK(line.residual < 1e-6);

  const auto mu = measure(p2, {{"trivial", frac(1, 2)}, {"line", frac(1, 2)}});
  const auto mixed = ma_solve(p2, l, mu);
  CHECK(mixed.residual <= 1e-4);
  CHECK(mixed.measure_out[0] + mixed.measure_out[1] == doctest::Approx(1).epsilon(1e-6));
  CHECK(mixed.value == doctest::Approx(norm(p2, l, mu).value).epsilon(1e-8));
  CHECK(mixed.flat_directions.empty());
}

TEST_CASE("stability probe examples") {
  const auto bl = fixtures::blp2_surface();
  const std::vector<DivisorialMeasure> ms{measure(bl, {{"fiber", 1}}), measure(bl, {{"E", 1}})};
  const auto r = divisorial_stability_probe(bl, cls("BlP2", {3, -1}), ms, 0);
  CHECK(r.verdict == ProbeVerdict::Unstable);
  REQUIRE(r.witness);
  CHECK(*r.witness == 1);
  CHECK(r.entries[1].beta == doctest::Approx(-1.0 / 6).epsilon(1e-8));

  const auto p2 = fixtures::p2_toric();
  const std::vector<DivisorialMeasure> rays{measure(p2, {{"e1", 1}}), measure(p2, {{"e2", 1}}),
                                            measure(p2, {{"e3", 1}})};
  const auto s = divisorial_stability_probe(p2, cls("P2_toric", {1, 1, 1}), rays, 0);
  CHECK(s.verdict == ProbeVerdict::NoViolationFound);
  REQUIRE(s.min_ratio);
  CHECK(std::abs(*s.min_ratio) < 1e-8);

  const std::vector<DivisorialMeasure> triv{measure(p2, {{"trivial", 1}})};
  CHECK(divisorial_stability_probe(p2, cls("P2_toric", {1, 1, 1}), triv, 0.1).verdict == ProbeVerdict::Vacuous);
}

TEST_CASE("stability properties on random measures") {
  std::mt19937_64 rng(2024);
  const auto bl = fixtures::blp2_surface();
  const auto f1 = fixtures::f1_surface();
  for (const GeometryModel* m : {static_cast<const GeometryModel*>(&bl), static_cast<const GeometryModel*>(&f1)}) {
    const DivisorClass anti = -m->canonical_class();
    for (int i = 0; i < 4; ++i) {
      const auto mu = random_measure(*m, rng);
      const auto b = beta(*m, anti, mu);
      // K = −L, so the derivative term is −‖μ‖
      CHECK(b.derivative_term == doctest::Approx(-b.norm).epsilon(1e-6));

      const double s = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
      CHECK(norm(*m, Rational(from_double(1 + s)) * anti, mu).value ==
            doctest::Approx((1 + s) * b.norm).epsilon(1e-6));

      double sum = 0;
      for (const auto& a : mu.atoms())
        sum += to_double(a.mass) * beta(*m, anti, DivisorialMeasure({{a.valuation, Rational(1)}})).beta;
      CHECK(b.beta >= sum - 1e-6);

      const auto h = m->make_class({Rational(std::uniform_int_distribution<long>(-2, 2)(rng)), Rational(1)});
      const ExpectedOrder so(*m, anti, mu.support());
      CHECK(danskin_derivative(so, b.argmax, h, Side::Right, DerivativeMethod::Formula) >=
            danskin_derivative(so, b.argmax, h, Side::Left, DerivativeMethod::Formula) - 1e-9);

      const auto sol = ma_solve(*m, anti, mu);
      CHECK(sol.value == doctest::Approx(b.norm).epsilon(1e-8));
      double mass = 0;
      for (double x : sol.measure_out) mass += x;
      CHECK(mass == doctest::Approx(1).epsilon(1e-6));
    }
  }
}
