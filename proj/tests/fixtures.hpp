#pragma once

// Hand-built models shared by the unit tests; independent of the JSON loader.

#include <string>
#include <vector>

#include "kstab/surface.hpp"

namespace kstab::fixtures {

inline std::vector<Rational> q(std::initializer_list<long> xs) {
  std::vector<Rational> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

inline DivisorClass cls(const std::string& id, std::initializer_list<long> xs) {
  return DivisorClass(id, q(xs));
}

inline RationalMatrix mat(std::initializer_list<std::initializer_list<long>> rows) {
  RationalMatrix m;
  for (auto r : rows) m.push_back(q(r));
  return m;
}

inline SurfaceLattice blp2_lattice(const std::string& id = "BlP2") {
  return SurfaceLattice(id, {"H", "E"}, mat({{1, 0}, {0, -1}}), q({-3, 1}),
                        {{"E", cls(id, {0, 1})}},
                        {{"fiber", cls(id, {1, -1})}, {"line", cls(id, {1, 0})}});
}

/// P² with the blowup at a point as a declared birational model carrying the exceptional curve.
inline SurfaceModel p2_surface() {
  SurfaceLattice base("P2", {"H"}, mat({{1}}), q({-3}), {}, {{"line", cls("P2", {1})}});
  SurfaceLattice up("P2_blowup", {"H", "E"}, mat({{1, 0}, {0, -1}}), q({-3, 1}),
                    {{"E", cls("P2_blowup", {0, 1})}},
                    {{"fiber", cls("P2_blowup", {1, -1})}, {"general_line", cls("P2_blowup", {1, 0})}});
  std::vector<BirationalModel> models;
  models.push_back({std::move(up), mat({{1}, {0}})});
  std::vector<Valuation> vals;
  vals.emplace_back("line", Rational(1),
                    SurfaceCenter{{cls("P2", {1}), cls("P2_blowup", {1, 0})}});
  return SurfaceModel(std::move(base), std::move(models), std::move(vals));
}

inline SurfaceModel blp2_surface() { return SurfaceModel(blp2_lattice(), {}); }

inline SurfaceModel p1p1_surface() {
  const std::string id = "P1xP1";
  return SurfaceModel(SurfaceLattice(id, {"H1", "H2"}, mat({{0, 1}, {1, 0}}), q({-2, -2}), {},
                                     {{"f1", cls(id, {1, 0})},
                                      {"f2", cls(id, {0, 1})},
                                      {"diagonal", cls(id, {1, 1})}}),
                      {});
}

inline SurfaceModel f1_surface() {
  const std::string id = "F1";
  return SurfaceModel(SurfaceLattice(id, {"C0", "f"}, mat({{-1, 1}, {1, 0}}), q({-2, -3}),
                                     {{"C0", cls(id, {1, 0})}},
                                     {{"f", cls(id, {0, 1})}, {"section", cls(id, {1, 1})}}),
                      {});
}

}  // namespace kstab::fixtures

#include "kstab/toric.hpp"

namespace kstab::fixtures {

inline ToricModel p2_toric() {
  std::vector<Valuation> extra;
  extra.emplace_back("w11", Rational(2), MonomialCenter{{1, 1}});
  return ToricModel("P2_toric", {{1, 0}, {0, 1}, {-1, -1}}, {"e1", "e2", "e3"}, {}, std::move(extra));
}

inline ToricModel p1p1_toric() {
  return ToricModel("P1xP1_toric", {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {"e1", "e2", "e3", "e4"});
}

/// Blowup of P² at a torus-fixed point; the ray (1,1) is the exceptional curve.
inline ToricModel blp2_toric() {
  return ToricModel("BlP2_toric", {{1, 0}, {1, 1}, {0, 1}, {-1, -1}}, {"e1", "E", "e2", "e3"});
}

/// Hirzebruch F1; the ray (0,1) is the (−1)-section.
inline ToricModel f1_toric() {
  return ToricModel("F1_toric", {{1, 0}, {0, 1}, {-1, 1}, {0, -1}}, {"f", "C0", "f2", "C1"});
}

}  // namespace kstab::fixtures
