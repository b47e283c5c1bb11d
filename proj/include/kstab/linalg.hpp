#pragma once

#include <optional>
#include <vector>

#include "kstab/rational.hpp"

namespace kstab {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Solves A x = b exactly; nullopt when A is singular.
std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b);

Rational determinant(RationalMatrix a);

/// Rank of the row space.
std::size_t rank(RationalMatrix a);

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
};

/// Sylvester inertia of a symmetric matrix by exact congruence diagonalization.
Inertia inertia(RationalMatrix symmetric);

}  // namespace kstab
