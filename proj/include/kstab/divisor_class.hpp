#pragma once

#include <span>
#include <string>
#include <vector>

#include "kstab/rational.hpp"

namespace kstab {

/// A numerical divisor class: exact coordinates in the basis of one geometry model.
class DivisorClass {
 public:
  DivisorClass() = default;
  DivisorClass(std::string basis_id, std::vector<Rational> coefficients);

  static DivisorClass zero(std::string basis_id, std::size_t rank);

  const std::string& basis_id() const noexcept { return basis_id_; }
  std::size_t rank() const noexcept { return coefficients_.size(); }
  std::span<const Rational> coefficients() const noexcept { return coefficients_; }
  const Rational& operator[](std::size_t i) const { return coefficients_.at(i); }
  bool is_zero() const;

  /// Throws GeometryError when `other` lives in a different basis.
  void require_same_basis(const DivisorClass& other) const;

  DivisorClass& operator+=(const DivisorClass& other);
  DivisorClass& operator-=(const DivisorClass& other);
  DivisorClass& operator*=(const Rational& c);

  friend DivisorClass operator+(DivisorClass a, const DivisorClass& b) { return a += b; }
  friend DivisorClass operator-(DivisorClass a, const DivisorClass& b) { return a -= b; }
  friend DivisorClass operator*(const Rational& c, DivisorClass a) { return a *= c; }
  friend DivisorClass operator*(DivisorClass a, const Rational& c) { return a *= c; }
  friend DivisorClass operator-(DivisorClass a) { return a *= Rational(-1); }

  friend bool operator==(const DivisorClass& a, const DivisorClass& b) {
    return a.basis_id_ == b.basis_id_ && a.coefficients_ == b.coefficients_;
  }

  /// "(c0, c1, ...)" with rationals in canonical form.
  std::string to_string() const;

 private:
  std::string basis_id_;
  std::vector<Rational> coefficients_;
};

}  // namespace kstab
