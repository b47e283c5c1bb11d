#include "kstab/divisor_class.hpp"

#include "kstab/error.hpp"

namespace kstab {

DivisorClass::DivisorClass(std::string basis_id, std::vector<Rational> coefficients)
    : basis_id_(std::move(basis_id)), coefficients_(std::move(coefficients)) {}

DivisorClass DivisorClass::zero(std::string basis_id, std::size_t rank) {
  return DivisorClass(std::move(basis_id), std::vector<Rational>(rank));
}

bool DivisorClass::is_zero() const {
  for (const auto& c : coefficients_)
    if (sgn(c) != 0) return false;
  return true;
}

void DivisorClass::require_same_basis(const DivisorClass& other) const {
  if (basis_id_ != other.basis_id_ || coefficients_.size() != other.coefficients_.size())
    throw GeometryError("basis mismatch: class in '" + other.basis_id_ + "' (rank " +
                        std::to_string(other.rank()) + ") used with '" + basis_id_ + "' (rank " +
                        std::to_string(rank()) + ")");
}

DivisorClass& DivisorClass::operator+=(const DivisorClass& other) {
  require_same_basis(other);
  for (std::size_t i = 0; i < coefficients_.size(); ++i) coefficients_[i] += other.coefficients_[i];
  return *this;
}

DivisorClass& DivisorClass::operator-=(const DivisorClass& other) {
  require_same_basis(other);
  for (std::size_t i = 0; i < coefficients_.size(); ++i) coefficients_[i] -= other.coefficients_[i];
  return *this;
}

DivisorClass& DivisorClass::operator*=(const Rational& c) {
  for (auto& x : coefficients_) x *= c;
  return *this;
}

std::string DivisorClass::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    if (i) out += ", ";
    out += kstab::to_string(coefficients_[i]);
  }
  return out + ")";
}

}  // namespace kstab
