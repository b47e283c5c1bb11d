#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace kstab {

using Rational = mpq_class;

/// Parses "p/q" or "p" (optional sign). Throws std::invalid_argument on malformed text or q = 0.
Rational parse_rational(std::string_view text);

/// Canonical form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

/// Exact conversion; throws std::invalid_argument for NaN or infinities.
Rational from_double(double x);

/// The rational square root of q when one exists.
std::optional<Rational> exact_sqrt(const Rational& q);

}  // namespace kstab
