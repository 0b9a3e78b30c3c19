#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <string_view>

namespace cfnet {

/// Exact series coefficient. mpq_class keeps results of arithmetic in lowest
/// terms but not a raw numerator/denominator pair, so the fraction constructor
/// here canonicalizes.
class Coeff : public mpq_class {
 public:
  using mpq_class::mpq_class;
  using mpq_class::operator=;

  Coeff() = default;
  Coeff(const Coeff&) = default;
  Coeff(Coeff&&) = default;
  Coeff& operator=(const Coeff&) = default;
  Coeff& operator=(Coeff&&) = default;
  Coeff(const mpq_class& q) : mpq_class(q) {}
  Coeff(mpq_class&& q) : mpq_class(std::move(q)) {}
  template <class N, class D>
  Coeff(const N& num, const D& den) : mpq_class(num, den) {
    canonicalize();
  }
};

/// Parses "p", "p/q", "-p/q" or a plain decimal such as "0.25" or "-1.5e-3".
/// The result is canonical. Throws ParseError on malformed text or q == 0.
Coeff parse_coeff(std::string_view text);

/// Canonical reduced form: "3", "1/2", "-7/3".
std::string format_coeff(const Coeff& c);

/// Exact binary value of a finite double.
Coeff coeff_from_double(double x);

inline bool is_zero(const Coeff& c) { return sgn(c) == 0; }

}  // namespace cfnet
