#include "cfnet/rational.hpp"

#include <cmath>
#include <regex>

#include "cfnet/errors.hpp"

namespace cfnet {

namespace {

const std::regex& fraction_re() {
  static const std::regex re(R"(^\s*([+-]?[0-9]+)\s*/\s*([+-]?[0-9]+)\s*$)");
  return re;
}

const std::regex& decimal_re() {
  static const std::regex re(R"(^\s*([+-]?)([0-9]*)(?:\.([0-9]*))?(?:[eE]([+-]?[0-9]+))?\s*$)");
  return re;
}

mpz_class pow10(unsigned long k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, k);
  return p;
}

}  // namespace

Coeff parse_coeff(std::string_view text) {
  const std::string s(text);
  std::smatch match;
  if (std::regex_match(s, match, fraction_re())) {
    std::string num = match[1].str();
    std::string den = match[2].str();
    if (!num.empty() && num[0] == '+') num.erase(0, 1);
    if (!den.empty() && den[0] == '+') den.erase(0, 1);
    mpz_class n(num, 10), d(den, 10);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    Coeff q(n, d);
    q.canonicalize();
    return q;
  }
  if (std::regex_match(s, match, decimal_re())) {
    const std::string int_part = match[2].str();
    const std::string frac_part = match[3].str();
    if (int_part.empty() && frac_part.empty()) throw ParseError("malformed coefficient '" + s + "'");
    long exponent = match[4].matched ? std::stol(match[4].str()) : 0;
    if (std::labs(exponent) > 100000) throw ParseError("exponent out of range in '" + s + "'");
    mpz_class digits(int_part + frac_part, 10);
    exponent -= static_cast<long>(frac_part.size());
    Coeff q;
    if (exponent >= 0) {
      q = Coeff(digits * pow10(static_cast<unsigned long>(exponent)));
    } else {
      q = Coeff(digits, pow10(static_cast<unsigned long>(-exponent)));
      q.canonicalize();
    }
    if (match[1].str() == "-") q = -q;
    return q;
  }
  throw ParseError("malformed coefficient '" + s + "'");
}

std::string format_coeff(const Coeff& c) { return c.get_str(); }

Coeff coeff_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot convert a non-finite double to an exact coefficient");
  return Coeff(x);
}

}  // namespace cfnet
