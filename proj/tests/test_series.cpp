#include <doctest.h>

#include <random>

#include "cfnet/errors.hpp"
#include "cfnet/series.hpp"
#include "oracles.hpp"

using namespace cfnet;

TEST_CASE("coefficient parsing is canonical") {
  CHECK(format_coeff(parse_coeff("6/4")) == "3/2");
  CHECK(format_coeff(parse_coeff("-7/3")) == "-7/3");
  CHECK(format_coeff(parse_coeff("0.25")) == "1/4");
  CHECK(format_coeff(parse_coeff("-1.5e-3")) == "-3/2000");
  CHECK(format_coeff(parse_coeff("010")) == "10");
  CHECK(format_coeff(parse_coeff("4/-2")) == "-2");
  CHECK_THROWS_AS(parse_coeff("1/0"), ParseError);
  CHECK_THROWS_AS(parse_coeff("abc"), ParseError);
  CHECK_THROWS_AS(parse_coeff(""), ParseError);
  CHECK(coeff_from_double(0.1) != Coeff(1, 10));
  CHECK(coeff_from_double(0.1).get_d() == 0.1);
}

TEST_CASE("words") {
  Word w = parse_word("x0 x0 x1", 1);
  CHECK(w.size() == 3);
  CHECK(w.leading_drift() == 2);
  CHECK(format_word(w) == "x0 x0 x1");
  CHECK(pretty_word(w) == "x0^2 x1");
  CHECK(pretty_word(Word()) == "1");
  CHECK(parse_word("0 1 1", 1) == Word{0, 1, 1});
  CHECK_THROWS_AS(parse_word("x2", 1), AlphabetError);
  CHECK_THROWS_AS(parse_word("y1", 1), ParseError);
  CHECK(words_of_length(2, 2).size() == 9);
  GradedLex lt;
  CHECK(lt(Word{1}, Word{0, 0}));
  CHECK(lt(Word{0, 1}, Word{1, 0}));
}

TEST_CASE("series storage drops zeros and long words") {
  Series s(1, 2);
  s.add(Word{0, 1}, 3);
  s.add(Word{0, 1}, -3);
  CHECK(s.is_zero());
  s.add(Word{0, 1, 1}, 5);
  CHECK(s.is_zero());
  CHECK_THROWS_AS(s.add(Word{2}, 1), AlphabetError);
  s.add(Word(), 2);
  s.add(Word{0}, 1);
  CHECK(s.to_string() == "2 + x0");
  CHECK(!s.is_proper());
}

TEST_CASE("shuffle of small words") {
  Series a = Series::monomial(1, 4, Word{1});
  Series b = Series::monomial(1, 4, Word{0, 1});
  Series expected(1, 4);
  expected.add(Word{1, 0, 1}, 1);
  expected.add(Word{0, 1, 1}, 2);
  CHECK(shuffle_product(a, b) == expected);

  // x0 sh x0 = 2 x0^2
  Series x0 = Series::monomial(1, 3, Word{0});
  CHECK(shuffle_product(x0, x0).coeff(Word{0, 0}) == 2);
}

TEST_CASE("shuffle matches brute-force interleavings") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 1 + trial % 2;
    Series c = oracle::random_series(rng, m, 5);
    Series d = oracle::random_series(rng, m, 5);
    CHECK(shuffle_product(c, d) == oracle::shuffle(c, d));
  }
}

TEST_CASE("shuffle mass is a binomial coefficient") {
  // Distinct letters so every interleaving is a distinct word.
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; q <= 4; ++q) {
      Word u = Word::repeat(1, static_cast<std::size_t>(p));
      Word v = Word::repeat(2, static_cast<std::size_t>(q));
      Series a = Series::monomial(2, p + q, u);
      Series b = Series::monomial(2, p + q, v);
      Series s = shuffle_product(a, b);
      Coeff mass = 0;
      for (const auto& [w, k] : s.terms()) mass += k;
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(p + q), static_cast<unsigned long>(p));
      CHECK(mass == Coeff(binom));
      CHECK(s.size() == binom.get_ui());
    }
}

TEST_CASE("units and truncation bookkeeping") {
  std::mt19937_64 rng(5);
  Series c = oracle::random_series(rng, 1, 4);
  Series one = Series::one(1, 4);
  CHECK(concat_product(one, c) == c);
  CHECK(concat_product(c, one) == c);
  CHECK(shuffle_product(one, c) == c);

  Series lo(1, 2);
  lo.add(Word{0}, 1);
  Series sum = c + lo;
  CHECK(sum.max_degree() == 2);
  Series inexact = c;
  inexact.limit_exact(3);
  CHECK((inexact + c).exact_above() == 3);
  CHECK(inexact.exact_part().max_degree() == 3);
}

TEST_CASE("linear_combine and scalar product") {
  Series a(1, 3), b(1, 3);
  a.add(Word{1}, 2);
  a.add(Word{0, 1}, 1);
  b.add(Word{1}, 3);
  b.add(Word(), 5);
  Series c = linear_combine({{Coeff(1, 2), a}, {2, b}});
  CHECK(c.coeff(Word{1}) == 7);
  CHECK(c.coeff(Word{0, 1}) == Coeff(1, 2));
  CHECK(c.coeff(Word()) == 10);
  ScalarProduct sp = scalar_product(a, b);
  CHECK(sp.value == 6);
  CHECK(sp.exact);
  Series d(2, 1);
  CHECK_THROWS_AS(a + d, AlphabetError);
}

TEST_CASE("growth checks against maximal series") {
  MaximalSeriesSpec spec{Coeff(3, 2), 2};
  Series c = maximal_series(spec, 1, 5);
  CHECK(c.coeff(Word{0, 1, 1}) == Coeff(3, 2) * 8 * 6);
  GrowthCheck ok = check_growth(c, spec.K, spec.M);
  CHECK(ok.passes);
  for (const auto& level : ok.levels) CHECK(level.ratio == spec.K);

  GrowthCheck bad = check_growth(maximal_series({1, 2}, 1, 4), 1, 1);
  CHECK(!bad.passes);
  REQUIRE(bad.first_failure.has_value());
  CHECK(*bad.first_failure == 1);

  CHECK(check_growth(Series(1, 4), 1, 1).passes);
  CHECK_THROWS_AS(maximal_series({0, 1}, 1, 3), DomainError);
}

TEST_CASE("operations leave operands unmodified") {
  std::mt19937_64 rng(9);
  Series c = oracle::random_series(rng, 1, 4);
  Series d = oracle::random_series(rng, 1, 4);
  const Series c0 = c, d0 = d;
  (void)shuffle_product(c, d);
  (void)concat_product(c, d);
  (void)linear_combine({{2, c}, {3, d}});
  CHECK(c == c0);
  CHECK(d == d0);
}
