#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfnet/rational.hpp"
#include "cfnet/word.hpp"

namespace cfnet {

/// Truncated noncommutative formal power series over {x0, ..., xm} with exact
/// rational coefficients.
///
/// Only words of length <= max_degree are stored, and zero coefficients are
/// never stored. Coefficients of words up to exact_above are certified exact;
/// coefficients between exact_above and max_degree are carried along but may
/// be incomplete (for example after composing with a truncated operand).
/// Iteration order is graded lexicographic.
class Series {
 public:
  using Terms = std::map<Word, Coeff, GradedLex>;

  Series(int m, int max_degree);

  static Series one(int m, int max_degree);
  static Series monomial(int m, int max_degree, const Word& w, const Coeff& c = 1);

  int alphabet_bound() const { return m_; }
  int alphabet_size() const { return m_ + 1; }
  int max_degree() const { return max_degree_; }
  int exact_above() const { return exact_above_; }

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_proper() const { return !terms_.contains(Word()); }

  Coeff coeff(const Word& w) const;
  std::vector<Word> support() const;

  /// Adds c to the coefficient of w. Words longer than max_degree are dropped;
  /// a letter outside the alphabet throws AlphabetError.
  void add(const Word& w, const Coeff& c);
  void set(const Word& w, const Coeff& c);

  /// Lowers the certified-exact degree (never raises it above max_degree).
  void limit_exact(int degree);

  Series truncated(int degree) const;

  /// True when every coefficient of a word of length <= degree agrees.
  bool equal_up_to(const Series& other, int degree) const;

  /// Drops every word longer than the certified-exact degree and sets
  /// max_degree to it.
  Series exact_part() const { return truncated(exact_above_); }

  Series& operator+=(const Series& other);
  Series& operator-=(const Series& other);
  Series& operator*=(const Coeff& k);
  Series operator-() const;
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(const Coeff& k, Series a) { return a *= k; }

  /// Structural equality: alphabet, truncation and every stored coefficient.
  friend bool operator==(const Series& a, const Series& b);

  /// Readable sum such as "2 + x0 - 1/2 x0^2 x1".
  std::string to_string() const;

 private:
  void check_word(const Word& w) const;

  int m_;
  int max_degree_;
  int exact_above_;
  Terms terms_;
};

void require_same_alphabet(const Series& a, const Series& b, const char* what);

/// Memo table for shuffles of word pairs. Shuffle is commutative, so the pair
/// is stored in canonical order. Not thread safe; use one per thread.
class ShuffleTable {
 public:
  using Counts = std::vector<std::pair<Word, std::uint64_t>>;

  /// Every interleaving of u and v with its multiplicity, graded-lex sorted.
  const Counts& words(const Word& u, const Word& v);

  std::size_t cached_pairs() const { return cache_.size(); }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<Word, Word>& p) const {
      std::size_t h = WordHash{}(p.first);
      return h ^ (WordHash{}(p.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
  };
  std::unordered_map<std::pair<Word, Word>, Counts, PairHash> cache_;
};

/// Coefficientwise sum of k_i * s_i. The result is truncated at the smallest
/// operand max_degree. Throws AlphabetError on mismatched alphabets.
Series linear_combine(const std::vector<std::pair<Coeff, Series>>& pairs);

/// Concatenation (Cauchy) product.
Series concat_product(const Series& c, const Series& d);

/// Shuffle product, truncated at min max_degree.
Series shuffle_product(const Series& c, const Series& d);
Series shuffle_product(const Series& c, const Series& d, int degree, ShuffleTable& table);

struct ScalarProduct {
  Coeff value;
  /// False when either operand is not certified exact up to the shared truncation.
  bool exact = true;
};

ScalarProduct scalar_product(const Series& c, const Series& d);

/// Growth constants of a maximal series sum K M^|w| |w|! w.
struct MaximalSeriesSpec {
  Coeff K;
  Coeff M;
};

void validate(const MaximalSeriesSpec& spec);

Series maximal_series(const MaximalSeriesSpec& spec, int m, int degree);

struct GrowthCheck {
  struct Level {
    int degree;
    Coeff ratio;  // max |<c,w>| / (M^k k!) over |w| = k
  };
  std::vector<Level> levels;
  bool passes = true;
  std::optional<int> first_failure;
};

/// Tests |<c,w>| <= K M^|w| |w|! degree by degree up to c.exact_above().
GrowthCheck check_growth(const Series& c, const Coeff& K, const Coeff& M);

Coeff factorial(unsigned n);

}  // namespace cfnet
