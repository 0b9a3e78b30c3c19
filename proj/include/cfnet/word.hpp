#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace cfnet {

using Letter = std::uint8_t;

/// Letter 0 is the drift letter x0; letters 1..m are input letters.
inline constexpr Letter kDrift = 0;
inline constexpr Letter kInput = 1;

/// A word over the alphabet {x0, ..., xm}. Letters are kept in a byte string so
/// short words stay inline and comparison is a memcmp.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters);
  explicit Word(const std::vector<int>& letters);

  static Word repeat(Letter letter, std::size_t count);

  std::size_t size() const { return rep_.size(); }
  bool empty() const { return rep_.empty(); }
  Letter operator[](std::size_t k) const { return static_cast<Letter>(rep_[k]); }
  Letter front() const { return (*this)[0]; }

  /// Largest letter index present, or 0 for the empty word.
  Letter max_letter() const;

  /// Number of leading x0 letters.
  std::size_t leading_drift() const;
  bool is_drift_only() const { return leading_drift() == size(); }

  Word suffix(std::size_t from) const { return Word(rep_.substr(from)); }
  Word prefix(std::size_t len) const { return Word(rep_.substr(0, len)); }
  Word prepend(Letter letter) const;

  std::vector<int> letters() const;
  const std::string& bytes() const { return rep_; }

  friend Word operator+(const Word& a, const Word& b) { return Word(a.rep_ + b.rep_); }
  friend bool operator==(const Word& a, const Word& b) = default;

 private:
  explicit Word(std::string rep) : rep_(std::move(rep)) {}
  std::string rep_;
};

/// Graded lexicographic order: shorter words first, then lexicographic on
/// letter indices.
struct GradedLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.bytes() < b.bytes();
  }
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return std::hash<std::string>{}(w.bytes()); }
};

/// Parses whitespace-separated tokens "x<k>" or bare integers. Letters must lie
/// in 0..m. Throws ParseError on a malformed token and AlphabetError on an
/// out-of-range index.
Word parse_word(std::string_view text, int m);

/// Canonical text form "x0 x1 ...". The empty word formats as "".
std::string format_word(const Word& w);

/// Human readable monomial such as "x0^2 x1"; "1" for the empty word.
std::string pretty_word(const Word& w);

/// All words of length exactly k over {x0..xm} in lexicographic order.
std::vector<Word> words_of_length(int m, std::size_t k);

}  // namespace cfnet
