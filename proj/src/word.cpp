#include "cfnet/word.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "cfnet/errors.hpp"

namespace cfnet {

namespace {

Letter checked_letter(long long k) {
  if (k < 0 || k > 255) throw AlphabetError("letter index out of range: " + std::to_string(k));
  return static_cast<Letter>(k);
}

}  // namespace

Word::Word(std::initializer_list<int> letters) {
  rep_.reserve(letters.size());
  for (int k : letters) rep_.push_back(static_cast<char>(checked_letter(k)));
}

Word::Word(const std::vector<int>& letters) {
  rep_.reserve(letters.size());
  for (int k : letters) rep_.push_back(static_cast<char>(checked_letter(k)));
}

Word Word::repeat(Letter letter, std::size_t count) {
  return Word(std::string(count, static_cast<char>(letter)));
}

Letter Word::max_letter() const {
  Letter best = 0;
  for (char ch : rep_) best = std::max(best, static_cast<Letter>(ch));
  return best;
}

std::size_t Word::leading_drift() const {
  std::size_t k = 0;
  while (k < rep_.size() && rep_[k] == 0) ++k;
  return k;
}

Word Word::prepend(Letter letter) const {
  std::string out;
  out.reserve(rep_.size() + 1);
  out.push_back(static_cast<char>(letter));
  out += rep_;
  return Word(std::move(out));
}

std::vector<int> Word::letters() const {
  std::vector<int> out;
  out.reserve(rep_.size());
  for (char ch : rep_) out.push_back(static_cast<Letter>(ch));
  return out;
}

Word parse_word(std::string_view text, int m) {
  std::vector<int> letters;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    std::string_view token = text.substr(pos, end - pos);
    pos = end;

    std::string_view digits = token;
    if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) digits.remove_prefix(1);
    long long k = -1;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || k < 0) {
      throw ParseError("malformed letter token '" + std::string(token) + "'");
    }
    if (k > m) {
      throw AlphabetError("letter x" + std::to_string(k) + " outside alphabet x0..x" + std::to_string(m));
    }
    letters.push_back(static_cast<int>(k));
  }
  return Word(letters);
}

std::string format_word(const Word& w) {
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) out += ' ';
    out += 'x';
    out += std::to_string(w[k]);
  }
  return out;
}

std::string pretty_word(const Word& w) {
  if (w.empty()) return "1";
  std::ostringstream os;
  std::size_t k = 0;
  bool first = true;
  while (k < w.size()) {
    std::size_t run = 1;
    while (k + run < w.size() && w[k + run] == w[k]) ++run;
    if (!first) os << ' ';
    os << 'x' << int(w[k]);
    if (run > 1) os << '^' << run;
    first = false;
    k += run;
  }
  return os.str();
}

std::vector<Word> words_of_length(int m, std::size_t k) {
  std::vector<Word> out{Word()};
  for (std::size_t level = 0; level < k; ++level) {
    std::vector<Word> next;
    next.reserve(out.size() * static_cast<std::size_t>(m + 1));
    for (const Word& w : out)
      for (int a = 0; a <= m; ++a) next.push_back(w + Word{a});
    out = std::move(next);
  }
  return out;
}

}  // namespace cfnet
