#include "cfnet/series.hpp"

#include <algorithm>
#include <sstream>

#include "cfnet/errors.hpp"

namespace cfnet {

Series::Series(int m, int max_degree) : m_(m), max_degree_(max_degree), exact_above_(max_degree) {
  if (m < 0 || m > 255) throw AlphabetError("alphabet bound must lie in 0..255");
  if (max_degree < 0) throw DomainError("truncation degree must be nonnegative");
}

Series Series::one(int m, int max_degree) { return monomial(m, max_degree, Word(), 1); }

Series Series::monomial(int m, int max_degree, const Word& w, const Coeff& c) {
  Series s(m, max_degree);
  s.add(w, c);
  return s;
}

void Series::check_word(const Word& w) const {
  if (!w.empty() && w.max_letter() > m_) {
    throw AlphabetError("word '" + format_word(w) + "' uses a letter outside x0..x" + std::to_string(m_));
  }
}

Coeff Series::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Coeff(0) : it->second;
}

std::vector<Word> Series::support() const {
  std::vector<Word> out;
  out.reserve(terms_.size());
  for (const auto& [w, c] : terms_) out.push_back(w);
  return out;
}

void Series::add(const Word& w, const Coeff& c) {
  check_word(w);
  if (static_cast<int>(w.size()) > max_degree_ || cfnet::is_zero(c)) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (cfnet::is_zero(it->second)) terms_.erase(it);
  }
}

void Series::set(const Word& w, const Coeff& c) {
  check_word(w);
  if (static_cast<int>(w.size()) > max_degree_) return;
  if (cfnet::is_zero(c)) {
    terms_.erase(w);
  } else {
    terms_[w] = c;
  }
}

void Series::limit_exact(int degree) { exact_above_ = std::clamp(degree, -1, exact_above_); }

Series Series::truncated(int degree) const {
  Series out(m_, std::min(degree, max_degree_));
  out.exact_above_ = std::min(exact_above_, out.max_degree_);
  for (const auto& [w, c] : terms_) {
    if (static_cast<int>(w.size()) > out.max_degree_) break;
    out.terms_.emplace_hint(out.terms_.end(), w, c);
  }
  return out;
}

bool Series::equal_up_to(const Series& other, int degree) const {
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  auto in_range = [degree](const auto& it) { return static_cast<int>(it->first.size()) <= degree; };
  while (true) {
    bool more_a = a != terms_.end() && in_range(a);
    bool more_b = b != other.terms_.end() && in_range(b);
    if (!more_a || !more_b) return more_a == more_b;
    if (!(a->first == b->first) || a->second != b->second) return false;
    ++a;
    ++b;
  }
}

Series& Series::operator+=(const Series& other) {
  require_same_alphabet(*this, other, "series sum");
  if (other.max_degree_ < max_degree_) *this = truncated(other.max_degree_);
  exact_above_ = std::min(exact_above_, other.exact_above_);
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

Series& Series::operator-=(const Series& other) { return *this += -other; }

Series& Series::operator*=(const Coeff& k) {
  if (cfnet::is_zero(k)) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= k;
  return *this;
}

Series Series::operator-() const {
  Series out = *this;
  for (auto& [w, c] : out.terms_) c = -c;
  return out;
}

bool operator==(const Series& a, const Series& b) {
  return a.m_ == b.m_ && a.max_degree_ == b.max_degree_ && a.terms_ == b.terms_;
}

std::string Series::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    Coeff mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << '-';
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    if (w.empty()) {
      os << mag.get_str();
    } else {
      if (mag != 1) os << mag.get_str() << ' ';
      os << pretty_word(w);
    }
    first = false;
  }
  return os.str();
}

void require_same_alphabet(const Series& a, const Series& b, const char* what) {
  if (a.alphabet_bound() != b.alphabet_bound()) {
    throw AlphabetError(std::string(what) + ": alphabet mismatch (x0..x" + std::to_string(a.alphabet_bound()) +
                        " vs x0..x" + std::to_string(b.alphabet_bound()) + ")");
  }
}

const ShuffleTable::Counts& ShuffleTable::words(const Word& u_in, const Word& v_in) {
  const bool swap = GradedLex{}(v_in, u_in);
  const Word& u = swap ? v_in : u_in;
  const Word& v = swap ? u_in : v_in;
  auto key = std::make_pair(u, v);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  // table[p][q] holds the shuffle of the suffixes u[p:] and v[q:].
  const std::size_t nu = u.size(), nv = v.size();
  using Acc = std::map<Word, std::uint64_t, GradedLex>;
  std::vector<std::vector<Acc>> table(nu + 1, std::vector<Acc>(nv + 1));
  for (std::size_t p = nu + 1; p-- > 0;) {
    for (std::size_t q = nv + 1; q-- > 0;) {
      Acc& cell = table[p][q];
      if (p == nu) {
        cell.emplace(v.suffix(q), 1);
      } else if (q == nv) {
        cell.emplace(u.suffix(p), 1);
      } else {
        for (const auto& [w, k] : table[p + 1][q]) cell[w.prepend(u[p])] += k;
        for (const auto& [w, k] : table[p][q + 1]) cell[w.prepend(v[q])] += k;
      }
    }
    if (p + 1 <= nu) table[p + 1].clear();
  }
  Counts counts(table[0][0].begin(), table[0][0].end());
  return cache_.emplace(std::move(key), std::move(counts)).first->second;
}

Series linear_combine(const std::vector<std::pair<Coeff, Series>>& pairs) {
  if (pairs.empty()) throw DomainError("linear_combine needs at least one operand");
  int degree = pairs.front().second.max_degree();
  int exact = pairs.front().second.exact_above();
  for (const auto& [k, s] : pairs) {
    require_same_alphabet(pairs.front().second, s, "linear_combine");
    degree = std::min(degree, s.max_degree());
    exact = std::min(exact, s.exact_above());
  }
  Series out(pairs.front().second.alphabet_bound(), degree);
  out.limit_exact(exact);
  for (const auto& [k, s] : pairs) {
    if (is_zero(k)) continue;
    for (const auto& [w, c] : s.terms()) {
      if (static_cast<int>(w.size()) > degree) break;
      out.add(w, k * c);
    }
  }
  return out;
}

Series concat_product(const Series& c, const Series& d) {
  require_same_alphabet(c, d, "concat_product");
  const int degree = std::min(c.max_degree(), d.max_degree());
  Series out(c.alphabet_bound(), degree);
  out.limit_exact(std::min(c.exact_above(), d.exact_above()));
  for (const auto& [u, a] : c.terms()) {
    if (static_cast<int>(u.size()) > degree) break;
    for (const auto& [v, b] : d.terms()) {
      if (static_cast<int>(u.size() + v.size()) > degree) break;
      out.add(u + v, a * b);
    }
  }
  return out;
}

Series shuffle_product(const Series& c, const Series& d, int degree, ShuffleTable& table) {
  require_same_alphabet(c, d, "shuffle_product");
  degree = std::min({degree, c.max_degree(), d.max_degree()});
  Series out(c.alphabet_bound(), std::max(degree, 0));
  out.limit_exact(std::min(c.exact_above(), d.exact_above()));
  if (degree < 0) return out;
  Coeff ab;
  for (const auto& [u, a] : c.terms()) {
    if (static_cast<int>(u.size()) > degree) break;
    for (const auto& [v, b] : d.terms()) {
      if (static_cast<int>(u.size() + v.size()) > degree) break;
      ab = a * b;
      if (u.empty() || v.empty()) {
        out.add(u.empty() ? v : u, ab);
        continue;
      }
      for (const auto& [w, k] : table.words(u, v)) {
        if (k == 1) {
          out.add(w, ab);
        } else {
          out.add(w, ab * Coeff(mpz_class(static_cast<unsigned long>(k))));
        }
      }
    }
  }
  return out;
}

Series shuffle_product(const Series& c, const Series& d) {
  ShuffleTable table;
  return shuffle_product(c, d, std::min(c.max_degree(), d.max_degree()), table);
}

ScalarProduct scalar_product(const Series& c, const Series& d) {
  require_same_alphabet(c, d, "scalar_product");
  const int degree = std::min(c.max_degree(), d.max_degree());
  ScalarProduct out;
  out.exact = c.exact_above() >= degree && d.exact_above() >= degree;
  const Series& small = c.size() <= d.size() ? c : d;
  const Series& large = c.size() <= d.size() ? d : c;
  for (const auto& [w, a] : small.terms()) {
    if (static_cast<int>(w.size()) > degree) break;
    auto it = large.terms().find(w);
    if (it != large.terms().end()) out.value += a * it->second;
  }
  return out;
}

void validate(const MaximalSeriesSpec& spec) {
  if (sgn(spec.K) <= 0 || sgn(spec.M) <= 0) throw DomainError("maximal series constants K and M must be positive");
}

Coeff factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Coeff(f);
}

Series maximal_series(const MaximalSeriesSpec& spec, int m, int degree) {
  validate(spec);
  Series out(m, degree);
  Coeff level = spec.K;  // K M^k k!
  for (int k = 0; k <= degree; ++k) {
    if (k > 0) level *= spec.M * k;
    for (const Word& w : words_of_length(m, static_cast<std::size_t>(k))) out.set(w, level);
  }
  return out;
}

GrowthCheck check_growth(const Series& c, const Coeff& K, const Coeff& M) {
  if (sgn(K) <= 0 || sgn(M) <= 0) throw DomainError("growth constants must be positive");
  GrowthCheck out;
  std::vector<Coeff> peak(static_cast<std::size_t>(std::max(c.exact_above() + 1, 0)));
  for (const auto& [w, a] : c.terms()) {
    if (static_cast<int>(w.size()) > c.exact_above()) break;
    Coeff mag = abs(a);
    if (mag > peak[w.size()]) peak[w.size()] = mag;
  }
  Coeff scale = 1;  // M^k k!
  for (int k = 0; k < static_cast<int>(peak.size()); ++k) {
    if (k > 0) scale *= M * k;
    Coeff ratio = peak[static_cast<std::size_t>(k)] / scale;
    if (ratio > K && out.passes) {
      out.passes = false;
      out.first_failure = k;
    }
    out.levels.push_back({k, ratio});
  }
  return out;
}

}  // namespace cfnet
