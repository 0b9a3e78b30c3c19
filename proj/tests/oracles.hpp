#pragma once

// Test-side reference implementations. They follow the textbook definitions
// directly and share no code with the library beyond the Series container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "cfnet/json_io.hpp"
#include "cfnet/network.hpp"
#include "cfnet/series.hpp"

namespace oracle {

using cfnet::Coeff;
using cfnet::Series;
using cfnet::Word;

// Every interleaving of u and v, one entry per choice of positions for u.
inline std::vector<Word> interleavings(const Word& u, const Word& v) {
  const std::size_t n = u.size() + v.size();
  std::vector<Word> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != u.size()) continue;
    std::vector<int> letters;
    std::size_t a = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k) letters.push_back((mask >> k) & 1u ? u[a++] : v[b++]);
    out.push_back(Word(letters));
  }
  return out;
}

inline Series shuffle(const Series& c, const Series& d) {
  const int degree = std::min(c.max_degree(), d.max_degree());
  Series out(c.alphabet_bound(), degree);
  for (const auto& [u, a] : c.terms())
    for (const auto& [v, b] : d.terms()) {
      if (static_cast<int>(u.size() + v.size()) > degree) continue;
      for (const Word& w : interleavings(u, v)) out.add(w, a * b);
    }
  return out;
}

inline Series prepend(cfnet::Letter a, const Series& s, int degree) {
  Series out(s.alphabet_bound(), degree);
  for (const auto& [w, k] : s.terms()) out.add(w.prepend(a), k);
  return out;
}

// c o d by literal substitution: each word of c is read right to left starting
// from the unit series; x0 prepends x0, x1 maps e to x0 (d sh e), plus x1 e in
// the mixed variant.
inline Series compose(const Series& c, const Series& d, bool mixed = false) {
  const int degree = std::min(c.max_degree(), d.max_degree());
  Series out(1, degree);
  for (const auto& [w, k] : c.terms()) {
    Series e = Series::one(1, degree);
    for (std::size_t pos = w.size(); pos-- > 0;) {
      if (w[pos] == cfnet::kDrift) {
        e = prepend(cfnet::kDrift, e, degree);
      } else {
        Series next = prepend(cfnet::kDrift, shuffle(d, e), degree);
        if (mixed) next += prepend(cfnet::kInput, e, degree);
        e = next;
      }
    }
    out += k * e;
  }
  return out;
}

inline Coeff small_rational(std::mt19937_64& rng, int range = 5) {
  std::uniform_int_distribution<int> num(-range, range), den(1, 4);
  return Coeff(num(rng), den(rng));
}

// Sparse random series over {x0..xm} with small rational coefficients.
inline Series random_series(std::mt19937_64& rng, int m, int degree, double density = 0.4) {
  Series s(m, degree);
  std::bernoulli_distribution keep(density);
  for (int len = 0; len <= degree; ++len)
    for (const Word& w : cfnet::words_of_length(m, static_cast<std::size_t>(len)))
      if (keep(rng)) s.add(w, small_rational(rng));
  return s;
}

// Random SISO series with relative degree exactly r: every non-x0* word has at
// least r-1 leading x0 and <x0^(r-1) x1> is nonzero.
inline Series random_with_reldeg(std::mt19937_64& rng, int r, int degree, double density = 0.3) {
  Series s(1, degree);
  std::bernoulli_distribution keep(density);
  for (int len = 0; len <= degree; ++len)
    for (const Word& w : cfnet::words_of_length(1, static_cast<std::size_t>(len))) {
      if (!w.is_drift_only() && static_cast<int>(w.leading_drift()) < r - 1) continue;
      if (keep(rng)) s.add(w, small_rational(rng));
    }
  Coeff lead = small_rational(rng);
  while (cfnet::is_zero(lead)) lead = small_rational(rng);
  s.set(Word::repeat(cfnet::kDrift, static_cast<std::size_t>(r - 1)) + Word{1}, lead);
  return s;
}

// Minimum node-weight sum over simple paths source -> k, by enumeration.
inline std::map<int, int> min_path_weights(const cfnet::Subgraph& g, const std::map<int, int>& r) {
  std::map<int, int> best;
  std::vector<int> stack{g.source};
  std::function<void(int, int)> dfs = [&](int node, int acc) {
    auto it = best.find(node);
    if (it == best.end() || acc < it->second) best[node] = acc;
    for (const auto& [from, to] : g.edges) {
      if (from != node || std::find(stack.begin(), stack.end(), to) != stack.end()) continue;
      stack.push_back(to);
      dfs(to, acc + r.at(to));
      stack.pop_back();
    }
  };
  dfs(g.source, r.at(g.source));
  return best;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

inline cfnet::NetworkSpec load_net(const std::string& name) {
  return cfnet::read_network_file(std::string(CFNET_NETS_DIR) + "/" + name);
}

}  // namespace oracle

#ifdef DOCTEST_LIBRARY_INCLUDED
namespace doctest {
template <>
struct StringMaker<cfnet::Series> {
  static String convert(const cfnet::Series& s) {
    return (s.to_string() + " [deg " + std::to_string(s.max_degree()) + ", exact " + std::to_string(s.exact_above()) +
            "]")
        .c_str();
  }
};
}  // namespace doctest
#endif
