#include "cfnet/compose.hpp"

#include <algorithm>

#include "cfnet/errors.hpp"

namespace cfnet {

namespace {

void require_siso(const Series& s, const char* what) {
  if (s.alphabet_bound() != 1) {
    throw AlphabetError(std::string(what) + ": composition is defined for series over {x0, x1}");
  }
}

// Left quotient by one letter: every word a*w of c contributes w.
Series quotient(const Series& c, Letter a, int degree) {
  Series out(c.alphabet_bound(), degree);
  for (const auto& [w, k] : c.terms()) {
    if (w.empty() || w.front() != a) continue;
    if (static_cast<int>(w.size()) - 1 > degree) break;
    out.add(w.suffix(1), k);
  }
  return out;
}

Series prepend_drift(const Series& s, int degree) {
  Series out(s.alphabet_bound(), degree);
  for (const auto& [w, k] : s.terms()) out.add(w.prepend(kDrift), k);
  return out;
}

// Expands c o d (or the mixed variant) up to `degree` via
//   c o d = <c,1> + x0 (x0^-1 c o d) + x0 (d sh (x1^-1 c o d)) [+ x1 (x1^-1 c o d)].
// Every branch prepends a letter, so the quotients only need degree - 1.
class Composer {
 public:
  Composer(const Series& d, bool mixed, ShuffleTable& table) : d_(d), mixed_(mixed), table_(table) {}

  Series expand(const Series& c, int degree) {
    Series out(1, degree);
    out.add(Word(), c.coeff(Word()));
    if (degree == 0 || c.is_zero()) return out;

    Series drift_part = quotient(c, kDrift, degree - 1);
    if (!drift_part.is_zero()) out += prepend_drift(expand(drift_part, degree - 1), degree);

    Series input_part = quotient(c, kInput, degree - 1);
    if (!input_part.is_zero()) {
      Series inner = expand(input_part, degree - 1);
      if (!d_.is_zero()) out += prepend_drift(shuffle_product(d_, inner, degree - 1, table_), degree);
      if (mixed_) {
        for (const auto& [w, k] : inner.terms()) out.add(w.prepend(kInput), k);
      }
    }
    return out;
  }

 private:
  const Series& d_;
  bool mixed_;
  ShuffleTable& table_;
};

Series compose_impl(const Series& c, const Series& d, bool mixed, ShuffleTable& table) {
  require_siso(c, "compose");
  require_siso(d, "compose");
  const int degree = std::min(c.max_degree(), d.max_degree());
  // The quotient recursion reads d through shuffles at degree <= degree - 1 only.
  Series d_view = d.truncated(std::max(degree - 1, 0));
  Composer composer(d_view, mixed, table);
  Series out = composer.expand(c.truncated(degree), degree);
  out.limit_exact(std::min(c.exact_above(), d.exact_above() + 1));
  return out;
}

}  // namespace

Series compose(const Series& c, const Series& d, ShuffleTable& table) { return compose_impl(c, d, false, table); }

Series mixed_compose(const Series& c, const Series& d, ShuffleTable& table) {
  return compose_impl(c, d, true, table);
}

Series compose(const Series& c, const Series& d) {
  ShuffleTable table;
  return compose(c, d, table);
}

Series mixed_compose(const Series& c, const Series& d) {
  ShuffleTable table;
  return mixed_compose(c, d, table);
}

}  // namespace cfnet
