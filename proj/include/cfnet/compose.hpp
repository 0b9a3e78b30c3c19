#pragma once

#include "cfnet/series.hpp"

namespace cfnet {

/// Composition product c o d for SISO series over {x0, x1}: every word of c is
/// expanded right to left with x0 -> x0 * (.) and x1 -> x0 (d sh (.)), applied
/// to the unit series. The output is truncated at min(max_degree) and certified
/// exact up to min(c.exact_above, d.exact_above + 1).
Series compose(const Series& c, const Series& d);

/// Composition that keeps a direct input channel: x1 -> x1 * (.) + x0 (d sh (.)).
/// This realizes F_c[v + F_d[v]]; with d = 0 it returns c unchanged.
Series mixed_compose(const Series& c, const Series& d);

Series compose(const Series& c, const Series& d, ShuffleTable& table);
Series mixed_compose(const Series& c, const Series& d, ShuffleTable& table);

}  // namespace cfnet
