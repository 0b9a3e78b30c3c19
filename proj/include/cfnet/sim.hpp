#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfnet/network.hpp"
#include "cfnet/series.hpp"

namespace cfnet {

/// Uniform time grid t0, t0 + h, ..., t0 + T with h = T / steps.
struct Grid {
  double t0 = 0;
  double T = 1;
  int steps = 1000;

  double h() const { return T / steps; }
  std::size_t size() const { return static_cast<std::size_t>(steps) + 1; }
  double time(std::size_t n) const { return t0 + T * static_cast<double>(n) / steps; }
  std::vector<double> times() const;
  void validate() const;
};

/// A real signal sampled on every grid point.
using Signal = std::vector<double>;

Signal sample(const Grid& grid, const std::function<double(double)>& f);

/// y = sum <c,w> E_w[u] on the grid. inputs[k-1] drives letter xk; x0 is
/// driven by 1. Iterated integrals use cumulative trapezoidal quadrature with
/// a shared table of word suffixes.
Signal eval_fliess(const Series& c, const std::vector<Signal>& inputs, const Grid& grid);
Signal eval_fliess(const Series& c, const Signal& u, const Grid& grid);

struct Trajectory {
  std::vector<double> t;
  std::vector<Signal> y;  // y[k-1] is node k's output on the grid; NaN after escape
  std::optional<double> escape_time;
  std::vector<int> escaped_nodes;  // nodes above the threshold at escape
  std::string integrator;
  double threshold = 0;
  std::vector<double> picard_changes;  // sup-norm change per Picard sweep
  int steps_taken = 0;
};

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double threshold = 1e9;
  double initial_step = 1e-6;
};

/// Integrates z_i' = (M_i / K_i) z_i^2 (1 + sum_j W_ij z_j + v_i), z_i(0) = K_i
/// with adaptive Dormand-Prince 5(4). Escape is declared when some |z_i|
/// exceeds the threshold or the step size underflows; the crossing time is
/// refined by bisection on the last step. Throws ModelError unless every node
/// is maximal.
Trajectory simulate_maximal_ode(const NetworkSpec& net, const std::vector<Signal>& v, const Grid& grid,
                                const OdeOptions& options = {});

struct PicardOptions {
  double tol = 1e-13;
  int max_iter = 500;
};

/// Functional iteration u_j <- v_j + sum_k W_jk F_{c_k}[u_k] over the whole
/// grid. Only explicit polynomial nodes are admitted (ModelError otherwise);
/// throws NoConvergence after max_iter sweeps.
Trajectory simulate_picard(const NetworkSpec& net, const std::vector<Signal>& v, const Grid& grid,
                           const PicardOptions& options = {});

struct ValidationReport {
  Series d{1, 0};
  Signal predicted;
  Signal simulated;
  double max_error = 0;
  /// Truncating d_ji at degree N leaves a remainder of order T^(N+1).
  int expected_order = 0;
};

/// Compares F_{d_ji}[v] with the simulated closed loop driven by v at node i.
ValidationReport validate_io_map(const NetworkSpec& net, int source, int sink, int degree, const Signal& v,
                                 const Grid& grid, const PicardOptions& options = {});

/// max error on [0, T] divided by max error on [0, T/2], both with `steps`
/// grid intervals; approaches 2^(N+1) when the truncation remainder dominates.
double validation_error_ratio(const NetworkSpec& net, int source, int sink, int degree,
                              const std::function<double(double)>& v, double T, int steps);

}  // namespace cfnet
