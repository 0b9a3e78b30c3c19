#include "cfnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cfnet/errors.hpp"

namespace cfnet {

std::vector<double> Grid::times() const {
  std::vector<double> out(size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = time(n);
  return out;
}

void Grid::validate() const {
  if (!(T > 0) || steps < 1 || !std::isfinite(t0) || !std::isfinite(T)) {
    throw DomainError("grid needs T > 0 and at least one step");
  }
}

Signal sample(const Grid& grid, const std::function<double(double)>& f) {
  Signal out(grid.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = f(grid.time(n));
  return out;
}

namespace {

void check_signal(const Signal& s, const Grid& grid) {
  if (s.size() != grid.size()) throw DomainError("input signal length does not match the grid");
  for (double x : s)
    if (!std::isfinite(x)) throw DomainError("input signal contains a non-finite sample");
}

class IteratedIntegrals {
 public:
  IteratedIntegrals(const std::vector<Signal>& inputs, const Grid& grid) : inputs_(inputs), grid_(grid) {}

  const Signal& of(const Word& w) {
    if (auto it = table_.find(w); it != table_.end()) return it->second;
    Signal values;
    if (w.empty()) {
      values.assign(grid_.size(), 1.0);
    } else {
      const Signal& inner = of(w.suffix(1));
      const Letter a = w.front();
      if (a > inputs_.size()) throw AlphabetError("no input signal for letter x" + std::to_string(a));
      values.assign(grid_.size(), 0.0);
      const double half_h = 0.5 * grid_.h();
      auto integrand = [&](std::size_t n) { return a == kDrift ? inner[n] : inputs_[a - 1][n] * inner[n]; };
      double prev = integrand(0);
      for (std::size_t n = 1; n < values.size(); ++n) {
        const double cur = integrand(n);
        values[n] = values[n - 1] + half_h * (prev + cur);
        prev = cur;
      }
    }
    return table_.emplace(w, std::move(values)).first->second;
  }

 private:
  const std::vector<Signal>& inputs_;
  const Grid& grid_;
  std::unordered_map<Word, Signal, WordHash> table_;
};

}  // namespace

Signal eval_fliess(const Series& c, const std::vector<Signal>& inputs, const Grid& grid) {
  grid.validate();
  for (const Signal& s : inputs) check_signal(s, grid);
  IteratedIntegrals table(inputs, grid);
  Signal y(grid.size(), 0.0);
  for (const auto& [w, k] : c.terms()) {
    if (static_cast<int>(w.size()) > c.exact_above()) break;
    const double coeff = k.get_d();
    const Signal& e = table.of(w);
    for (std::size_t n = 0; n < y.size(); ++n) y[n] += coeff * e[n];
  }
  return y;
}

Signal eval_fliess(const Series& c, const Signal& u, const Grid& grid) {
  return eval_fliess(c, std::vector<Signal>{u}, grid);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200, E6 = 22.0 / 525,
                 E7 = -1.0 / 40;

using State = std::vector<double>;
using Rhs = std::function<void(double, const State&, State&)>;

struct StepResult {
  State y;
  double error = 0;  // scaled RMS error estimate
  bool finite = true;
};

StepResult dopri_step(const Rhs& f, double t, const State& y, double h, const OdeOptions& opt) {
  const std::size_t n = y.size();
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n);
  f(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * A21 * k1[i];
  f(t + C2 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
  f(t + C3 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
  f(t + C4 * h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
  f(t + C5 * h, tmp, k5);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
  f(t + h, tmp, k6);
  StepResult out;
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.y[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
  f(t + h, out.y, k7);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double err = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    const double scale = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(out.y[i]));
    acc += (err / scale) * (err / scale);
    if (!std::isfinite(out.y[i]) || !std::isfinite(err)) out.finite = false;
  }
  out.error = std::sqrt(acc / static_cast<double>(n));
  if (!std::isfinite(out.error)) out.finite = false;
  return out;
}

double peak(const State& y) {
  double p = 0;
  for (double v : y) p = std::max(p, std::isfinite(v) ? std::fabs(v) : std::numeric_limits<double>::infinity());
  return p;
}

double interpolate(const Signal& s, const Grid& grid, double t) {
  const double x = (t - grid.t0) / grid.h();
  if (x <= 0) return s.front();
  const auto n = static_cast<std::size_t>(x);
  if (n + 1 >= s.size()) return s.back();
  const double frac = x - static_cast<double>(n);
  return s[n] + frac * (s[n + 1] - s[n]);
}

}  // namespace

Trajectory simulate_maximal_ode(const NetworkSpec& net, const std::vector<Signal>& v, const Grid& grid,
                                const OdeOptions& options) {
  grid.validate();
  if (!net.all_maximal()) throw ModelError("the ODE realization needs every node to be a maximal series");
  const int m = net.size();
  if (!v.empty() && static_cast<int>(v.size()) != m) throw DomainError("need one input signal per node");
  for (const Signal& s : v) check_signal(s, grid);

  std::vector<double> rate(static_cast<std::size_t>(m)), K(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> W(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m)));
  for (int k = 1; k <= m; ++k) {
    const auto& spec = std::get<MaximalSeriesSpec>(net.node(k));
    K[static_cast<std::size_t>(k - 1)] = spec.K.get_d();
    rate[static_cast<std::size_t>(k - 1)] = Coeff(spec.M / spec.K).get_d();
    for (int l = 1; l <= m; ++l) W[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)] = net.weight(k, l).get_d();
  }
  const Rhs rhs = [&](double t, const State& z, State& dz) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      double drive = 1.0;
      for (std::size_t j = 0; j < z.size(); ++j) drive += W[i][j] * z[j];
      if (!v.empty()) drive += interpolate(v[i], grid, t);
      dz[i] = rate[i] * z[i] * z[i] * drive;
    }
  };

  Trajectory out;
  out.integrator = "dopri5(4) adaptive, rtol=" + std::to_string(options.rtol) + ", atol=" + std::to_string(options.atol);
  out.threshold = options.threshold;
  out.t = grid.times();
  out.y.assign(static_cast<std::size_t>(m), Signal(grid.size(), std::numeric_limits<double>::quiet_NaN()));

  State z = K;
  double t = grid.t0;
  double h = options.initial_step;
  auto record = [&](std::size_t n) {
    for (int k = 0; k < m; ++k) out.y[static_cast<std::size_t>(k)][n] = z[static_cast<std::size_t>(k)];
  };
  record(0);

  auto declare_escape = [&](double when, const State& beyond) {
    out.escape_time = when;
    for (int k = 0; k < m; ++k) {
      const double zk = beyond[static_cast<std::size_t>(k)];
      if (!std::isfinite(zk) || std::fabs(zk) > options.threshold) out.escaped_nodes.push_back(k + 1);
    }
    if (out.escaped_nodes.empty()) {
      // Step underflow: report the node(s) growing fastest.
      double top = peak(beyond);
      for (int k = 0; k < m; ++k)
        if (std::fabs(beyond[static_cast<std::size_t>(k)]) >= 0.5 * top) out.escaped_nodes.push_back(k + 1);
    }
  };

  for (std::size_t n = 1; n < grid.size() && !out.escape_time; ++n) {
    const double target = grid.time(n);
    while (t < target) {
      const double h_min = 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t));
      if (h < h_min) {
        declare_escape(t, z);
        break;
      }
      const double step = std::min(h, target - t);
      StepResult trial = dopri_step(rhs, t, z, step, options);
      if (!trial.finite || trial.error > 1.0) {
        const double factor = trial.finite ? std::max(0.1, 0.9 * std::pow(trial.error, -0.2)) : 0.25;
        h = step * factor;
        continue;
      }
      ++out.steps_taken;
      if (peak(trial.y) > options.threshold) {
        // Bisect on the last step for the threshold crossing.
        double lo = 0, hi = step;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          StepResult probe = dopri_step(rhs, t, z, mid, options);
          if (probe.finite && peak(probe.y) <= options.threshold) lo = mid; else hi = mid;
        }
        declare_escape(t + hi, trial.y);
        break;
      }
      t = (step == target - t) ? target : t + step;
      z = std::move(trial.y);
      const double grow = trial.error > 0 ? std::min(5.0, 0.9 * std::pow(trial.error, -0.2)) : 5.0;
      h = step * std::max(0.2, grow);
    }
    if (!out.escape_time) record(n);
  }
  return out;
}

Trajectory simulate_picard(const NetworkSpec& net, const std::vector<Signal>& v, const Grid& grid,
                           const PicardOptions& options) {
  grid.validate();
  if (!net.all_polynomial()) {
    throw ModelError("Picard simulation admits explicit polynomial nodes only; use the ODE realization for maximal nodes");
  }
  const int m = net.size();
  if (static_cast<int>(v.size()) != m) throw DomainError("need one input signal per node");
  for (const Signal& s : v) check_signal(s, grid);

  std::vector<Series> nodes;
  for (int k = 1; k <= m; ++k) nodes.push_back(std::get<Series>(net.node(k)));

  Trajectory out;
  out.integrator = "picard + trapezoidal iterated integrals";
  out.t = grid.times();
  std::vector<Signal> u = v;
  std::vector<Signal> y(static_cast<std::size_t>(m));
  for (int iter = 0;; ++iter) {
    for (int k = 0; k < m; ++k) y[static_cast<std::size_t>(k)] = eval_fliess(nodes[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(k)], grid);
    double change = 0;
    for (int j = 0; j < m; ++j) {
      Signal next = v[static_cast<std::size_t>(j)];
      for (int k = 0; k < m; ++k) {
        const double w = net.weight(j + 1, k + 1).get_d();
        if (w == 0) continue;
        for (std::size_t n = 0; n < next.size(); ++n) next[n] += w * y[static_cast<std::size_t>(k)][n];
      }
      for (std::size_t n = 0; n < next.size(); ++n) change = std::max(change, std::fabs(next[n] - u[static_cast<std::size_t>(j)][n]));
      u[static_cast<std::size_t>(j)] = std::move(next);
    }
    out.picard_changes.push_back(change);
    if (!std::isfinite(change)) throw NoConvergence("Picard iteration diverged; try a smaller horizon T");
    if (change < options.tol) break;
    if (iter + 1 >= options.max_iter) {
      throw NoConvergence("Picard iteration did not converge in " + std::to_string(options.max_iter) +
                          " sweeps (last change " + std::to_string(change) + "); try a smaller horizon T");
    }
  }
  for (int k = 0; k < m; ++k) y[static_cast<std::size_t>(k)] = eval_fliess(nodes[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(k)], grid);
  out.y = std::move(y);
  return out;
}

ValidationReport validate_io_map(const NetworkSpec& net, int source, int sink, int degree, const Signal& v,
                                 const Grid& grid, const PicardOptions& options) {
  net.check_node(source);
  net.check_node(sink);
  ValidationReport out;
  out.expected_order = degree + 1;
  out.d = io_map(net, source, sink, degree);
  out.predicted = eval_fliess(out.d, v, grid);
  std::vector<Signal> inputs(static_cast<std::size_t>(net.size()), Signal(grid.size(), 0.0));
  inputs[static_cast<std::size_t>(source - 1)] = v;
  Trajectory sim = simulate_picard(net, inputs, grid, options);
  out.simulated = sim.y[static_cast<std::size_t>(sink - 1)];
  for (std::size_t n = 0; n < grid.size(); ++n)
    out.max_error = std::max(out.max_error, std::fabs(out.predicted[n] - out.simulated[n]));
  return out;
}

double validation_error_ratio(const NetworkSpec& net, int source, int sink, int degree,
                              const std::function<double(double)>& v, double T, int steps) {
  Grid coarse{0.0, T, steps};
  Grid fine{0.0, T / 2, steps};
  const double e1 = validate_io_map(net, source, sink, degree, sample(coarse, v), coarse).max_error;
  const double e2 = validate_io_map(net, source, sink, degree, sample(fine, v), fine).max_error;
  return e1 / e2;
}

}  // namespace cfnet
