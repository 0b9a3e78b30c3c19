#include "cfnet/reldeg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <exception>
#include <thread>

#include "cfnet/errors.hpp"

namespace cfnet {

const char* to_string(RelDegStatus s) {
  switch (s) {
    case RelDegStatus::defined: return "defined";
    case RelDegStatus::undefined: return "undefined";
    case RelDegStatus::undetermined_at_truncation: return "undetermined_at_truncation";
  }
  return "?";
}

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::fully_connected: return "fully_connected";
    case Certificate::distinct: return "distinct";
    case Certificate::repeated_sum_nonzero: return "repeated_sum_nonzero";
    case Certificate::violated_unknown: return "violated_unknown";
  }
  return "?";
}

namespace {

Word leading_word(int r) {
  Word w = Word::repeat(kDrift, static_cast<std::size_t>(r - 1));
  return w + Word{kInput};
}

}  // namespace

RelDegReport relative_degree(const Series& c) { return relative_degree(c, false); }

RelDegReport relative_degree(const Series& c, bool complete) {
  if (c.alphabet_bound() != 1) throw AlphabetError("relative degree is defined for series over {x0, x1}");
  RelDegReport out;
  out.truncation = c.exact_above();
  std::size_t rho = std::numeric_limits<std::size_t>::max();
  for (const auto& [w, k] : c.terms()) {
    if (static_cast<int>(w.size()) > c.exact_above()) break;
    if (!w.is_drift_only()) rho = std::min(rho, w.leading_drift());
  }
  if (rho == std::numeric_limits<std::size_t>::max()) {
    if (complete) out.status = RelDegStatus::undefined;
    return out;
  }
  if (static_cast<int>(rho) + 1 > c.exact_above()) return out;
  const int r = static_cast<int>(rho) + 1;
  Coeff lead = c.coeff(leading_word(r));
  if (is_zero(lead)) {
    out.status = RelDegStatus::undefined;
    return out;
  }
  out.status = RelDegStatus::defined;
  out.r = r;
  out.leading = lead;
  return out;
}

RelDegReport sum_reldeg_predict(const std::vector<RelDegReport>& reports) {
  RelDegReport out;
  if (reports.empty()) return out;
  out.truncation = reports.front().truncation;
  for (const RelDegReport& rep : reports) {
    out.truncation = std::min(out.truncation, rep.truncation);
    if (rep.status == RelDegStatus::undefined) {
      out.status = RelDegStatus::undefined;
      return out;
    }
  }
  for (const RelDegReport& rep : reports)
    if (!rep.defined()) return out;

  int r_min = reports.front().r;
  for (const RelDegReport& rep : reports) r_min = std::min(r_min, rep.r);
  Coeff sum = 0;
  for (const RelDegReport& rep : reports)
    if (rep.r == r_min) sum += rep.leading;
  if (is_zero(sum)) {
    out.status = RelDegStatus::undefined;
    return out;
  }
  out.status = RelDegStatus::defined;
  out.r = r_min;
  out.leading = sum;
  return out;
}

AccumulatedDegrees accumulated_degrees(const Subgraph& g, const std::map<int, int>& node_degrees) {
  AccumulatedDegrees out;
  if (g.empty()) return out;
  for (int v : g.nodes) {
    auto it = node_degrees.find(v);
    if (it == node_degrees.end() || it->second < 1) {
      throw ConditionError("node " + std::to_string(v) + " has no defined relative degree");
    }
  }
  // Dijkstra with node weights; every weight is >= 1 so the minimum over walks
  // is attained on a simple path.
  using Item = std::pair<int, int>;  // (r+, node)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  out.value[g.source] = node_degrees.at(g.source);
  queue.emplace(out.value[g.source], g.source);
  while (!queue.empty()) {
    auto [dist, u] = queue.top();
    queue.pop();
    if (dist != out.value[u]) continue;
    for (const auto& [from, to] : g.edges) {
      if (from != u) continue;
      int candidate = dist + node_degrees.at(to);
      auto it = out.value.find(to);
      if (it == out.value.end() || candidate < it->second) {
        out.value[to] = candidate;
        queue.emplace(candidate, to);
      }
    }
  }
  for (int v : g.nodes) {
    if (v == g.source) continue;
    std::vector<int> in;
    for (int p : g.predecessors(v)) in.push_back(out.value.at(p));
    std::sort(in.begin(), in.end());
    out.incoming[v] = std::move(in);
  }
  return out;
}

namespace {

int node_relative_degree(const NetworkSpec& net, int k) {
  if (net.is_maximal(k)) return 1;  // <c, x1> = K M != 0
  const Series& poly = std::get<Series>(net.node(k));
  int top = 1;
  for (const auto& [w, c] : poly.terms()) top = std::max(top, static_cast<int>(w.size()));
  RelDegReport rep = relative_degree(net.node_series(k, top));
  if (!rep.defined()) {
    throw ConditionError("node " + std::to_string(k) + " series has no relative degree (" +
                         to_string(rep.status) + ")");
  }
  return rep.r;
}

}  // namespace

PredictionReport predict_io_reldeg(const NetworkSpec& net, int source, int sink, int condition_degree,
                                   int node_budget) {
  PredictionReport out;
  out.subgraph = subgraph_extract(net, source, sink, node_budget);
  const Subgraph& g = out.subgraph;
  if (g.empty()) {
    throw ConditionError("no forward path from node " + std::to_string(source) + " to node " +
                         std::to_string(sink));
  }
  std::map<int, int> degrees;
  for (int v : g.nodes) degrees[v] = node_relative_degree(net, v);
  out.accumulated = accumulated_degrees(g, degrees);
  out.r_pred = out.accumulated.value.at(sink);

  bool all_distinct = true;
  for (const auto& [v, in] : out.accumulated.incoming) {
    NodeCondition cond;
    cond.node = v;
    cond.incoming = in;
    cond.distinct = std::adjacent_find(in.begin(), in.end()) == in.end();
    all_distinct = all_distinct && cond.distinct;
    out.nodes.push_back(std::move(cond));
  }

  if (source != sink) {
    bool sink_fully_connected = true;
    for (int k = 1; k <= net.size(); ++k)
      if (k != sink && is_zero(net.weight(sink, k))) sink_fully_connected = false;
    if (sink_fully_connected) {
      out.condition = Certificate::fully_connected;
      out.r_pred = degrees.at(sink) + degrees.at(source);
      return out;
    }
  }
  if (all_distinct) {
    out.condition = Certificate::distinct;
    return out;
  }

  // Weighted leading coefficients of the tied minimal groups, computed on the
  // loop-free subgraph network.
  int needed = 0;
  for (const NodeCondition& cond : out.nodes)
    if (cond.incoming.size() > 1 && cond.incoming[0] == cond.incoming[1]) needed = std::max(needed, cond.incoming[0]);
  if (needed > condition_degree) {
    throw ConditionError("condition degree " + std::to_string(condition_degree) +
                         " is too small to evaluate tied leading coefficients (needs " + std::to_string(needed) + ")");
  }
  const NetworkSpec restricted = restrict_to(net, g);
  const std::vector<Series> d = closed_loop_series(restricted, source, needed);
  bool all_nonzero = true;
  for (NodeCondition& cond : out.nodes) {
    if (cond.incoming.size() < 2 || cond.incoming[0] != cond.incoming[1]) continue;
    const int tied = cond.incoming[0];
    Coeff sum = 0;
    for (int p : g.predecessors(cond.node)) {
      if (out.accumulated.value.at(p) != tied) continue;
      sum += net.weight(cond.node, p) * d[static_cast<std::size_t>(p - 1)].coeff(leading_word(tied));
    }
    all_nonzero = all_nonzero && !is_zero(sum);
    cond.tied_sum = sum;
  }
  out.condition = all_nonzero ? Certificate::repeated_sum_nonzero : Certificate::violated_unknown;
  return out;
}

namespace {

// Degree at which to measure, and whether the series is then complete.
std::pair<int, bool> measurement_degree(const NetworkSpec& net, int degree) {
  const std::optional<int> bound = polynomial_degree_bound(net);
  if (bound && *bound <= std::max(degree, kCompleteDegreeCap)) return {std::max(degree, *bound), true};
  return {degree, false};
}

std::vector<std::vector<PairReport>> measure_all(const NetworkSpec& net, int degree, bool with_predictions) {
  const int m = net.size();
  const auto [measure_at, complete] = measurement_degree(net, degree);
  std::vector<std::vector<PairReport>> out(static_cast<std::size_t>(m), std::vector<PairReport>(static_cast<std::size_t>(m)));
  for (int i = 1; i <= m; ++i) {
    const std::vector<Series> d = closed_loop_series(net, i, measure_at);
    for (int j = 1; j <= m; ++j) {
      PairReport& rep = out[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
      rep.source = i;
      rep.sink = j;
      rep.measured = relative_degree(d[static_cast<std::size_t>(j - 1)], complete);
      if (!with_predictions) continue;
      try {
        rep.predicted = predict_io_reldeg(net, i, j, degree);
      } catch (const Error& e) {
        rep.prediction_error = e.what();
      }
      if (rep.predicted && rep.predicted->certified()) {
        const RelDegReport& meas = rep.measured;
        if (meas.status == RelDegStatus::undefined ||
            (meas.defined() && meas.r != rep.predicted->r_pred)) {
          rep.consistent = false;
        }
      }
    }
  }
  return out;
}

}  // namespace

RelDegReport measure_io_reldeg(const NetworkSpec& net, int source, int sink, int degree) {
  const auto [measure_at, complete] = measurement_degree(net, degree);
  return relative_degree(io_map(net, source, sink, measure_at), complete);
}

std::vector<std::vector<PairReport>> complete_reldeg(const NetworkSpec& net, int degree) {
  return measure_all(net, degree, true);
}

bool has_complete_relative_degree(const std::vector<std::vector<PairReport>>& reports) {
  for (const auto& row : reports)
    for (const PairReport& rep : row)
      if (!rep.measured.defined()) return false;
  return true;
}

std::vector<std::vector<Coeff>> sample_weights(const std::vector<std::vector<int>>& pattern, std::uint64_t seed,
                                               int sample_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample_index)};
  std::mt19937_64 rng(seq);
  std::vector<std::vector<Coeff>> w(pattern.size());
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    w[j].resize(pattern[j].size());
    for (std::size_t k = 0; k < pattern[j].size(); ++k) {
      const int entry = pattern[j][k];
      if (entry != 0 && entry != 1) throw DomainError("connection pattern entries must be 0 or 1");
      if (entry == 0) continue;
      // 53 random bits mapped to (0, 1]; the double is exact as a rational.
      const double u = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w[j][k] = coeff_from_double(u);
    }
  }
  return w;
}

GenericityStats genericity_sample(const std::vector<std::vector<int>>& pattern, const std::vector<NodeSource>& nodes,
                                  const GenericityOptions& options) {
  if (options.samples < 1) throw DomainError("sample count must be at least 1");
  const int m = static_cast<int>(nodes.size());
  if (options.coeff_source < 1 || options.coeff_source > m || options.coeff_sink < 1 || options.coeff_sink > m) {
    throw NodeIndexError("designated coefficient pair outside 1.." + std::to_string(m));
  }

  struct SampleResult {
    std::vector<std::vector<RelDegReport>> measured;
    double coefficient = 0;
  };
  std::vector<SampleResult> results(static_cast<std::size_t>(options.samples));

  auto run_range = [&](int worker, int workers) {
    for (int s = worker; s < options.samples; s += workers) {
      NetworkSpec net(sample_weights(pattern, options.seed, s), nodes);
      auto reports = measure_all(net, options.degree, false);
      SampleResult& res = results[static_cast<std::size_t>(s)];
      res.measured.resize(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          res.measured[static_cast<std::size_t>(j)].push_back(reports[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].measured);
      const Series d = io_map(net, options.coeff_source, options.coeff_sink, options.degree);
      res.coefficient = std::fabs(d.coeff(options.coeff_word).get_d());
    }
  };

  const int workers = std::max(1, std::min(options.jobs, options.samples));
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run_range(w, workers);
          } catch (...) {
            failures[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      }
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  GenericityStats stats;
  stats.samples = options.samples;
  stats.seed = options.seed;
  stats.degree = options.degree;
  stats.pairs.assign(static_cast<std::size_t>(m), std::vector<PairCounts>(static_cast<std::size_t>(m)));
  for (const SampleResult& res : results) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        const RelDegReport& rep = res.measured[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        PairCounts& pc = stats.pairs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        switch (rep.status) {
          case RelDegStatus::defined:
            ++pc.defined;
            ++pc.degree_histogram[rep.r];
            break;
          case RelDegStatus::undefined: ++pc.undefined; break;
          case RelDegStatus::undetermined_at_truncation: ++pc.undetermined; break;
        }
      }
    }
    stats.coefficient.push_back(res.coefficient);
  }

  const int bins = std::max(1, options.histogram_bins);
  double hi = *std::max_element(stats.coefficient.begin(), stats.coefficient.end());
  if (hi <= 0) hi = 1;
  stats.bin_edges.resize(static_cast<std::size_t>(bins + 1));
  for (int b = 0; b <= bins; ++b) stats.bin_edges[static_cast<std::size_t>(b)] = hi * b / bins;
  stats.bin_counts.assign(static_cast<std::size_t>(bins), 0);
  for (double x : stats.coefficient) {
    int b = static_cast<int>(x / hi * bins);
    stats.bin_counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1;
  }
  return stats;
}

}  // namespace cfnet
