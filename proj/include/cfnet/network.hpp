#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cfnet/series.hpp"

namespace cfnet {

/// Generating series of one SISO node: an explicit polynomial over {x0, x1}
/// (exact at every degree) or a maximal series K M^|w| |w|!.
using NodeSource = std::variant<Series, MaximalSeriesSpec>;

/// Additively interconnected network u_j = v_j + sum_k W_jk y_k of m SISO
/// Chen-Fliess nodes. Nodes are numbered 1..m; weight(j, k) weights the edge
/// k -> j.
class NetworkSpec {
 public:
  NetworkSpec(std::vector<std::vector<Coeff>> weights, std::vector<NodeSource> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Coeff& weight(int j, int k) const;
  void set_weight(int j, int k, const Coeff& w);
  const std::vector<std::vector<Coeff>>& weights() const { return weights_; }

  const NodeSource& node(int k) const;
  bool is_maximal(int k) const;
  bool all_maximal() const;
  bool all_polynomial() const;

  /// Node k's series truncated (or padded) to exactly `degree`, certified exact.
  Series node_series(int k, int degree) const;

  /// Edge k -> j exists iff W_jk != 0. Self-loops included.
  bool has_edge(int from, int to) const { return !is_zero(weight(to, from)); }

  /// Non-fatal remarks, e.g. weights outside [0, 1].
  std::vector<std::string> warnings() const;

  void check_node(int k) const;

 private:
  std::vector<std::vector<Coeff>> weights_;
  std::vector<NodeSource> nodes_;
};

struct ClosedLoopOptions {
  /// Run one extra sweep and throw if any coefficient up to the requested
  /// degree moves.
  bool verify_stable = false;
  /// Keep only x0-only words of every iterate. Those words of c o d depend on
  /// the x0-only words of d alone, so this yields the exact natural response
  /// at a fraction of the cost.
  bool natural_only = false;
  /// Number of sweeps to run; 0 means degree + 1.
  int sweeps = 0;
};

/// Generating series d_ki of v_i -> y_k for every node k, exact up to `degree`.
/// Result index k - 1 holds d_ki.
std::vector<Series> closed_loop_series(const NetworkSpec& net, int source, int degree,
                                       const ClosedLoopOptions& options = {});

/// d_{sink,source}.
Series io_map(const NetworkSpec& net, int source, int sink, int degree);

/// a_k = <d_jj, x0^k>, k = 0..degree: derivatives of the zero-input response
/// of node j at t0 (E_{x0^k} = t^k / k!, so no factorial appears).
std::vector<Coeff> natural_response(const NetworkSpec& net, int node, int degree);

/// When the weight graph has no cycles (self-loops included) and every node is
/// polynomial, each closed-loop series is itself a polynomial whose words are
/// no longer than the returned bound. nullopt otherwise.
std::optional<int> polynomial_degree_bound(const NetworkSpec& net);

/// Union of all simple directed paths source -> ... -> sink, self-loops removed.
struct Subgraph {
  int source = 0;
  int sink = 0;
  std::vector<int> nodes;                  // sorted
  std::vector<std::pair<int, int>> edges;  // (from, to), sorted

  bool empty() const { return nodes.empty(); }
  bool contains(int node) const;
  bool has_edge(int from, int to) const;
  std::vector<int> predecessors(int node) const;
};

inline constexpr int kDefaultSubgraphBudget = 24;

/// Exhaustive simple-path search. Throws SubgraphBudgetError when more than
/// `node_budget` nodes are both reachable from source and able to reach sink.
Subgraph subgraph_extract(const NetworkSpec& net, int source, int sink,
                          int node_budget = kDefaultSubgraphBudget);

/// Copy of `net` with every weight outside the subgraph's edge set zeroed.
NetworkSpec restrict_to(const NetworkSpec& net, const Subgraph& g);

}  // namespace cfnet
