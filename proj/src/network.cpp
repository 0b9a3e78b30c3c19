#include "cfnet/network.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cfnet/compose.hpp"
#include "cfnet/errors.hpp"

namespace cfnet {

NetworkSpec::NetworkSpec(std::vector<std::vector<Coeff>> weights, std::vector<NodeSource> nodes)
    : weights_(std::move(weights)), nodes_(std::move(nodes)) {
  const std::size_t m = nodes_.size();
  if (m == 0) throw DomainError("a network needs at least one node");
  if (weights_.size() != m) throw DomainError("weight matrix row count does not match node count");
  for (const auto& row : weights_) {
    if (row.size() != m) throw DomainError("weight matrix must be square with side equal to the node count");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (const auto* s = std::get_if<Series>(&nodes_[k])) {
      if (s->alphabet_bound() != 1) {
        throw AlphabetError("node " + std::to_string(k + 1) + " series must be over {x0, x1}");
      }
    } else {
      validate(std::get<MaximalSeriesSpec>(nodes_[k]));
    }
  }
}

void NetworkSpec::check_node(int k) const {
  if (k < 1 || k > size()) {
    throw NodeIndexError("node index " + std::to_string(k) + " outside 1.." + std::to_string(size()));
  }
}

const Coeff& NetworkSpec::weight(int j, int k) const {
  check_node(j);
  check_node(k);
  return weights_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)];
}

void NetworkSpec::set_weight(int j, int k, const Coeff& w) {
  check_node(j);
  check_node(k);
  weights_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)] = w;
}

const NodeSource& NetworkSpec::node(int k) const {
  check_node(k);
  return nodes_[static_cast<std::size_t>(k - 1)];
}

bool NetworkSpec::is_maximal(int k) const { return std::holds_alternative<MaximalSeriesSpec>(node(k)); }

bool NetworkSpec::all_maximal() const {
  for (int k = 1; k <= size(); ++k)
    if (!is_maximal(k)) return false;
  return true;
}

bool NetworkSpec::all_polynomial() const {
  for (int k = 1; k <= size(); ++k)
    if (is_maximal(k)) return false;
  return true;
}

std::optional<int> polynomial_degree_bound(const NetworkSpec& net) {
  if (!net.all_polynomial()) return std::nullopt;
  const int m = net.size();
  // Kahn's algorithm; a word of length L with p input letters grows by at most
  // p * D under x1 -> x1 e + x0 (d sh e), so D_k <= L_k (1 + max incoming D).
  std::vector<int> indeg(static_cast<std::size_t>(m), 0);
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l <= m; ++l)
      if (!is_zero(net.weight(k, l))) ++indeg[static_cast<std::size_t>(k - 1)];
  std::vector<int> ready, bound(static_cast<std::size_t>(m), 0);
  for (int k = 1; k <= m; ++k)
    if (indeg[static_cast<std::size_t>(k - 1)] == 0) ready.push_back(k);
  int seen = 0, overall = 0;
  while (!ready.empty()) {
    const int k = ready.back();
    ready.pop_back();
    ++seen;
    int longest = 0, incoming = 0;
    for (const auto& [w, c] : std::get<Series>(net.node(k)).terms()) longest = std::max(longest, static_cast<int>(w.size()));
    for (int l = 1; l <= m; ++l)
      if (!is_zero(net.weight(k, l))) incoming = std::max(incoming, bound[static_cast<std::size_t>(l - 1)]);
    const long long b = static_cast<long long>(longest) * (1 + incoming);
    bound[static_cast<std::size_t>(k - 1)] = static_cast<int>(std::min<long long>(b, 1 << 20));
    overall = std::max(overall, bound[static_cast<std::size_t>(k - 1)]);
    for (int j = 1; j <= m; ++j)
      if (!is_zero(net.weight(j, k)) && --indeg[static_cast<std::size_t>(j - 1)] == 0) ready.push_back(j);
  }
  if (seen != m) return std::nullopt;
  return overall;
}

Series NetworkSpec::node_series(int k, int degree) const {
  const NodeSource& src = node(k);
  if (const auto* spec = std::get_if<MaximalSeriesSpec>(&src)) return maximal_series(*spec, 1, degree);
  Series out(1, degree);
  for (const auto& [w, c] : std::get<Series>(src).terms()) out.add(w, c);
  return out;
}

std::vector<std::string> NetworkSpec::warnings() const {
  std::vector<std::string> out;
  for (int j = 1; j <= size(); ++j) {
    for (int k = 1; k <= size(); ++k) {
      const Coeff& w = weight(j, k);
      if (sgn(w) < 0 || w > 1) {
        out.push_back("weight W[" + std::to_string(j) + "][" + std::to_string(k) + "] = " + format_coeff(w) +
                      " lies outside [0, 1]");
      }
    }
  }
  return out;
}

namespace {

Series drift_projection(const Series& s) {
  Series out(s.alphabet_bound(), s.max_degree());
  out.limit_exact(s.exact_above());
  for (const auto& [w, c] : s.terms())
    if (w.is_drift_only()) out.add(w, c);
  return out;
}

// Same terms viewed at a larger truncation; the exact bound stays put.
Series lifted(const Series& s, int degree) {
  Series out(s.alphabet_bound(), degree);
  out.limit_exact(s.exact_above());
  for (const auto& [w, c] : s.terms()) out.add(w, c);
  return out;
}

}  // namespace

std::vector<Series> closed_loop_series(const NetworkSpec& net, int source, int degree,
                                       const ClosedLoopOptions& options) {
  net.check_node(source);
  if (degree < 0) throw DomainError("degree must be nonnegative");
  const int m = net.size();

  std::vector<Series> nodes;
  nodes.reserve(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) nodes.push_back(net.node_series(k, degree));

  ShuffleTable table;
  std::vector<Series> current(static_cast<std::size_t>(m), Series(1, 0));

  // Sweep t produces iterates exact up to degree min(t, degree): composition
  // prepends x0 to every feedback contribution, so one more degree freezes per
  // sweep. Work above the frozen degree would be discarded, so it is skipped.
  auto sweep = [&](int level) {
    std::vector<Series> next;
    next.reserve(current.size());
    for (int k = 1; k <= m; ++k) {
      Series drive(1, level);
      for (int l = 1; l <= m; ++l) {
        const Coeff& w = net.weight(k, l);
        if (is_zero(w)) continue;
        drive += w * lifted(current[static_cast<std::size_t>(l - 1)], level);
      }
      const Series node = nodes[static_cast<std::size_t>(k - 1)].truncated(level);
      Series d = k == source ? mixed_compose(node, drive, table) : compose(node, drive, table);
      if (options.natural_only) d = drift_projection(d);
      next.push_back(std::move(d));
    }
    current = std::move(next);
  };

  const int sweeps = options.sweeps > 0 ? options.sweeps : degree + 1;
  for (int t = 0; t < sweeps; ++t) sweep(std::min(t, degree));

  if (options.verify_stable) {
    std::vector<Series> before = current;
    sweep(degree);
    for (int k = 0; k < m; ++k) {
      if (!before[static_cast<std::size_t>(k)].equal_up_to(current[static_cast<std::size_t>(k)], degree)) {
        throw NoConvergence("closed-loop fixed point moved after " + std::to_string(sweeps) + " sweeps at node " +
                            std::to_string(k + 1));
      }
    }
  }
  for (Series& d : current) d.limit_exact(std::min(sweeps - 1, degree));
  return current;
}

Series io_map(const NetworkSpec& net, int source, int sink, int degree) {
  net.check_node(sink);
  return closed_loop_series(net, source, degree)[static_cast<std::size_t>(sink - 1)];
}

std::vector<Coeff> natural_response(const NetworkSpec& net, int node, int degree) {
  ClosedLoopOptions options;
  options.natural_only = true;
  const Series d = closed_loop_series(net, node, degree, options)[static_cast<std::size_t>(node - 1)];
  std::vector<Coeff> out;
  out.reserve(static_cast<std::size_t>(degree + 1));
  for (int k = 0; k <= degree; ++k) {
    out.push_back(d.coeff(Word::repeat(kDrift, static_cast<std::size_t>(k))));
  }
  return out;
}

bool Subgraph::contains(int node) const { return std::binary_search(nodes.begin(), nodes.end(), node); }

bool Subgraph::has_edge(int from, int to) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(from, to));
}

std::vector<int> Subgraph::predecessors(int node) const {
  std::vector<int> out;
  for (const auto& [from, to] : edges)
    if (to == node) out.push_back(from);
  return out;
}

namespace {

using Adjacency = std::vector<std::vector<int>>;

std::vector<bool> reachable(const Adjacency& adj, int start, const std::vector<bool>& blocked) {
  std::vector<bool> seen(adj.size(), false);
  if (blocked[static_cast<std::size_t>(start)]) return seen;
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)] && !blocked[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

// Path from `start` to `goal` avoiding blocked nodes (BFS parents), empty if none.
std::vector<int> find_path(const Adjacency& adj, int start, int goal, const std::vector<bool>& blocked) {
  std::vector<int> parent(adj.size(), -2);
  if (blocked[static_cast<std::size_t>(start)]) return {};
  std::vector<int> queue{start};
  parent[static_cast<std::size_t>(start)] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    if (u == goal) break;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (parent[static_cast<std::size_t>(v)] == -2 && !blocked[static_cast<std::size_t>(v)]) {
        parent[static_cast<std::size_t>(v)] = u;
        queue.push_back(v);
      }
    }
  }
  if (parent[static_cast<std::size_t>(goal)] == -2) return {};
  std::vector<int> path;
  for (int u = goal; u != -1; u = parent[static_cast<std::size_t>(u)]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Subgraph subgraph_extract(const NetworkSpec& net, int source, int sink, int node_budget) {
  net.check_node(source);
  net.check_node(sink);
  Subgraph g;
  g.source = source;
  g.sink = sink;
  if (source == sink) {
    g.nodes = {source};
    return g;
  }

  const int m = net.size();
  Adjacency fwd(static_cast<std::size_t>(m)), bwd(static_cast<std::size_t>(m));
  for (int from = 1; from <= m; ++from) {
    for (int to = 1; to <= m; ++to) {
      if (from != to && net.has_edge(from, to)) {
        fwd[static_cast<std::size_t>(from - 1)].push_back(to - 1);
        bwd[static_cast<std::size_t>(to - 1)].push_back(from - 1);
      }
    }
  }
  const int s = source - 1, t = sink - 1;
  const std::vector<bool> none(static_cast<std::size_t>(m), false);
  std::vector<bool> from_s = reachable(fwd, s, none);
  std::vector<bool> to_t = reachable(bwd, t, none);
  std::vector<bool> candidate(static_cast<std::size_t>(m));
  int candidates = 0;
  for (int v = 0; v < m; ++v) {
    candidate[static_cast<std::size_t>(v)] = from_s[static_cast<std::size_t>(v)] && to_t[static_cast<std::size_t>(v)];
    candidates += candidate[static_cast<std::size_t>(v)];
  }
  if (candidates == 0) return g;
  if (candidates > node_budget) {
    throw SubgraphBudgetError("forward-path search over " + std::to_string(candidates) +
                              " candidate nodes exceeds the budget of " + std::to_string(node_budget));
  }

  std::set<std::pair<int, int>> marked;
  auto mark_path = [&marked](const std::vector<int>& path) {
    for (std::size_t k = 0; k + 1 < path.size(); ++k) marked.emplace(path[k], path[k + 1]);
  };

  // An edge u->v lies on a forward path iff some simple path s..u can be
  // continued by a path v..t that avoids it. Each unmarked edge gets a
  // dedicated depth-first search over simple prefixes s..u.
  for (int u = 0; u < m; ++u) {
    if (!candidate[static_cast<std::size_t>(u)]) continue;
    for (int v : fwd[static_cast<std::size_t>(u)]) {
      if (!candidate[static_cast<std::size_t>(v)] || marked.contains({u, v}) || v == s || u == t) continue;
      std::vector<bool> on_path(static_cast<std::size_t>(m), false);
      for (int x = 0; x < m; ++x) on_path[static_cast<std::size_t>(x)] = !candidate[static_cast<std::size_t>(x)];
      std::vector<int> prefix;
      std::function<bool(int)> extend = [&](int x) -> bool {
        prefix.push_back(x);
        on_path[static_cast<std::size_t>(x)] = true;
        bool found = false;
        if (x == u) {
          if (!on_path[static_cast<std::size_t>(v)]) {
            std::vector<int> tail = find_path(fwd, v, t, on_path);
            if (!tail.empty()) {
              std::vector<int> full = prefix;
              full.insert(full.end(), tail.begin(), tail.end());
              mark_path(full);
              found = true;
            }
          }
        } else if (x != t) {
          // u must stay reachable without revisiting the prefix.
          if (reachable(fwd, x, [&] {
                std::vector<bool> b = on_path;
                b[static_cast<std::size_t>(x)] = false;
                return b;
              }())[static_cast<std::size_t>(u)]) {
            for (int y : fwd[static_cast<std::size_t>(x)]) {
              if (on_path[static_cast<std::size_t>(y)]) continue;
              if (extend(y)) {
                found = true;
                break;
              }
            }
          }
        }
        prefix.pop_back();
        on_path[static_cast<std::size_t>(x)] = false;
        return found;
      };
      extend(s);
    }
  }

  std::set<int> nodes;
  for (const auto& [a, b] : marked) {
    nodes.insert(a + 1);
    nodes.insert(b + 1);
    g.edges.emplace_back(a + 1, b + 1);
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  return g;
}

NetworkSpec restrict_to(const NetworkSpec& net, const Subgraph& g) {
  NetworkSpec out = net;
  for (int j = 1; j <= net.size(); ++j)
    for (int k = 1; k <= net.size(); ++k)
      if (!g.has_edge(k, j)) out.set_weight(j, k, 0);
  return out;
}

}  // namespace cfnet
