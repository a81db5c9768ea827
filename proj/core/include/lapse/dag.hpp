#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace lapse {

enum class Solver { kDagDp, kDijkstra };

// A weighted DAG whose node ids are a topological order: every edge v -> u
// has u > v. A path starts at a node with finite source_cost(v) and ends at a
// node with is_sink(v). Weights must be non-negative.
template <class G>
concept SamplingDag = requires(const G& g, std::size_t v,
                               std::function<void(std::size_t, double)> f) {
  { g.node_count() } -> std::convertible_to<std::size_t>;
  { g.source_cost(v) } -> std::convertible_to<double>;
  { g.is_sink(v) } -> std::convertible_to<bool>;
  g.for_each_successor(v, f);
  g.for_each_predecessor(v, f);
};

struct DagPath {
  std::vector<std::size_t> nodes;
  double cost = 0.0;  // source cost plus edge weights, summed front to back
};

namespace detail {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Cost of the cheapest continuation from each node to a sink.
template <SamplingDag G>
std::vector<double> cost_to_sink_dp(const G& g) {
  const std::size_t n = g.node_count();
  std::vector<double> to_sink(n, kUnreachable);
  for (std::size_t v = n; v-- > 0;) {
    double best = g.is_sink(v) ? 0.0 : kUnreachable;
    g.for_each_successor(v, [&](std::size_t u, double w) {
      const double c = w + to_sink[u];
      if (c < best) best = c;
    });
    to_sink[v] = best;
  }
  return to_sink;
}

// Same quantity by Dijkstra's algorithm on the reversed graph, seeded at the
// sinks. Each settled value is the minimum of the same w + to_sink[u] terms
// the DP evaluates, so both solvers produce identical doubles.
template <SamplingDag G>
std::vector<double> cost_to_sink_dijkstra(const G& g) {
  const std::size_t n = g.node_count();
  std::vector<double> dist(n, kUnreachable);
  std::vector<bool> settled(n, false);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (std::size_t v = 0; v < n; ++v) {
    if (g.is_sink(v)) {
      dist[v] = 0.0;
      queue.emplace(0.0, v);
    }
  }
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (settled[u] || d != dist[u]) continue;
    settled[u] = true;
    g.for_each_predecessor(u, [&](std::size_t v, double w) {
      if (settled[v]) return;
      const double c = w + d;
      if (c < dist[v]) {
        dist[v] = c;
        queue.emplace(c, v);
      }
    });
  }
  return dist;
}

}  // namespace detail

// Minimum-cost source-to-sink path. Among equal-cost paths the node sequence
// that is lexicographically smallest wins (a prefix beats its extensions).
// With min_edges == 1 the path must contain at least one edge; single-node
// paths are only allowed when min_edges == 0.
template <SamplingDag G>
std::optional<DagPath> shortest_path(const G& g, Solver solver,
                                     int min_edges = 1) {
  const std::size_t n = g.node_count();
  const std::vector<double> to_sink = solver == Solver::kDagDp
                                          ? detail::cost_to_sink_dp(g)
                                          : detail::cost_to_sink_dijkstra(g);

  // Cheapest continuation that takes at least one edge.
  auto via_edge = [&](std::size_t v) {
    double best = detail::kUnreachable;
    g.for_each_successor(v, [&](std::size_t u, double w) {
      const double c = w + to_sink[u];
      if (c < best) best = c;
    });
    return best;
  };
  // Smallest successor achieving `target`.
  auto next_node = [&](std::size_t v, double target) {
    std::size_t pick = n;
    g.for_each_successor(v, [&](std::size_t u, double w) {
      if (w + to_sink[u] == target && u < pick) pick = u;
    });
    return pick;
  };

  std::size_t first = n;
  double first_rest = detail::kUnreachable;
  double best = detail::kUnreachable;
  for (std::size_t v = 0; v < n; ++v) {
    const double s = g.source_cost(v);
    if (s == detail::kUnreachable) continue;
    const double rest = min_edges > 0 ? via_edge(v) : to_sink[v];
    const double c = s + rest;
    if (c < best) {
      best = c;
      first = v;
      first_rest = rest;
    }
  }
  if (first == n) return std::nullopt;

  DagPath path;
  path.nodes.push_back(first);
  path.cost = g.source_cost(first);
  std::size_t v = first;
  double remaining = first_rest;
  bool must_move = min_edges > 0;
  while (must_move || !g.is_sink(v)) {
    const std::size_t u = next_node(v, remaining);
    if (u == n) return std::nullopt;  // unreachable for consistent graphs
    double w = 0.0;
    g.for_each_successor(v, [&](std::size_t x, double wx) {
      if (x == u) w = wx;
    });
    path.cost += w;
    remaining = to_sink[u];
    path.nodes.push_back(u);
    v = u;
    must_move = false;
  }
  return path;
}

}  // namespace lapse
