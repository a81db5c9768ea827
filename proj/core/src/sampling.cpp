#include "lapse/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lapse/errors.hpp"

namespace lapse {

namespace {

constexpr double kNoSource = std::numeric_limits<double>::infinity();

class FrameGraph {
 public:
  FrameGraph(const EdgeCostTable& table, int d_start, int d_end)
      : table_(table), d_start_(d_start), d_end_(d_end) {}

  std::size_t node_count() const { return table_.frame_count(); }
  double source_cost(std::size_t v) const {
    return static_cast<int>(v) < d_start_ ? 0.0 : kNoSource;
  }
  bool is_sink(std::size_t v) const {
    return static_cast<int>(v) >= table_.frame_count() - d_end_;
  }
  template <class F>
  void for_each_successor(std::size_t v, F&& f) const {
    const int i = static_cast<int>(v);
    const int last = std::min(table_.frame_count() - 1, i + table_.tau());
    for (int j = i + 1; j <= last; ++j) {
      const double w = table_.total(i, j);
      if (w != EdgeCostTable::kAbsent) f(static_cast<std::size_t>(j), w);
    }
  }
  template <class F>
  void for_each_predecessor(std::size_t u, F&& f) const {
    const int j = static_cast<int>(u);
    for (int i = std::max(0, j - table_.tau()); i < j; ++i) {
      const double w = table_.total(i, j);
      if (w != EdgeCostTable::kAbsent) f(static_cast<std::size_t>(i), w);
    }
  }

 private:
  const EdgeCostTable& table_;
  int d_start_;
  int d_end_;
};

// Node id i * tau + (j - i - 1) stands for the pair (i, j); ids grow with i,
// so they are a topological order for pair -> pair edges (i, j) -> (j, l).
class PairGraph {
 public:
  PairGraph(const MotionTrace& trace, const EdgeCostTable& table, int d_start,
            int d_end, double alpha2)
      : trace_(trace),
        table_(table),
        n_(table.frame_count()),
        tau_(table.tau()),
        d_start_(d_start),
        d_end_(d_end),
        alpha2_(alpha2) {}

  std::size_t node_count() const {
    return static_cast<std::size_t>(n_) * tau_;
  }
  int first(std::size_t v) const { return static_cast<int>(v / tau_); }
  int second(std::size_t v) const {
    return static_cast<int>(v / tau_) + static_cast<int>(v % tau_) + 1;
  }
  std::size_t id(int i, int j) const {
    return static_cast<std::size_t>(i) * tau_ + (j - i - 1);
  }
  bool active(std::size_t v) const {
    const int j = second(v);
    return j < n_ && table_.present(first(v), j);
  }

  double source_cost(std::size_t v) const {
    if (first(v) >= d_start_ || !active(v)) return kNoSource;
    return table_.total(first(v), second(v));
  }
  bool is_sink(std::size_t v) const {
    return active(v) && second(v) >= n_ - d_end_;
  }
  double weight(int i, int j, int l) const {
    return table_.total(j, l) +
           alpha2_ * second_order_cost(*trace_.link(i, j), *trace_.link(j, l));
  }
  template <class F>
  void for_each_successor(std::size_t v, F&& f) const {
    if (!active(v)) return;
    const int i = first(v);
    const int j = second(v);
    const int last = std::min(n_ - 1, j + tau_);
    for (int l = j + 1; l <= last; ++l) {
      if (!table_.present(j, l)) continue;
      f(id(j, l), weight(i, j, l));
    }
  }
  template <class F>
  void for_each_predecessor(std::size_t u, F&& f) const {
    if (!active(u)) return;
    const int j = first(u);
    const int l = second(u);
    for (int i = std::max(0, j - tau_); i < j; ++i) {
      if (!table_.present(i, j)) continue;
      f(id(i, j), weight(i, j, l));
    }
  }

 private:
  const MotionTrace& trace_;
  const EdgeCostTable& table_;
  int n_;
  int tau_;
  int d_start_;
  int d_end_;
  double alpha2_;
};

void check_trace(const MotionTrace& trace, const GraphSpec& spec) {
  spec.validate();
  if (trace.frame_count() != spec.n) {
    throw std::invalid_argument("graph spec frame count " +
                                std::to_string(spec.n) +
                                " does not match trace length " +
                                std::to_string(trace.frame_count()));
  }
}

void fill_transitions(const MotionTrace& trace, const CostWeights& weights,
                      SamplingPlan& plan) {
  plan.transition_costs.clear();
  for (std::size_t k = 0; k + 1 < plan.selected.size(); ++k) {
    plan.transition_costs.push_back(
        edge_cost(trace, plan.selected[k], plan.selected[k + 1], weights));
  }
}

}  // namespace

GraphSpec GraphSpec::for_trace(const MotionTrace& trace) {
  GraphSpec spec;
  spec.n = trace.frame_count();
  spec.weights = CostWeights::for_trace(trace);
  return spec;
}

void GraphSpec::validate() const {
  if (tau < 1 || tau >= n) {
    throw std::invalid_argument("tau must satisfy 1 <= tau < n");
  }
  if (d_start < 1 || d_start > n || d_end < 1 || d_end > n) {
    throw std::invalid_argument("d_start and d_end must lie in [1, n]");
  }
  if (alpha2 && !(*alpha2 >= 0.0)) {
    throw std::invalid_argument("alpha2 must be non-negative");
  }
  weights.validate();
}

SamplingPlan solve_first_order(const MotionTrace& trace,
                               const GraphSpec& spec) {
  check_trace(trace, spec);
  const EdgeCostTable table(trace, spec.tau, spec.weights);
  const FrameGraph graph(table, spec.d_start, spec.d_end);
  const auto path = shortest_path(graph, spec.solver, 1);
  if (!path) {
    throw NoPath("no source-to-sink path in the frame graph of " +
                 trace.video_id());
  }

  SamplingPlan plan;
  plan.video_id = trace.video_id();
  plan.solver = spec.solver;
  for (std::size_t v : path->nodes) plan.selected.push_back(static_cast<int>(v));
  fill_transitions(trace, spec.weights, plan);
  double total = 0.0;
  for (const EdgeCost& c : plan.transition_costs) total += c.total;
  plan.total_cost = total;
  return plan;
}

SamplingPlan uniform_plan(int n, int skip, int offset) {
  if (skip < 1) throw std::invalid_argument("skip must be at least 1");
  SamplingPlan plan;
  for (int i = offset; i < n; i += skip) plan.selected.push_back(i);
  return plan;
}

SamplingPlan uniform_plan(const MotionTrace& trace, const CostWeights& weights,
                          int skip, int offset) {
  SamplingPlan plan = uniform_plan(trace.frame_count(), skip, offset);
  plan.video_id = trace.video_id();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < plan.selected.size(); ++k) {
    const int i = plan.selected[k];
    const int j = plan.selected[k + 1];
    EdgeCost c{nan, nan, nan, nan};
    if (trace.link(i, j) != nullptr) c = edge_cost(trace, i, j, weights);
    plan.transition_costs.push_back(c);
    total += c.total;
  }
  plan.total_cost = total;
  return plan;
}

double second_order_cost(const MotionLink& first, const MotionLink& second) {
  if (first.dst != second.src) {
    throw MiddleFrameMismatch("links (" + std::to_string(first.src) + ", " +
                              std::to_string(first.dst) + ") and (" +
                              std::to_string(second.src) + ", " +
                              std::to_string(second.dst) +
                              ") do not share a middle frame");
  }
  if (first.source == DirectionSource::kMissing ||
      second.source == DirectionSource::kMissing) {
    return kMissingDirectionCost;
  }
  return (second.direction - first.direction).norm();
}

SamplingPlan solve_second_order(const MotionTrace& trace,
                                const GraphSpec& spec) {
  check_trace(trace, spec);
  const EdgeCostTable table(trace, spec.tau, spec.weights);
  const double alpha2 = spec.second_order_weight();
  const PairGraph graph(trace, table, spec.d_start, spec.d_end, alpha2);
  const auto path = shortest_path(graph, spec.solver, 0);
  if (!path) {
    throw NoPath("no source-to-sink path in the pair graph of " +
                 trace.video_id());
  }

  SamplingPlan plan;
  plan.video_id = trace.video_id();
  plan.solver = spec.solver;
  plan.selected.push_back(graph.first(path->nodes.front()));
  for (std::size_t v : path->nodes) plan.selected.push_back(graph.second(v));
  fill_transitions(trace, spec.weights, plan);

  // Same association order as the path weights: first pair's edge, then
  // (edge + weighted epipole change) per triplet.
  double total = plan.transition_costs.front().total;
  for (std::size_t k = 1; k < plan.transition_costs.size(); ++k) {
    const int i = plan.selected[k - 1];
    const int j = plan.selected[k];
    const int l = plan.selected[k + 1];
    const double smooth =
        alpha2 * second_order_cost(*trace.link(i, j), *trace.link(j, l));
    plan.smoothness_costs.push_back(smooth);
    total += plan.transition_costs[k].total + smooth;
  }
  plan.total_cost = total;
  return plan;
}

GraphSize first_order_graph_size(const MotionTrace& trace,
                                 const GraphSpec& spec) {
  GraphSize size;
  size.nodes = static_cast<std::size_t>(trace.frame_count());
  for (int i = 0; i < trace.frame_count(); ++i) {
    for (int k = 1; k <= spec.tau; ++k) {
      if (trace.link(i, i + k) != nullptr) ++size.edges;
    }
  }
  return size;
}

GraphSize second_order_graph_size(const MotionTrace& trace,
                                  const GraphSpec& spec) {
  GraphSize size;
  const int n = trace.frame_count();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= std::min(n - 1, i + spec.tau); ++j) {
      if (trace.link(i, j) == nullptr) continue;
      ++size.nodes;
      for (int l = j + 1; l <= std::min(n - 1, j + spec.tau); ++l) {
        if (trace.link(j, l) != nullptr) ++size.edges;
      }
    }
  }
  return size;
}

}  // namespace lapse
