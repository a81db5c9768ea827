#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lapse/cost.hpp"
#include "lapse/dag.hpp"
#include "lapse/trace.hpp"

namespace lapse {

// Frame graph parameters: edges i -> j for 1 <= j - i <= tau, zero-cost
// source edges into frames [0, d_start) and sink edges out of
// [n - d_end, n).
struct GraphSpec {
  int n = 0;
  int tau = 100;
  int d_start = 120;
  int d_end = 120;
  CostWeights weights;
  Solver solver = Solver::kDagDp;
  // Weight of the epipole-change term in the second-order graph; defaults
  // to weights.alpha when unset.
  std::optional<double> alpha2;

  static GraphSpec for_trace(const MotionTrace& trace);

  double second_order_weight() const { return alpha2.value_or(weights.alpha); }

  // Throws std::invalid_argument unless 1 <= tau < n and
  // 1 <= d_start, d_end <= n.
  void validate() const;
};

struct SamplingPlan {
  std::string video_id;
  std::vector<int> selected;
  std::vector<EdgeCost> transition_costs;  // one per consecutive pair
  // Weighted epipole-change term per selected triplet (second order only).
  std::vector<double> smoothness_costs;
  double total_cost = 0.0;
  Solver solver = Solver::kDagDp;
};

// Minimum-cost frame sequence under the first-order edge weights.
SamplingPlan solve_first_order(const MotionTrace& trace, const GraphSpec& spec);

// Frames offset, offset + skip, ... below n. No costs attached.
SamplingPlan uniform_plan(int n, int skip, int offset = 0);

// uniform_plan with transition costs filled from the trace. Transitions
// without a link get NaN components, and the total becomes NaN.
SamplingPlan uniform_plan(const MotionTrace& trace, const CostWeights& weights,
                          int skip, int offset = 0);

// Distance between the motion directions of (i, j) and (j, l).
// kMissingDirectionCost when either direction is missing; throws
// MiddleFrameMismatch unless first.dst == second.src.
double second_order_cost(const MotionLink& first, const MotionLink& second);

// Minimum-cost sequence over frame-pair nodes: each selected triplet
// (i, j, l) pays edge_cost(j, l).total + alpha2 * second_order_cost.
SamplingPlan solve_second_order(const MotionTrace& trace,
                                const GraphSpec& spec);

struct GraphSize {
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

GraphSize first_order_graph_size(const MotionTrace& trace,
                                 const GraphSpec& spec);
GraphSize second_order_graph_size(const MotionTrace& trace,
                                  const GraphSpec& spec);

}  // namespace lapse
