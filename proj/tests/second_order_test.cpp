#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "lapse/errors.hpp"
#include "lapse/sampling.hpp"
#include "lapse/synthetic.hpp"
#include "support.hpp"

namespace lapse {
namespace {

MotionLink dir_link(int i, int j, Vec2 d,
                    DirectionSource s = DirectionSource::kEpipole) {
  return {i, j, d, s, 1.0};
}

TEST(SecondOrderCost, Examples) {
  EXPECT_EQ(second_order_cost(dir_link(0, 1, {0.1, 0.1}),
                              dir_link(1, 2, {0.1, 0.1})),
            0.0);
  EXPECT_DOUBLE_EQ(second_order_cost(dir_link(0, 1, {0.3, 0}),
                                     dir_link(1, 2, {-0.3, 0})),
                   0.6);
  EXPECT_DOUBLE_EQ(second_order_cost(dir_link(0, 1, {0, 0.3}),
                                     dir_link(1, 2, {0.4, 0})),
                   0.5);
  EXPECT_EQ(second_order_cost(dir_link(0, 1, {0, 0}, DirectionSource::kMissing),
                              dir_link(1, 2, {0, 0})),
            kMissingDirectionCost);
  EXPECT_THROW(second_order_cost(dir_link(0, 1, {0, 0}), dir_link(2, 3, {0, 0})),
               MiddleFrameMismatch);
}

TEST(SecondOrder, AlternatingEpipolesStayOnOneSide) {
  SyntheticOptions o;
  o.kind = SyntheticKind::kAlternate;
  o.n = 15;
  o.max_skip = 3;
  const MotionTrace t = make_synthetic_trace(o);
  GraphSpec spec;
  spec.n = 15;
  spec.tau = 3;
  spec.d_start = spec.d_end = 1;
  spec.weights = CostWeights{1000, 0, 0, 4, 10};

  const SamplingPlan second = solve_second_order(t, spec);
  EXPECT_EQ(second.selected, (std::vector<int>{0, 2, 4, 6, 8, 10, 12, 14}));
  const auto brute = test::brute_second_order(t, spec);
  EXPECT_EQ(brute.nodes, second.selected);
  EXPECT_EQ(brute.cost, second.total_cost);

  // uniquely optimal: every other sequence costs strictly more
  GraphSpec check = spec;
  const double best = brute.cost;
  int at_best = 0;
  std::function<void(std::vector<int>&, double)> walk;
  walk = [&](std::vector<int>& path, double cost) {
    const int j = path.back();
    if (j == 14) {
      at_best += cost == best;
      return;
    }
    for (int l = j + 1; l <= std::min(14, j + 3); ++l) {
      double c = edge_cost(t, j, l, check.weights).total;
      if (path.size() >= 2) {
        c += 1000 * second_order_cost(*t.link(path[path.size() - 2], j),
                                      *t.link(j, l));
      }
      path.push_back(l);
      walk(path, cost + c);
      path.pop_back();
    }
  };
  std::vector<int> start{0};
  walk(start, 0.0);
  EXPECT_EQ(at_best, 1);

  // the first-order plan only sees equal shakiness and takes fewest edges,
  // crossing sides
  const SamplingPlan first = solve_first_order(t, spec);
  EXPECT_EQ(first.selected.size(), 6u);
  bool crosses = false;
  for (int f : first.selected) crosses |= f % 2 == 1;
  EXPECT_TRUE(crosses);
}

TEST(SecondOrder, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    test::RandomTraceOptions o;
    o.n = 10;
    o.max_skip = 3;
    o.grid = trial % 3 == 0 ? 4 : 0;
    const MotionTrace t = test::random_trace(rng, o);
    GraphSpec spec;
    spec.n = 10;
    spec.tau = 3;
    spec.d_start = spec.d_end = 1 + trial % 3;
    spec.weights.k_flow = 3;
    const auto expected = test::brute_second_order(t, spec);
    const SamplingPlan p = solve_second_order(t, spec);
    EXPECT_EQ(p.total_cost, expected.cost);
    EXPECT_EQ(p.selected, expected.nodes);
    EXPECT_EQ(p.smoothness_costs.size() + 2, p.selected.size());
  }
}

TEST(SecondOrder, ConstantEpipoleMatchesFirstOrder) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 1.8);
  std::vector<Vec2> gaze(60, Vec2(0.1, -0.2));
  std::vector<double> flow(60);
  for (double& f : flow) f = u(rng);
  const MotionTrace t = test::gaze_trace(gaze, flow, 8);
  GraphSpec spec;
  spec.n = 60;
  spec.tau = 8;
  spec.d_start = spec.d_end = 4;
  spec.weights.k_flow = 5;
  EXPECT_EQ(solve_second_order(t, spec).selected,
            solve_first_order(t, spec).selected);
}

TEST(SecondOrder, ZeroWeightReducesToFirstOrder) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    test::RandomTraceOptions o;
    o.n = 40;
    o.max_skip = 6;
    o.grid = trial % 2 ? 4 : 0;
    const MotionTrace t = test::random_trace(rng, o);
    GraphSpec spec;
    spec.n = 40;
    spec.tau = 6;
    spec.d_start = spec.d_end = 3;
    spec.weights.k_flow = 4;
    spec.alpha2 = 0.0;
    const SamplingPlan a = solve_first_order(t, spec);
    const SamplingPlan b = solve_second_order(t, spec);
    EXPECT_EQ(a.total_cost, b.total_cost);
    EXPECT_EQ(a.selected, b.selected);
  }
}

TEST(SecondOrder, SolversAgree) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    test::RandomTraceOptions o;
    o.n = 50;
    o.max_skip = 8;
    const MotionTrace t = test::random_trace(rng, o);
    GraphSpec spec;
    spec.n = 50;
    spec.tau = 8;
    spec.d_start = spec.d_end = 5;
    spec.weights.k_flow = 4;
    const SamplingPlan a = solve_second_order(t, spec);
    spec.solver = Solver::kDijkstra;
    const SamplingPlan b = solve_second_order(t, spec);
    EXPECT_EQ(a.total_cost, b.total_cost);
    EXPECT_EQ(a.selected, b.selected);
  }
}

TEST(SecondOrder, GraphSizeBounds) {
  std::mt19937_64 rng(6);
  test::RandomTraceOptions o;
  o.n = 200;
  o.max_skip = 10;
  const MotionTrace t = test::random_trace(rng, o);
  GraphSpec spec;
  spec.n = 200;
  spec.tau = 10;
  const GraphSize size = second_order_graph_size(t, spec);
  EXPECT_LE(size.nodes, 200u * 10);
  EXPECT_LE(size.edges, 200u * 10 * 10);
  EXPECT_EQ(size.nodes, t.link_count());
}

TEST(SecondOrder, RuntimeGrowsLinearlyInEdges) {
  std::vector<double> log_edges, log_ms;
  std::mt19937_64 rng(12);
  for (int n : {1000, 2000, 4000, 8000}) {
    test::RandomTraceOptions o;
    o.n = n;
    o.max_skip = 30;
    o.bins = 0;
    const MotionTrace t = test::random_trace(rng, o);
    GraphSpec spec;
    spec.n = n;
    spec.tau = 30;
    spec.d_start = spec.d_end = 30;
    spec.weights.k_flow = 20;
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const SamplingPlan p = solve_second_order(t, spec);
      const auto t1 = std::chrono::steady_clock::now();
      ASSERT_FALSE(p.selected.empty());
      best = std::min(best,
                      std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    log_edges.push_back(std::log(static_cast<double>(
        second_order_graph_size(t, spec).edges)));
    log_ms.push_back(std::log(best));
  }
  // least-squares slope of log time against log edges
  const double k = static_cast<double>(log_ms.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_ms.size(); ++i) {
    sx += log_edges[i];
    sy += log_ms[i];
    sxx += log_edges[i] * log_edges[i];
    sxy += log_edges[i] * log_ms[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  EXPECT_NEAR(slope, 1.0, 0.2);
}

}  // namespace
}  // namespace lapse
