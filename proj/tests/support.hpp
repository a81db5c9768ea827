#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "lapse/cost.hpp"
#include "lapse/sampling.hpp"
#include "lapse/trace.hpp"

namespace lapse::test {

struct RandomTraceOptions {
  int n = 12;
  int max_skip = 4;
  double p_absent = 0.1;   // chance a non-consecutive link is left out
  double p_missing = 0.05; // chance a link has no direction
  double p_foe = 0.15;
  int bins = 4;            // 0 for no histograms
  double flow_scale = 2.0;
  // Round directions and flows to this many steps per unit so that ties
  // between different paths actually happen. 0 keeps full precision.
  int grid = 0;
};

MotionTrace random_trace(std::mt19937_64& rng, const RandomTraceOptions& o);

ColorHistogram random_histogram(std::mt19937_64& rng, int bins);

// Trace with the given per-frame gaze and per-step flow; link (i, j) gets
// direction gaze[j] and the summed flow. No histograms.
MotionTrace gaze_trace(const std::vector<Vec2>& gaze,
                       const std::vector<double>& flow, int max_skip);

// Exhaustive search over node sequences of a DAG given as callbacks.
// Edge weights are added front to back starting from the source cost. The
// result is the cheapest sequence; ties go to the lexicographically smallest
// one. Sequences need at least min_edges edges.
struct BruteDag {
  int nodes = 0;
  std::function<std::optional<double>(int)> source;  // nullopt: not a source
  std::function<bool(int)> sink;
  std::function<std::optional<double>(int, int)> edge;  // nullopt: no edge
  int min_edges = 1;
};

struct BrutePath {
  std::vector<int> nodes;
  double cost = std::numeric_limits<double>::infinity();
  long long paths = 0;  // number of complete sequences examined
};

BrutePath brute_force(const BruteDag& g);

// First-order frame sampling by enumeration.
BrutePath brute_first_order(const MotionTrace& trace, const GraphSpec& spec);

// Second-order sampling by enumeration over frame sequences.
BrutePath brute_second_order(const MotionTrace& trace, const GraphSpec& spec);

}  // namespace lapse::test
