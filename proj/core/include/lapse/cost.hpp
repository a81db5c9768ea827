#pragma once

#include <limits>
#include <vector>

#include "lapse/trace.hpp"

namespace lapse {

// Shakiness assigned to links whose motion direction could not be estimated.
inline constexpr double kMissingDirectionCost = 1e6;

struct CostWeights {
  double alpha = 1000.0;      // shakiness
  double beta = 200.0;        // velocity
  double gamma = 3.0;         // appearance (frame graphs) or FOV (panoramas)
  double foe_penalty = 4.0;   // multiplier for FOE-derived directions
  double k_flow = 10.0;       // desired flow between consecutive outputs

  // Throws std::invalid_argument when a weight is negative or
  // foe_penalty < 1.
  void validate() const;

  // Defaults with k_flow = speedup * trace.avg_flow().
  static CostWeights for_trace(const MotionTrace& trace, double speedup = 10.0);
};

struct EdgeCost {
  double shakiness = 0.0;
  double velocity = 0.0;
  double appearance = 0.0;
  double total = 0.0;
};

// Distance of the motion direction from the image center; FOE directions are
// scaled by foe_penalty, missing ones cost kMissingDirectionCost.
double shakiness_cost(const MotionLink& link, const CostWeights& weights);

// (flow_sum - k_flow)^2. Requires k_flow > 0.
double velocity_cost(const MotionLink& link, const CostWeights& weights);

// Sum over channels of the 1-D earth mover's distance with unit ground
// distance between adjacent bins.
double appearance_cost(const ColorHistogram& a, const ColorHistogram& b);

// Throws MissingLink when the trace has no (i, j) link. The appearance term
// is zero for traces without histograms.
EdgeCost edge_cost(const MotionTrace& trace, int i, int j,
                   const CostWeights& weights);

// Dense table of edge totals for every link with 1 <= j - i <= tau.
// Absent links hold +infinity.
class EdgeCostTable {
 public:
  static constexpr double kAbsent = std::numeric_limits<double>::infinity();

  EdgeCostTable(const MotionTrace& trace, int tau, const CostWeights& weights);

  int frame_count() const { return n_; }
  int tau() const { return tau_; }

  double total(int i, int j) const {
    return totals_[static_cast<std::size_t>(i) * tau_ + (j - i - 1)];
  }
  bool present(int i, int j) const { return total(i, j) != kAbsent; }

 private:
  int n_;
  int tau_;
  std::vector<double> totals_;
};

}  // namespace lapse
