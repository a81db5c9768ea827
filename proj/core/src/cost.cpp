#include "lapse/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "lapse/errors.hpp"
#include "parallel.hpp"

namespace lapse {

void CostWeights::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
    throw std::invalid_argument("cost weights must be non-negative");
  }
  if (!(foe_penalty >= 1.0)) {
    throw std::invalid_argument("foe penalty must be at least 1");
  }
  if (!(k_flow > 0.0)) {
    throw std::invalid_argument("k_flow must be positive");
  }
}

CostWeights CostWeights::for_trace(const MotionTrace& trace, double speedup) {
  CostWeights w;
  w.k_flow = speedup * trace.avg_flow();
  return w;
}

double shakiness_cost(const MotionLink& link, const CostWeights& weights) {
  switch (link.source) {
    case DirectionSource::kEpipole:
      return link.direction.norm();
    case DirectionSource::kFoe:
      return weights.foe_penalty * link.direction.norm();
    case DirectionSource::kMissing:
      break;
  }
  return kMissingDirectionCost;
}

double velocity_cost(const MotionLink& link, const CostWeights& weights) {
  const double d = link.flow_sum - weights.k_flow;
  return d * d;
}

double appearance_cost(const ColorHistogram& a, const ColorHistogram& b) {
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto ca = a.channel(c);
    const auto cb = b.channel(c);
    double cdf_a = 0.0;
    double cdf_b = 0.0;
    for (std::size_t k = 0; k < ca.size(); ++k) {
      cdf_a += ca[k];
      cdf_b += cb[k];
      total += std::abs(cdf_a - cdf_b);
    }
  }
  return total;
}

EdgeCost edge_cost(const MotionTrace& trace, int i, int j,
                   const CostWeights& weights) {
  const MotionLink* link = trace.link(i, j);
  if (link == nullptr) throw MissingLink(i, j);
  EdgeCost cost;
  cost.shakiness = shakiness_cost(*link, weights);
  cost.velocity = velocity_cost(*link, weights);
  if (trace.has_histograms()) {
    cost.appearance = appearance_cost(*trace.histogram(i), *trace.histogram(j));
  }
  cost.total = weights.alpha * cost.shakiness + weights.beta * cost.velocity +
               weights.gamma * cost.appearance;
  return cost;
}

EdgeCostTable::EdgeCostTable(const MotionTrace& trace, int tau,
                             const CostWeights& weights)
    : n_(trace.frame_count()), tau_(tau) {
  weights.validate();
  if (tau < 1) throw std::invalid_argument("tau must be at least 1");
  totals_.assign(static_cast<std::size_t>(n_) * tau_, kAbsent);
  detail::parallel_for(n_, [&](int i) {
    for (int k = 1; k <= tau_ && i + k < n_; ++k) {
      if (trace.link(i, i + k) == nullptr) continue;
      totals_[static_cast<std::size_t>(i) * tau_ + (k - 1)] =
          edge_cost(trace, i, i + k, weights).total;
    }
  });
}

}  // namespace lapse
