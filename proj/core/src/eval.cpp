#include "lapse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lapse/errors.hpp"

namespace lapse {

int median_skip(std::span<const int> selected) {
  if (selected.size() < 2) {
    throw std::invalid_argument("median skip needs at least two frames");
  }
  std::vector<int> gaps;
  gaps.reserve(selected.size() - 1);
  for (std::size_t k = 1; k < selected.size(); ++k) {
    gaps.push_back(selected[k] - selected[k - 1]);
  }
  const std::size_t mid = (gaps.size() - 1) / 2;
  std::nth_element(gaps.begin(), gaps.begin() + mid, gaps.end());
  return gaps[mid];
}

double epipole_jitter(const MotionTrace& trace, std::span<const int> selected) {
  std::vector<const MotionLink*> links;
  for (std::size_t k = 1; k < selected.size(); ++k) {
    const MotionLink* l = trace.link(selected[k - 1], selected[k]);
    if (l != nullptr && l->source == DirectionSource::kMissing) l = nullptr;
    links.push_back(l);
  }
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 1; k < links.size(); ++k) {
    if (links[k - 1] == nullptr || links[k] == nullptr) continue;
    sum += (links[k]->direction - links[k - 1]->direction).norm();
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

double jitter_improvement(double baseline_jitter, double plan_jitter,
                          ImprovementDenominator denominator) {
  const double diff = baseline_jitter - plan_jitter;
  if (diff == 0.0) return 0.0;
  const double denom = denominator == ImprovementDenominator::kPlan
                           ? plan_jitter
                           : baseline_jitter;
  if (denom == 0.0) {
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return 100.0 * diff / denom;
}

bool flow_heavy_tailed(const MotionTrace& trace, double ratio) {
  const int n = trace.frame_count();
  if (n < 2) return false;
  std::vector<double> flows;
  flows.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i) flows.push_back(trace.link(i, i + 1)->flow_sum);
  const std::size_t mid = (flows.size() - 1) / 2;
  std::nth_element(flows.begin(), flows.begin() + mid, flows.end());
  return trace.avg_flow() > ratio * flows[mid];
}

EvalReport eval_plan(const MotionTrace& trace, std::span<const int> selected,
                     const EvalOptions& options) {
  if (options.baseline_skip < 1) {
    throw std::invalid_argument("baseline skip must be >= 1");
  }
  for (std::size_t k = 0; k < selected.size(); ++k) {
    if (selected[k] < 0 || selected[k] >= trace.frame_count() ||
        (k > 0 && selected[k] <= selected[k - 1])) {
      throw InvariantError("plan frames must be increasing and inside the trace",
                           selected[k]);
    }
  }
  EvalReport r;
  r.median_skip = median_skip(selected);
  r.jitter_mean = epipole_jitter(trace, selected);
  const SamplingPlan base =
      uniform_plan(trace.frame_count(), options.baseline_skip, 0);
  r.baseline_jitter = epipole_jitter(trace, base.selected);
  r.jitter_improvement_pct =
      jitter_improvement(r.baseline_jitter, r.jitter_mean, options.denominator);
  r.jitter_not_improved = !(r.jitter_improvement_pct > 0.0);
  r.flow_heavy_tailed = flow_heavy_tailed(trace, options.heavy_tail_ratio);
  return r;
}

EvalReport eval_plan(const MotionTrace& trace, const SamplingPlan& plan,
                     const EvalOptions& options) {
  return eval_plan(trace, std::span<const int>(plan.selected), options);
}

EvalReport eval_panorama_plan(const MotionTrace& trace,
                              const PanoramaPlan& plan,
                              const EvalOptions& options) {
  std::vector<int> centers;
  for (std::size_t id : plan.selected) {
    centers.push_back(plan.panoramas.at(id).center);
  }
  EvalReport r = eval_plan(trace, centers, options);
  if (!plan.crop.empty()) {
    double sum = 0.0;
    for (const CropWindow& c : plan.crop) sum += c.width * c.height;
    const double frame_area =
        static_cast<double>(trace.width()) * trace.height();
    r.fov_ratio_pct = 100.0 * sum / plan.crop.size() / frame_area;
  }
  return r;
}

std::string epipole_csv(const MotionTrace& trace,
                        std::span<const int> selected) {
  std::ostringstream out;
  out.precision(17);
  out << "k,src,dst,dx,dy,source\n";
  for (std::size_t k = 1; k < selected.size(); ++k) {
    const MotionLink* l = trace.link(selected[k - 1], selected[k]);
    out << k - 1 << ',' << selected[k - 1] << ',' << selected[k] << ',';
    if (l == nullptr || l->source == DirectionSource::kMissing) {
      out << ",,none\n";
      continue;
    }
    out << l->direction.x() << ',' << l->direction.y() << ','
        << (l->source == DirectionSource::kFoe ? "foe" : "epi") << '\n';
  }
  return out.str();
}

}  // namespace lapse
