#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lapse/panorama.hpp"
#include "lapse/sampling.hpp"
#include "lapse/trace.hpp"

namespace lapse {

enum class ImprovementDenominator { kPlan, kBaseline };

struct EvalOptions {
  int baseline_skip = 10;
  ImprovementDenominator denominator = ImprovementDenominator::kPlan;
  // Mean consecutive flow above this multiple of the median marks the
  // trace as dominated by a few large motions (head flicks and the like).
  double heavy_tail_ratio = 5.0;
};

struct EvalReport {
  int median_skip = 0;
  double jitter_mean = 0.0;
  double baseline_jitter = 0.0;
  // +-infinity when the denominator jitter is zero but the numerator is not.
  double jitter_improvement_pct = 0.0;
  std::optional<double> fov_ratio_pct;  // panorama plans only
  bool flow_heavy_tailed = false;
  bool jitter_not_improved = false;
  // Wall-clock per stage. Not deterministic, kept apart when serialized.
  std::vector<std::pair<std::string, double>> runtime_ms;
};

// Lower median of the consecutive gaps. Needs at least two frames.
int median_skip(std::span<const int> selected);

// Mean |d_{k+1} - d_k| over consecutive transitions, where d_k is the motion
// direction of the link selected[k] -> selected[k+1]. Transitions without a
// link or with a missing direction are skipped, as is any difference that
// touches them. 0 with fewer than two usable transitions.
double epipole_jitter(const MotionTrace& trace, std::span<const int> selected);

// 100 * (baseline - plan) / denominator.
double jitter_improvement(double baseline_jitter, double plan_jitter,
                          ImprovementDenominator denominator);

// True when mean consecutive flow exceeds ratio times its median.
bool flow_heavy_tailed(const MotionTrace& trace, double ratio);

EvalReport eval_plan(const MotionTrace& trace, std::span<const int> selected,
                     const EvalOptions& options = {});
EvalReport eval_plan(const MotionTrace& trace, const SamplingPlan& plan,
                     const EvalOptions& options = {});

// Frame metrics over the selected centers plus the mean crop area relative
// to the frame area. Assumes every selected panorama is from `trace`.
EvalReport eval_panorama_plan(const MotionTrace& trace,
                              const PanoramaPlan& plan,
                              const EvalOptions& options = {});

// One row per transition: k,src,dst,dx,dy,source.
std::string epipole_csv(const MotionTrace& trace,
                        std::span<const int> selected);

}  // namespace lapse
