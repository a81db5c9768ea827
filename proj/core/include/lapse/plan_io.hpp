#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lapse/eval.hpp"
#include "lapse/multi_video.hpp"
#include "lapse/panorama.hpp"
#include "lapse/sampling.hpp"

namespace lapse {

// Frame-sampling plan:
//   {"video_id", "solver": "dag"|"dijkstra", "selected": [...],
//    "transitions": [{"i","j","shakiness","velocity","appearance","total"}],
//    "smoothness": [...], "total_cost"}
std::string format_sampling_plan(const SamplingPlan& plan);
SamplingPlan parse_sampling_plan(std::string_view json_text);
void save_sampling_plan(const SamplingPlan& plan,
                        const std::filesystem::path& path);
SamplingPlan load_sampling_plan(const std::filesystem::path& path);

// Panorama plan, as read by the renderer:
//   {"panoramas": [{"video","center","members","member_videos","sizes",
//                   "warps","fov","canvas"}],
//    "selected", "alignment": [{"theta","tx","ty","reset"}],
//    "crop": [{"cx","cy","w","h"}], "crop_w", "crop_h", "total_cost"}
std::string format_panorama_plan(const PanoramaPlan& plan);
PanoramaPlan parse_panorama_plan(std::string_view json_text);
void save_panorama_plan(const PanoramaPlan& plan,
                        const std::filesystem::path& path);
PanoramaPlan load_panorama_plan(const std::filesystem::path& path);

// {"metrics": {...}, "runtime_ms": {...}}. Everything under "metrics" is
// deterministic. Infinite improvements are written as null with
// "improvement_unbounded": true.
std::string format_report(const EvalReport& report);

// Raw correspondences: one {"a","b","matches":[{"fa","fb","count"}]} object
// or an array of them. A match may carry "H" (fb pixels -> fa pixels) and
// "tracked".
std::vector<RawCorrespondence> parse_correspondences(std::string_view json_text);
std::vector<RawCorrespondence> load_correspondences(
    const std::filesystem::path& path);
std::string format_correspondences(std::span<const RawCorrespondence> pairs);
void save_correspondences(std::span<const RawCorrespondence> pairs,
                          const std::filesystem::path& path);

}  // namespace lapse
