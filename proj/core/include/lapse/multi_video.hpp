#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapse/cost.hpp"
#include "lapse/panorama.hpp"
#include "lapse/trace.hpp"

namespace lapse {

// Frame pairs sharing fewer matched features than this do not overlap.
inline constexpr int kMinMatchCount = 10;

// One candidate match reported by the extractor: frame_a of video a against
// frame_b of video b. `b_to_a` maps frame_b pixels into frame_a.
struct RawMatch {
  int frame_a = 0;
  int frame_b = 0;
  int count = 0;
  std::optional<Mat3> b_to_a;
};

struct RawCorrespondence {
  std::string video_a;
  std::string video_b;
  std::vector<RawMatch> matches;
};

struct FrameMatch {
  int frame_b = 0;
  int count = 0;
  std::optional<Mat3> b_to_a;
};

// Finalized matches for one ordered video pair, keyed by frame_a. Retained
// entries have count >= kMinMatchCount and frame_b non-decreasing in frame_a.
struct PairCorrespondence {
  std::string video_a;
  std::string video_b;
  std::map<int, FrameMatch> entries;
  std::vector<RawMatch> raw;

  const FrameMatch* find(int frame_a) const;
  bool monotone() const;
};

class CorrespondenceTable {
 public:
  void add(PairCorrespondence pair);
  const PairCorrespondence* find(std::string_view video_a,
                                 std::string_view video_b) const;
  bool empty() const { return pairs_.empty(); }
  const std::vector<PairCorrespondence>& pairs() const { return pairs_; }

 private:
  std::vector<PairCorrespondence> pairs_;
};

// Keeps, per frame_a, the candidate with the most matches (ties to the
// smaller frame_b); drops it when below kMinMatchCount; then sweeps frame_a
// upward dropping any entry whose frame_b precedes the last retained one.
PairCorrespondence finalize_correspondence(const RawCorrespondence& raw);
CorrespondenceTable finalize_correspondences(
    std::span<const RawCorrespondence> raw);

// Candidates for every video. Central frames are chosen per video; each
// own-video member then pulls in its corresponding frames from the other
// videos, warped through the chain other -> member -> center. Members of
// other videos without a homography are left out.
std::vector<PanoramaCandidate> build_multi_candidates(
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    int omega);

// How candidates from different videos are put in one order.
// kCorrespondence maps centers into the first video's frame numbers through
// the finalized matches; kTimestamp uses capture time expressed in the first
// video's frames.
enum class Timeline { kCorrespondence, kTimestamp };

struct MultiSamplingOptions {
  PanoramaSamplingOptions sampling;
  // Additive switching penalty as a multiple of the edge's own weight.
  // Infinity removes cross-video edges.
  double cross_multiplier = 2.0;
  Timeline timeline = Timeline::kCorrespondence;
};

struct MultiSelection {
  std::vector<std::size_t> selected;
  double total_cost = 0.0;
  int switches = 0;
};

// Position of each candidate's center on the shared timeline.
std::vector<double> timeline_positions(
    std::span<const PanoramaCandidate> candidates,
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    Timeline timeline);

// Shortest path over the merged candidate DAG. Same-video edges are exactly
// those of solve_panorama_sampling. A cross-video edge p -> q takes its
// motion link inside q's video, from the frame matched to p's center up to
// q's center, requires the timeline gap to be in (0, tau], and pays
// (1 + cross_multiplier) times its weight.
MultiSelection solve_multi_sampling(
    std::span<const PanoramaCandidate> candidates,
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    const CostWeights& weights, const MultiSamplingOptions& options);

// Homography from next's center pixels into prev's center pixels, possibly
// across videos through a correspondence.
std::optional<Mat3> cross_center_homography(
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    const PanoramaCandidate& prev, const PanoramaCandidate& next);

struct MultiPlanOptions {
  int omega = 50;
  double lambda = 15.0;
  CostWeights weights{1e7, 5e6, 1.0, 4.0, 10.0};
  MultiSamplingOptions sampling;
};

PanoramaPlan plan_multi_panoramas(std::span<const MotionTrace> traces,
                                  const CorrespondenceTable& table,
                                  const MultiPlanOptions& options);

}  // namespace lapse
