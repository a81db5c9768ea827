#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lapse/cost.hpp"
#include "lapse/coverage.hpp"
#include "lapse/dag.hpp"
#include "lapse/geometry.hpp"
#include "lapse/trace.hpp"

namespace lapse {

// Mean feature displacement of each frame of a window relative to the
// window's first frame.
struct DisplacementTrack {
  int start = 0;
  std::vector<Vec2> pos;  // pos[0] == (0, 0)
};

// Index into `pos` of the entry closest to the mean of `pos`; ties go to
// the earlier entry.
std::size_t central_offset(std::span<const Vec2> pos);

// Tracks for the non-overlapping windows [0, omega), [omega, 2*omega), ...
// A window is split wherever the consecutive homography is missing or
// untracked. Displacement is measured as the motion of the frame center
// under the chained homography from the track start.
std::vector<DisplacementTrack> displacement_tracks(const MotionTrace& trace,
                                                   int omega);

// One central frame per track of displacement_tracks.
std::vector<int> select_central_frames(const MotionTrace& trace, int omega);

struct PanoramaMember {
  int video = 0;
  int frame = 0;
  int width = 0;
  int height = 0;
  Mat3 warp = Mat3::Identity();  // member pixels -> center pixels
};

struct PanoramaCandidate {
  int video = 0;
  int center = 0;
  std::vector<PanoramaMember> members;  // members[0] is the center itself
  double fov_pixels = 0.0;
  Box canvas;  // bounding box of the warped members, center coordinates

  const PanoramaMember& center_member() const { return members.front(); }
};

// The frames [center - (omega-1)/2, center + omega/2] clipped to the video,
// warped into the center frame. Members whose chained homography is lost
// are left out.
PanoramaCandidate build_candidate(const MotionTrace& trace, int center,
                                  int omega, int video = 0);

// Recomputes fov_pixels and canvas from the members' warps: the union of the
// warped frame outlines rasterized at 1/4 scale, never below the center
// frame's own area.
void measure_candidate(PanoramaCandidate& candidate);

std::vector<Quad> member_quads(const PanoramaCandidate& candidate);

// How the FOV term enters the edge weight. kDeficit charges
// (FOV_max - FOV_p) / FOV_max so wide panoramas are preferred; kLiteral
// charges FOV_p itself.
enum class FovMode { kDeficit, kLiteral };

struct PanoramaSamplingOptions {
  int tau = 100;
  int d_start = 120;
  int d_end = 120;
  FovMode fov_mode = FovMode::kDeficit;
  Solver solver = Solver::kDagDp;
};

struct PanoramaSelection {
  std::vector<std::size_t> selected;  // indices into the candidate list
  double total_cost = 0.0;
};

// FOV cost of every candidate under the given mode (before gamma).
std::vector<double> fov_costs(std::span<const PanoramaCandidate> candidates,
                              FovMode mode);

// Shortest path over candidates ordered by center frame. The edge p -> q
// pays alpha * S + beta * V between the two centers plus gamma times q's
// FOV cost; the first panorama's FOV cost is its source edge.
PanoramaSelection solve_panorama_sampling(
    std::span<const PanoramaCandidate> candidates, const MotionTrace& trace,
    const CostWeights& weights, const PanoramaSamplingOptions& options);

// Rotation theta followed by translation (tx, ty), acting on coordinates
// centered at the image center.
struct RigidAlignment {
  double theta = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  bool reset = false;

  Mat3 matrix() const;
};

// Least-squares rotation + translation matching the homography's action on
// the four frame corners. An absent or untracked homography gives the
// identity with reset set.
RigidAlignment align_rigid(const std::optional<Mat3>& next_to_prev, int width,
                           int height);
RigidAlignment align_rigid(const HomographyLink& next_to_prev, int width,
                           int height);

struct CropWindow {
  Vec2 center = Vec2::Zero();
  double width = 0.0;
  double height = 0.0;
};

struct PanoramaPlan {
  std::vector<PanoramaCandidate> panoramas;  // every candidate
  std::vector<std::size_t> selected;
  std::vector<RigidAlignment> alignment;  // per selected, w.r.t. previous
  std::vector<CropWindow> crop;           // per selected, canvas coordinates
  double crop_width = 0.0;                // smallest crop over all segments
  double crop_height = 0.0;
  double total_cost = 0.0;
};

struct PanoramaPlanOptions {
  int omega = 50;
  double lambda = 15.0;
  CostWeights weights{1e7, 5e6, 1.0, 4.0, 10.0};
  PanoramaSamplingOptions sampling;
};

// Homography from the next selected center's pixels into the previous
// selected center's pixels, or nullopt when tracking was lost.
using CenterHomography = std::function<std::optional<Mat3>(
    const PanoramaCandidate& prev, const PanoramaCandidate& next)>;

// Aligns consecutive selected panoramas rigidly, places them on a shared
// canvas (restarting at the canvas origin after each reset), and solves the
// crop path per reset segment.
PanoramaPlan assemble_panorama_plan(std::vector<PanoramaCandidate> candidates,
                                    const PanoramaSelection& selection,
                                    const CenterHomography& center_homography,
                                    double lambda);

// Coverage of one selected panorama on the canvas, given its placement.
CoverageMask placed_coverage(const PanoramaCandidate& candidate,
                             const Mat3& placement);

// Single-video pipeline: central frames, candidates, sampling, alignment,
// crop.
PanoramaPlan plan_panoramas(const MotionTrace& trace,
                            const PanoramaPlanOptions& options);

}  // namespace lapse
