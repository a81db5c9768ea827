#include "lapse/panorama.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Geometry>

#include "lapse/crop.hpp"
#include "lapse/errors.hpp"
#include "parallel.hpp"

namespace lapse {

namespace {

constexpr double kNoSource = std::numeric_limits<double>::infinity();

Vec2 frame_center(int width, int height) {
  return Vec2(0.5 * width, 0.5 * height);
}

// Candidate DAG for one video: nodes are candidate indices sorted by center.
class CandidateGraph {
 public:
  CandidateGraph(std::span<const PanoramaCandidate> candidates,
                 const MotionTrace& trace, const CostWeights& weights,
                 const PanoramaSamplingOptions& options)
      : order_(candidates.size()), fov_(fov_costs(candidates, options.fov_mode)) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) {
                       return candidates[a].center < candidates[b].center;
                     });
    for (std::size_t v : order_) centers_.push_back(candidates[v].center);
    const int first = centers_.empty() ? 0 : centers_.front();
    const int last = centers_.empty() ? 0 : centers_.back();

    const std::size_t n = order_.size();
    succ_.resize(n);
    pred_.resize(n);
    source_.assign(n, kNoSource);
    sink_.assign(n, false);
    for (std::size_t v = 0; v < n; ++v) {
      const double fov_v = weights.gamma * fov_[order_[v]];
      if (centers_[v] < first + options.d_start) source_[v] = fov_v;
      sink_[v] = centers_[v] > last - options.d_end;
      for (std::size_t u = v + 1; u < n; ++u) {
        const int gap = centers_[u] - centers_[v];
        if (gap > options.tau) break;
        if (gap < 1) continue;
        const MotionLink* link = trace.link(centers_[v], centers_[u]);
        if (link == nullptr) continue;
        const double w = weights.alpha * shakiness_cost(*link, weights) +
                         weights.beta * velocity_cost(*link, weights) +
                         weights.gamma * fov_[order_[u]];
        succ_[v].emplace_back(u, w);
        pred_[u].emplace_back(v, w);
      }
    }
  }

  std::size_t node_count() const { return order_.size(); }
  double source_cost(std::size_t v) const { return source_[v]; }
  bool is_sink(std::size_t v) const { return sink_[v]; }
  template <class F>
  void for_each_successor(std::size_t v, F&& f) const {
    for (const auto& [u, w] : succ_[v]) f(u, w);
  }
  template <class F>
  void for_each_predecessor(std::size_t u, F&& f) const {
    for (const auto& [v, w] : pred_[u]) f(v, w);
  }
  std::size_t candidate(std::size_t v) const { return order_[v]; }

 private:
  std::vector<std::size_t> order_;
  std::vector<int> centers_;
  std::vector<double> fov_;
  std::vector<std::vector<std::pair<std::size_t, double>>> succ_;
  std::vector<std::vector<std::pair<std::size_t, double>>> pred_;
  std::vector<double> source_;
  std::vector<bool> sink_;
};

}  // namespace

std::size_t central_offset(std::span<const Vec2> pos) {
  if (pos.empty()) throw std::invalid_argument("empty displacement track");
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pos) mean += p;
  mean /= static_cast<double>(pos.size());
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < pos.size(); ++t) {
    const double d = (pos[t] - mean).norm();
    if (d < best_dist) {
      best_dist = d;
      best = t;
    }
  }
  return best;
}

std::vector<DisplacementTrack> displacement_tracks(const MotionTrace& trace,
                                                   int omega) {
  if (omega < 1) throw std::invalid_argument("omega must be at least 1");
  const int n = trace.frame_count();
  const Vec2 c = frame_center(trace.width(), trace.height());
  std::vector<DisplacementTrack> tracks;
  for (int start = 0; start < n; start += omega) {
    const int end = std::min(n, start + omega);
    DisplacementTrack track{start, {Vec2::Zero()}};
    Mat3 acc = Mat3::Identity();  // track start -> current frame
    for (int t = start + 1; t < end; ++t) {
      const auto step = trace.chain(t - 1, t);
      if (!step) {
        tracks.push_back(std::move(track));
        track = DisplacementTrack{t, {Vec2::Zero()}};
        acc = Mat3::Identity();
        continue;
      }
      acc = *step * acc;
      const auto moved = apply_homography(acc, c);
      if (!moved) {
        tracks.push_back(std::move(track));
        track = DisplacementTrack{t, {Vec2::Zero()}};
        acc = Mat3::Identity();
        continue;
      }
      track.pos.push_back(*moved - c);
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

std::vector<int> select_central_frames(const MotionTrace& trace, int omega) {
  std::vector<int> centers;
  for (const DisplacementTrack& track : displacement_tracks(trace, omega)) {
    centers.push_back(track.start +
                      static_cast<int>(central_offset(track.pos)));
  }
  return centers;
}

std::vector<Quad> member_quads(const PanoramaCandidate& candidate) {
  std::vector<Quad> quads;
  quads.reserve(candidate.members.size());
  for (const PanoramaMember& m : candidate.members) {
    if (auto q = warp_frame_corners(m.warp, m.width, m.height)) {
      quads.push_back(*q);
    }
  }
  return quads;
}

void measure_candidate(PanoramaCandidate& candidate) {
  const std::vector<Quad> quads = member_quads(candidate);
  candidate.canvas = bounding_box(quads);
  const PanoramaMember& center = candidate.center_member();
  candidate.fov_pixels =
      std::max(union_area(quads),
               static_cast<double>(center.width) * center.height);
}

PanoramaCandidate build_candidate(const MotionTrace& trace, int center,
                                  int omega, int video) {
  const int n = trace.frame_count();
  if (center < 0 || center >= n) {
    throw std::invalid_argument("panorama center out of range");
  }
  PanoramaCandidate cand;
  cand.video = video;
  cand.center = center;
  cand.members.push_back(
      {video, center, trace.width(), trace.height(), Mat3::Identity()});
  const int lo = std::max(0, center - (omega - 1) / 2);
  const int hi = std::min(n - 1, center + omega / 2);
  for (int f = lo; f <= hi; ++f) {
    if (f == center) continue;
    const auto warp = trace.chain(f, center);
    if (!warp) continue;
    if (!warp_frame_corners(*warp, trace.width(), trace.height())) continue;
    cand.members.push_back({video, f, trace.width(), trace.height(), *warp});
  }
  measure_candidate(cand);
  return cand;
}

std::vector<double> fov_costs(std::span<const PanoramaCandidate> candidates,
                              FovMode mode) {
  std::vector<double> out;
  out.reserve(candidates.size());
  double fov_max = 0.0;
  for (const auto& c : candidates) fov_max = std::max(fov_max, c.fov_pixels);
  for (const auto& c : candidates) {
    if (mode == FovMode::kLiteral) {
      out.push_back(c.fov_pixels);
    } else {
      out.push_back(fov_max > 0.0 ? (fov_max - c.fov_pixels) / fov_max : 0.0);
    }
  }
  return out;
}

PanoramaSelection solve_panorama_sampling(
    std::span<const PanoramaCandidate> candidates, const MotionTrace& trace,
    const CostWeights& weights, const PanoramaSamplingOptions& options) {
  weights.validate();
  if (options.tau < 1 || options.d_start < 1 || options.d_end < 1) {
    throw std::invalid_argument("tau, d_start and d_end must be positive");
  }
  if (candidates.empty()) throw NoPath("no panorama candidates");
  const CandidateGraph graph(candidates, trace, weights, options);
  const int min_edges = candidates.size() > 1 ? 1 : 0;
  const auto path = shortest_path(graph, options.solver, min_edges);
  if (!path) {
    throw NoPath("no path through the panorama candidates of " +
                 trace.video_id());
  }
  PanoramaSelection sel;
  for (std::size_t v : path->nodes) sel.selected.push_back(graph.candidate(v));
  sel.total_cost = path->cost;
  return sel;
}

Mat3 RigidAlignment::matrix() const {
  return translation(tx, ty) * rotation(theta);
}

RigidAlignment align_rigid(const std::optional<Mat3>& next_to_prev, int width,
                           int height) {
  RigidAlignment identity;
  identity.reset = true;
  if (!next_to_prev) return identity;
  const auto quad = warp_frame_corners(*next_to_prev, width, height);
  if (!quad) return identity;

  const Vec2 c = frame_center(width, height);
  const Quad corners = {Vec2(0, 0), Vec2(width, 0), Vec2(width, height),
                        Vec2(0, height)};
  Vec2 p_mean = Vec2::Zero();
  Vec2 q_mean = Vec2::Zero();
  for (std::size_t k = 0; k < 4; ++k) {
    p_mean += corners[k] - c;
    q_mean += (*quad)[k] - c;
  }
  p_mean /= 4.0;
  q_mean /= 4.0;
  double dot = 0.0;
  double cross = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const Vec2 p = corners[k] - c - p_mean;
    const Vec2 q = (*quad)[k] - c - q_mean;
    dot += p.dot(q);
    cross += p.x() * q.y() - p.y() * q.x();
  }
  RigidAlignment out;
  out.theta = std::atan2(cross, dot);
  const Vec2 t = q_mean - Eigen::Rotation2Dd(out.theta) * p_mean;
  out.tx = t.x();
  out.ty = t.y();
  return out;
}

RigidAlignment align_rigid(const HomographyLink& next_to_prev, int width,
                           int height) {
  if (!next_to_prev.tracked) return align_rigid(std::nullopt, width, height);
  return align_rigid(std::optional<Mat3>(next_to_prev.h), width, height);
}

CoverageMask placed_coverage(const PanoramaCandidate& candidate,
                             const Mat3& placement) {
  const PanoramaMember& center = candidate.center_member();
  const Mat3 to_canvas =
      placement *
      translation(-0.5 * center.width, -0.5 * center.height);
  std::vector<Quad> quads;
  for (const PanoramaMember& m : candidate.members) {
    if (auto q = warp_frame_corners(to_canvas * m.warp, m.width, m.height)) {
      quads.push_back(*q);
    }
  }
  return CoverageMask::rasterize(quads);
}

PanoramaPlan assemble_panorama_plan(std::vector<PanoramaCandidate> candidates,
                                    const PanoramaSelection& selection,
                                    const CenterHomography& center_homography,
                                    double lambda) {
  PanoramaPlan plan;
  plan.panoramas = std::move(candidates);
  plan.selected = selection.selected;
  plan.total_cost = selection.total_cost;
  const std::size_t count = plan.selected.size();
  if (count == 0) return plan;

  std::vector<Mat3> placement(count, Mat3::Identity());
  for (std::size_t k = 0; k < count; ++k) {
    const PanoramaCandidate& next = plan.panoramas[plan.selected[k]];
    RigidAlignment a;
    a.reset = true;
    if (k > 0) {
      const PanoramaCandidate& prev = plan.panoramas[plan.selected[k - 1]];
      const PanoramaMember& c = next.center_member();
      a = align_rigid(center_homography(prev, next), c.width, c.height);
      if (!a.reset) placement[k] = placement[k - 1] * a.matrix();
    }
    plan.alignment.push_back(a);
  }

  std::vector<CoverageMask> masks(count);
  detail::parallel_for(static_cast<int>(count), [&](int k) {
    masks[k] = placed_coverage(plan.panoramas[plan.selected[k]], placement[k]);
  });

  plan.crop.resize(count);
  plan.crop_width = std::numeric_limits<double>::infinity();
  plan.crop_height = std::numeric_limits<double>::infinity();
  std::size_t begin = 0;
  while (begin < count) {
    std::size_t end = begin + 1;
    while (end < count && !plan.alignment[end].reset) ++end;
    std::vector<Vec2> mass;
    std::vector<int> ids;
    for (std::size_t k = begin; k < end; ++k) {
      mass.push_back(masks[k].centroid());
      ids.push_back(plan.panoramas[plan.selected[k]].center);
    }
    const PanoramaMember& c = plan.panoramas[plan.selected[begin]].center_member();
    const double aspect = static_cast<double>(c.width) / c.height;
    const CropPath path = solve_crop_path(
        mass, lambda, std::span(masks).subspan(begin, end - begin), aspect,
        ids);
    for (std::size_t k = begin; k < end; ++k) {
      plan.crop[k] = {path.centers[k - begin], path.width, path.height};
    }
    plan.crop_width = std::min(plan.crop_width, path.width);
    plan.crop_height = std::min(plan.crop_height, path.height);
    begin = end;
  }
  return plan;
}

PanoramaPlan plan_panoramas(const MotionTrace& trace,
                            const PanoramaPlanOptions& options) {
  const std::vector<int> centers = select_central_frames(trace, options.omega);
  std::vector<PanoramaCandidate> candidates(centers.size());
  detail::parallel_for(static_cast<int>(centers.size()), [&](int k) {
    candidates[k] = build_candidate(trace, centers[k], options.omega);
  });
  const PanoramaSelection selection = solve_panorama_sampling(
      candidates, trace, options.weights, options.sampling);
  const CenterHomography homography = [&trace](const PanoramaCandidate& prev,
                                               const PanoramaCandidate& next) {
    return trace.chain(next.center, prev.center);
  };
  return assemble_panorama_plan(std::move(candidates), selection, homography,
                                options.lambda);
}

}  // namespace lapse
