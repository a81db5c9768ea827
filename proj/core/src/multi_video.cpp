#include "lapse/multi_video.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include <Eigen/LU>

#include "lapse/errors.hpp"
#include "parallel.hpp"

namespace lapse {

namespace {

constexpr double kNoSource = std::numeric_limits<double>::infinity();

// Merged candidate DAG over all videos, nodes in timeline order.
class MergedGraph {
 public:
  MergedGraph(std::span<const PanoramaCandidate> candidates,
              std::span<const MotionTrace> traces,
              const CorrespondenceTable& table, const CostWeights& weights,
              const MultiSamplingOptions& options)
      : order_(candidates.size()) {
    const auto& sampling = options.sampling;
    const std::vector<double> fov = fov_costs(candidates, sampling.fov_mode);
    const std::vector<double> pos =
        timeline_positions(candidates, traces, table, options.timeline);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) {
                       const auto& ca = candidates[a];
                       const auto& cb = candidates[b];
                       return std::tie(pos[a], ca.video, ca.center) <
                              std::tie(pos[b], cb.video, cb.center);
                     });
    const std::size_t n = order_.size();
    pos_.resize(n);
    for (std::size_t v = 0; v < n; ++v) pos_[v] = pos[order_[v]];
    const double first = n ? pos_.front() : 0.0;
    const double last = n ? pos_.back() : 0.0;
    const double tau = sampling.tau;
    const bool allow_cross = std::isfinite(options.cross_multiplier);

    succ_.resize(n);
    pred_.resize(n);
    source_.assign(n, kNoSource);
    sink_.assign(n, false);
    for (std::size_t v = 0; v < n; ++v) {
      const PanoramaCandidate& p = candidates[order_[v]];
      if (pos_[v] < first + sampling.d_start) {
        source_[v] = weights.gamma * fov[order_[v]];
      }
      sink_[v] = pos_[v] > last - sampling.d_end;
      for (std::size_t u = v + 1; u < n; ++u) {
        const PanoramaCandidate& q = candidates[order_[u]];
        const double fov_q = weights.gamma * fov[order_[u]];
        if (q.video == p.video) {
          const int gap = q.center - p.center;
          if (gap < 1 || gap > sampling.tau) continue;
          const MotionLink* link = traces[p.video].link(p.center, q.center);
          if (link == nullptr) continue;
          const double w = weights.alpha * shakiness_cost(*link, weights) +
                           weights.beta * velocity_cost(*link, weights) +
                           fov_q;
          add_edge(v, u, w);
          continue;
        }
        if (!allow_cross) continue;
        const double gap = pos_[u] - pos_[v];
        if (!(gap > 0.0) || gap > tau) continue;
        const PairCorrespondence* pair = table.find(
            traces[p.video].video_id(), traces[q.video].video_id());
        if (pair == nullptr) continue;
        const FrameMatch* match = pair->find(p.center);
        if (match == nullptr) continue;
        const MotionLink* link = traces[q.video].link(match->frame_b, q.center);
        if (link == nullptr) continue;
        const double w = weights.alpha * shakiness_cost(*link, weights) +
                         weights.beta * velocity_cost(*link, weights) + fov_q;
        add_edge(v, u, w + options.cross_multiplier * w);
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

  // Furthest timeline position reachable from a source node.
  double reach() const {
    std::vector<bool> seen(order_.size(), false);
    double furthest = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < order_.size(); ++v) {
      if (source_[v] != kNoSource) seen[v] = true;
      if (!seen[v]) continue;
      furthest = std::max(furthest, pos_[v]);
      for (const auto& [u, w] : succ_[v]) seen[u] = true;
    }
    return furthest;
  }

 private:
  void add_edge(std::size_t v, std::size_t u, double w) {
    succ_[v].emplace_back(u, w);
    pred_[u].emplace_back(v, w);
  }

  std::vector<std::size_t> order_;
  std::vector<double> pos_;
  std::vector<std::vector<std::pair<std::size_t, double>>> succ_;
  std::vector<std::vector<std::pair<std::size_t, double>>> pred_;
  std::vector<double> source_;
  std::vector<bool> sink_;
};

// Piecewise-linear map of a monotone correspondence, slope 1 outside the
// matched range.
double map_through(const PairCorrespondence& pair, double frame) {
  const auto& e = pair.entries;
  auto hi = e.lower_bound(static_cast<int>(std::ceil(frame)));
  if (hi == e.begin()) return hi->second.frame_b + (frame - hi->first);
  if (hi == e.end()) {
    const auto lo = std::prev(hi);
    return lo->second.frame_b + (frame - lo->first);
  }
  if (hi->first == frame) return hi->second.frame_b;
  const auto lo = std::prev(hi);
  const double t = (frame - lo->first) / (hi->first - lo->first);
  return lo->second.frame_b + t * (hi->second.frame_b - lo->second.frame_b);
}

}  // namespace

const FrameMatch* PairCorrespondence::find(int frame_a) const {
  auto it = entries.find(frame_a);
  return it == entries.end() ? nullptr : &it->second;
}

bool PairCorrespondence::monotone() const {
  int last = std::numeric_limits<int>::min();
  for (const auto& [a, m] : entries) {
    if (m.frame_b < last || m.count < kMinMatchCount) return false;
    last = m.frame_b;
  }
  return true;
}

void CorrespondenceTable::add(PairCorrespondence pair) {
  if (find(pair.video_a, pair.video_b) != nullptr) {
    throw InvariantError("duplicate correspondence for " + pair.video_a +
                         " -> " + pair.video_b);
  }
  pairs_.push_back(std::move(pair));
}

const PairCorrespondence* CorrespondenceTable::find(
    std::string_view video_a, std::string_view video_b) const {
  for (const auto& p : pairs_) {
    if (p.video_a == video_a && p.video_b == video_b) return &p;
  }
  return nullptr;
}

PairCorrespondence finalize_correspondence(const RawCorrespondence& raw) {
  PairCorrespondence out;
  out.video_a = raw.video_a;
  out.video_b = raw.video_b;
  out.raw = raw.matches;

  std::map<int, const RawMatch*> best;
  for (const RawMatch& m : raw.matches) {
    auto [it, inserted] = best.emplace(m.frame_a, &m);
    if (inserted) continue;
    const RawMatch& cur = *it->second;
    if (m.count > cur.count ||
        (m.count == cur.count && m.frame_b < cur.frame_b)) {
      it->second = &m;
    }
  }
  int last_b = std::numeric_limits<int>::min();
  for (const auto& [frame_a, m] : best) {
    if (m->count < kMinMatchCount) continue;
    if (m->frame_b < last_b) continue;
    out.entries.emplace(frame_a, FrameMatch{m->frame_b, m->count, m->b_to_a});
    last_b = m->frame_b;
  }
  return out;
}

CorrespondenceTable finalize_correspondences(
    std::span<const RawCorrespondence> raw) {
  std::vector<PairCorrespondence> pairs(raw.size());
  detail::parallel_for(static_cast<int>(raw.size()),
                       [&](int k) { pairs[k] = finalize_correspondence(raw[k]); });
  CorrespondenceTable table;
  for (auto& p : pairs) table.add(std::move(p));
  return table;
}

std::vector<PanoramaCandidate> build_multi_candidates(
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    int omega) {
  std::vector<PanoramaCandidate> all;
  for (int v = 0; v < static_cast<int>(traces.size()); ++v) {
    const MotionTrace& trace = traces[v];
    const std::vector<int> centers = select_central_frames(trace, omega);
    std::vector<PanoramaCandidate> cands(centers.size());
    detail::parallel_for(static_cast<int>(centers.size()), [&](int k) {
      PanoramaCandidate cand = build_candidate(trace, centers[k], omega, v);
      const std::size_t own = cand.members.size();
      bool grew = false;
      for (int u = 0; u < static_cast<int>(traces.size()); ++u) {
        if (u == v) continue;
        const PairCorrespondence* pair =
            table.find(trace.video_id(), traces[u].video_id());
        if (pair == nullptr) continue;
        std::set<int> taken;
        for (std::size_t m = 0; m < own; ++m) {
          const PanoramaMember member = cand.members[m];
          const FrameMatch* match = pair->find(member.frame);
          if (match == nullptr || !match->b_to_a) continue;
          if (!taken.insert(match->frame_b).second) continue;
          const Mat3 warp = member.warp * *match->b_to_a;
          const MotionTrace& other = traces[u];
          if (!warp_frame_corners(warp, other.width(), other.height())) {
            continue;
          }
          cand.members.push_back(
              {u, match->frame_b, other.width(), other.height(), warp});
          grew = true;
        }
      }
      if (grew) measure_candidate(cand);
      cands[k] = std::move(cand);
    });
    for (auto& c : cands) all.push_back(std::move(c));
  }
  return all;
}

std::vector<double> timeline_positions(
    std::span<const PanoramaCandidate> candidates,
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    Timeline timeline) {
  if (traces.empty()) throw std::invalid_argument("no traces");
  const MotionTrace& ref = traces.front();
  std::vector<double> pos;
  pos.reserve(candidates.size());
  for (const PanoramaCandidate& c : candidates) {
    const MotionTrace& trace = traces[c.video];
    if (c.video == 0) {
      pos.push_back(timeline == Timeline::kTimestamp
                        ? trace.frame(c.center).timestamp_ms * ref.fps() / 1000.0
                        : static_cast<double>(c.center));
      continue;
    }
    const PairCorrespondence* pair =
        table.find(trace.video_id(), ref.video_id());
    if (timeline == Timeline::kCorrespondence && pair != nullptr &&
        !pair->entries.empty()) {
      pos.push_back(map_through(*pair, c.center));
    } else {
      pos.push_back(trace.frame(c.center).timestamp_ms * ref.fps() / 1000.0);
    }
  }
  return pos;
}

MultiSelection solve_multi_sampling(
    std::span<const PanoramaCandidate> candidates,
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    const CostWeights& weights, const MultiSamplingOptions& options) {
  weights.validate();
  const auto& sampling = options.sampling;
  if (sampling.tau < 1 || sampling.d_start < 1 || sampling.d_end < 1) {
    throw std::invalid_argument("tau, d_start and d_end must be positive");
  }
  if (!(options.cross_multiplier >= 0.0)) {
    throw std::invalid_argument("cross-video multiplier must be >= 0");
  }
  if (candidates.empty()) throw NoPath("no panorama candidates");
  const MergedGraph graph(candidates, traces, table, weights, options);
  const int min_edges = candidates.size() > 1 ? 1 : 0;
  const auto path = shortest_path(graph, sampling.solver, min_edges);
  if (!path) {
    throw NoPath(
        "merged candidate graph is disconnected after timeline position " +
        std::to_string(graph.reach()));
  }
  MultiSelection sel;
  for (std::size_t v : path->nodes) sel.selected.push_back(graph.candidate(v));
  sel.total_cost = path->cost;
  for (std::size_t k = 1; k < sel.selected.size(); ++k) {
    if (candidates[sel.selected[k]].video !=
        candidates[sel.selected[k - 1]].video) {
      ++sel.switches;
    }
  }
  return sel;
}

std::optional<Mat3> cross_center_homography(
    std::span<const MotionTrace> traces, const CorrespondenceTable& table,
    const PanoramaCandidate& prev, const PanoramaCandidate& next) {
  const MotionTrace& prev_trace = traces[prev.video];
  const MotionTrace& next_trace = traces[next.video];
  if (prev.video == next.video) {
    return prev_trace.chain(next.center, prev.center);
  }
  // prev's center matched into next's video: next -> match -> prev.
  if (const auto* pair =
          table.find(prev_trace.video_id(), next_trace.video_id())) {
    if (const FrameMatch* m = pair->find(prev.center); m && m->b_to_a) {
      if (auto h = next_trace.chain(next.center, m->frame_b)) {
        return Mat3(*m->b_to_a * *h);
      }
    }
  }
  // next's center matched into prev's video: next -> match -> prev.
  if (const auto* pair =
          table.find(next_trace.video_id(), prev_trace.video_id())) {
    if (const FrameMatch* m = pair->find(next.center); m && m->b_to_a) {
      if (auto h = prev_trace.chain(m->frame_b, prev.center)) {
        return Mat3(*h * m->b_to_a->inverse());
      }
    }
  }
  return std::nullopt;
}

PanoramaPlan plan_multi_panoramas(std::span<const MotionTrace> traces,
                                  const CorrespondenceTable& table,
                                  const MultiPlanOptions& options) {
  std::vector<PanoramaCandidate> candidates =
      build_multi_candidates(traces, table, options.omega);
  const MultiSelection sel = solve_multi_sampling(
      candidates, traces, table, options.weights, options.sampling);
  const PanoramaSelection selection{sel.selected, sel.total_cost};
  const CenterHomography homography = [&](const PanoramaCandidate& prev,
                                          const PanoramaCandidate& next) {
    return cross_center_homography(traces, table, prev, next);
  };
  return assemble_panorama_plan(std::move(candidates), selection, homography,
                                options.lambda);
}

}  // namespace lapse
