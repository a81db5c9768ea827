#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/LU>

#include "lapse/errors.hpp"
#include "lapse/multi_video.hpp"
#include "lapse/plan_io.hpp"
#include "lapse/synthetic.hpp"
#include "support.hpp"

namespace lapse {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RawCorrespondence reversed(const RawCorrespondence& raw) {
  RawCorrespondence out{raw.video_b, raw.video_a, {}};
  for (const RawMatch& m : raw.matches) {
    std::optional<Mat3> h;
    if (m.b_to_a) h = Mat3(m.b_to_a->inverse());
    out.matches.push_back({m.frame_b, m.frame_a, m.count, h});
  }
  return out;
}

// Frame t of one video matches frame t of the other, identity homography.
RawCorrespondence identity_matches(const std::string& a, const std::string& b,
                                   int n) {
  RawCorrespondence raw{a, b, {}};
  for (int t = 0; t < n; ++t) raw.matches.push_back({t, t, 60, Mat3::Identity()});
  return raw;
}

MotionTrace renamed(const MotionTrace& t, const std::string& id) {
  TraceBuilder b(id, t.fps(), t.max_skip());
  for (const FrameMeta& f : t.frames()) b.add_frame(f);
  for (const MotionLink& l : t.links()) b.add_link(l);
  for (const ColorHistogram& h : t.histograms()) b.add_histogram(h);
  for (const HomographyLink& h : t.homographies()) b.add_homography(h);
  return std::move(b).build();
}

TEST(Correspondence, FinalizeExamples) {
  RawCorrespondence raw{"A", "B", {}};
  auto add = [&](int fa, int fb, int count) {
    raw.matches.push_back({fa, fb, count, std::nullopt});
  };
  add(1, 4, 12);
  add(1, 5, 30);
  add(1, 6, 30);  // argmax, tie to smaller
  add(2, 7, 9);   // too few matches
  add(3, 8, 40);
  add(5, 6, 50);  // runs backwards
  add(6, 9, 10);
  const PairCorrespondence p = finalize_correspondence(raw);
  ASSERT_EQ(p.entries.size(), 3u);
  EXPECT_EQ(p.find(1)->frame_b, 5);
  EXPECT_EQ(p.find(2), nullptr);
  EXPECT_EQ(p.find(3)->frame_b, 8);
  EXPECT_EQ(p.find(5), nullptr);
  EXPECT_EQ(p.find(6)->frame_b, 9);
  EXPECT_TRUE(p.monotone());
  EXPECT_EQ(p.raw.size(), raw.matches.size());
}

TEST(Correspondence, RandomRawIsMonotoneAfterFinalize) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> frame(0, 60), count(0, 40), len(0, 200);
  for (int trial = 0; trial < 200; ++trial) {
    RawCorrespondence raw{"A", "B", {}};
    const int m = len(rng);
    for (int k = 0; k < m; ++k) {
      raw.matches.push_back({frame(rng), frame(rng), count(rng), std::nullopt});
    }
    const PairCorrespondence p = finalize_correspondence(raw);
    EXPECT_TRUE(p.monotone());
    int last = -1;
    for (const auto& [a, match] : p.entries) {
      EXPECT_GE(match.count, kMinMatchCount);
      EXPECT_GE(match.frame_b, last);
      last = match.frame_b;
      // the kept match is the best one listed for that frame
      for (const RawMatch& r : raw.matches) {
        if (r.frame_a == a) {
          EXPECT_LE(r.count, match.count);
        }
      }
    }
  }
}

TEST(Correspondence, TableIsDirected) {
  const RawCorrespondence ab{"A", "B", {{0, 1, 20, std::nullopt}}};
  const std::vector<RawCorrespondence> raws = {ab};
  const CorrespondenceTable t = finalize_correspondences(raws);
  EXPECT_NE(t.find("A", "B"), nullptr);
  EXPECT_EQ(t.find("B", "A"), nullptr);
  CorrespondenceTable dup = t;
  EXPECT_THROW(dup.add(finalize_correspondence(ab)), InvariantError);
}

struct Pair {
  std::vector<MotionTrace> traces;
  CorrespondenceTable table;
};

Pair synthetic_pair(int n, int offset, SyntheticKind kind = SyntheticKind::kOscillate,
                    bool both_ways = true) {
  SyntheticOptions o;
  o.kind = kind;
  o.n = n;
  o.max_skip = 30;
  o.bins = 4;
  o.noise = 0.02;
  SyntheticPair sp = make_synthetic_pair(o, offset);
  Pair p;
  p.traces.push_back(std::move(sp.a));
  p.traces.push_back(std::move(sp.b));
  std::vector<RawCorrespondence> raws = {sp.raw};
  if (both_ways) raws.push_back(reversed(sp.raw));
  p.table = finalize_correspondences(raws);
  return p;
}

TEST(MultiCandidates, MemberCountBound) {
  const Pair p = synthetic_pair(120, 5);
  const auto cands = build_multi_candidates(p.traces, p.table, 3);
  ASSERT_FALSE(cands.empty());
  bool any_cross = false;
  for (const auto& c : cands) {
    EXPECT_LE(c.members.size(), 6u);
    EXPECT_EQ(c.members.front().video, c.video);
    for (const auto& m : c.members) any_cross |= m.video != c.video;
  }
  EXPECT_TRUE(any_cross);
}

TEST(MultiCandidates, ThreeVideosBound) {
  SyntheticOptions o;
  o.n = 300;
  o.max_skip = 30;
  o.bins = 4;
  SyntheticPair ab = make_synthetic_pair(o, 4);
  o.seed = 40;
  SyntheticPair ac = make_synthetic_pair(o, 9);
  ac.b = renamed(ac.b, "synth_c");
  ac.raw.video_b = "synth_c";
  std::vector<MotionTrace> traces = {ab.a, ab.b, ac.b};
  std::vector<RawCorrespondence> raws = {ab.raw, reversed(ab.raw), ac.raw,
                                         reversed(ac.raw)};
  const CorrespondenceTable table = finalize_correspondences(raws);
  for (const auto& c : build_multi_candidates(traces, table, 50)) {
    EXPECT_LE(c.members.size(), 150u);
  }
}

TEST(MultiCandidates, EmptyTableMatchesSingleVideo) {
  const Pair p = synthetic_pair(200, 3);
  const std::vector<MotionTrace> one = {p.traces[0]};
  const auto multi = build_multi_candidates(one, CorrespondenceTable{}, 20);
  const auto centers = select_central_frames(p.traces[0], 20);
  ASSERT_EQ(multi.size(), centers.size());
  for (std::size_t k = 0; k < multi.size(); ++k) {
    const auto single = build_candidate(p.traces[0], centers[k], 20);
    EXPECT_EQ(multi[k].center, single.center);
    EXPECT_EQ(multi[k].members.size(), single.members.size());
    EXPECT_EQ(multi[k].fov_pixels, single.fov_pixels);
  }
}

TEST(Timeline, CorrespondenceMapsIntoFirstVideo) {
  const Pair p = synthetic_pair(100, 7);
  std::vector<PanoramaCandidate> cands(3);
  cands[0].video = 0;
  cands[0].center = 20;
  cands[1].video = 1;
  cands[1].center = 20;
  cands[2].video = 1;
  // b frames 93..95 still carry a weak neighbour match into a frame 99, so
  // the last retained entry is 95 -> 99 and frame 98 extrapolates from it
  cands[2].center = 98;
  const auto pos = timeline_positions(cands, p.traces, p.table,
                                      Timeline::kCorrespondence);
  EXPECT_EQ(pos[0], 20.0);
  EXPECT_EQ(pos[1], 27.0);
  EXPECT_EQ(pos[2], 102.0);
  const auto ts = timeline_positions(cands, p.traces, p.table,
                                     Timeline::kTimestamp);
  EXPECT_NEAR(ts[1], 20.0, 1e-9);
  EXPECT_THROW(timeline_positions(cands, {}, p.table, Timeline::kTimestamp),
               std::invalid_argument);
}

MultiPlanOptions small_options(int tau) {
  MultiPlanOptions o;
  o.omega = 5;
  o.sampling.sampling.tau = tau;
  o.sampling.sampling.d_start = o.sampling.sampling.d_end = tau;
  return o;
}

TEST(MultiSampling, InfiniteMultiplierNeverSwitches) {
  const Pair p = synthetic_pair(200, 4, SyntheticKind::kAlternate);
  MultiPlanOptions o = small_options(30);
  o.weights.k_flow = 20;
  const auto cands = build_multi_candidates(p.traces, p.table, o.omega);
  o.sampling.cross_multiplier = kInf;
  const MultiSelection sel =
      solve_multi_sampling(cands, p.traces, p.table, o.weights, o.sampling);
  EXPECT_EQ(sel.switches, 0);
}

TEST(MultiSampling, DuplicateVideoWithoutPenaltyMatchesSingle) {
  SyntheticOptions so;
  so.kind = SyntheticKind::kOscillate;
  so.n = 150;
  so.max_skip = 20;
  so.bins = 4;
  so.noise = 0.05;
  const MotionTrace a = make_synthetic_trace(so);
  const MotionTrace b = renamed(a, "copy");
  const std::vector<MotionTrace> traces = {a, b};
  const std::vector<RawCorrespondence> raws = {
      identity_matches(a.video_id(), "copy", so.n),
      identity_matches("copy", a.video_id(), so.n)};
  const CorrespondenceTable table = finalize_correspondences(raws);

  PanoramaSamplingOptions po{20, 10, 10, FovMode::kDeficit, Solver::kDagDp};
  CostWeights w{1e3, 10, 1, 4, 20};
  const std::vector<MotionTrace> one = {a};
  const auto single_c = build_multi_candidates(one, CorrespondenceTable{}, 5);
  // keep the candidates identical across the copies so FOV costs agree
  std::vector<PanoramaCandidate> cands = single_c;
  for (auto c : single_c) {
    c.video = 1;
    for (auto& m : c.members) m.video = 1;
    cands.push_back(c);
  }
  const PanoramaSelection single = solve_panorama_sampling(single_c, a, w, po);
  MultiSamplingOptions mo;
  mo.sampling = po;
  mo.cross_multiplier = 0.0;
  const MultiSelection multi = solve_multi_sampling(cands, traces, table, w, mo);
  EXPECT_EQ(multi.total_cost, single.total_cost);
  mo.cross_multiplier = 2.0;
  const MultiSelection penalized =
      solve_multi_sampling(cands, traces, table, w, mo);
  EXPECT_EQ(penalized.total_cost, single.total_cost);
  EXPECT_EQ(penalized.switches, 0);
}

PanoramaCandidate fake(int video, int center, double fov) {
  PanoramaCandidate c;
  c.video = video;
  c.center = center;
  c.members.push_back({video, center, 64, 48, Mat3::Identity()});
  c.fov_pixels = fov;
  return c;
}

// Exhaustive search over the merged graph written out from the edge rules.
test::BrutePath brute_multi(const std::vector<PanoramaCandidate>& cands,
                            const std::vector<MotionTrace>& traces,
                            const CorrespondenceTable& table,
                            const CostWeights& w, const MultiSamplingOptions& o) {
  const auto pos =
      timeline_positions(cands, traces, table, Timeline::kCorrespondence);
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (pos[a] != pos[b]) return pos[a] < pos[b];
    if (cands[a].video != cands[b].video) return cands[a].video < cands[b].video;
    return cands[a].center < cands[b].center;
  });
  double fov_max = 0;
  for (const auto& c : cands) fov_max = std::max(fov_max, c.fov_pixels);
  auto fov = [&](int v) {
    return w.gamma * ((fov_max - cands[order[v]].fov_pixels) / fov_max);
  };
  auto motion = [&](const MotionLink& l) {
    const double s = l.source == DirectionSource::kMissing
                         ? kMissingDirectionCost
                         : l.direction.norm() *
                               (l.source == DirectionSource::kFoe ? w.foe_penalty : 1);
    return w.alpha * s + w.beta * (l.flow_sum - w.k_flow) * (l.flow_sum - w.k_flow);
  };
  const double first = pos[order.front()], last = pos[order.back()];
  const auto& s = o.sampling;
  test::BruteDag g;
  g.nodes = static_cast<int>(cands.size());
  g.min_edges = 1;
  g.source = [&](int v) -> std::optional<double> {
    if (pos[order[v]] < first + s.d_start) return fov(v);
    return std::nullopt;
  };
  g.sink = [&](int v) { return pos[order[v]] > last - s.d_end; };
  g.edge = [&](int v, int u) -> std::optional<double> {
    if (u <= v) return std::nullopt;
    const auto& p = cands[order[v]];
    const auto& q = cands[order[u]];
    if (p.video == q.video) {
      if (q.center - p.center < 1 || q.center - p.center > s.tau) return std::nullopt;
      const MotionLink* l = traces[p.video].link(p.center, q.center);
      if (!l) return std::nullopt;
      return motion(*l) + fov(u);
    }
    if (!std::isfinite(o.cross_multiplier)) return std::nullopt;
    const double gap = pos[order[u]] - pos[order[v]];
    if (gap <= 0 || gap > s.tau) return std::nullopt;
    const auto* pair = table.find(traces[p.video].video_id(),
                                  traces[q.video].video_id());
    const FrameMatch* m = pair ? pair->find(p.center) : nullptr;
    if (!m) return std::nullopt;
    const MotionLink* l = traces[q.video].link(m->frame_b, q.center);
    if (!l) return std::nullopt;
    const double e = motion(*l) + fov(u);
    return e + o.cross_multiplier * e;
  };
  auto best = test::brute_force(g);
  for (int& v : best.nodes) v = static_cast<int>(order[v]);
  return best;
}

TEST(MultiSampling, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(91);
  std::uniform_int_distribution<int> center(0, 23), video(0, 1);
  std::uniform_real_distribution<double> fov(1e3, 5e3);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    test::RandomTraceOptions ro;
    ro.n = 24;
    ro.max_skip = 6;
    ro.bins = 0;
    ro.grid = trial % 4 == 0 ? 4 : 0;
    std::vector<MotionTrace> traces = {test::random_trace(rng, ro),
                                       test::random_trace(rng, ro)};
    traces[1] = renamed(traces[1], "other");
    RawCorrespondence ab = identity_matches(traces[0].video_id(), "other", 24);
    for (auto& m : ab.matches) m.frame_b = std::min(23, m.frame_b + 1);
    const std::vector<RawCorrespondence> raws = {ab, reversed(ab)};
    const CorrespondenceTable table = finalize_correspondences(raws);
    std::vector<PanoramaCandidate> cands;
    std::set<std::pair<int, int>> used;
    while (cands.size() < 8) {
      const int v = video(rng), c = center(rng);
      if (used.insert({v, c}).second) cands.push_back(fake(v, c, fov(rng)));
    }
    const CostWeights w{1e3, 20, 300, 4, 4};
    MultiSamplingOptions mo;
    mo.sampling = {6, 6, 6, FovMode::kDeficit,
                   trial % 2 ? Solver::kDijkstra : Solver::kDagDp};
    mo.cross_multiplier = trial % 3 == 0 ? 0.0 : trial % 3 == 1 ? 2.0 : kInf;
    const auto expected = brute_multi(cands, traces, table, w, mo);
    if (expected.nodes.empty()) {
      EXPECT_THROW(solve_multi_sampling(cands, traces, table, w, mo), NoPath);
      continue;
    }
    ++solved;
    const MultiSelection sel = solve_multi_sampling(cands, traces, table, w, mo);
    EXPECT_EQ(sel.total_cost, expected.cost);
    EXPECT_EQ(std::vector<int>(sel.selected.begin(), sel.selected.end()),
              expected.nodes);
  }
  EXPECT_GT(solved, 50);
}

TEST(MultiSampling, LargerMultiplierNeverLowersCost) {
  for (int trial = 0; trial < 20; ++trial) {
    const Pair p = synthetic_pair(240, 3 + trial % 5, SyntheticKind::kOscillate);
    MultiPlanOptions o = small_options(25);
    o.weights = CostWeights{1e3, 5, 50, 4, 10};
    const auto cands = build_multi_candidates(p.traces, p.table, o.omega);
    double prev_cost = -kInf;
    for (double m : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      o.sampling.cross_multiplier = m;
      const MultiSelection sel =
          solve_multi_sampling(cands, p.traces, p.table, o.weights, o.sampling);
      EXPECT_GE(sel.total_cost, prev_cost);
      prev_cost = sel.total_cost;
    }
  }
}

TEST(MultiPlan, SingleVideoIsBitIdentical) {
  SyntheticOptions so;
  so.kind = SyntheticKind::kRandom;
  so.n = 300;
  so.max_skip = 40;
  so.bins = 4;
  const MotionTrace t = make_synthetic_trace(so);
  PanoramaPlanOptions po;
  po.omega = 10;
  po.sampling.tau = 40;
  po.sampling.d_start = po.sampling.d_end = 30;
  po.weights.k_flow = 10 * 10 * t.avg_flow();
  MultiPlanOptions mo;
  mo.omega = po.omega;
  mo.lambda = po.lambda;
  mo.weights = po.weights;
  mo.sampling.sampling = po.sampling;
  const std::vector<MotionTrace> one = {t};
  EXPECT_EQ(format_panorama_plan(plan_multi_panoramas(one, {}, mo)),
            format_panorama_plan(plan_panoramas(t, po)));
}

TEST(MultiSampling, DisconnectedReportsPosition) {
  const Pair p = synthetic_pair(100, 2);
  std::vector<PanoramaCandidate> cands = {fake(0, 0, 1e3), fake(0, 10, 1e3),
                                          fake(0, 90, 1e3)};
  MultiSamplingOptions mo;
  mo.sampling = {20, 5, 5, FovMode::kDeficit, Solver::kDagDp};
  try {
    solve_multi_sampling(cands, p.traces, p.table, CostWeights{}, mo);
    FAIL() << "expected NoPath";
  } catch (const NoPath& e) {
    EXPECT_NE(std::string(e.what()).find("after timeline position 10"),
              std::string::npos)
        << e.what();
  }
  mo.cross_multiplier = -1;
  EXPECT_THROW(solve_multi_sampling(cands, p.traces, p.table, CostWeights{}, mo),
               std::invalid_argument);
}

TEST(MultiPlan, CrossHomographyChainsThroughMatch) {
  const Pair p = synthetic_pair(100, 6);
  PanoramaCandidate prev = fake(0, 30, 1), next = fake(1, 40, 1);
  const auto h = cross_center_homography(p.traces, p.table, prev, next);
  ASSERT_TRUE(h.has_value());
  // a frame 30 matches b frame 24; b 40 -> b 24 -> a 30
  const auto via = p.traces[1].chain(40, 24);
  const FrameMatch* m = p.table.find(p.traces[0].video_id(),
                                     p.traces[1].video_id())->find(30);
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->frame_b, 24);
  EXPECT_TRUE(h->isApprox(*m->b_to_a * *via));
}

}  // namespace
}  // namespace lapse
