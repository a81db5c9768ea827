#include "support.hpp"

#include <cmath>

namespace lapse::test {

namespace {

double snap(double v, int grid) {
  return grid > 0 ? std::round(v * grid) / grid : v;
}

}  // namespace

ColorHistogram random_histogram(std::mt19937_64& rng, int bins) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ColorHistogram h;
  h.bins_per_channel = bins;
  h.bins.resize(3 * bins);
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int b = 0; b < bins; ++b) sum += h.bins[c * bins + b] = unit(rng);
    for (int b = 0; b < bins; ++b) h.bins[c * bins + b] /= sum;
  }
  return h;
}

MotionTrace random_trace(std::mt19937_64& rng, const RandomTraceOptions& o) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coord(-0.7, 0.7);
  TraceBuilder b("random", 30.0, o.max_skip);
  b.add_frames(o.n, 64, 48);
  for (int i = 0; i < o.n; ++i) {
    for (int j = i + 1; j < o.n && j - i <= o.max_skip; ++j) {
      if (j > i + 1 && unit(rng) < o.p_absent) continue;
      MotionLink l;
      l.src = i;
      l.dst = j;
      const double pick = unit(rng);
      l.source = pick < o.p_missing           ? DirectionSource::kMissing
                 : pick < o.p_missing + o.p_foe ? DirectionSource::kFoe
                                                : DirectionSource::kEpipole;
      const double x = snap(coord(rng), o.grid);
      const double y = snap(coord(rng), o.grid);
      if (l.source != DirectionSource::kMissing) l.direction = Vec2(x, y);
      l.flow_sum = snap(o.flow_scale * (j - i) * unit(rng), o.grid);
      b.add_link(l);
    }
  }
  if (o.bins > 0) {
    for (int i = 0; i < o.n; ++i) b.add_histogram(random_histogram(rng, o.bins));
  }
  return std::move(b).build();
}

MotionTrace gaze_trace(const std::vector<Vec2>& gaze,
                       const std::vector<double>& flow, int max_skip) {
  const int n = static_cast<int>(gaze.size());
  TraceBuilder b("gaze", 30.0, max_skip);
  b.add_frames(n, 640, 480);
  for (int i = 0; i < n; ++i) {
    double f = 0.0;
    for (int j = i + 1; j < n && j - i <= max_skip; ++j) {
      f += flow[j - 1];
      b.add_link({i, j, gaze[j], DirectionSource::kEpipole, f});
    }
  }
  return std::move(b).build();
}

BrutePath brute_force(const BruteDag& g) {
  BrutePath best;
  std::vector<int> path;
  std::function<void(int, double)> walk = [&](int v, double cost) {
    const int edges = static_cast<int>(path.size()) - 1;
    if (edges >= g.min_edges && g.sink(v)) {
      ++best.paths;
      if (cost < best.cost || (cost == best.cost && path < best.nodes)) {
        best.cost = cost;
        best.nodes = path;
      }
    }
    for (int u = v + 1; u < g.nodes; ++u) {
      const auto w = g.edge(v, u);
      if (!w) continue;
      path.push_back(u);
      walk(u, cost + *w);
      path.pop_back();
    }
  };
  for (int v = 0; v < g.nodes; ++v) {
    const auto s = g.source(v);
    if (!s) continue;
    path = {v};
    walk(v, *s);
  }
  return best;
}

BrutePath brute_first_order(const MotionTrace& trace, const GraphSpec& spec) {
  const int n = trace.frame_count();
  BruteDag g;
  g.nodes = n;
  g.source = [&](int v) -> std::optional<double> {
    if (v < spec.d_start) return 0.0;
    return std::nullopt;
  };
  g.sink = [&](int v) { return v >= n - spec.d_end; };
  g.edge = [&](int i, int j) -> std::optional<double> {
    if (j - i > spec.tau || trace.link(i, j) == nullptr) return std::nullopt;
    return edge_cost(trace, i, j, spec.weights).total;
  };
  return brute_force(g);
}

BrutePath brute_second_order(const MotionTrace& trace, const GraphSpec& spec) {
  const int n = trace.frame_count();
  const double alpha2 = spec.second_order_weight();
  BrutePath best;
  std::vector<int> path;
  auto ok = [&](int i, int j) {
    return j - i <= spec.tau && trace.link(i, j) != nullptr;
  };
  std::function<void(double)> walk = [&](double cost) {
    const int j = path.back();
    if (path.size() >= 2 && j >= n - spec.d_end) {
      ++best.paths;
      if (cost < best.cost || (cost == best.cost && path < best.nodes)) {
        best.cost = cost;
        best.nodes = path;
      }
    }
    for (int l = j + 1; l < n; ++l) {
      if (!ok(j, l)) continue;
      double c = edge_cost(trace, j, l, spec.weights).total;
      if (path.size() >= 2) {
        const int i = path[path.size() - 2];
        c += alpha2 * second_order_cost(*trace.link(i, j), *trace.link(j, l));
        c = cost + c;
      } else {
        c = cost + c;
      }
      path.push_back(l);
      walk(c);
      path.pop_back();
    }
  };
  for (int s = 0; s < std::min(spec.d_start, n); ++s) {
    path = {s};
    walk(0.0);
  }
  return best;
}

}  // namespace lapse::test
