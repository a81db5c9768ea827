#include "lapse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace lapse {

namespace {

struct Motion {
  std::vector<Vec2> gaze;     // per frame
  std::vector<double> flow;   // per step t -> t+1
};

int floor_div(int a, int b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

// Gaze and step flow at absolute time u.
void structured_sample(const SyntheticOptions& o, int u, Vec2& gaze,
                       double& flow) {
  switch (o.kind) {
    case SyntheticKind::kOscillate: {
      const int r = u - o.phase;
      const int k = floor_div(r, o.period);
      if (r - k * o.period == 0) {
        gaze = Vec2::Zero();
      } else {
        gaze = Vec2(k % 2 == 0 ? 0.5 : -0.5, 0.0);
      }
      flow = 1.0;
      return;
    }
    case SyntheticKind::kAlternate:
      gaze = Vec2(u % 2 == 0 ? 0.2 : -0.2, 0.0);
      flow = 1.0;
      return;
    case SyntheticKind::kDriving: {
      const int k = floor_div(u, 30);
      const int r = u - 30 * k;
      if (r >= 26) {
        gaze = Vec2(k % 2 == 0 ? 0.6 : -0.6, 0.0);
        flow = 15.0;
      } else {
        gaze = Vec2::Zero();
        flow = 0.05;
      }
      return;
    }
    case SyntheticKind::kRandom:
      break;
  }
  throw std::logic_error("not a structured kind");
}

Motion structured_motion(const SyntheticOptions& o, int shift,
                         std::mt19937_64& rng) {
  Motion m;
  m.gaze.resize(o.n);
  m.flow.resize(o.n);
  std::normal_distribution<double> noise(0.0, o.noise > 0 ? o.noise : 1.0);
  for (int t = 0; t < o.n; ++t) {
    structured_sample(o, t + shift, m.gaze[t], m.flow[t]);
    if (o.noise > 0) m.gaze[t] += Vec2(noise(rng), noise(rng));
  }
  return m;
}

MotionTrace build_structured(const SyntheticOptions& o, const Motion& m) {
  const int tau = std::min(o.max_skip, o.n - 1);
  TraceBuilder b(o.video_id, o.fps, std::max(tau, 1));
  b.add_frames(o.n, o.width, o.height);
  for (int i = 0; i < o.n; ++i) {
    double flow = 0.0;
    for (int j = i + 1; j <= std::min(o.n - 1, i + tau); ++j) {
      flow += m.flow[j - 1];
      b.add_link({i, j, m.gaze[j], DirectionSource::kEpipole, flow});
    }
  }
  ColorHistogram hist;
  hist.bins_per_channel = o.bins;
  hist.bins.assign(3 * o.bins, 1.0 / o.bins);
  for (int i = 0; i < o.n; ++i) b.add_histogram(hist);
  const double half_diag = 0.5 * std::hypot(o.width, o.height);
  for (int i = 0; i + 1 < o.n; ++i) {
    const Vec2 d = -(m.gaze[i + 1] - m.gaze[i]) * half_diag;
    b.add_homography({i, i + 1, translation(d.x(), d.y()), true});
  }
  return std::move(b).build();
}

MotionTrace build_random(const SyntheticOptions& o, std::mt19937_64& rng) {
  const int tau = std::min(o.max_skip, o.n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coord(-0.6, 0.6);
  TraceBuilder b(o.video_id, o.fps, std::max(tau, 1));
  b.add_frames(o.n, o.width, o.height);
  for (int i = 0; i < o.n; ++i) {
    for (int j = i + 1; j <= std::min(o.n - 1, i + tau); ++j) {
      MotionLink l;
      l.src = i;
      l.dst = j;
      const double pick = unit(rng);
      l.source = pick < 0.03   ? DirectionSource::kMissing
                 : pick < 0.15 ? DirectionSource::kFoe
                               : DirectionSource::kEpipole;
      const double x = coord(rng);
      const double y = coord(rng);
      if (l.source != DirectionSource::kMissing) l.direction = Vec2(x, y);
      l.flow_sum = 2.0 * (j - i) * unit(rng);
      b.add_link(l);
    }
  }
  for (int i = 0; i < o.n; ++i) {
    ColorHistogram h;
    h.bins_per_channel = o.bins;
    h.bins.resize(3 * o.bins);
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (int k = 0; k < o.bins; ++k) {
        h.bins[c * o.bins + k] = unit(rng);
        sum += h.bins[c * o.bins + k];
      }
      for (int k = 0; k < o.bins; ++k) h.bins[c * o.bins + k] /= sum;
    }
    b.add_histogram(std::move(h));
  }
  std::normal_distribution<double> step(0.0, 4.0);
  for (int i = 0; i + 1 < o.n; ++i) {
    b.add_homography({i, i + 1, translation(step(rng), step(rng)), true});
  }
  return std::move(b).build();
}

void check(const SyntheticOptions& o) {
  if (o.n < 2) throw std::invalid_argument("synthetic trace needs n >= 2");
  if (o.max_skip < 1) throw std::invalid_argument("max skip must be >= 1");
  if (o.period < 1) throw std::invalid_argument("period must be >= 1");
  if (o.noise < 0) throw std::invalid_argument("noise must be >= 0");
  if (o.bins < 1 || o.width < 1 || o.height < 1 || !(o.fps > 0)) {
    throw std::invalid_argument("bad synthetic frame settings");
  }
}

}  // namespace

std::optional<SyntheticKind> parse_synthetic_kind(const std::string& name) {
  if (name == "oscillate") return SyntheticKind::kOscillate;
  if (name == "alternate") return SyntheticKind::kAlternate;
  if (name == "driving") return SyntheticKind::kDriving;
  if (name == "random") return SyntheticKind::kRandom;
  return std::nullopt;
}

MotionTrace make_synthetic_trace(const SyntheticOptions& options) {
  check(options);
  std::mt19937_64 rng(options.seed);
  if (options.kind == SyntheticKind::kRandom) return build_random(options, rng);
  return build_structured(options, structured_motion(options, 0, rng));
}

SyntheticPair make_synthetic_pair(const SyntheticOptions& options, int offset) {
  check(options);
  if (options.kind == SyntheticKind::kRandom) {
    throw std::invalid_argument("pairs need a structured kind");
  }
  SyntheticOptions oa = options;
  SyntheticOptions ob = options;
  oa.video_id = options.video_id + "_a";
  ob.video_id = options.video_id + "_b";
  std::mt19937_64 rng_a(options.seed);
  std::mt19937_64 rng_b(options.seed + 1);
  const Motion ma = structured_motion(oa, 0, rng_a);
  const Motion mb = structured_motion(ob, offset, rng_b);

  SyntheticPair out{build_structured(oa, ma), build_structured(ob, mb), {}};
  out.raw.video_a = oa.video_id;
  out.raw.video_b = ob.video_id;
  const double half_diag = 0.5 * std::hypot(options.width, options.height);
  auto b_to_a = [&](int fa, int fb) {
    const Vec2 d = -(ma.gaze[fa] - mb.gaze[fb]) * half_diag;
    return translation(d.x(), d.y());
  };
  for (int fa = 0; fa < options.n; ++fa) {
    const int fb = fa - offset;
    if (fb < 0 || fb >= options.n) continue;
    out.raw.matches.push_back({fa, fb, 60, b_to_a(fa, fb)});
    for (int d : {-3, 3}) {
      if (fb + d >= 0 && fb + d < options.n) {
        out.raw.matches.push_back({fa, fb + d, 15, b_to_a(fa, fb + d)});
      }
    }
  }
  return out;
}

}  // namespace lapse
