#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lapse/multi_video.hpp"
#include "lapse/trace.hpp"

namespace lapse {

// Seeded trace generators for tests, benchmarks and the `synth` command.
//
// The structured kinds are driven by a per-frame gaze g_t (where the camera
// points relative to the walking direction, in direction units) and a
// per-step flow f_t. Link (i, j) reports direction g_j and flow
// f_i + ... + f_{j-1}; consecutive homographies translate by -(g_{t+1} - g_t)
// times the half-diagonal.
//
//   oscillate  g = 0 on frames with (t - phase) % period == 0, otherwise
//              (+-0.5, 0) with the sign flipping every period; f = 1.
//   alternate  g = (+0.2, 0) on even frames, (-0.2, 0) on odd ones; f = 1.
//   driving    f = 0.05 and g = 0, except for a 4-frame head flick every 30
//              frames with f = 15 and g = (+-0.6, 0).
//   random     every link drawn independently: direction, flow, source
//              (some FOE, a few missing) and per-frame histograms.
enum class SyntheticKind { kOscillate, kAlternate, kDriving, kRandom };

std::optional<SyntheticKind> parse_synthetic_kind(const std::string& name);

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::kOscillate;
  int n = 1000;
  int max_skip = 100;
  int period = 10;
  int phase = 0;
  double noise = 0.0;  // std-dev of gaussian gaze noise (structured kinds)
  std::uint64_t seed = 7;
  std::string video_id = "synth";
  int width = 640;
  int height = 480;
  double fps = 30.0;
  int bins = 32;
};

MotionTrace make_synthetic_trace(const SyntheticOptions& options);

struct SyntheticPair {
  MotionTrace a;
  MotionTrace b;
  RawCorrespondence raw;  // a -> b
};

// Two recordings of the same walk; frame t of b shows what frame t + offset
// of a shows. b uses seed + 1 for its noise. Raw matches list, for every
// frame of a, the true frame of b plus weaker neighbours.
SyntheticPair make_synthetic_pair(const SyntheticOptions& options, int offset);

}  // namespace lapse
