#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lapse/geometry.hpp"

namespace lapse {

struct FrameMeta {
  int index = 0;
  double timestamp_ms = 0.0;
  int width = 0;
  int height = 0;
};

enum class DirectionSource { kEpipole, kFoe, kMissing };

// Motion evidence for the frame pair (src, dst). `direction` is in normalized
// image coordinates (see normalize_direction); `flow_sum` is the aggregate
// integrated-flow magnitude between the two frames.
struct MotionLink {
  int src = 0;
  int dst = 0;
  Vec2 direction = Vec2::Zero();
  DirectionSource source = DirectionSource::kMissing;
  double flow_sum = 0.0;
};

// Three mass-normalized channels of `bins_per_channel` bins, stored
// channel-major.
struct ColorHistogram {
  int bins_per_channel = 0;
  std::vector<double> bins;

  std::span<const double> channel(int c) const {
    return std::span<const double>(bins).subspan(
        static_cast<std::size_t>(c) * bins_per_channel, bins_per_channel);
  }
};

// `h` maps pixel coordinates of frame src into frame dst. Normalized so that
// h(2,2) == 1.
struct HomographyLink {
  int src = 0;
  int dst = 0;
  Mat3 h = Mat3::Identity();
  bool tracked = true;
};

class TraceBuilder;

// Per-video motion evidence consumed by the samplers. Immutable once built;
// links are stored densely as an n x max_skip table.
class MotionTrace {
 public:
  const std::string& video_id() const { return video_id_; }
  double fps() const { return fps_; }
  int frame_count() const { return static_cast<int>(frames_.size()); }
  int max_skip() const { return max_skip_; }
  int width() const { return frames_.front().width; }
  int height() const { return frames_.front().height; }
  double avg_flow() const { return avg_flow_; }

  const std::vector<FrameMeta>& frames() const { return frames_; }
  const FrameMeta& frame(int i) const { return frames_[i]; }

  // nullptr when the pair has no link (absent from the input or out of range).
  const MotionLink* link(int i, int j) const;

  // All present links in (src, dst) order.
  std::vector<MotionLink> links() const;
  std::size_t link_count() const { return link_count_; }

  bool has_histograms() const { return !histograms_.empty(); }
  const ColorHistogram* histogram(int i) const;
  const std::vector<ColorHistogram>& histograms() const { return histograms_; }

  const std::vector<HomographyLink>& homographies() const {
    return homographies_;
  }
  const HomographyLink* homography(int src, int dst) const;

  // Homography taking frame `from` coordinates into frame `to`, using a
  // direct link (or its inverse) when stored and otherwise chaining
  // consecutive links. nullopt when any step is absent or untracked.
  std::optional<Mat3> chain(int from, int to) const;

  // Mean flow_sum over the consecutive (i, i+1) links.
  static double mean_consecutive_flow(const MotionTrace& trace);

 private:
  friend class TraceBuilder;
  MotionTrace() = default;

  std::size_t slot(int i, int j) const {
    return static_cast<std::size_t>(i) * max_skip_ + (j - i - 1);
  }
  std::optional<Mat3> step(int from, int to) const;

  std::string video_id_;
  double fps_ = 30.0;
  int max_skip_ = 1;
  double avg_flow_ = 0.0;
  std::vector<FrameMeta> frames_;
  std::vector<MotionLink> link_table_;
  std::vector<std::uint8_t> link_present_;
  std::size_t link_count_ = 0;
  std::vector<ColorHistogram> histograms_;
  std::vector<HomographyLink> homographies_;
  std::unordered_map<std::uint64_t, std::size_t> homography_index_;
};

// Accumulates frames and links, then validates every trace invariant in
// build(). Invariant violations throw InvariantError naming the frame.
class TraceBuilder {
 public:
  TraceBuilder(std::string video_id, double fps, int max_skip);

  TraceBuilder& add_frame(const FrameMeta& frame);
  // Convenience: n frames of the given size at the trace's fps.
  TraceBuilder& add_frames(int count, int width, int height);
  TraceBuilder& add_link(const MotionLink& link);
  TraceBuilder& add_histogram(ColorHistogram histogram);
  TraceBuilder& add_homography(const HomographyLink& link);
  // When set, build() checks the recomputed mean consecutive flow against
  // it (1e-6 relative).
  TraceBuilder& expect_avg_flow(double avg_flow);

  MotionTrace build() &&;

 private:
  MotionTrace trace_;
  std::vector<MotionLink> pending_links_;
  std::optional<double> expected_avg_flow_;
};

}  // namespace lapse
