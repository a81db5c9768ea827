#include "lapse/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/LU>

#include "lapse/errors.hpp"

namespace lapse {

namespace {

std::uint64_t pair_key(int src, int dst) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(src)) << 32) |
         static_cast<std::uint32_t>(dst);
}

}  // namespace

Vec2 normalize_direction(const Vec2& px, int width, int height) {
  const double half_w = 0.5 * width;
  const double half_h = 0.5 * height;
  const double half_diag = std::hypot(half_w, half_h);
  return Vec2((px.x() - half_w) / half_diag, (px.y() - half_h) / half_diag);
}

Vec2 denormalize_direction(const Vec2& dir, int width, int height) {
  const double half_w = 0.5 * width;
  const double half_h = 0.5 * height;
  const double half_diag = std::hypot(half_w, half_h);
  return Vec2(dir.x() * half_diag + half_w, dir.y() * half_diag + half_h);
}

std::optional<Vec2> apply_homography(const Mat3& h, const Vec2& p) {
  const Eigen::Vector3d q = h * Eigen::Vector3d(p.x(), p.y(), 1.0);
  if (!(q.z() > 1e-12)) return std::nullopt;
  return Vec2(q.x() / q.z(), q.y() / q.z());
}

std::optional<Quad> warp_frame_corners(const Mat3& h, int width, int height) {
  const Quad corners = {Vec2(0, 0), Vec2(width, 0), Vec2(width, height),
                        Vec2(0, height)};
  Quad out;
  for (std::size_t k = 0; k < corners.size(); ++k) {
    auto p = apply_homography(h, corners[k]);
    if (!p) return std::nullopt;
    out[k] = *p;
  }
  return out;
}

Mat3 translation(double tx, double ty) {
  Mat3 m = Mat3::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return m;
}

Mat3 rotation(double theta) {
  Mat3 m = Mat3::Identity();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

const MotionLink* MotionTrace::link(int i, int j) const {
  if (i < 0 || j <= i || j >= frame_count() || j - i > max_skip_) {
    return nullptr;
  }
  const std::size_t s = slot(i, j);
  return link_present_[s] ? &link_table_[s] : nullptr;
}

std::vector<MotionLink> MotionTrace::links() const {
  std::vector<MotionLink> out;
  out.reserve(link_count_);
  for (std::size_t s = 0; s < link_table_.size(); ++s) {
    if (link_present_[s]) out.push_back(link_table_[s]);
  }
  return out;
}

const ColorHistogram* MotionTrace::histogram(int i) const {
  if (histograms_.empty() || i < 0 || i >= frame_count()) return nullptr;
  return &histograms_[i];
}

const HomographyLink* MotionTrace::homography(int src, int dst) const {
  auto it = homography_index_.find(pair_key(src, dst));
  return it == homography_index_.end() ? nullptr : &homographies_[it->second];
}

std::optional<Mat3> MotionTrace::step(int from, int to) const {
  if (const auto* h = homography(from, to); h != nullptr) {
    if (!h->tracked) return std::nullopt;
    return h->h;
  }
  if (const auto* h = homography(to, from); h != nullptr) {
    if (!h->tracked) return std::nullopt;
    return h->h.inverse();
  }
  return std::nullopt;
}

std::optional<Mat3> MotionTrace::chain(int from, int to) const {
  if (from == to) return Mat3::Identity();
  if (auto direct = step(from, to)) return direct;
  const int dir = to > from ? 1 : -1;
  Mat3 acc = Mat3::Identity();
  for (int k = from; k != to; k += dir) {
    auto h = step(k, k + dir);
    if (!h) return std::nullopt;
    acc = *h * acc;
  }
  acc /= acc(2, 2);
  return acc;
}

double MotionTrace::mean_consecutive_flow(const MotionTrace& trace) {
  const int n = trace.frame_count();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (int i = 0; i + 1 < n; ++i) sum += trace.link(i, i + 1)->flow_sum;
  return sum / (n - 1);
}

TraceBuilder::TraceBuilder(std::string video_id, double fps, int max_skip) {
  trace_.video_id_ = std::move(video_id);
  trace_.fps_ = fps;
  trace_.max_skip_ = std::max(1, max_skip);
}

TraceBuilder& TraceBuilder::add_frame(const FrameMeta& frame) {
  trace_.frames_.push_back(frame);
  return *this;
}

TraceBuilder& TraceBuilder::add_frames(int count, int width, int height) {
  const int base = static_cast<int>(trace_.frames_.size());
  for (int k = 0; k < count; ++k) {
    const int i = base + k;
    trace_.frames_.push_back({i, 1000.0 * i / trace_.fps_, width, height});
  }
  return *this;
}

TraceBuilder& TraceBuilder::add_link(const MotionLink& link) {
  pending_links_.push_back(link);
  return *this;
}

TraceBuilder& TraceBuilder::add_histogram(ColorHistogram histogram) {
  trace_.histograms_.push_back(std::move(histogram));
  return *this;
}

TraceBuilder& TraceBuilder::add_homography(const HomographyLink& link) {
  trace_.homographies_.push_back(link);
  return *this;
}

TraceBuilder& TraceBuilder::expect_avg_flow(double avg_flow) {
  expected_avg_flow_ = avg_flow;
  return *this;
}

MotionTrace TraceBuilder::build() && {
  MotionTrace& t = trace_;
  const int n = t.frame_count();
  if (n == 0) throw InvariantError("trace has no frames");
  if (!(t.fps_ > 0.0)) throw InvariantError("fps must be positive");

  const int width = t.frames_.front().width;
  const int height = t.frames_.front().height;
  for (int i = 0; i < n; ++i) {
    const FrameMeta& f = t.frames_[i];
    if (f.index != i) {
      throw InvariantError("frame indices must be dense and increasing", i);
    }
    if (f.width <= 0 || f.height <= 0) {
      throw InvariantError("frame size must be positive", i);
    }
    if (f.width != width || f.height != height) {
      throw InvariantError("frame size changes within the video", i);
    }
  }

  const std::size_t table_size = static_cast<std::size_t>(n) * t.max_skip_;
  t.link_table_.assign(table_size, MotionLink{});
  t.link_present_.assign(table_size, 0);
  for (const MotionLink& l : pending_links_) {
    if (l.src < 0 || l.dst >= n || l.dst - l.src < 1 ||
        l.dst - l.src > t.max_skip_) {
      throw InvariantError("link (" + std::to_string(l.src) + ", " +
                               std::to_string(l.dst) + ") out of range",
                           l.src);
    }
    if (l.source != DirectionSource::kMissing &&
        !(std::isfinite(l.direction.x()) && std::isfinite(l.direction.y()))) {
      throw InvariantError("non-finite motion direction", l.src);
    }
    if (!(l.flow_sum >= 0.0) || !std::isfinite(l.flow_sum)) {
      throw InvariantError("flow_sum must be finite and non-negative", l.src);
    }
    const std::size_t s = t.slot(l.src, l.dst);
    if (t.link_present_[s]) {
      throw InvariantError("duplicate link", l.src);
    }
    t.link_table_[s] = l;
    t.link_present_[s] = 1;
  }
  t.link_count_ = pending_links_.size();
  pending_links_.clear();
  pending_links_.shrink_to_fit();

  for (int i = 0; i + 1 < n; ++i) {
    if (t.link(i, i + 1) == nullptr) {
      throw InvariantError("missing consecutive link", i);
    }
  }

  if (!t.histograms_.empty()) {
    if (static_cast<int>(t.histograms_.size()) != n) {
      throw InvariantError("expected one histogram per frame");
    }
    const int bins = t.histograms_.front().bins_per_channel;
    for (int i = 0; i < n; ++i) {
      const ColorHistogram& h = t.histograms_[i];
      if (h.bins_per_channel != bins || bins <= 0 ||
          h.bins.size() != static_cast<std::size_t>(3 * bins)) {
        throw InvariantError("histogram has inconsistent bin count", i);
      }
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (double b : h.channel(c)) {
          if (!(b >= 0.0)) throw InvariantError("negative histogram bin", i);
          sum += b;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          throw InvariantError("histogram channel is not normalized", i);
        }
      }
    }
  }

  for (std::size_t k = 0; k < t.homographies_.size(); ++k) {
    HomographyLink& h = t.homographies_[k];
    if (h.src < 0 || h.src >= n || h.dst < 0 || h.dst >= n || h.src == h.dst) {
      throw InvariantError("homography references an invalid frame", h.src);
    }
    if (!h.h.allFinite() || h.h(2, 2) == 0.0) {
      throw InvariantError("homography cannot be normalized", h.src);
    }
    h.h /= h.h(2, 2);
    if (h.tracked && h.h.topLeftCorner<2, 2>().determinant() == 0.0) {
      throw InvariantError("tracked homography is degenerate", h.src);
    }
    if (!t.homography_index_.emplace(pair_key(h.src, h.dst), k).second) {
      throw InvariantError("duplicate homography", h.src);
    }
  }

  t.avg_flow_ = MotionTrace::mean_consecutive_flow(t);
  if (expected_avg_flow_) {
    const double expected = *expected_avg_flow_;
    const double scale = std::max(std::abs(expected), std::abs(t.avg_flow_));
    if (std::abs(expected - t.avg_flow_) > 1e-6 * std::max(scale, 1e-300)) {
      throw InvariantError("stored avg_flow " + std::to_string(expected) +
                           " disagrees with recomputed " +
                           std::to_string(t.avg_flow_));
    }
  }
  return std::move(trace_);
}

}  // namespace lapse
