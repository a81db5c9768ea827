#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

namespace lapse {

using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Quad = std::array<Vec2, 4>;

// Maps a pixel location to direction coordinates: the image center goes to
// (0, 0) and the image corners land on the unit circle.
Vec2 normalize_direction(const Vec2& px, int width, int height);

// Inverse of normalize_direction.
Vec2 denormalize_direction(const Vec2& dir, int width, int height);

// Applies a homography to a point. Returns nullopt when the point maps to or
// behind the line at infinity.
std::optional<Vec2> apply_homography(const Mat3& h, const Vec2& p);

// Corners (0,0), (w,0), (w,h), (0,h) mapped by h.
std::optional<Quad> warp_frame_corners(const Mat3& h, int width, int height);

Mat3 translation(double tx, double ty);

// Rotation by theta radians about the origin.
Mat3 rotation(double theta);

struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

}  // namespace lapse
