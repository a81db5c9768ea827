#include "lapse/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lapse {

Box bounding_box(std::span<const Quad> quads) {
  Box box{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const Quad& q : quads) {
    for (const Vec2& p : q) {
      box.min_x = std::min(box.min_x, p.x());
      box.min_y = std::min(box.min_y, p.y());
      box.max_x = std::max(box.max_x, p.x());
      box.max_y = std::max(box.max_y, p.y());
    }
  }
  return box;
}

CoverageMask CoverageMask::rasterize(std::span<const Quad> quads, double cell) {
  CoverageMask mask;
  mask.cell_ = cell;
  if (quads.empty()) {
    mask.build_prefix_sums();
    return mask;
  }
  const Box box = bounding_box(quads);
  const double c0 = std::floor(box.min_x / cell);
  const double r0 = std::floor(box.min_y / cell);
  mask.origin_x_ = c0 * cell;
  mask.origin_y_ = r0 * cell;
  mask.cols_ = std::max(1, static_cast<int>(std::ceil(box.max_x / cell) - c0));
  mask.rows_ = std::max(1, static_cast<int>(std::ceil(box.max_y / cell) - r0));
  mask.cells_.assign(static_cast<std::size_t>(mask.cols_) * mask.rows_, 0);

  // Scanline fill per polygon with the half-open rule: a cell center on a
  // left or top edge is inside, on a right or bottom edge it is outside.
  std::vector<double> xs;
  for (const Quad& q : quads) {
    double qmin_y = q[0].y();
    double qmax_y = q[0].y();
    for (const Vec2& p : q) {
      qmin_y = std::min(qmin_y, p.y());
      qmax_y = std::max(qmax_y, p.y());
    }
    const int row_begin = std::max(
        0, static_cast<int>(std::floor((qmin_y - mask.origin_y_) / cell - 0.5)));
    const int row_end = std::min(
        mask.rows_,
        static_cast<int>(std::ceil((qmax_y - mask.origin_y_) / cell + 0.5)));
    for (int r = row_begin; r < row_end; ++r) {
      const double yc = mask.origin_y_ + (r + 0.5) * cell;
      xs.clear();
      for (std::size_t k = 0; k < q.size(); ++k) {
        const Vec2& a = q[k];
        const Vec2& b = q[(k + 1) % q.size()];
        const bool crosses = (a.y() <= yc && yc < b.y()) ||
                             (b.y() <= yc && yc < a.y());
        if (!crosses) continue;
        const double t = (yc - a.y()) / (b.y() - a.y());
        xs.push_back(a.x() + t * (b.x() - a.x()));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        // Cells with xs[k] <= center < xs[k+1].
        const int c_begin = std::max(
            0, static_cast<int>(
                   std::ceil((xs[k] - mask.origin_x_) / cell - 0.5)));
        const int c_end = std::min(
            mask.cols_, static_cast<int>(std::ceil(
                            (xs[k + 1] - mask.origin_x_) / cell - 0.5)));
        for (int c = c_begin; c < c_end; ++c) {
          mask.cells_[static_cast<std::size_t>(r) * mask.cols_ + c] = 1;
        }
      }
    }
  }
  mask.covered_count_ = static_cast<std::size_t>(
      std::count(mask.cells_.begin(), mask.cells_.end(), std::uint8_t{1}));
  mask.build_prefix_sums();
  return mask;
}

void CoverageMask::build_prefix_sums() {
  prefix_.assign(static_cast<std::size_t>(rows_ + 1) * (cols_ + 1), 0);
  const std::size_t stride = cols_ + 1;
  for (int r = 0; r < rows_; ++r) {
    std::uint32_t row_sum = 0;
    for (int c = 0; c < cols_; ++c) {
      row_sum += cells_[static_cast<std::size_t>(r) * cols_ + c];
      prefix_[(r + 1) * stride + (c + 1)] = prefix_[r * stride + (c + 1)] + row_sum;
    }
  }
}

bool CoverageMask::covers_point(const Vec2& p) const {
  const int c = static_cast<int>(std::floor((p.x() - origin_x_) / cell_));
  const int r = static_cast<int>(std::floor((p.y() - origin_y_) / cell_));
  return covered(c, r);
}

Vec2 CoverageMask::centroid() const {
  Vec2 sum = Vec2::Zero();
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (cells_[static_cast<std::size_t>(r) * cols_ + c] == 0) continue;
      sum += Vec2(origin_x_ + (c + 0.5) * cell_, origin_y_ + (r + 0.5) * cell_);
    }
  }
  return covered_count_ == 0 ? sum : Vec2(sum / covered_count_);
}

bool CoverageMask::covers_rect(const Box& rect) const {
  const double fc0 = std::floor((rect.min_x - origin_x_) / cell_);
  const double fr0 = std::floor((rect.min_y - origin_y_) / cell_);
  const double fc1 = std::ceil((rect.max_x - origin_x_) / cell_);
  const double fr1 = std::ceil((rect.max_y - origin_y_) / cell_);
  if (fc0 < 0 || fr0 < 0 || fc1 > cols_ || fr1 > rows_) return false;
  const int c0 = static_cast<int>(fc0);
  const int r0 = static_cast<int>(fr0);
  const int c1 = std::max(c0 + 1, static_cast<int>(fc1));
  const int r1 = std::max(r0 + 1, static_cast<int>(fr1));
  if (c1 > cols_ || r1 > rows_) return false;
  const std::size_t stride = cols_ + 1;
  const std::int64_t sum =
      static_cast<std::int64_t>(prefix_[r1 * stride + c1]) -
      prefix_[r0 * stride + c1] - prefix_[r1 * stride + c0] +
      prefix_[r0 * stride + c0];
  return sum == static_cast<std::int64_t>(c1 - c0) * (r1 - r0);
}

double CoverageMask::largest_inscribed_half_width(const Vec2& center,
                                                  double aspect) const {
  auto rect = [&](double a) {
    const double b = a / aspect;
    return Box{center.x() - a, center.y() - b, center.x() + a, center.y() + b};
  };
  if (!covers_rect(rect(0.0))) return 0.0;
  double lo = 0.0;
  double hi = std::max(cols_ * cell_, rows_ * cell_ * aspect);
  if (covers_rect(rect(hi))) return hi;
  for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    (covers_rect(rect(mid)) ? lo : hi) = mid;
  }
  return lo;
}

double union_area(std::span<const Quad> quads, double cell) {
  return CoverageMask::rasterize(quads, cell).area();
}

}  // namespace lapse
