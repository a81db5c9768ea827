#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lapse/geometry.hpp"

namespace lapse {

// Default mask resolution: one cell per 4 x 4 block of full-resolution
// pixels, so cell counts are rescaled by 16.
inline constexpr double kCoverageCell = 4.0;

// Binary raster of the canvas area covered by a set of polygons. Cell (c, r)
// spans [origin_x + c*cell, origin_x + (c+1)*cell) horizontally; a cell is
// covered when its center lies inside any polygon.
class CoverageMask {
 public:
  CoverageMask() = default;

  // Cells are aligned to multiples of `cell` in canvas coordinates.
  static CoverageMask rasterize(std::span<const Quad> quads,
                                double cell = kCoverageCell);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double cell() const { return cell_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  bool empty() const { return covered_count_ == 0; }

  bool covered(int col, int row) const {
    return col >= 0 && row >= 0 && col < cols_ && row < rows_ &&
           cells_[static_cast<std::size_t>(row) * cols_ + col] != 0;
  }
  bool covers_point(const Vec2& p) const;

  std::size_t covered_cells() const { return covered_count_; }
  // Covered cells times cell area, in full-resolution pixels.
  double area() const { return covered_count_ * cell_ * cell_; }
  // Mean of covered cell centers.
  Vec2 centroid() const;

  // True when every cell overlapping the axis-aligned rectangle is covered.
  bool covers_rect(const Box& rect) const;

  // Largest half-width a such that the rectangle centered at `center` with
  // half extents (a, a / aspect) is covered; 0 when the center cell itself
  // is uncovered.
  double largest_inscribed_half_width(const Vec2& center, double aspect) const;

 private:
  void build_prefix_sums();

  int cols_ = 0;
  int rows_ = 0;
  double cell_ = kCoverageCell;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::size_t covered_count_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> prefix_;  // (rows+1) x (cols+1) summed-area table
};

// Area of the union of the quads, estimated on a mask of `cell` resolution.
double union_area(std::span<const Quad> quads, double cell = kCoverageCell);

Box bounding_box(std::span<const Quad> quads);

}  // namespace lapse
