#pragma once

#include <span>
#include <vector>

#include "lapse/coverage.hpp"
#include "lapse/geometry.hpp"

namespace lapse {

// Crop centers minimizing
//   sum |cr_i - m_i|^2 + lambda * sum |cr_i - cr_{i+1}|^2,
// whose stationarity conditions are, at interior points,
//   cr_i = (lambda * (cr_{i-1} + cr_{i+1}) + m_i) / (2 * lambda + 1)
// and at the two ends cr_0 = (lambda * cr_1 + m_0) / (lambda + 1) (likewise
// for the last point). Solved directly as a tridiagonal system per axis.
std::vector<Vec2> smooth_crop_centers(std::span<const Vec2> mass_centers,
                                      double lambda);

// The energy minimized by smooth_crop_centers.
double crop_energy(std::span<const Vec2> centers,
                   std::span<const Vec2> mass_centers, double lambda);

// Largest |interior fixed-point residual| of `centers` against the relation
// above.
double crop_fixed_point_residual(std::span<const Vec2> centers,
                                 std::span<const Vec2> mass_centers,
                                 double lambda);

struct CropPath {
  std::vector<Vec2> centers;
  double width = 0.0;
  double height = 0.0;
};

// One reset segment: smooths the centers, then picks the largest
// width x height rectangle (width / height == aspect) that, centered at each
// cr_i, lies inside coverage[i] for every i. Throws EmptyCoverage with
// frame_ids[i] when cr_i itself is uncovered.
CropPath solve_crop_path(std::span<const Vec2> mass_centers, double lambda,
                         std::span<const CoverageMask> coverage, double aspect,
                         std::span<const int> frame_ids);

}  // namespace lapse
