#include "lapse/crop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lapse/errors.hpp"

namespace lapse {

std::vector<Vec2> smooth_crop_centers(std::span<const Vec2> mass_centers,
                                      double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  const std::size_t n = mass_centers.size();
  std::vector<Vec2> out(mass_centers.begin(), mass_centers.end());
  if (n < 2 || lambda == 0.0) return out;

  // Thomas algorithm on the symmetric, diagonally dominant system; the
  // off-diagonals are all -lambda.
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool end = i == 0 || i + 1 == n;
    diag[i] = 1.0 + (end ? lambda : 2.0 * lambda);
  }
  std::vector<double> c_prime(n);
  std::vector<Vec2> d_prime(n);
  c_prime[0] = -lambda / diag[0];
  d_prime[0] = mass_centers[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = diag[i] + lambda * c_prime[i - 1];
    c_prime[i] = -lambda / denom;
    d_prime[i] = (mass_centers[i] + lambda * d_prime[i - 1]) / denom;
  }
  out[n - 1] = d_prime[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    out[i] = d_prime[i] - c_prime[i] * out[i + 1];
  }
  return out;
}

double crop_energy(std::span<const Vec2> centers,
                   std::span<const Vec2> mass_centers, double lambda) {
  double data = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    data += (centers[i] - mass_centers[i]).squaredNorm();
  }
  double smooth = 0.0;
  for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
    smooth += (centers[i + 1] - centers[i]).squaredNorm();
  }
  return data + lambda * smooth;
}

double crop_fixed_point_residual(std::span<const Vec2> centers,
                                 std::span<const Vec2> mass_centers,
                                 double lambda) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < centers.size(); ++i) {
    const Vec2 fixed =
        (lambda * (centers[i - 1] + centers[i + 1]) + mass_centers[i]) /
        (2.0 * lambda + 1.0);
    worst = std::max(worst, (centers[i] - fixed).cwiseAbs().maxCoeff());
  }
  return worst;
}

CropPath solve_crop_path(std::span<const Vec2> mass_centers, double lambda,
                         std::span<const CoverageMask> coverage, double aspect,
                         std::span<const int> frame_ids) {
  if (coverage.size() != mass_centers.size() ||
      frame_ids.size() != mass_centers.size()) {
    throw std::invalid_argument("crop inputs must have equal lengths");
  }
  if (!(aspect > 0.0)) throw std::invalid_argument("aspect must be positive");
  CropPath path;
  path.centers = smooth_crop_centers(mass_centers, lambda);
  double half_width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.centers.size(); ++i) {
    const double a =
        coverage[i].largest_inscribed_half_width(path.centers[i], aspect);
    if (a <= 0.0) throw EmptyCoverage(frame_ids[i]);
    half_width = std::min(half_width, a);
  }
  if (path.centers.empty()) half_width = 0.0;
  path.width = 2.0 * half_width;
  path.height = path.width / aspect;
  return path;
}

}  // namespace lapse
