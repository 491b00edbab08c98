#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace curveot {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Ordered polyline with at least two finite points and a nonempty id.
///
/// Instances can only be obtained through validate_curve (or the
/// transformations below, which preserve the invariants), so every Curve2D
/// seen by the rest of the library is known to be well formed.
class Curve2D {
 public:
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const Point2> points() const noexcept { return points_; }
  const Point2& operator[](std::size_t i) const { return points_[i]; }
  const std::string& id() const noexcept { return id_; }

  Curve2D with_id(std::string id) const;

  bool operator==(const Curve2D&) const = default;

 private:
  friend Curve2D validate_curve(std::vector<Point2> raw, std::string id);
  Curve2D(std::vector<Point2> points, std::string id)
      : points_(std::move(points)), id_(std::move(id)) {}

  std::vector<Point2> points_;
  std::string id_;
};

struct Centroid {
  double u = 0.0;
  double w = 0.0;
};

/// Throws EmptyCurve for fewer than two points and NonFiniteCoordinate with
/// the 1-based position of the first offending point.
Curve2D validate_curve(std::vector<Point2> raw, std::string id = "curve");

/// Unweighted mean of the points.
Centroid centroid(const Curve2D& c);

Curve2D translate(const Curve2D& c, double dx1, double dx2);
Curve2D scale(const Curve2D& c, double factor);

/// Mirrors the second coordinate inside the curve's own height range,
/// x2 -> (min + max) - x2, so the uppermost point becomes the lowermost.
Curve2D invert_y(const Curve2D& c);

/// Suffix starting at the first index attaining min x2.
/// Throws DegenerateHalf when that suffix would be a single point.
Curve2D extract_external_half(const Curve2D& c);

/// Translates both curves so their centroids coincide with the midpoint of
/// the two original centroids.
std::pair<Curve2D, Curve2D> align_centroids(const Curve2D& a, const Curve2D& b);

double arc_length(const Curve2D& c);

/// k points at equal arc-length spacing; endpoints are kept exactly.
Curve2D resample_arc_length(const Curve2D& c, std::size_t k);

/// Contiguous 1-based inclusive window [k1, k2].
Curve2D slice(const Curve2D& c, std::size_t k1, std::size_t k2);

}  // namespace curveot
