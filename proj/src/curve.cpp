#include "curveot/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curveot/error.hpp"

namespace curveot {

Curve2D validate_curve(std::vector<Point2> raw, std::string id) {
  if (raw.size() < 2) {
    throw Error(ErrorCode::EmptyCurve, "curve '" + id + "' has " + std::to_string(raw.size()) +
                                           " point(s); at least 2 are required");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i].x1) || !std::isfinite(raw[i].x2)) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "curve '" + id + "': non-finite coordinate at index " + std::to_string(i + 1));
    }
  }
  if (id.empty()) throw Error(ErrorCode::Parse, "curve id must be nonempty");
  return Curve2D(std::move(raw), std::move(id));
}

Curve2D Curve2D::with_id(std::string id) const {
  return validate_curve(points_, std::move(id));
}

Centroid centroid(const Curve2D& c) {
  double su = 0.0;
  double sw = 0.0;
  for (const auto& p : c.points()) {
    su += p.x1;
    sw += p.x2;
  }
  const auto n = static_cast<double>(c.size());
  return {su / n, sw / n};
}

Curve2D translate(const Curve2D& c, double dx1, double dx2) {
  std::vector<Point2> out(c.points().begin(), c.points().end());
  for (auto& p : out) {
    p.x1 += dx1;
    p.x2 += dx2;
  }
  return validate_curve(std::move(out), c.id());
}

Curve2D scale(const Curve2D& c, double factor) {
  std::vector<Point2> out(c.points().begin(), c.points().end());
  for (auto& p : out) {
    p.x1 *= factor;
    p.x2 *= factor;
  }
  return validate_curve(std::move(out), c.id());
}

Curve2D invert_y(const Curve2D& c) {
  const auto [lo, hi] = std::minmax_element(c.points().begin(), c.points().end(),
                                            [](const Point2& a, const Point2& b) { return a.x2 < b.x2; });
  const double pivot = lo->x2 + hi->x2;
  std::vector<Point2> out(c.points().begin(), c.points().end());
  for (auto& p : out) p.x2 = pivot - p.x2;
  return validate_curve(std::move(out), c.id());
}

Curve2D extract_external_half(const Curve2D& c) {
  // min_element returns the first minimum, which is the tie-break we want.
  const auto pts = c.points();
  const auto it = std::min_element(pts.begin(), pts.end(),
                                   [](const Point2& a, const Point2& b) { return a.x2 < b.x2; });
  const auto start = static_cast<std::size_t>(it - pts.begin());
  if (pts.size() - start < 2) {
    throw Error(ErrorCode::DegenerateHalf,
                "curve '" + c.id() + "': minimum height only at the last point; external half is a single point");
  }
  return validate_curve(std::vector<Point2>(it, pts.end()), c.id());
}

std::pair<Curve2D, Curve2D> align_centroids(const Curve2D& a, const Curve2D& b) {
  const Centroid ca = centroid(a);
  const Centroid cb = centroid(b);
  const double u = (ca.u + cb.u) / 2.0;
  const double w = (ca.w + cb.w) / 2.0;
  return {translate(a, u - ca.u, w - ca.w), translate(b, u - cb.u, w - cb.w)};
}

double arc_length(const Curve2D& c) {
  double total = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    total += std::hypot(c[i].x1 - c[i - 1].x1, c[i].x2 - c[i - 1].x2);
  }
  return total;
}

Curve2D resample_arc_length(const Curve2D& c, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "resample count must be at least 2");
  const std::size_t n = c.size();
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cumulative[i] = cumulative[i - 1] + std::hypot(c[i].x1 - c[i - 1].x1, c[i].x2 - c[i - 1].x2);
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroLengthCurve, "curve '" + c.id() + "' has zero arc length");
  }

  std::vector<Point2> out;
  out.reserve(k);
  out.push_back(c[0]);
  std::size_t seg = 1;
  for (std::size_t s = 1; s + 1 < k; ++s) {
    const double target = total * static_cast<double>(s) / static_cast<double>(k - 1);
    while (seg + 1 < n && cumulative[seg] < target) ++seg;
    const double len = cumulative[seg] - cumulative[seg - 1];
    const double t = len > 0.0 ? std::clamp((target - cumulative[seg - 1]) / len, 0.0, 1.0) : 1.0;
    const Point2& p = c[seg - 1];
    const Point2& q = c[seg];
    out.push_back({p.x1 + t * (q.x1 - p.x1), p.x2 + t * (q.x2 - p.x2)});
  }
  out.push_back(c[n - 1]);
  return validate_curve(std::move(out), c.id());
}

Curve2D slice(const Curve2D& c, std::size_t k1, std::size_t k2) {
  if (k1 < 1 || k2 > c.size() || k2 < k1 + 1) {
    throw Error(ErrorCode::UnresolvableSupport,
                "window [" + std::to_string(k1) + ", " + std::to_string(k2) + "] is invalid for curve '" +
                    c.id() + "' of " + std::to_string(c.size()) + " points");
  }
  const auto pts = c.points();
  return validate_curve(std::vector<Point2>(pts.begin() + static_cast<std::ptrdiff_t>(k1 - 1),
                                            pts.begin() + static_cast<std::ptrdiff_t>(k2)),
                        c.id());
}

}  // namespace curveot
