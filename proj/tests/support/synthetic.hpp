#pragma once

// Synthetic vessel cross-sections for clustering checks. A profile runs from
// the centre of the inner base up the inner wall to the rim and back down the
// outer wall, so the rim is the highest point and the outer wall is the
// external half once heights are inverted.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "curveot/curve.hpp"
#include "curveot/io.hpp"

namespace curveot::synthetic {

enum class Family { Cylinder, Bowl, Cone, FlaredRim, InturnedRim };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Cylinder: return "cylinder";
    case Family::Bowl: return "bowl";
    case Family::Cone: return "cone";
    case Family::FlaredRim: return "flared";
    case Family::InturnedRim: return "inturned";
  }
  return "?";
}

// Outer radius at relative height u in [0, 1] for a vessel of height 1.
inline double outer_radius(Family f, double u) {
  constexpr double kRimStart = 5.0 / 6.0;
  const double t = u > kRimStart ? (u - kRimStart) / (1.0 - kRimStart) : 0.0;
  switch (f) {
    case Family::Cylinder: return 0.40 + 0.02 * u;
    case Family::Bowl: return 0.08 + 0.55 * std::sqrt(u);
    case Family::Cone: return 0.05 + 0.75 * u * u;
    case Family::FlaredRim: return 0.30 + 0.12 * std::sin(2.5 * u) + 0.12 * t * t;
    case Family::InturnedRim: return 0.30 + 0.12 * std::sin(2.5 * u) - 0.06 * t * t;
  }
  return 0.0;
}

struct ProfileOptions {
  std::size_t wall_points = 60;
  double height = 10.0;
  double thickness = 0.04;    // relative to height
  double size_jitter = 0.12;  // uniform scale factor in [1 - j, 1 + j]
  double noise = 0.003;       // relative to height
};

inline Curve2D make_profile(Family f, std::mt19937_64& rng, std::string id, const ProfileOptions& opt = {}) {
  std::uniform_real_distribution<double> scale_dist(1.0 - opt.size_jitter, 1.0 + opt.size_jitter);
  std::normal_distribution<double> noise(0.0, opt.noise);
  const double s = scale_dist(rng) * opt.height;
  const std::size_t n = opt.wall_points;
  std::vector<Point2> pts;
  pts.reserve(2 * n + 1);
  // Inner wall, base centre to rim.
  pts.push_back({0.0, s * opt.thickness});
  for (std::size_t i = 1; i < n; ++i) {
    const double u = opt.thickness + (1.0 - opt.thickness) * static_cast<double>(i) / static_cast<double>(n);
    const double r = std::max(0.0, outer_radius(f, u) - opt.thickness);
    pts.push_back({s * (r + noise(rng)), s * (u + noise(rng))});
  }
  // Rim, then outer wall down to the foot.
  pts.push_back({s * (outer_radius(f, 1.0) - 0.5 * opt.thickness), s * (1.0 + opt.thickness)});
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = 1.0 - static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({s * (outer_radius(f, u) + noise(rng)), s * std::max(0.0, u + noise(rng))});
  }
  pts.back().x2 = 0.0;
  return validate_curve(std::move(pts), std::move(id));
}

struct LabelledSet {
  std::vector<Curve2D> curves;
  std::vector<int> labels;
};

inline LabelledSet make_families(const std::vector<Family>& families, std::size_t per_family, std::uint64_t seed,
                                 const ProfileOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  LabelledSet out;
  for (std::size_t k = 0; k < families.size(); ++k) {
    for (std::size_t i = 0; i < per_family; ++i) {
      out.curves.push_back(
          make_profile(families[k], rng, std::string(family_name(families[k])) + "_" + std::to_string(i), opt));
      out.labels.push_back(static_cast<int>(k));
    }
  }
  return out;
}

// Writes curves/<id>.csv and manifest.json under dir; returns the manifest path.
inline std::filesystem::path write_dataset(const std::filesystem::path& dir, const std::vector<Curve2D>& curves,
                                           const std::string& name = "synthetic") {
  std::filesystem::create_directories(dir / "curves");
  io::DatasetManifest m{name, {}, "2026-01-01T00:00:00Z"};
  for (const auto& c : curves) {
    const std::string rel = "curves/" + c.id() + ".csv";
    io::write_file(dir / rel, io::format_curve_csv(c));
    m.curves.push_back({c.id(), rel});
  }
  io::write_file(dir / "manifest.json", io::format_manifest(m));
  return dir / "manifest.json";
}

}  // namespace curveot::synthetic
