#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "curveot/clustering.hpp"
#include "curveot/curve.hpp"
#include "curveot/pipeline.hpp"
#include "curveot/transport.hpp"

namespace curveot::io {

/// Two numeric columns (x1, x2) separated by a comma, semicolon or blanks.
/// A non-numeric first line is taken as a header. '#' starts a comment.
Curve2D parse_curve_csv(std::string_view text, std::string id);
Curve2D load_curve_csv(const std::filesystem::path& path, std::string id = {});
std::string format_curve_csv(const Curve2D& c);

struct ManifestEntry {
  std::string id;
  std::string path;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<ManifestEntry> curves;
  std::string created;
  bool operator==(const DatasetManifest&) const = default;
};

DatasetManifest parse_manifest(std::string_view text);
std::string format_manifest(const DatasetManifest& m);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Curves in manifest order; relative paths resolve against the manifest's
/// directory.
std::vector<Curve2D> load_dataset(const std::filesystem::path& manifest_path);

std::string format_matrix_csv(const DistanceMatrix& d);
DistanceMatrix parse_matrix_csv(std::string_view text);
void save_matrix(const DistanceMatrix& d, const std::filesystem::path& path);
DistanceMatrix load_matrix(const std::filesystem::path& path);

/// Plan coupling as CSV with a header row of column indices.
std::string format_plan_csv(const Matrix& pi);
std::string format_matrix_plain_csv(const Matrix& m);

PipelineConfig parse_config(std::string_view text);
std::string format_config(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

WeightScheme parse_scheme(std::string_view text);
/// Inline scheme: a JSON object, or a bare kind name such as "uniform".
WeightScheme parse_scheme_text(std::string_view text);
/// "index_fraction:0.1667", "height_fraction:0.25" or "explicit:2,9".
SupportMode parse_support_spec(std::string_view text);
PenaltyVectors parse_penalties(std::string_view text);

std::string format_dendrogram(const Dendrogram& dg);
Dendrogram parse_dendrogram(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal form that round-trips at 17 significant digits.
std::string format_double(double v);

}  // namespace curveot::io
