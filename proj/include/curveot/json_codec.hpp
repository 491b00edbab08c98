#pragma once

#include "json.hpp"

#include "curveot/clustering.hpp"
#include "curveot/io.hpp"
#include "curveot/measures.hpp"
#include "curveot/pipeline.hpp"
#include "curveot/transport.hpp"

// JSON mappings shared by the file formats, the CLI and the HTTP service.
// Decoders throw curveot::Error (InvalidScheme, InvalidConfig, Parse) and
// reject unknown fields.
namespace curveot::json {

using nlohmann::json;

json encode(const WeightScheme& s);
WeightScheme decode_scheme(const json& j);

json encode(const PenaltyVectors& p);
PenaltyVectors decode_penalties(const json& j);

json encode(const PenaltySource& p);
PenaltySource decode_penalty_source(const json& j);

json encode(const PipelineConfig& cfg);
PipelineConfig decode_config(const json& j);

json encode(const Dendrogram& dg);
Dendrogram decode_dendrogram(const json& j);

json encode(const DistanceMatrix& d);
DistanceMatrix decode_distance_matrix(const json& j);

json encode(const io::DatasetManifest& m);
io::DatasetManifest decode_manifest(const json& j);

json encode(const Matrix& m);
json encode(const DualityReport& r);
json encode_points(const Curve2D& c);

/// Parses text, mapping syntax errors to ErrorCode::Parse with the location.
json parse(std::string_view text, std::string_view what);

}  // namespace curveot::json
