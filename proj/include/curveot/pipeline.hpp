#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>

#include "curveot/clustering.hpp"
#include "curveot/curve.hpp"
#include "curveot/measures.hpp"
#include "curveot/transport.hpp"

namespace curveot {

/// Active block given as a fraction of each curve's points (ceil(f*n) rows,
/// ceil(f*m) columns), so one config works for curves of any length.
struct ActiveFraction {
  double fraction;
  bool operator==(const ActiveFraction&) const = default;
};

using PenaltySource = std::variant<PenaltyVectors, ActiveBlock, ActiveFraction>;

inline constexpr int kConfigVersion = 1;

struct PipelineConfig {
  int version = kConfigVersion;
  WeightScheme scheme;
  bool external_half = false;
  bool align_centroids = true;
  bool invert_y = false;
  /// Geometric cut to the start window of this height fraction, applied
  /// before weights are computed.
  std::optional<double> truncate;
  double cost_order = 1.0;
  Variant variant = Variant::Balanced;
  std::optional<PenaltySource> penalties;
  Linkage linkage = Linkage::Average;

  /// Throws InvalidConfig / InvalidScheme.
  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

inline constexpr int kExperimentCount = 8;

/// Presets for experiments 1..8; throws InvalidConfig otherwise.
PipelineConfig experiment_preset(int number);

/// Curve after inversion, external half and truncation.
Curve2D preprocess(const Curve2D& c, const PipelineConfig& cfg);

struct PreparedPair {
  Curve2D a;  // geometry used for the cost (aligned if requested)
  Curve2D b;
  DiscreteMeasure beta;
  DiscreteMeasure alpha;
  CostMatrix cost;
  std::optional<PenaltyVectors> penalties;
};

PreparedPair prepare_pair(const Curve2D& a, const Curve2D& b, const PipelineConfig& cfg);

struct PairResult {
  PreparedPair prepared;
  TransportPlan plan;
  /// objective^(1/r) for balanced and relaxed; the signed objective for partial.
  double distance = 0.0;
};

PairResult run_pair(const Curve2D& a, const Curve2D& b, const PipelineConfig& cfg);

double pair_distance(const Curve2D& a, const Curve2D& b, const PipelineConfig& cfg);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// jobs = 0 uses the hardware concurrency. Partial is rejected because its
/// objective can be negative. Errors carry the failing pair's ids.
DistanceMatrix pairwise_matrix(std::span<const Curve2D> curves, const PipelineConfig& cfg, unsigned jobs = 0,
                               const ProgressFn& progress = {});

}  // namespace curveot
