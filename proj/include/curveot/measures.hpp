#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "curveot/curve.hpp"

namespace curveot {

enum class SchemeKind {
  Uniform,
  Binomial,
  IndexIncreasing,
  IndexDecreasing,
  FirstComponent,
  SecondComponent,
  SecondComponentReversed,
  SupportUniform,
  SupportFirstComponent,
  SupportSecondComponent,
  SupportSecondComponentReversed,
};

std::string_view to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(std::string_view name);
bool is_support_kind(SchemeKind kind);

// Support windows are 1-based and inclusive, matching how profile indices are
// usually quoted.
struct IndexFraction {
  double fraction;
  bool operator==(const IndexFraction&) const = default;
};
struct HeightFraction {
  double fraction;
  bool operator==(const HeightFraction&) const = default;
};
struct ExplicitWindow {
  std::size_t k1;
  std::size_t k2;
  bool operator==(const ExplicitWindow&) const = default;
};
using SupportMode = std::variant<IndexFraction, HeightFraction, ExplicitWindow>;

struct SupportWindow {
  std::size_t k1;
  std::size_t k2;
  std::size_t size() const noexcept { return k2 - k1 + 1; }
  bool operator==(const SupportWindow&) const = default;
};

enum class BinomialPreset { Sharp, Soft };

/// p whose shifted-index binomial has mean n/6 (Sharp) or n/3 (Soft).
double binomial_preset_p(BinomialPreset preset);

struct WeightScheme {
  SchemeKind kind = SchemeKind::Uniform;
  std::optional<double> p;
  std::optional<SupportMode> support;

  /// Throws InvalidScheme if p is missing/outside (0,1) for Binomial, or a
  /// support mode is attached to a kind that does not use one.
  void validate() const;

  bool operator==(const WeightScheme&) const = default;
};

/// Support used when a Support* scheme carries no explicit mode.
inline constexpr double kDefaultSupportFraction = 1.0 / 6.0;

struct DiscreteMeasure {
  std::vector<double> weights;
  double total = 0.0;
};

SupportWindow resolve_support(const Curve2D& c, const SupportMode& mode);

DiscreteMeasure build_measure(const Curve2D& c, const WeightScheme& scheme);

}  // namespace curveot
