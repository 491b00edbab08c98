#include "curveot/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "curveot/error.hpp"
#include "numeric.hpp"

namespace curveot {
namespace {

constexpr std::array<std::pair<SchemeKind, std::string_view>, 11> kSchemeNames{{
    {SchemeKind::Uniform, "uniform"},
    {SchemeKind::Binomial, "binomial"},
    {SchemeKind::IndexIncreasing, "index_increasing"},
    {SchemeKind::IndexDecreasing, "index_decreasing"},
    {SchemeKind::FirstComponent, "first_component"},
    {SchemeKind::SecondComponent, "second_component"},
    {SchemeKind::SecondComponentReversed, "second_component_reversed"},
    {SchemeKind::SupportUniform, "support_uniform"},
    {SchemeKind::SupportFirstComponent, "support_first_component"},
    {SchemeKind::SupportSecondComponent, "support_second_component"},
    {SchemeKind::SupportSecondComponentReversed, "support_second_component_reversed"},
}};

double coordinate(const Point2& p, int component) { return component == 1 ? p.x1 : p.x2; }

// x^c_i / sum over [first, last) of x^c, zero elsewhere.
std::vector<double> proportional_weights(const Curve2D& c, int component, std::size_t first,
                                         std::size_t last) {
  detail::CompensatedSum denom;
  for (std::size_t i = first; i < last; ++i) {
    const double v = coordinate(c[i], component);
    if (v < 0.0) {
      throw Error(ErrorCode::NegativeCoordinateForScheme,
                  "curve '" + c.id() + "': coordinate x" + std::to_string(component) + " at index " +
                      std::to_string(i + 1) + " is negative; coordinate-driven weights need nonnegative data");
    }
    denom.add(v);
  }
  const double sum = denom.value();
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::DegenerateDenominator,
                "curve '" + c.id() + "': coordinate x" + std::to_string(component) + " is zero on the whole window");
  }
  std::vector<double> w(c.size(), 0.0);
  for (std::size_t i = first; i < last; ++i) w[i] = coordinate(c[i], component) / sum;
  return w;
}

std::vector<double> binomial_weights(std::size_t n, double p) {
  // Shifted indexing: point i (1-based) gets the mass of k = i - 1.
  const double nn = static_cast<double>(n);
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i);
    logw[i] = std::lgamma(nn + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nn - k + 1.0) + k * std::log(p) +
              (nn - k) * std::log1p(-p);
  }
  const double peak = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logw[i] - peak);
  return w;
}

DiscreteMeasure finish(std::vector<double> w, bool renormalize) {
  if (renormalize) {
    const double s = detail::compensated_sum(w);
    for (auto& v : w) v /= s;
  }
  const double total = detail::compensated_sum(w);
  return {std::move(w), total};
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
  for (const auto& [k, name] : kSchemeNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

SchemeKind scheme_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kSchemeNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::InvalidScheme, "unknown weight scheme '" + std::string(name) + "'");
}

bool is_support_kind(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::SupportUniform:
    case SchemeKind::SupportFirstComponent:
    case SchemeKind::SupportSecondComponent:
    case SchemeKind::SupportSecondComponentReversed:
      return true;
    default:
      return false;
  }
}

double binomial_preset_p(BinomialPreset preset) {
  return preset == BinomialPreset::Sharp ? 1.0 / 6.0 : 1.0 / 3.0;
}

void WeightScheme::validate() const {
  if (kind == SchemeKind::Binomial) {
    if (!p || !(*p > 0.0 && *p < 1.0)) {
      throw Error(ErrorCode::InvalidScheme, "binomial scheme requires p strictly inside (0, 1)");
    }
  } else if (p) {
    throw Error(ErrorCode::InvalidScheme, "parameter p only applies to the binomial scheme");
  }
  if (support && !is_support_kind(kind)) {
    throw Error(ErrorCode::InvalidScheme,
                "scheme '" + std::string(to_string(kind)) + "' does not take a support window");
  }
  if (support) {
    const bool bad_fraction = std::visit(
        [](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, ExplicitWindow>) {
            return false;
          } else {
            return !(m.fraction > 0.0 && m.fraction <= 1.0);
          }
        },
        *support);
    if (bad_fraction) throw Error(ErrorCode::InvalidScheme, "support fraction must lie in (0, 1]");
  }
}

SupportWindow resolve_support(const Curve2D& c, const SupportMode& mode) {
  const std::size_t n = c.size();
  SupportWindow window{1, 0};
  if (const auto* e = std::get_if<ExplicitWindow>(&mode)) {
    window = {e->k1, e->k2};
    if (e->k1 < 1 || e->k2 > n || e->k1 >= e->k2) {
      throw Error(ErrorCode::UnresolvableSupport,
                  "explicit support (" + std::to_string(e->k1) + ", " + std::to_string(e->k2) +
                      ") needs 1 <= k1 < k2 <= " + std::to_string(n));
    }
    return window;
  }
  if (const auto* f = std::get_if<IndexFraction>(&mode)) {
    const double raw = f->fraction * static_cast<double>(n);
    // Guard against 1/6 * 300 landing a hair above 50.
    const auto k2 = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    window = {1, std::min(k2, n)};
  } else {
    const auto& h = std::get<HeightFraction>(mode);
    const auto [lo, hi] = std::minmax_element(c.points().begin(), c.points().end(),
                                              [](const Point2& a, const Point2& b) { return a.x2 < b.x2; });
    const double range = hi->x2 - lo->x2;
    const double threshold = lo->x2 + h.fraction * range + 1e-12 * std::max(1.0, std::abs(range));
    std::size_t k2 = 0;
    while (k2 < n && c[k2].x2 <= threshold) ++k2;
    window = {1, k2};
  }
  if (window.k2 < window.k1 + 1) {
    throw Error(ErrorCode::UnresolvableSupport,
                "curve '" + c.id() + "': support window has fewer than 2 points");
  }
  return window;
}

DiscreteMeasure build_measure(const Curve2D& c, const WeightScheme& scheme) {
  scheme.validate();
  const std::size_t n = c.size();
  const double nn = static_cast<double>(n);

  switch (scheme.kind) {
    case SchemeKind::Uniform:
      return finish(std::vector<double>(n, 1.0 / nn), false);

    case SchemeKind::Binomial:
      return finish(binomial_weights(n, *scheme.p), true);

    case SchemeKind::IndexIncreasing:
    case SchemeKind::IndexDecreasing: {
      const double sum = nn * (nn + 1.0) / 2.0;
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double inc = static_cast<double>(i + 1) / sum;
        w[i] = scheme.kind == SchemeKind::IndexIncreasing ? inc : (1.0 - inc) / (nn - 1.0);
      }
      return finish(std::move(w), false);
    }

    case SchemeKind::FirstComponent:
      return finish(proportional_weights(c, 1, 0, n), false);
    case SchemeKind::SecondComponent:
      return finish(proportional_weights(c, 2, 0, n), false);

    case SchemeKind::SecondComponentReversed: {
      double top = c[0].x2;
      for (const auto& p : c.points()) top = std::max(top, p.x2);
      detail::CompensatedSum denom;
      for (const auto& p : c.points()) denom.add(top - p.x2);
      const double sum = denom.value();
      if (!(sum > 0.0)) {
        throw Error(ErrorCode::DegenerateDenominator,
                    "curve '" + c.id() + "': all points share the same height; reversed weights undefined");
      }
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = (top - c[i].x2) / sum;
      return finish(std::move(w), false);
    }

    case SchemeKind::SupportUniform:
    case SchemeKind::SupportFirstComponent:
    case SchemeKind::SupportSecondComponent:
    case SchemeKind::SupportSecondComponentReversed:
      break;
  }

  const SupportWindow window = resolve_support(c, scheme.support.value_or(HeightFraction{kDefaultSupportFraction}));
  const std::size_t first = window.k1 - 1;
  const std::size_t last = window.k2;
  const double size = static_cast<double>(window.size());

  switch (scheme.kind) {
    case SchemeKind::SupportUniform: {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = first; i < last; ++i) w[i] = 1.0 / size;
      return finish(std::move(w), false);
    }
    case SchemeKind::SupportFirstComponent:
      return finish(proportional_weights(c, 1, first, last), false);
    case SchemeKind::SupportSecondComponent:
      return finish(proportional_weights(c, 2, first, last), false);
    default: {
      std::vector<double> w = proportional_weights(c, 2, first, last);
      for (std::size_t i = first; i < last; ++i) w[i] = (1.0 - w[i]) / (size - 1.0);
      return finish(std::move(w), false);
    }
  }
}

}  // namespace curveot
