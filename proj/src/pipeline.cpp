#include "curveot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "curveot/error.hpp"

namespace curveot {

void PipelineConfig::validate() const {
  if (version != kConfigVersion) {
    throw Error(ErrorCode::InvalidConfig, "unsupported config version " + std::to_string(version));
  }
  scheme.validate();
  if (!(cost_order >= 1.0) || !std::isfinite(cost_order)) {
    throw Error(ErrorCode::InvalidConfig, "cost_order must be a finite number >= 1");
  }
  if (truncate && !(*truncate > 0.0 && *truncate <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "truncate must lie in (0, 1]");
  }
  if (variant == Variant::Partial && !penalties) {
    throw Error(ErrorCode::InvalidConfig, "the partial variant needs a penalties source");
  }
  if (penalties) {
    if (const auto* f = std::get_if<ActiveFraction>(&*penalties); f && !(f->fraction >= 0.0 && f->fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "active_fraction must lie in [0, 1]");
    }
    if (const auto* p = std::get_if<PenaltyVectors>(&*penalties)) {
      for (double v : p->nu) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NegativePenalty, "penalties must be finite and >= 0");
      }
      for (double v : p->mu) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NegativePenalty, "penalties must be finite and >= 0");
      }
    }
  }
}

PipelineConfig experiment_preset(int number) {
  PipelineConfig cfg;
  cfg.external_half = true;
  cfg.align_centroids = true;
  cfg.invert_y = true;
  const WeightScheme height_sixth_support{SchemeKind::SupportUniform, std::nullopt, HeightFraction{1.0 / 6.0}};
  switch (number) {
    case 1:
      cfg.scheme = {SchemeKind::Uniform, std::nullopt, std::nullopt};
      break;
    case 2:
      cfg.scheme = {SchemeKind::Uniform, std::nullopt, std::nullopt};
      cfg.truncate = 1.0 / 6.0;
      break;
    case 3:
      cfg.scheme = height_sixth_support;
      break;
    case 4:
      cfg.scheme = {SchemeKind::Binomial, binomial_preset_p(BinomialPreset::Sharp), std::nullopt};
      break;
    case 5:
      cfg.scheme = {SchemeKind::Binomial, binomial_preset_p(BinomialPreset::Soft), std::nullopt};
      break;
    case 6:
      cfg.scheme = {SchemeKind::IndexDecreasing, std::nullopt, std::nullopt};
      break;
    case 7:
      cfg.scheme = {SchemeKind::SecondComponentReversed, std::nullopt, std::nullopt};
      break;
    case 8:
      cfg.scheme = height_sixth_support;
      cfg.scheme.kind = SchemeKind::SupportSecondComponentReversed;
      break;
    default:
      throw Error(ErrorCode::InvalidConfig,
                  "experiment must be 1.." + std::to_string(kExperimentCount) + ", got " + std::to_string(number));
  }
  return cfg;
}

Curve2D preprocess(const Curve2D& c, const PipelineConfig& cfg) {
  Curve2D out = c;
  if (cfg.invert_y) out = invert_y(out);
  if (cfg.external_half) out = extract_external_half(out);
  if (cfg.truncate) {
    const auto w = resolve_support(out, HeightFraction{*cfg.truncate});
    out = slice(out, w.k1, w.k2);
  }
  return out;
}

namespace {

std::size_t ceil_fraction(double f, std::size_t n) {
  return std::min(n, static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9)));
}

PenaltyVectors resolve_penalties(const PenaltySource& src, const CostMatrix& cost) {
  const std::size_t n = cost.rows(), m = cost.cols();
  if (const auto* p = std::get_if<PenaltyVectors>(&src)) {
    if (p->nu.size() != n || p->mu.size() != m) {
      throw Error(ErrorCode::DimensionMismatch, "explicit penalties have lengths " + std::to_string(p->nu.size()) +
                                                    "/" + std::to_string(p->mu.size()) + " but the pair is " +
                                                    std::to_string(n) + "x" + std::to_string(m));
    }
    return *p;
  }
  if (const auto* b = std::get_if<ActiveBlock>(&src)) return construct_penalties(cost, *b);
  const double f = std::get<ActiveFraction>(src).fraction;
  return construct_penalties(cost, ActiveBlock{ceil_fraction(f, n), ceil_fraction(f, m)});
}

}  // namespace

PreparedPair prepare_pair(const Curve2D& a, const Curve2D& b, const PipelineConfig& cfg) {
  cfg.validate();
  Curve2D pa = preprocess(a, cfg);
  Curve2D pb = preprocess(b, cfg);
  // Weights come from the unaligned coordinates.
  DiscreteMeasure beta = build_measure(pa, cfg.scheme);
  DiscreteMeasure alpha = build_measure(pb, cfg.scheme);
  if (cfg.align_centroids) std::tie(pa, pb) = align_centroids(pa, pb);
  CostMatrix cost = euclidean_cost(pa, pb, cfg.cost_order);
  std::optional<PenaltyVectors> pen;
  if (cfg.penalties) pen = resolve_penalties(*cfg.penalties, cost);
  return {std::move(pa), std::move(pb), std::move(beta), std::move(alpha), std::move(cost), std::move(pen)};
}

PairResult run_pair(const Curve2D& a, const Curve2D& b, const PipelineConfig& cfg) {
  PairResult r{prepare_pair(a, b, cfg), {}, 0.0};
  const auto& p = r.prepared;
  r.plan = solve(cfg.variant, p.cost, p.beta.weights, p.alpha.weights, p.penalties ? &*p.penalties : nullptr);
  if (r.plan.status != PlanStatus::Optimal) {
    throw Error(ErrorCode::SolverFailure, "no optimal plan for '" + a.id() + "' vs '" + b.id() + "'");
  }
  if (cfg.variant == Variant::Partial || cfg.cost_order == 1.0) {
    r.distance = r.plan.objective;
  } else {
    r.distance = std::pow(std::max(0.0, r.plan.objective), 1.0 / cfg.cost_order);
  }
  return r;
}

double pair_distance(const Curve2D& a, const Curve2D& b, const PipelineConfig& cfg) {
  return run_pair(a, b, cfg).distance;
}

DistanceMatrix pairwise_matrix(std::span<const Curve2D> curves, const PipelineConfig& cfg, unsigned jobs,
                               const ProgressFn& progress) {
  cfg.validate();
  if (cfg.variant == Variant::Partial) {
    throw Error(ErrorCode::InvalidConfig, "distance matrices need the balanced or relaxed variant");
  }
  const std::size_t n = curves.size();
  if (n < 2) throw Error(ErrorCode::InvalidConfig, "a distance matrix needs at least two curves");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (curves[i].id() == curves[j].id()) {
        throw Error(ErrorCode::InvalidConfig, "duplicate curve id '" + curves[i].id() + "'");
      }
    }
  }

  DistanceMatrix out;
  out.entries = Matrix(n, n, 0.0);
  for (const auto& c : curves) out.labels.push_back(c.id());

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex mu;
  std::size_t failed_index = pairs.size();
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pairs.size()) return;
      {
        std::lock_guard lock(mu);
        if (failed_index < k) return;
      }
      const auto [i, j] = pairs[k];
      try {
        const double d = pair_distance(curves[i], curves[j], cfg);
        out.entries(i, j) = out.entries(j, i) = std::max(0.0, d);
      } catch (...) {
        std::lock_guard lock(mu);
        // Report the first failing pair in pair order, independent of scheduling.
        if (k < failed_index) {
          failed_index = k;
          failure = std::current_exception();
        }
        continue;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mu);
        progress(finished, pairs.size());
      }
    }
  };

  unsigned threads = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pairs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  if (failure) {
    const auto [i, j] = pairs[failed_index];
    const std::string where = "pair ('" + curves[i].id() + "', '" + curves[j].id() + "'): ";
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::PairFailure, where + e.what());
    }
  }
  return out;
}

}  // namespace curveot
