// Acceptance checks. Without arguments every criterion runs and prints one
// PASS/FAIL line; with a name only that criterion runs. Exit status is 0 iff
// everything that ran passed.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curveot/clustering.hpp"
#include "curveot/error.hpp"
#include "curveot/io.hpp"
#include "curveot/measures.hpp"
#include "curveot/oracle.hpp"
#include "curveot/pipeline.hpp"
#include "curveot/transport.hpp"
#include "synthetic.hpp"

namespace {

using namespace curveot;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed sub-checks; the first few are kept for the report line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_.push_back(what);
  }
  void note(const std::string& s) { info_.push_back(s); }
  Outcome outcome() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < info_.size(); ++i) out << (i ? "; " : "") << info_[i];
    if (failures_ > 0) {
      out << (info_.empty() ? "" : "; ") << failures_ << " failed:";
      for (const auto& n : notes_) out << " [" << n << "]";
    }
    return {failures_ == 0, out.str()};
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> info_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k, double total = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(k);
  double s = 0.0;
  for (auto& v : w) s += (v = u(rng) < 0.15 ? 0.0 : u(rng) + 1e-3);
  if (s == 0.0) s = w[0] = 1.0;
  for (auto& v : w) v = v / s * total;
  return w;
}

// ---------------------------------------------------------------------------
// Worked example: V (3 points) against W (4 points).

Curve2D example_v() { return validate_curve({{1, 0.1}, {2, 0.2}, {3, 0.3}}, "V"); }
Curve2D example_w() { return validate_curve({{1, 0.2}, {3, 0.8}, {5, 0.6}, {6, 0.7}}, "W"); }
const PenaltyVectors kReferencePenalties{{2.4839, 1.4893, 0.4950}, {1.4875, 0.0, 1.5070, 2.5014}};
constexpr double kReferenceC[3][4] = {{0.1000, 2.1190, 4.0311, 5.0359},
                                    {1.0000, 1.1662, 3.0265, 4.0311},
                                    {2.0025, 0.5000, 2.0224, 3.0265}};
constexpr double kReferenceD[3][4] = {{-3.8714, -0.3650, 0.0402, 0.0505},
                                    {-1.9768, -0.3231, 0.0302, 0.0404},
                                    {0.0200, 0.0050, 0.0204, 0.0301}};

Outcome worked_example_reduced_costs() {
  Checks ck;
  const auto v = example_v();
  const auto w = example_w();
  const auto t0 = Clock::now();
  const auto c = euclidean_cost(v, w);
  const auto d = reduced_cost(c, kReferencePenalties);
  const double elapsed = ms_since(t0);
  double worst_c = 0.0, worst_d = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double ec = std::abs(c(i, j) - kReferenceC[i][j]);
      const double ed = std::abs(d(i, j) - kReferenceD[i][j]);
      worst_c = std::max(worst_c, ec);
      worst_d = std::max(worst_d, ed);
      const std::string at = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      ck.expect(ec <= 5e-5, "c" + at + " off by " + fmt("%.2e", ec));
      ck.expect(ed <= 5e-5, "d" + at + " off by " + fmt("%.2e", ed));
    }
  }
  ck.expect(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " ms");
  ck.note("max |c err| " + fmt("%.2e", worst_c) + ", max |d err| " + fmt("%.2e", worst_d));
  return ck.outcome();
}

Outcome worked_example_partial_plan() {
  Checks ck;
  const auto c = euclidean_cost(example_v(), example_w());
  const std::vector<double> beta(3, 0.25), alpha(4, 0.25);
  const auto t0 = Clock::now();
  const auto plan = solve_partial(c, beta, alpha, kReferencePenalties);
  const auto oracle = oracle_solve(c, beta, alpha, Variant::Partial, &kReferencePenalties);
  const auto report = dual_feasibility_check(plan, plan.dual, c, beta, alpha, Variant::Partial, &kReferencePenalties);
  const double elapsed = ms_since(t0);

  ck.expect(std::abs(plan.objective - oracle.objective) <= 1e-9, "oracle objective differs");
  ck.expect(report.ok(), "duality certificate fails");
  const auto d = reduced_cost(c, kReferencePenalties);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const std::string at = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (d(i, j) > 0.0) ck.expect(plan.pi(i, j) == 0.0, "pi" + at + " > 0 where d > 0");
      const double want = (i == 0 && j == 0) ? 0.25 : 0.0;
      ck.expect(std::abs(plan.pi(i, j) - want) <= 1e-12, "pi" + at + " = " + fmt("%.4g", plan.pi(i, j)) +
                                                               ", expected " + fmt("%.4g", want));
    }
  }
  ck.expect(elapsed < 10.0, "runtime " + fmt("%.3f", elapsed) + " ms");
  ck.note("objective " + fmt("%.5f", plan.objective) + " (oracle " + fmt("%.5f", oracle.objective) + ")");
  return ck.outcome();
}

// ---------------------------------------------------------------------------

// Random metric on k points: Euclidean distances of random planar points, or
// the shortest-path closure of random edge weights.
Matrix random_metric(std::mt19937_64& rng, std::size_t k, bool euclidean) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  Matrix c(k, k, 0.0);
  if (euclidean) {
    std::vector<Point2> pts(k);
    for (auto& p : pts) p = {u(rng), u(rng)};
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) c(i, j) = std::hypot(pts[i].x1 - pts[j].x1, pts[i].x2 - pts[j].x2);
    }
    return c;
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) c(i, j) = c(j, i) = 0.1 + u(rng);
  }
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) c(i, j) = std::min(c(i, j), c(i, m) + c(m, j));
    }
  }
  return c;
}

Outcome metric_properties() {
  Checks ck;
  std::mt19937_64 rng(20261015);
  const auto t0 = Clock::now();
  double worst_sym = 0.0, worst_tri = 0.0, worst_self = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng() % 7;
    const auto c = random_metric(rng, k, trial % 2 == 0);
    const auto a = random_simplex(rng, k), b = random_simplex(rng, k), g = random_simplex(rng, k);
    const double ab = solve_balanced(c, a, b).objective;
    const double ba = solve_balanced(c, b, a).objective;
    const double bg = solve_balanced(c, b, g).objective;
    const double ag = solve_balanced(c, a, g).objective;
    const double aa = solve_balanced(c, a, a).objective;
    worst_sym = std::max(worst_sym, std::abs(ab - ba));
    worst_tri = std::min(worst_tri, ab + bg - ag);
    worst_self = std::max(worst_self, std::abs(aa));
    ck.expect(std::abs(ab - ba) <= 1e-9, "symmetry, trial " + std::to_string(trial));
    ck.expect(ab + bg - ag >= -1e-7, "triangle, trial " + std::to_string(trial));
    ck.expect(std::abs(aa) <= 1e-9, "self distance, trial " + std::to_string(trial));
  }
  const double elapsed = ms_since(t0);
  ck.expect(elapsed < 30000.0, "runtime " + fmt("%.0f", elapsed) + " ms");
  ck.note("500 triples; max asym " + fmt("%.1e", worst_sym) + ", min triangle slack " + fmt("%.1e", worst_tri) +
          ", max self " + fmt("%.1e", worst_self));
  return ck.outcome();
}

// Largest violation of the marginal constraints of the given variant.
double marginal_residual(const TransportPlan& plan, std::span<const double> beta, std::span<const double> alpha,
                         Variant variant) {
  double worst = 0.0;
  const auto& pi = plan.pi;
  for (double v : pi.data()) worst = std::max(worst, -v);
  auto check = [&](double sum, double cap) {
    worst = std::max(worst, variant == Variant::Balanced ? std::abs(sum - cap) : sum - cap);
  };
  for (std::size_t i = 0; i < pi.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < pi.cols(); ++j) s += pi(i, j);
    check(s, beta[i]);
  }
  for (std::size_t j = 0; j < pi.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < pi.rows(); ++i) s += pi(i, j);
    check(s, alpha[j]);
  }
  return worst;
}

Outcome oracle_equivalence() {
  Checks ck;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> cost_u(0.0, 4.0), pen_u(0.0, 2.0), total_u(0.5, 1.5);
  const auto t0 = Clock::now();
  double worst_obj = 0.0, worst_res = 0.0, worst_mass = 0.0;
  for (Variant variant : {Variant::Balanced, Variant::Relaxed, Variant::Partial}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 6;
      Matrix c(n, m);
      for (auto& v : c.data()) v = cost_u(rng);
      const bool unequal = variant != Variant::Balanced;
      const auto beta = random_simplex(rng, n, unequal ? total_u(rng) : 1.0);
      const auto alpha = random_simplex(rng, m, unequal ? total_u(rng) : 1.0);
      PenaltyVectors pen{std::vector<double>(n), std::vector<double>(m)};
      for (auto& v : pen.nu) v = pen_u(rng);
      for (auto& v : pen.mu) v = pen_u(rng);
      const PenaltyVectors* pp = variant == Variant::Partial ? &pen : nullptr;

      const auto plan = solve(variant, c, beta, alpha, pp);
      const auto ref = oracle_solve(c, beta, alpha, variant, pp);
      const std::string tag = std::string(to_string(variant)) + " #" + std::to_string(trial);
      const double obj_err = std::abs(plan.objective - ref.objective);
      const double res = marginal_residual(plan, beta, alpha, variant);
      worst_obj = std::max(worst_obj, obj_err);
      worst_res = std::max(worst_res, res);
      ck.expect(obj_err <= 1e-8, tag + " objective off by " + fmt("%.2e", obj_err));
      ck.expect(res <= 1e-9, tag + " marginal residual " + fmt("%.2e", res));
      if (variant == Variant::Relaxed) {
        double sb = 0.0, sa = 0.0, mass = 0.0;
        for (double v : beta) sb += v;
        for (double v : alpha) sa += v;
        for (double v : plan.pi.data()) mass += v;
        const double err = std::abs(mass - std::min(sb, sa));
        worst_mass = std::max(worst_mass, err);
        ck.expect(err <= 1e-9, tag + " transported mass off by " + fmt("%.2e", err));
      }
    }
  }
  const double elapsed = ms_since(t0);
  ck.expect(elapsed < 60000.0, "runtime " + fmt("%.0f", elapsed) + " ms");
  ck.note("600 instances; max objective gap " + fmt("%.1e", worst_obj) + ", max residual " + fmt("%.1e", worst_res) +
          ", max relaxed mass error " + fmt("%.1e", worst_mass));
  return ck.outcome();
}

// ---------------------------------------------------------------------------

// Positive-coordinate curve whose heights rise from its first point, so
// height-fraction windows always hold several points.
Curve2D random_profile(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> x(0.1, 10.0), dy(0.01, 1.0);
  std::vector<Point2> pts(n);
  double h = dy(rng);
  for (auto& p : pts) {
    p = {x(rng), h};
    h += dy(rng);
  }
  return validate_curve(std::move(pts), "r");
}

Outcome measure_suite() {
  Checks ck;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> pu(0.05, 0.95), fu(0.2, 1.0);
  constexpr SchemeKind kKinds[] = {
      SchemeKind::Uniform,         SchemeKind::Binomial,
      SchemeKind::IndexIncreasing, SchemeKind::IndexDecreasing,
      SchemeKind::FirstComponent,  SchemeKind::SecondComponent,
      SchemeKind::SecondComponentReversed, SchemeKind::SupportUniform,
      SchemeKind::SupportFirstComponent,   SchemeKind::SupportSecondComponent,
      SchemeKind::SupportSecondComponentReversed,
  };
  std::size_t measures = 0;
  double worst_sum = 0.0, worst_affine = 0.0;
  for (SchemeKind kind : kKinds) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 3 + rng() % 60;
      const auto c = random_profile(rng, n);
      WeightScheme s{kind, std::nullopt, std::nullopt};
      if (kind == SchemeKind::Binomial) s.p = pu(rng);
      // Windows must hold at least two points; fractions too small for the
      // curve are redrawn.
      for (bool resolved = !is_support_kind(kind); !resolved;) {
        switch (trial % 3) {
          case 0: s.support = HeightFraction{fu(rng)}; break;
          case 1: s.support = IndexFraction{fu(rng)}; break;
          default: {
            const std::size_t k1 = 1 + rng() % (n - 1);
            const std::size_t k2 = k1 + 1 + rng() % (n - k1);
            s.support = ExplicitWindow{k1, k2};
          }
        }
        try {
          resolve_support(c, *s.support);
          resolved = true;
        } catch (const Error&) {
        }
      }
      const std::string tag = std::string(to_string(kind)) + " #" + std::to_string(trial);
      DiscreteMeasure mu;
      try {
        mu = build_measure(c, s);
      } catch (const Error& e) {
        ck.expect(false, tag + ": " + e.what());
        continue;
      }
      ++measures;
      double sum = 0.0;
      for (double w : mu.weights) {
        ck.expect(w >= 0.0, tag + " negative weight");
        sum += w;
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      ck.expect(std::abs(sum - 1.0) <= 1e-12, tag + " sums to 1" + fmt("%+.1e", sum - 1.0));
      ck.expect(std::abs(mu.total - 1.0) <= 1e-12, tag + " total " + fmt("%.17g", mu.total));
      if (is_support_kind(kind)) {
        const auto win = resolve_support(c, *s.support);
        for (std::size_t i = 0; i < n; ++i) {
          if (i + 1 < win.k1 || i + 1 > win.k2) ck.expect(mu.weights[i] == 0.0, tag + " mass outside window");
        }
      }
      if (kind == SchemeKind::IndexDecreasing) {
        const auto inc = build_measure(c, {SchemeKind::IndexIncreasing, std::nullopt, std::nullopt});
        for (std::size_t i = 0; i < n; ++i) {
          const double want = (1.0 - inc.weights[i]) / static_cast<double>(n - 1);
          const double err = std::abs(mu.weights[i] - want);
          worst_affine = std::max(worst_affine, err);
          ck.expect(err <= 1e-15, tag + " affine transform off by " + fmt("%.1e", err));
        }
      }
    }
  }
  ck.note(std::to_string(measures) + " measures over 11 kinds; max |sum-1| " + fmt("%.1e", worst_sum) +
          ", max affine error " + fmt("%.1e", worst_affine));
  return ck.outcome();
}

// ---------------------------------------------------------------------------

Curve2D transform(const Curve2D& c, double scale, double dx, double dy, const std::string& id) {
  std::vector<Point2> pts;
  for (const auto& p : c.points()) pts.push_back({scale * p.x1 + dx, scale * p.x2 + dy});
  return validate_curve(std::move(pts), id);
}

Outcome pipeline_invariances() {
  Checks ck;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> shift(0.0, 50.0);
  const auto set = synthetic::make_families(
      {synthetic::Family::Cylinder, synthetic::Family::Bowl, synthetic::Family::Cone, synthetic::Family::FlaredRim},
      3, 5);

  // Schemes whose weights do not depend on absolute position.
  std::vector<PipelineConfig> translation_configs;
  for (WeightScheme s : {WeightScheme{SchemeKind::Uniform, std::nullopt, std::nullopt},
                         WeightScheme{SchemeKind::Binomial, 0.3, std::nullopt},
                         WeightScheme{SchemeKind::IndexIncreasing, std::nullopt, std::nullopt},
                         WeightScheme{SchemeKind::IndexDecreasing, std::nullopt, std::nullopt},
                         WeightScheme{SchemeKind::SecondComponentReversed, std::nullopt, std::nullopt},
                         WeightScheme{SchemeKind::SupportUniform, std::nullopt, std::nullopt}}) {
    PipelineConfig cfg;
    cfg.scheme = s;
    translation_configs.push_back(cfg);
  }
  for (int e : {1, 2, 3, 4, 5, 6, 7}) translation_configs.push_back(experiment_preset(e));

  double worst_translate = 0.0;
  std::size_t translate_cases = 0;
  for (const auto& cfg : translation_configs) {
    for (const auto& c : set.curves) {
      const double d = pair_distance(c, transform(c, 1.0, shift(rng), shift(rng), "t"), cfg);
      worst_translate = std::max(worst_translate, std::abs(d));
      ++translate_cases;
      ck.expect(std::abs(d) <= 1e-9, c.id() + " translated: " + fmt("%.2e", d));
    }
  }

  // Scaling: every scheme kind is homogeneous of degree 0 in the coordinates.
  std::vector<PipelineConfig> scale_configs;
  for (int e = 1; e <= kExperimentCount; ++e) scale_configs.push_back(experiment_preset(e));
  PipelineConfig plain;
  plain.scheme = {SchemeKind::FirstComponent, std::nullopt, std::nullopt};
  scale_configs.push_back(plain);
  plain.align_centroids = false;
  plain.scheme = {SchemeKind::SecondComponent, std::nullopt, std::nullopt};
  scale_configs.push_back(plain);
  plain.variant = Variant::Relaxed;
  scale_configs.push_back(plain);

  double worst_scale = 0.0;
  std::size_t scale_cases = 0;
  for (const auto& cfg : scale_configs) {
    for (std::size_t i = 0; i + 1 < set.curves.size(); i += 2) {
      const auto& a = set.curves[i];
      const auto& b = set.curves[i + 1];
      const double base = pair_distance(a, b, cfg);
      for (double s : {0.37, 2.5, 1000.0}) {
        const double scaled = pair_distance(transform(a, s, 0, 0, "a"), transform(b, s, 0, 0, "b"), cfg);
        const double rel = std::abs(scaled - s * base) / std::max(1e-300, std::abs(s * base));
        worst_scale = std::max(worst_scale, rel);
        ++scale_cases;
        ck.expect(rel <= 1e-9, a.id() + "/" + b.id() + " scale " + fmt("%g", s) + ": rel " + fmt("%.2e", rel));
      }
    }
  }
  ck.note(std::to_string(translate_cases) + " translations (max " + fmt("%.1e", worst_translate) + "), " +
          std::to_string(scale_cases) + " scalings (max rel " + fmt("%.1e", worst_scale) + ")");
  return ck.outcome();
}

// ---------------------------------------------------------------------------

double preset_ari(const synthetic::LabelledSet& set, int experiment, std::size_t k) {
  const auto cfg = experiment_preset(experiment);
  const auto dg = hierarchical_cluster(pairwise_matrix(set.curves, cfg), cfg.linkage);
  return adjusted_rand_index(cut_clusters(dg, k), set.labels);
}

Outcome synthetic_clustering() {
  using synthetic::Family;
  Checks ck;
  const auto t0 = Clock::now();
  const auto three = synthetic::make_families({Family::Cylinder, Family::Bowl, Family::Cone}, 8, 1);
  const auto rims = synthetic::make_families({Family::FlaredRim, Family::InturnedRim}, 8, 101);
  const double families = preset_ari(three, 1, 3);
  const double rims_uniform = preset_ari(rims, 1, 2);
  const double rims_support = preset_ari(rims, 3, 2);
  const double elapsed = ms_since(t0);
  ck.expect(families >= 0.9, "uniform preset on 3 families: ARI " + fmt("%.3f", families));
  ck.expect(rims_support >= 0.9, "support preset on rim pair: ARI " + fmt("%.3f", rims_support));
  ck.expect(rims_uniform <= 0.5, "uniform preset on rim pair: ARI " + fmt("%.3f", rims_uniform));
  ck.expect(elapsed < 120000.0, "runtime " + fmt("%.0f", elapsed) + " ms");
  ck.note("ARI 3 families (uniform) " + fmt("%.3f", families) + ", rim pair uniform " + fmt("%.3f", rims_uniform) +
          " / support " + fmt("%.3f", rims_support));
  return ck.outcome();
}

// ---------------------------------------------------------------------------

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  FILE* pipe = ::popen((std::string("'") + CURVEOT_CLI + "' " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Outcome matrix_determinism() {
  using synthetic::Family;
  Checks ck;
  const auto set = synthetic::make_families({Family::Cylinder, Family::Bowl, Family::Cone}, 4, 3);
  const fs::path dir = fs::temp_directory_path() / ("curveot_accept_" + std::to_string(std::random_device{}()));
  const auto manifest = synthetic::write_dataset(dir, set.curves);
  const std::string m = "'" + manifest.string() + "'";

  std::size_t compared = 0;
  for (int e : {1, 3, 5}) {
    const std::string flags = " --experiment " + std::to_string(e);
    const auto first = run_cli("matrix " + m + flags + " --jobs 1");
    ck.expect(first.status == 0 && !first.out.empty(), "matrix run failed for preset " + std::to_string(e));
    for (const char* jobs : {"1", "2", "4", "0"}) {
      const auto again = run_cli("matrix " + m + flags + " --jobs " + jobs);
      ++compared;
      ck.expect(again.status == 0 && again.out == first.out,
                "preset " + std::to_string(e) + " differs with --jobs " + jobs);
    }
    const std::string out_file = (dir / ("m" + std::to_string(e) + ".csv")).string();
    const auto to_file = run_cli("matrix " + m + flags + " --jobs 3 --out '" + out_file + "'");
    ++compared;
    ck.expect(to_file.status == 0 && io::read_file(out_file) == first.out,
              "--out file differs from stdout for preset " + std::to_string(e));
    // Same bytes as the library's own serialization.
    const auto lib = io::format_matrix_csv(pairwise_matrix(set.curves, experiment_preset(e), 1));
    ++compared;
    ck.expect(lib == first.out, "library matrix differs from CLI for preset " + std::to_string(e));
  }
  fs::remove_all(dir);
  ck.note(std::to_string(compared) + " byte comparisons over 3 presets");
  return ck.outcome();
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {"worked_example_reduced_costs", worked_example_reduced_costs},
    {"worked_example_partial_plan", worked_example_partial_plan},
    {"metric_properties", metric_properties},
    {"oracle_equivalence", oracle_equivalence},
    {"measure_suite", measure_suite},
    {"pipeline_invariances", pipeline_invariances},
    {"synthetic_clustering", synthetic_clustering},
    {"matrix_determinism", matrix_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--list") {
    for (const auto& c : kCriteria) std::cout << c.name << "\n";
    return 0;
  }
  bool all_pass = true;
  bool ran = false;
  for (const auto& c : kCriteria) {
    if (argc > 1 && argv[1] != std::string(c.name)) continue;
    ran = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  if (!ran) {
    std::cerr << "unknown criterion '" << argv[1] << "' (see --list)\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
