#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "curveot/clustering.hpp"
#include "curveot/error.hpp"
#include "test_util.hpp"

namespace curveot {
namespace {

using test::expect_error;
using test::make_curve;

DistanceMatrix make_matrix(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix d;
  d.entries = Matrix(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.labels.push_back("c" + std::to_string(i + 1));
    for (std::size_t j = 0; j < rows.size(); ++j) d.entries(i, j) = rows[i][j];
  }
  return d;
}

// Distances between 7 random planar points, rounded to 6 decimals.
DistanceMatrix seven_points() {
  return make_matrix({{0, 6.886729, 3.257895, 6.244703, 4.62445, 6.97584, 5.843762},
                      {6.886729, 0, 8.040346, 9.740579, 2.436679, 4.756399, 5.653245},
                      {3.257895, 8.040346, 0, 2.995071, 6.414352, 5.951347, 4.308648},
                      {6.244703, 9.740579, 2.995071, 0, 8.670467, 6.191124, 4.514341},
                      {4.62445, 2.436679, 6.414352, 8.670467, 0, 5.291374, 5.426815},
                      {6.97584, 4.756399, 5.951347, 6.191124, 5.291374, 0, 1.734708},
                      {5.843762, 5.653245, 4.308648, 4.514341, 5.426815, 1.734708, 0}});
}

void expect_merges(const Dendrogram& dg, const std::vector<Merge>& want) {
  ASSERT_EQ(dg.merges.size(), want.size());
  for (std::size_t s = 0; s < want.size(); ++s) {
    EXPECT_EQ(dg.merges[s].a, want[s].a) << "step " << s;
    EXPECT_EQ(dg.merges[s].b, want[s].b) << "step " << s;
    EXPECT_NEAR(dg.merges[s].height, want[s].height, 1e-9) << "step " << s;
    EXPECT_EQ(dg.merges[s].size, want[s].size) << "step " << s;
  }
}

TEST(HierarchicalCluster, HandExample) {
  const auto dg = hierarchical_cluster(make_matrix({{0, 1, 5}, {1, 0, 5}, {5, 5, 0}}));
  expect_merges(dg, {{0, 1, 1.0, 2}, {2, 3, 5.0, 3}});
}

TEST(HierarchicalCluster, TwoLeaves) {
  const auto dg = hierarchical_cluster(make_matrix({{0, 2.5}, {2.5, 0}}));
  expect_merges(dg, {{0, 1, 2.5, 2}});
  EXPECT_EQ(to_newick(dg), "(c1:2.5,c2:2.5);");
}

TEST(HierarchicalCluster, EqualDistancesTieBreak) {
  std::vector<std::vector<double>> rows(5, std::vector<double>(5, 3.0));
  for (std::size_t i = 0; i < 5; ++i) rows[i][i] = 0.0;
  for (Linkage l : {Linkage::Single, Linkage::Complete, Linkage::Average}) {
    const auto dg = hierarchical_cluster(make_matrix(rows), l);
    expect_merges(dg, {{0, 1, 3.0, 2}, {2, 5, 3.0, 3}, {3, 6, 3.0, 4}, {4, 7, 3.0, 5}});
  }
}

// Reference merges produced by a widely used agglomerative clustering
// implementation on the same matrix.
TEST(HierarchicalCluster, MatchesReferenceLinkages) {
  const auto d = seven_points();
  expect_merges(hierarchical_cluster(d, Linkage::Single),
                {{5, 6, 1.734708, 2}, {1, 4, 2.436679, 2}, {2, 3, 2.995071, 2}, {0, 9, 3.257895, 3},
                 {7, 10, 4.308648, 5}, {8, 11, 4.62445, 7}});
  expect_merges(hierarchical_cluster(d, Linkage::Complete),
                {{5, 6, 1.734708, 2}, {1, 4, 2.436679, 2}, {2, 3, 2.995071, 2}, {7, 8, 5.653245, 4},
                 {0, 9, 6.244703, 3}, {10, 11, 9.740579, 7}});
  expect_merges(hierarchical_cluster(d, Linkage::Average),
                {{5, 6, 1.734708, 2}, {1, 4, 2.436679, 2}, {2, 3, 2.995071, 2}, {0, 9, 4.751299, 3},
                 {7, 8, 5.28195825, 4}, {10, 11, 6.51349875, 7}});
  expect_merges(hierarchical_cluster(d, Linkage::Ward),
                {{5, 6, 1.734708, 2}, {1, 4, 2.436679, 2}, {2, 3, 2.995071, 2}, {0, 9, 5.484825748779596, 3},
                 {7, 8, 7.179305465538502, 4}, {10, 11, 10.300105434985293, 7}});
}

TEST(HierarchicalCluster, MonotoneHeightsOnRandomMatrices) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 25;
    std::vector<Point2> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) rows[i][j] = std::hypot(pts[i].x1 - pts[j].x1, pts[i].x2 - pts[j].x2);
    }
    for (Linkage l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
      const auto dg = hierarchical_cluster(make_matrix(rows), l);
      ASSERT_EQ(dg.merges.size(), n - 1);
      EXPECT_EQ(dg.merges.back().size, n);
      for (std::size_t s = 1; s < dg.merges.size(); ++s) {
        EXPECT_GE(dg.merges[s].height, dg.merges[s - 1].height - 1e-12) << to_string(l);
      }
    }
  }
}

TEST(HierarchicalCluster, PermutationInvariantUpToRelabeling) {
  const auto d = seven_points();
  std::vector<std::size_t> perm{3, 6, 0, 5, 1, 4, 2};
  DistanceMatrix p;
  p.entries = Matrix(7, 7);
  for (std::size_t i = 0; i < 7; ++i) {
    p.labels.push_back(d.labels[perm[i]]);
    for (std::size_t j = 0; j < 7; ++j) p.entries(i, j) = d.entries(perm[i], perm[j]);
  }
  const auto a = hierarchical_cluster(d);
  const auto b = hierarchical_cluster(p);
  // Compare merges as sets of leaf labels.
  auto members = [](const Dendrogram& dg) {
    const std::size_t n = dg.labels.size();
    std::vector<std::vector<std::string>> sets(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) sets[i] = {dg.labels[i]};
    for (std::size_t s = 0; s < dg.merges.size(); ++s) {
      auto& m = sets[n + s];
      m = sets[dg.merges[s].a];
      m.insert(m.end(), sets[dg.merges[s].b].begin(), sets[dg.merges[s].b].end());
      std::sort(m.begin(), m.end());
    }
    return std::vector<std::vector<std::string>>(sets.begin() + static_cast<long>(n), sets.end());
  };
  EXPECT_EQ(members(a), members(b));
  for (std::size_t s = 0; s < a.merges.size(); ++s) EXPECT_NEAR(a.merges[s].height, b.merges[s].height, 1e-12);
}

TEST(HierarchicalCluster, RejectsInvalidMatrices) {
  expect_error(ErrorCode::SymmetryViolation, [] { hierarchical_cluster(make_matrix({{0, 1}, {2, 0}})); });
  expect_error(ErrorCode::SymmetryViolation, [] { hierarchical_cluster(make_matrix({{1, 1}, {1, 0}})); });
  expect_error(ErrorCode::Parse, [] { hierarchical_cluster(make_matrix({{0, -1}, {-1, 0}})); });
}

TEST(Newick, BranchLengthsAreHeightDifferences) {
  const auto dg = hierarchical_cluster(make_matrix({{0, 1, 5}, {1, 0, 5}, {5, 5, 0}}));
  EXPECT_EQ(to_newick(dg), "(c3:5,(c1:1,c2:1):4);");
  Dendrogram quoted = dg;
  quoted.labels = {"a b", "it's", "c"};
  EXPECT_EQ(to_newick(quoted), "(c:5,('a b':1,'it''s':1):4);");
}

TEST(LeafOrder, FollowsTree) {
  const auto dg = hierarchical_cluster(seven_points());
  const auto order = leaf_order(dg);
  ASSERT_EQ(order.size(), 7u);
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}));
}

TEST(Svg, WellFormedAndDeterministic) {
  const auto dg = hierarchical_cluster(seven_points());
  const auto svg = to_svg(dg);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 7, true);
  for (const auto& label : dg.labels) EXPECT_NE(svg.find(">" + label + "<"), std::string::npos);
  EXPECT_EQ(svg, to_svg(dg));
}

TEST(CutClusters, RecoversGroups) {
  const auto dg = hierarchical_cluster(make_matrix({{0, 1, 9, 9}, {1, 0, 9, 9}, {9, 9, 0, 2}, {9, 9, 2, 0}}));
  EXPECT_EQ(cut_clusters(dg, 2), (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(cut_clusters(dg, 1), (std::vector<int>{0, 0, 0, 0}));
  EXPECT_EQ(cut_clusters(dg, 4), (std::vector<int>{0, 1, 2, 3}));
  expect_error(ErrorCode::InvalidConfig, [&] { cut_clusters(dg, 5); });
}

TEST(AdjustedRand, KnownValues) {
  const std::vector<int> a{0, 0, 1, 1};
  const std::vector<int> relabeled{5, 5, 2, 2};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, relabeled), 1.0);
  // Contingency [[1,1],[1,1]]: index 0, expected 2*2/6, max 2.
  const std::vector<int> crossed{0, 1, 0, 1};
  EXPECT_NEAR(adjusted_rand_index(a, crossed), (0.0 - 2.0 / 3.0) / (2.0 - 2.0 / 3.0), 1e-15);
  // Six items, {0,0,0,1,1,1} vs {0,0,1,1,2,2}: index 2, sums 6 and 3, expected 18/15.
  const std::vector<int> x{0, 0, 0, 1, 1, 1};
  const std::vector<int> y{0, 0, 1, 1, 2, 2};
  EXPECT_NEAR(adjusted_rand_index(x, y), (2.0 - 1.2) / (4.5 - 1.2), 1e-15);
}

// Independent check: rotate b over a dense angle grid, fit the scale in
// closed form, then refine around the best grid point by ternary search.
double procrustes_by_search(const Curve2D& a, const Curve2D& b, std::size_t k) {
  auto prep = [k](const Curve2D& c) {
    const auto r = resample_arc_length(c, k);
    double mx = 0.0, my = 0.0;
    for (const auto& p : r.points()) {
      mx += p.x1;
      my += p.x2;
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    std::vector<Point2> out;
    double nn = 0.0;
    for (const auto& p : r.points()) {
      out.push_back({p.x1 - mx, p.x2 - my});
      nn += (p.x1 - mx) * (p.x1 - mx) + (p.x2 - my) * (p.x2 - my);
    }
    for (auto& p : out) p = {p.x1 / std::sqrt(nn), p.x2 / std::sqrt(nn)};
    return out;
  };
  const auto pa = prep(a);
  const auto pb = prep(b);
  auto residual = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    double dot = 0.0;
    for (std::size_t i = 0; i < k; ++i) dot += pa[i].x1 * (c * pb[i].x1 - s * pb[i].x2) + pa[i].x2 * (s * pb[i].x1 + c * pb[i].x2);
    const double scale = std::max(0.0, dot);
    double r = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double dx = pa[i].x1 - scale * (c * pb[i].x1 - s * pb[i].x2);
      const double dy = pa[i].x2 - scale * (s * pb[i].x1 + c * pb[i].x2);
      r += dx * dx + dy * dy;
    }
    return r;
  };
  const int grid = 20000;
  double best_th = 0.0, best = 1e300;
  for (int g = 0; g < grid; ++g) {
    const double th = 2.0 * M_PI * g / grid;
    const double r = residual(th);
    if (r < best) {
      best = r;
      best_th = th;
    }
  }
  double lo = best_th - 2.0 * M_PI / grid, hi = best_th + 2.0 * M_PI / grid;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    (residual(m1) < residual(m2) ? hi : lo) = (residual(m1) < residual(m2) ? m2 : m1);
  }
  return std::min(best, residual(0.5 * (lo + hi)));
}

TEST(Procrustes, IdentityAndSimilarity) {
  const auto a = make_curve({{0, 0}, {1, 0.2}, {2, 1.5}, {2.5, 3}});
  EXPECT_NEAR(procrustes_distance(a, a), 0.0, 1e-12);
  const auto b = translate(scale(a, 3.0), 7.0, -2.0);
  EXPECT_NEAR(procrustes_distance(a, b), 0.0, 1e-9);
  // Rotation by 40 degrees is also removed.
  std::vector<Point2> rot;
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (const auto& p : a.points()) rot.push_back({c * p.x1 - s * p.x2, s * p.x1 + c * p.x2});
  EXPECT_NEAR(procrustes_distance(a, make_curve(rot)), 0.0, 1e-9);
}

TEST(Procrustes, ReflectionNotRemoved) {
  const auto a = make_curve({{0, 0}, {1, 0}, {1, 1}, {3, 1.2}});
  std::vector<Point2> mirrored;
  for (const auto& p : a.points()) mirrored.push_back({-p.x1, p.x2});
  EXPECT_GT(procrustes_distance(a, make_curve(mirrored)), 1e-3);
}

TEST(Procrustes, SegmentVersusRightAngle) {
  const auto seg = make_curve({{0, 0}, {1, 0}});
  const auto corner = make_curve({{0, 0}, {0.5, 0}, {0.5, 0.5}});
  const double d = procrustes_distance(seg, corner, 16);
  EXPECT_GT(d, 0.0);
  EXPECT_NEAR(d, procrustes_by_search(seg, corner, 16), 1e-9);
}

TEST(Procrustes, SymmetricAndMatchesSearch) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = test::random_curve(rng, 3 + rng() % 10);
    const auto b = test::random_curve(rng, 3 + rng() % 10);
    const double d = procrustes_distance(a, b, 32);
    EXPECT_NEAR(d, procrustes_distance(b, a, 32), 1e-9);
    EXPECT_NEAR(d, procrustes_by_search(a, b, 32), 1e-8);
  }
}

TEST(Procrustes, ZeroLengthCurve) {
  const auto pt = make_curve({{1, 1}, {1, 1}});
  expect_error(ErrorCode::ZeroLengthCurve, [&] { procrustes_distance(pt, make_curve({{0, 0}, {1, 0}})); });
}

}  // namespace
}  // namespace curveot
