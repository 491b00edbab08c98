#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curveot/curve.hpp"
#include "curveot/matrix.hpp"

namespace curveot {

struct DistanceMatrix {
  Matrix entries;
  std::vector<std::string> labels;

  std::size_t size() const noexcept { return labels.size(); }

  /// Throws SymmetryViolation for asymmetry beyond 1e-9 or a nonzero
  /// diagonal, Parse for negative/non-finite entries or a label mismatch.
  void validate() const;
};

enum class Linkage { Single, Complete, Average, Ward };

std::string_view to_string(Linkage linkage);
Linkage linkage_from_string(std::string_view name);

/// One agglomeration step. Cluster ids follow the usual convention: leaves
/// are 0..N-1 and the cluster formed at step s gets id N+s. a < b.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<Merge> merges;
  Linkage linkage = Linkage::Average;
  bool operator==(const Dendrogram&) const = default;
};

/// Lance-Williams agglomeration. Ties between candidate pairs go to the
/// lexicographically smallest (min leaf, max leaf) of the two clusters.
Dendrogram hierarchical_cluster(const DistanceMatrix& d, Linkage linkage = Linkage::Average);

/// Leaf indices in drawing order (left subtree first).
std::vector<std::size_t> leaf_order(const Dendrogram& dg);

/// Newick with branch length = parent height - child height.
std::string to_newick(const Dendrogram& dg);

std::string to_svg(const Dendrogram& dg);

/// Flat labels from undoing the last k-1 merges; clusters are numbered by
/// first appearance in leaf index order.
std::vector<int> cut_clusters(const Dendrogram& dg, std::size_t k);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

inline constexpr std::size_t kProcrustesPoints = 128;

/// 1 - |<b, a>|^2 on centered, unit-norm, arc-length resampled point sets
/// viewed as complex vectors: the residual after the best rotation and
/// uniform scaling of b onto a. Reflections are not allowed.
double procrustes_distance(const Curve2D& a, const Curve2D& b, std::size_t k = kProcrustesPoints);

}  // namespace curveot
