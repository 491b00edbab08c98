#include "curveot/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "curveot/error.hpp"

namespace curveot {

void DistanceMatrix::validate() const {
  const std::size_t n = labels.size();
  if (entries.rows() != n || entries.cols() != n) {
    throw Error(ErrorCode::Parse, "distance matrix is " + std::to_string(entries.rows()) + "x" +
                                      std::to_string(entries.cols()) + " but has " + std::to_string(n) + " labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = entries(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::Parse, "distance (" + labels[i] + ", " + labels[j] + ") is negative or not finite");
      }
      if (std::abs(v - entries(j, i)) > 1e-9) {
        throw Error(ErrorCode::SymmetryViolation,
                    "distance matrix is not symmetric at (" + labels[i] + ", " + labels[j] + ")");
      }
    }
    if (entries(i, i) != 0.0) {
      throw Error(ErrorCode::SymmetryViolation, "nonzero diagonal entry for '" + labels[i] + "'");
    }
  }
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single:
      return "single";
    case Linkage::Complete:
      return "complete";
    case Linkage::Average:
      return "average";
    case Linkage::Ward:
      return "ward";
  }
  return "unknown";
}

Linkage linkage_from_string(std::string_view name) {
  for (Linkage l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
    if (to_string(l) == name) return l;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown linkage '" + std::string(name) + "'");
}

Dendrogram hierarchical_cluster(const DistanceMatrix& d, Linkage linkage) {
  d.validate();
  const std::size_t n = d.size();
  Dendrogram out;
  out.labels = d.labels;
  out.linkage = linkage;
  if (n < 2) return out;

  Matrix dist = d.entries;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> id(n), size(n, 1), min_leaf(n);
  std::iota(id.begin(), id.end(), 0u);
  std::iota(min_leaf.begin(), min_leaf.end(), 0u);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = n, bj = n;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double v = dist(i, j);
        const std::pair<std::size_t, std::size_t> key{std::min(min_leaf[i], min_leaf[j]),
                                                      std::max(min_leaf[i], min_leaf[j])};
        const double tol = 1e-12 * std::max(1.0, std::abs(best));
        if (v < best - tol || (v <= best + tol && key < best_key)) {
          best = std::min(best, v);
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    }
    best = dist(bi, bj);

    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double dik = dist(bi, k);
      const double djk = dist(bj, k);
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single:
          v = std::min(dik, djk);
          break;
        case Linkage::Complete:
          v = std::max(dik, djk);
          break;
        case Linkage::Average:
          v = (ni * dik + nj * djk) / (ni + nj);
          break;
        case Linkage::Ward: {
          const double nk = static_cast<double>(size[k]);
          v = std::sqrt(std::max(
              0.0, ((ni + nk) * dik * dik + (nj + nk) * djk * djk - nk * best * best) / (ni + nj + nk)));
          break;
        }
      }
      dist(bi, k) = dist(k, bi) = v;
    }

    out.merges.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), best, size[bi] + size[bj]});
    active[bj] = false;
    id[bi] = n + step;
    size[bi] += size[bj];
    min_leaf[bi] = std::min(min_leaf[bi], min_leaf[bj]);
  }
  return out;
}

namespace {

struct Node {
  std::size_t left;
  std::size_t right;
  double height;
};

std::vector<Node> internal_nodes(const Dendrogram& dg) {
  std::vector<Node> nodes;
  nodes.reserve(dg.merges.size());
  for (const auto& m : dg.merges) nodes.push_back({m.a, m.b, m.height});
  return nodes;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string newick_label(const std::string& s) {
  if (s.find_first_of(" ()[]':;,\t\n") == std::string::npos && !s.empty()) return s;
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += '\'';
    out += ch;
  }
  return out + "'";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

}  // namespace

std::vector<std::size_t> leaf_order(const Dendrogram& dg) {
  const std::size_t n = dg.labels.size();
  if (n == 0) return {};
  if (dg.merges.size() + 1 != n) throw Error(ErrorCode::Parse, "dendrogram must have exactly N-1 merges");
  const auto nodes = internal_nodes(dg);
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{n == 1 ? 0 : 2 * n - 2};
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    if (c < n) {
      order.push_back(c);
    } else {
      stack.push_back(nodes[c - n].right);
      stack.push_back(nodes[c - n].left);
    }
  }
  return order;
}

std::string to_newick(const Dendrogram& dg) {
  const std::size_t n = dg.labels.size();
  if (n == 0) return ";";
  if (n == 1) return newick_label(dg.labels[0]) + ";";
  const auto nodes = internal_nodes(dg);
  auto height = [&](std::size_t c) { return c < n ? 0.0 : nodes[c - n].height; };
  // Iterative post-order so deep chains do not exhaust the stack.
  std::vector<std::string> text(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) text[i] = newick_label(dg.labels[i]);
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    const auto& nd = nodes[s];
    text[n + s] = "(" + text[nd.left] + ":" + format_number(nd.height - height(nd.left)) + "," + text[nd.right] +
                  ":" + format_number(nd.height - height(nd.right)) + ")";
    text[nd.left].clear();
    text[nd.right].clear();
  }
  return text[2 * n - 2] + ";";
}

std::string to_svg(const Dendrogram& dg) {
  const std::size_t n = dg.labels.size();
  constexpr double kLeafGap = 24.0, kMargin = 20.0, kPlotHeight = 300.0, kLabelSpace = 120.0;
  const double width = 2 * kMargin + kLeafGap * static_cast<double>(std::max<std::size_t>(n, 1));
  const double total_h = kPlotHeight + kLabelSpace + kMargin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << total_h << "\">\n";
  if (n == 0) {
    os << "</svg>\n";
    return os.str();
  }
  const auto order = leaf_order(dg);
  const auto nodes = internal_nodes(dg);
  double top = 0.0;
  for (const auto& nd : nodes) top = std::max(top, nd.height);
  if (!(top > 0.0)) top = 1.0;

  std::vector<double> x(2 * n - 1), y(2 * n - 1);
  const double base = kMargin + kPlotHeight;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    x[order[pos]] = kMargin + kLeafGap * (static_cast<double>(pos) + 0.5);
    y[order[pos]] = base;
  }
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  os << "<g stroke=\"black\" fill=\"none\" stroke-width=\"1\">\n";
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    const auto& nd = nodes[s];
    const std::size_t c = n + s;
    x[c] = 0.5 * (x[nd.left] + x[nd.right]);
    y[c] = base - kPlotHeight * nd.height / top;
    os << "<path d=\"M" << fmt(x[nd.left]) << ' ' << fmt(y[nd.left]) << " V" << fmt(y[c]) << " H"
       << fmt(x[nd.right]) << " V" << fmt(y[nd.right]) << "\"/>\n";
  }
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const double lx = x[order[pos]];
    os << "<text x=\"" << fmt(lx) << "\" y=\"" << fmt(base + 8) << "\" transform=\"rotate(90 " << fmt(lx) << ' '
       << fmt(base + 8) << ")\">" << xml_escape(dg.labels[order[pos]]) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::vector<int> cut_clusters(const Dendrogram& dg, std::size_t k) {
  const std::size_t n = dg.labels.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidConfig, "cannot cut " + std::to_string(n) + " leaves into " + std::to_string(k) +
                                              " clusters");
  }
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t s = 0; s + k < n; ++s) {
    parent[find(dg.merges[s].a)] = n + s;
    parent[find(dg.merges[s].b)] = n + s;
  }
  std::map<std::size_t, int> number;
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    const auto it = number.try_emplace(root, static_cast<int>(number.size())).first;
    out[i] = it->second;
  }
  return out;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
  const std::size_t n = a.size();
  auto pairs = [](double c) { return c * (c - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [_, c] : cells) index += pairs(c);
  for (const auto& [_, c] : rows) sum_a += pairs(c);
  for (const auto& [_, c] : cols) sum_b += pairs(c);
  const double total = pairs(static_cast<double>(n));
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

namespace {

std::vector<std::complex<double>> standardized(const Curve2D& c, std::size_t k) {
  const auto r = resample_arc_length(c, k);
  std::vector<std::complex<double>> z(k);
  std::complex<double> mean{0.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) {
    z[i] = {r[i].x1, r[i].x2};
    mean += z[i];
  }
  mean /= static_cast<double>(k);
  double norm2 = 0.0;
  for (auto& v : z) {
    v -= mean;
    norm2 += std::norm(v);
  }
  const double norm = std::sqrt(norm2);
  for (auto& v : z) v /= norm;
  return z;
}

}  // namespace

double procrustes_distance(const Curve2D& a, const Curve2D& b, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "procrustes needs at least 2 resampled points");
  const auto za = standardized(a, k);
  const auto zb = standardized(b, k);
  std::complex<double> inner{0.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) inner += std::conj(zb[i]) * za[i];
  return std::max(0.0, 1.0 - std::norm(inner));
}

}  // namespace curveot
