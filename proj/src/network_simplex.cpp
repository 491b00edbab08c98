#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curveot/error.hpp"

namespace curveot::detail {

NetworkSimplex::NetworkSimplex(std::size_t num_nodes, std::vector<double> supply)
    : num_nodes_(num_nodes), root_(static_cast<int>(num_nodes)), supply_(std::move(supply)) {}

void NetworkSimplex::reserve_arcs(std::size_t count) {
  src_.reserve(count + num_nodes_);
  dst_.reserve(count + num_nodes_);
  cost_.reserve(count + num_nodes_);
}

void NetworkSimplex::add_arc(int from, int to, double cost) {
  src_.push_back(from);
  dst_.push_back(to);
  cost_.push_back(cost);
}

void NetworkSimplex::init_tree() {
  num_real_arcs_ = src_.size();
  double max_abs = 0.0;
  for (double c : cost_) max_abs = std::max(max_abs, std::abs(c));
  const double big_m = (static_cast<double>(num_nodes_) + 1.0) * (max_abs + 1.0);

  const std::size_t total_nodes = num_nodes_ + 1;
  parent_.assign(total_nodes, -1);
  pred_arc_.assign(total_nodes, -1);
  depth_.assign(total_nodes, 0);
  pot_.assign(total_nodes, 0.0);
  children_.assign(total_nodes, {});
  flow_.assign(num_real_arcs_, 0.0);
  in_tree_.assign(num_real_arcs_ + num_nodes_, 0);

  // Supply nodes drain into the root, demand nodes are fed from it; every
  // zero-flow artificial arc then points toward the root, which makes the
  // initial tree strongly feasible.
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    const int node = static_cast<int>(v);
    const int arc = static_cast<int>(src_.size());
    if (supply_[v] >= 0.0) {
      add_arc(node, root_, big_m);
      flow_.push_back(supply_[v]);
      pot_[v] = -big_m;
    } else {
      add_arc(root_, node, big_m);
      flow_.push_back(-supply_[v]);
      pot_[v] = big_m;
    }
    parent_[v] = root_;
    pred_arc_[v] = arc;
    depth_[v] = 1;
    in_tree_[static_cast<std::size_t>(arc)] = 1;
    children_[static_cast<std::size_t>(root_)].push_back(node);
  }
}

long NetworkSimplex::find_entering_block(double eps) {
  const std::size_t arcs = num_real_arcs_;
  double best = -eps;
  long best_arc = -1;
  std::size_t in_block = 0;
  for (std::size_t scanned = 0; scanned < arcs; ++scanned) {
    const std::size_t e = next_arc_;
    next_arc_ = next_arc_ + 1 == arcs ? 0 : next_arc_ + 1;
    if (!in_tree_[e]) {
      const double r = reduced(e);
      if (r < best) {
        best = r;
        best_arc = static_cast<long>(e);
      }
    }
    if (++in_block == block_size_) {
      if (best_arc >= 0) return best_arc;
      in_block = 0;
    }
  }
  return best_arc;
}

long NetworkSimplex::find_entering_bland(double eps) const {
  for (std::size_t e = 0; e < num_real_arcs_; ++e) {
    if (!in_tree_[e] && reduced(e) < -eps) return static_cast<long>(e);
  }
  return -1;
}

void NetworkSimplex::detach_child(int parent, int child) {
  auto& kids = children_[static_cast<std::size_t>(parent)];
  const auto it = std::find(kids.begin(), kids.end(), child);
  *it = kids.back();
  kids.pop_back();
}

void NetworkSimplex::refresh_subtree(int top) {
  stack_.clear();
  stack_.push_back(top);
  while (!stack_.empty()) {
    const int v = stack_.back();
    stack_.pop_back();
    const auto vi = static_cast<std::size_t>(v);
    const int p = parent_[vi];
    const auto arc = static_cast<std::size_t>(pred_arc_[vi]);
    depth_[vi] = depth_[static_cast<std::size_t>(p)] + 1;
    pot_[vi] = src_[arc] == p ? pot_[static_cast<std::size_t>(p)] + cost_[arc]
                              : pot_[static_cast<std::size_t>(p)] - cost_[arc];
    for (int c : children_[vi]) stack_.push_back(c);
  }
}

void NetworkSimplex::pivot(std::size_t entering, bool& degenerate) {
  const int k = src_[entering];
  const int l = dst_[entering];

  int a = k;
  int b = l;
  while (a != b) {
    if (depth_[static_cast<std::size_t>(a)] > depth_[static_cast<std::size_t>(b)]) {
      a = parent_[static_cast<std::size_t>(a)];
    } else if (depth_[static_cast<std::size_t>(b)] > depth_[static_cast<std::size_t>(a)]) {
      b = parent_[static_cast<std::size_t>(b)];
    } else {
      a = parent_[static_cast<std::size_t>(a)];
      b = parent_[static_cast<std::size_t>(b)];
    }
  }
  const int apex = a;

  // The cycle is oriented along the entering arc: apex -> ... -> k -> l ->
  // ... -> apex. The leaving arc is the last blocking arc met in that order.
  double delta = std::numeric_limits<double>::infinity();
  int leave_node = -1;
  bool leave_on_l_side = false;
  for (int v = k; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
    const auto arc = static_cast<std::size_t>(pred_arc_[static_cast<std::size_t>(v)]);
    if (src_[arc] == v && flow_[arc] < delta) {
      delta = flow_[arc];
      leave_node = v;
    }
  }
  for (int v = l; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
    const auto arc = static_cast<std::size_t>(pred_arc_[static_cast<std::size_t>(v)]);
    if (dst_[arc] == v && flow_[arc] <= delta) {
      delta = flow_[arc];
      leave_node = v;
      leave_on_l_side = true;
    }
  }
  if (leave_node < 0) {
    throw Error(ErrorCode::SolverFailure, "network simplex: unbounded pivot cycle");
  }

  degenerate = delta == 0.0;
  if (!degenerate) {
    flow_[entering] += delta;
    for (int v = k; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
      const auto arc = static_cast<std::size_t>(pred_arc_[static_cast<std::size_t>(v)]);
      flow_[arc] += src_[arc] == v ? -delta : delta;
    }
    for (int v = l; v != apex; v = parent_[static_cast<std::size_t>(v)]) {
      const auto arc = static_cast<std::size_t>(pred_arc_[static_cast<std::size_t>(v)]);
      flow_[arc] += dst_[arc] == v ? -delta : delta;
    }
  }

  const int x = leave_on_l_side ? l : k;
  const int y = leave_on_l_side ? k : l;
  const int u = leave_node;
  in_tree_[static_cast<std::size_t>(pred_arc_[static_cast<std::size_t>(u)])] = 0;
  in_tree_[entering] = 1;

  // Re-hang the cut-off subtree below y, reversing the x..u path.
  detach_child(parent_[static_cast<std::size_t>(u)], u);
  int new_parent = y;
  int new_arc = static_cast<int>(entering);
  for (int v = x;;) {
    const auto vi = static_cast<std::size_t>(v);
    const int old_parent = parent_[vi];
    const int old_arc = pred_arc_[vi];
    if (v != u) detach_child(old_parent, v);
    parent_[vi] = new_parent;
    pred_arc_[vi] = new_arc;
    children_[static_cast<std::size_t>(new_parent)].push_back(v);
    if (v == u) break;
    new_parent = v;
    new_arc = old_arc;
    v = old_parent;
  }
  refresh_subtree(x);
}

NetworkSimplex::Result NetworkSimplex::run() {
  init_tree();
  Result result;
  if (num_real_arcs_ == 0) {
    for (std::size_t v = 0; v < num_nodes_; ++v) {
      result.artificial_flow = std::max(result.artificial_flow, flow_[num_real_arcs_ + v]);
    }
    result.feasible = result.artificial_flow == 0.0;
    return result;
  }

  double max_abs = 0.0;
  for (std::size_t e = 0; e < num_real_arcs_; ++e) max_abs = std::max(max_abs, std::abs(cost_[e]));
  const double eps = 1e-12 * std::max(1.0, max_abs) * std::max(1.0, std::log2(static_cast<double>(num_nodes_)));

  block_size_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(num_real_arcs_))));
  next_arc_ = 0;
  const std::size_t stall_threshold = std::max<std::size_t>(50, num_nodes_);
  const std::size_t max_pivots = 50 * (num_real_arcs_ + num_nodes_) + 10000;

  std::size_t degenerate_run = 0;
  for (;;) {
    const long e = degenerate_run > stall_threshold ? find_entering_bland(eps) : find_entering_block(eps);
    if (e < 0) break;
    bool degenerate = false;
    pivot(static_cast<std::size_t>(e), degenerate);
    degenerate_run = degenerate ? degenerate_run + 1 : 0;
    if (++result.pivots > max_pivots) {
      throw Error(ErrorCode::SolverFailure, "network simplex: pivot limit exceeded");
    }
  }

  for (std::size_t v = 0; v < num_nodes_; ++v) {
    result.artificial_flow = std::max(result.artificial_flow, flow_[num_real_arcs_ + v]);
  }
  return result;
}

}  // namespace curveot::detail
