#pragma once

#include <cstddef>
#include <vector>

namespace curveot::detail {

// Primal network simplex for uncapacitated min-cost flow with real-valued
// supplies. Uses a strongly feasible spanning tree rooted at an artificial
// node (big-M start), block-search pricing, and Bland's rule after a run of
// degenerate pivots.
class NetworkSimplex {
 public:
  NetworkSimplex(std::size_t num_nodes, std::vector<double> supply);

  void add_arc(int from, int to, double cost);
  void reserve_arcs(std::size_t count);

  struct Result {
    bool feasible = true;
    std::size_t pivots = 0;
    // Largest flow left on an artificial arc (mass the real arcs could not route).
    double artificial_flow = 0.0;
  };

  Result run();

  double flow(std::size_t arc) const { return flow_[arc]; }
  // Reduced cost of arc (u -> v) is cost + potential(u) - potential(v).
  double potential(std::size_t node) const { return pot_[node]; }

 private:
  double reduced(std::size_t arc) const { return cost_[arc] + pot_[src_[arc]] - pot_[dst_[arc]]; }
  void init_tree();
  long find_entering_block(double eps);
  long find_entering_bland(double eps) const;
  void pivot(std::size_t entering, bool& degenerate);
  void refresh_subtree(int top);
  void detach_child(int parent, int child);

  std::size_t num_nodes_;
  std::size_t num_real_arcs_ = 0;
  int root_;
  std::vector<double> supply_;

  std::vector<int> src_;
  std::vector<int> dst_;
  std::vector<double> cost_;
  std::vector<double> flow_;

  std::vector<int> parent_;
  std::vector<int> pred_arc_;
  std::vector<int> depth_;
  std::vector<double> pot_;
  std::vector<std::vector<int>> children_;
  std::vector<char> in_tree_;

  std::size_t next_arc_ = 0;
  std::size_t block_size_ = 0;
  std::vector<int> stack_;
};

}  // namespace curveot::detail
