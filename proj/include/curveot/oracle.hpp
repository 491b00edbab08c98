#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "curveot/matrix.hpp"
#include "curveot/transport.hpp"

namespace curveot {

/// Largest n*m the dense reference solver accepts.
inline constexpr std::size_t kOracleMaxCells = 400;

/// Reference solve of the same LP with a dense two-phase tableau simplex
/// under Bland's rule. It shares no code with the network simplex and is meant
/// for tests and verification runs on small instances. Duals are read from the
/// final tableau.
TransportPlan oracle_solve(const CostMatrix& cost, std::span<const double> beta, std::span<const double> alpha,
                           Variant variant, const PenaltyVectors* pen = nullptr);

namespace lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

/// min c^T x  s.t.  A x (sense) b,  x >= 0.
struct LinearProgram {
  Matrix a;
  std::vector<double> b;
  std::vector<Sense> sense;
  std::vector<double> c;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Optimal;
  std::vector<double> x;
  std::vector<double> y;  // one dual per constraint row
  double objective = 0.0;
};

Solution solve_dense(const LinearProgram& program);

}  // namespace lp
}  // namespace curveot
