#include "curveot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curveot/error.hpp"

namespace curveot {
namespace lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows + 1, cols + 1, 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return t_(r, c); }
  double rhs(std::size_t r) const { return t_(r, cols_); }
  double& z(std::size_t c) { return t_(rows_, c); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / t_(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) t_(pr, c) *= inv;
    t_(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = t_(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) t_(r, c) -= f * t_(pr, c);
      t_(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving basic
  // variable among ratio ties.
  template <class Allowed>
  Status iterate(Allowed allowed) {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (allowed(c) && t_(rows_, c) < -kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return Status::Optimal;

      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(r, cols_) / a;
        if (ratio < best - 1e-13 || (std::abs(ratio - best) <= 1e-13 && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == rows_) return Status::Unbounded;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Matrix t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve_dense(const LinearProgram& program) {
  const std::size_t rows = program.b.size();
  const std::size_t vars = program.c.size();
  if (program.a.rows() != rows || program.a.cols() != vars || program.sense.size() != rows) {
    throw Error(ErrorCode::DimensionMismatch, "linear program has inconsistent dimensions");
  }

  // Normalize to b >= 0.
  std::vector<double> sign(rows, 1.0);
  std::vector<Sense> sense = program.sense;
  for (std::size_t r = 0; r < rows; ++r) {
    if (program.b[r] < 0.0) {
      sign[r] = -1.0;
      if (sense[r] == Sense::LessEqual) {
        sense[r] = Sense::GreaterEqual;
      } else if (sense[r] == Sense::GreaterEqual) {
        sense[r] = Sense::LessEqual;
      }
    }
  }

  // Columns: variables, one identity column per row (slack or artificial),
  // then surplus columns for >= rows.
  std::vector<std::size_t> surplus_of(rows, 0);
  std::size_t surplus_count = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (sense[r] == Sense::GreaterEqual) surplus_of[r] = vars + rows + surplus_count++;
  }
  const std::size_t cols = vars + rows + surplus_count;
  std::vector<char> artificial(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) artificial[vars + r] = sense[r] != Sense::LessEqual;

  Tableau tab(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t v = 0; v < vars; ++v) tab.at(r, v) = sign[r] * program.a(r, v);
    tab.at(r, vars + r) = 1.0;
    if (sense[r] == Sense::GreaterEqual) tab.at(r, surplus_of[r]) = -1.0;
    tab.at(r, cols) = sign[r] * program.b[r];
    tab.basis(r) = vars + r;
  }

  Solution sol;
  const bool need_phase1 = std::any_of(artificial.begin(), artificial.end(), [](char a) { return a != 0; });
  if (need_phase1) {
    for (std::size_t c = 0; c < cols; ++c) tab.z(c) = artificial[c] ? 1.0 : 0.0;
    tab.z(cols) = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (!artificial[vars + r]) continue;
      for (std::size_t c = 0; c <= cols; ++c) tab.z(c) -= tab.at(r, c);
    }
    tab.iterate([](std::size_t) { return true; });
    if (-tab.z(cols) > kFeasTol) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and stay inert.
    for (std::size_t r = 0; r < rows; ++r) {
      if (!artificial[tab.basis(r)]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!artificial[c] && std::abs(tab.at(r, c)) > 1e-9) {
          tab.pivot(r, c);
          break;
        }
      }
    }
  }

  for (std::size_t c = 0; c <= cols; ++c) tab.z(c) = c < vars ? program.c[c] : 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t bc = tab.basis(r);
    const double cb = bc < vars ? program.c[bc] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) tab.z(c) -= cb * tab.at(r, c);
  }
  sol.status = tab.iterate([&](std::size_t c) { return !artificial[c]; });
  if (sol.status != Status::Optimal) return sol;

  sol.x.assign(vars, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab.basis(r) < vars) sol.x[tab.basis(r)] = std::max(0.0, tab.rhs(r));
  }
  sol.y.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) sol.y[r] = -sign[r] * tab.z(vars + r);
  sol.objective = -tab.z(cols);
  return sol;
}

}  // namespace lp

TransportPlan oracle_solve(const CostMatrix& cost, std::span<const double> beta, std::span<const double> alpha,
                           Variant variant, const PenaltyVectors* pen) {
  const std::size_t n = beta.size();
  const std::size_t m = alpha.size();
  if (cost.rows() != n || cost.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "oracle: cost and marginals disagree in size");
  }
  if (n * m > kOracleMaxCells) {
    throw Error(ErrorCode::TooLargeForOracle,
                "oracle handles at most " + std::to_string(kOracleMaxCells) + " cells; got " + std::to_string(n * m));
  }

  Matrix effective = cost;
  if (variant == Variant::Partial) {
    if (pen == nullptr || pen->nu.size() != n || pen->mu.size() != m) {
      throw Error(ErrorCode::DimensionMismatch, "oracle: partial transport needs penalties sized to the cost");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) effective(i, j) -= pen->nu[i] + pen->mu[j];
    }
  }

  const bool with_total = variant == Variant::Relaxed;
  const std::size_t rows = n + m + (with_total ? 1 : 0);
  const lp::Sense marginal = variant == Variant::Balanced ? lp::Sense::Equal : lp::Sense::LessEqual;

  lp::LinearProgram program;
  program.a = Matrix(rows, n * m, 0.0);
  program.b.assign(rows, 0.0);
  program.sense.assign(rows, marginal);
  program.c.assign(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t v = i * m + j;
      program.c[v] = effective(i, j);
      program.a(i, v) = 1.0;
      program.a(n + j, v) = 1.0;
      if (with_total) program.a(n + m, v) = 1.0;
    }
  }
  double sb = 0.0;
  double sa = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    program.b[i] = beta[i];
    sb += beta[i];
  }
  for (std::size_t j = 0; j < m; ++j) {
    program.b[n + j] = alpha[j];
    sa += alpha[j];
  }
  if (with_total) {
    program.b[n + m] = std::min(sb, sa);
    program.sense[n + m] = lp::Sense::Equal;
  }

  const lp::Solution sol = lp::solve_dense(program);

  TransportPlan plan;
  plan.pi = Matrix(n, m, 0.0);
  plan.dual.p.assign(n, 0.0);
  plan.dual.q.assign(m, 0.0);
  if (sol.status != lp::Status::Optimal) {
    plan.status = PlanStatus::Infeasible;
    return plan;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double x = sol.x[i * m + j];
      plan.pi(i, j) = x;
      plan.objective += x * effective(i, j);
      plan.transported_mass += x;
    }
  }
  for (std::size_t i = 0; i < n; ++i) plan.dual.p[i] = sol.y[i];
  for (std::size_t j = 0; j < m; ++j) plan.dual.q[j] = sol.y[n + j];
  if (with_total) plan.dual.t = sol.y[n + m];
  return plan;
}

}  // namespace curveot
