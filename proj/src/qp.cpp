// Copyright 2026 The vfqp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vfqp/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace vfqp {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kMaxIter: return "max_iter";
    case QpStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

// Index of the single variable a row bounds, or -1.
int single_variable(const Eigen::MatrixXd& A, int row) {
  int found = -1;
  for (int j = 0; j < A.cols(); ++j) {
    if (A(row, j) == 0.0) continue;
    if (found >= 0) return -1;
    found = j;
  }
  return found;
}

// Variables coupled through shared constraint rows form one group; the
// working-set null space is block diagonal over groups.
struct VariableGroups {
  std::vector<std::vector<int>> vars;
  std::vector<int> of_row;  // -1 for all-zero rows
};

VariableGroups variable_groups(const Eigen::MatrixXd& A, int n) {
  std::vector<int> parent(n);
  for (int j = 0; j < n; ++j) parent[j] = j;
  auto find = [&](int j) {
    while (parent[j] != j) j = parent[j] = parent[parent[j]];
    return j;
  };
  std::vector<int> first(A.rows(), -1);
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < n; ++j) {
      if (A(i, j) == 0.0) continue;
      if (first[i] < 0) {
        first[i] = j;
      } else {
        parent[find(j)] = find(first[i]);
      }
    }
  }
  VariableGroups g;
  std::vector<int> id(n, -1);
  for (int j = 0; j < n; ++j) {
    const int root = find(j);
    if (id[root] < 0) {
      id[root] = static_cast<int>(g.vars.size());
      g.vars.emplace_back();
    }
    g.vars[id[root]].push_back(j);
  }
  g.of_row.resize(A.rows());
  for (int i = 0; i < A.rows(); ++i)
    g.of_row[i] = first[i] < 0 ? -1 : id[find(first[i])];
  return g;
}

}  // namespace

DenseQpResult ActiveSetSolver::solve(const DenseQp& qp,
                                     const Eigen::VectorXd& x0) {
  const int n = static_cast<int>(qp.Q.rows());
  const int m = static_cast<int>(qp.A.rows());
  if (qp.Q.cols() != n || qp.c.size() != n || x0.size() != n ||
      (m > 0 && qp.A.cols() != n) || qp.b.size() != m)
    throw Error(ErrorCode::kDimMismatch, "qp: inconsistent problem dimensions");

  DenseQpResult res;
  res.x = x0;
  res.lambda = Eigen::VectorXd::Zero(m);
  if (n == 0) {
    res.status = QpStatus::kOptimal;
    return res;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(qp.Q);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kNumerical, "qp: Hessian is not positive definite");

  const double scale = 1.0 + qp.b.cwiseAbs().maxCoeff();
  if (m > 0 && ((qp.A * res.x - qp.b).array() > opt_.feas_tol * scale).any()) {
    res.status = QpStatus::kInfeasible;
    return res;
  }

  const VariableGroups groups = variable_groups(qp.A, n);
  const int n_groups = static_cast<int>(groups.vars.size());
  const Eigen::VectorXd row_norm = qp.A.rowwise().norm();

  std::vector<int> W;
  std::vector<std::vector<int>> members(n_groups);  // positions in W
  std::vector<Eigen::MatrixXd> Ag(n_groups);
  std::vector<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>> qr(n_groups);
  Eigen::MatrixXd Z(n, n);
  Eigen::VectorXd& x = res.x;
  bool at_minimizer = false;  // x minimizes over the current working set

  for (int it = 0; it < opt_.max_iter; ++it) {
    res.iterations = it + 1;
    const Eigen::VectorXd grad = qp.Q * x + qp.c;
    const int k = static_cast<int>(W.size());

    // Equality subproblem on the working set in a null-space basis.
    for (auto& mem : members) mem.clear();
    for (int w = 0; w < k; ++w) members[groups.of_row[W[w]]].push_back(w);
    int nz = 0;
    Z.setZero();
    for (int gi = 0; gi < n_groups; ++gi) {
      const std::vector<int>& vars = groups.vars[gi];
      const int s = static_cast<int>(vars.size());
      const int kg = static_cast<int>(members[gi].size());
      if (kg == 0) {
        for (int v : vars) Z(v, nz++) = 1.0;
        continue;
      }
      Ag[gi].resize(kg, s);
      for (int r = 0; r < kg; ++r)
        for (int j = 0; j < s; ++j) Ag[gi](r, j) = qp.A(W[members[gi][r]], vars[j]);
      qr[gi].compute(Ag[gi].transpose());
      const int rank = static_cast<int>(qr[gi].rank());
      if (rank == s) continue;
      const Eigen::MatrixXd basis = qr[gi].householderQ();
      for (int c = rank; c < s; ++c, ++nz)
        for (int j = 0; j < s; ++j) Z(vars[j], nz) = basis(j, c);
    }

    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    if (!at_minimizer && k == 0) {
      p = -llt.solve(grad);
    } else if (!at_minimizer && nz > 0) {
      const auto Zn = Z.leftCols(nz);
      const Eigen::MatrixXd Qz = Zn.transpose() * qp.Q * Zn;
      p = -Zn * Qz.llt().solve(Zn.transpose() * grad);
    }

    if (at_minimizer || p.norm() <= 1e-11 * (1.0 + x.norm())) {
      Eigen::VectorXd lam(k);
      const Eigen::VectorXd rhs = -(grad + qp.Q * p);
      for (int gi = 0; gi < n_groups; ++gi) {
        if (members[gi].empty()) continue;
        const std::vector<int>& vars = groups.vars[gi];
        Eigen::VectorXd rg(vars.size());
        for (std::size_t j = 0; j < vars.size(); ++j) rg[j] = rhs[vars[j]];
        const Eigen::VectorXd lg = qr[gi].solve(rg);
        for (std::size_t r = 0; r < members[gi].size(); ++r) lam[members[gi][r]] = lg[r];
      }
      int drop = -1;
      double most_negative = -opt_.dual_tol * (1.0 + grad.norm());
      for (int i = 0; i < k; ++i) {
        if (lam[i] < most_negative) {
          most_negative = lam[i];
          drop = i;
        }
      }
      if (drop < 0) {
        res.lambda.setZero();
        for (int i = 0; i < k; ++i) res.lambda[W[i]] = std::max(lam[i], 0.0);
        res.working_set = W;
        res.status = QpStatus::kOptimal;
        return res;
      }
      W.erase(W.begin() + drop);
      at_minimizer = false;
      continue;
    }

    // Ratio test over rows outside the working set; ties keep the lowest row.
    const double p_norm = p.norm();
    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(W.begin(), W.end(), i) != W.end()) continue;
      const double ap = qp.A.row(i).dot(p);
      // Rows dependent on the working set see ap at roundoff level.
      if (ap <= 1e-12 * row_norm[i] * p_norm) continue;
      const double slack = std::max(qp.b[i] - qp.A.row(i).dot(x), 0.0);
      const double t = slack / ap;
      if (t < alpha) {
        alpha = t;
        blocking = i;
      }
    }
    x += alpha * p;
    if (blocking < 0) {
      at_minimizer = true;
      continue;
    }
    W.push_back(blocking);

    // Pull x back onto the faces of the blocking row's group.
    const int gi = groups.of_row[blocking];
    const std::vector<int>& vars = groups.vars[gi];
    std::vector<int> rows;
    for (int w : W)
      if (groups.of_row[w] == gi) rows.push_back(w);
    Eigen::MatrixXd Ar(rows.size(), vars.size());
    Eigen::VectorXd resid(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      resid[r] = qp.A.row(rows[r]).dot(x) - qp.b[rows[r]];
      for (std::size_t j = 0; j < vars.size(); ++j) Ar(r, j) = qp.A(rows[r], vars[j]);
    }
    const Eigen::VectorXd d = Ar.completeOrthogonalDecomposition().solve(resid);
    for (std::size_t j = 0; j < vars.size(); ++j) x[vars[j]] -= d[j];
    for (int i : rows) {
      const int j = single_variable(qp.A, i);
      if (j >= 0) x[j] = qp.b[i] / qp.A(i, j);
    }
  }

  res.working_set = W;
  res.status = QpStatus::kMaxIter;
  return res;
}

std::vector<int> QpProblem::active_legs() const {
  std::vector<int> legs;
  for (int i = 0; i < kNumLegs; ++i)
    if (active[i]) legs.push_back(i);
  return legs;
}

DenseQp QpProblem::reduced() const {
  const std::vector<int> legs = active_legs();
  const int n = 3 * static_cast<int>(legs.size());
  Eigen::MatrixXd B(6, n);
  Eigen::MatrixXd Rr(n, n);
  for (int a = 0; a < static_cast<int>(legs.size()); ++a) {
    B.middleCols(3 * a, 3) = B_F.middleCols(3 * legs[a], 3);
    for (int b = 0; b < static_cast<int>(legs.size()); ++b)
      Rr.block(3 * a, 3 * b, 3, 3) = R.block<3, 3>(3 * legs[a], 3 * legs[b]);
  }
  const Vec6 w = v_t + B_0;

  DenseQp qp;
  qp.Q = B.transpose() * H * B + Rr;
  qp.Q = 0.5 * (qp.Q + qp.Q.transpose()).eval();
  qp.c = B.transpose() * (g + H * w);
  const int rows = constrained ? 6 * static_cast<int>(legs.size()) : 0;
  qp.A = Eigen::MatrixXd::Zero(rows, n);
  qp.b = Eigen::VectorXd::Zero(rows);
  if (!constrained) return qp;
  for (int a = 0; a < static_cast<int>(legs.size()); ++a) {
    const int r0 = 6 * a;
    const int fx = 3 * a, fy = 3 * a + 1, fz = 3 * a + 2;
    qp.A(r0 + 0, fx) = 1.0;   qp.A(r0 + 0, fz) = -mu;
    qp.A(r0 + 1, fx) = -1.0;  qp.A(r0 + 1, fz) = -mu;
    qp.A(r0 + 2, fy) = 1.0;   qp.A(r0 + 2, fz) = -mu;
    qp.A(r0 + 3, fy) = -1.0;  qp.A(r0 + 3, fz) = -mu;
    qp.A(r0 + 4, fz) = -1.0;
    qp.A(r0 + 5, fz) = 1.0;
    qp.b[r0 + 5] = f_z_max;
  }
  return qp;
}

Vec6 QpProblem::next_velocity(const Vec12& F) const {
  Vec12 u = F;
  for (int i = 0; i < kNumLegs; ++i)
    if (!active[i]) u.segment<3>(3 * i).setZero();
  return v_t + B_F * u + B_0;
}

double QpProblem::objective(const Vec12& F) const {
  const Vec6 v = next_velocity(F);
  return g.dot(v) + 0.5 * v.dot(H * v) + 0.5 * F.dot(R * F);
}

QpSolution solve_qp(const QpProblem& problem,
                    const ActiveSetSolver::Options& opt) {
  if (!(problem.mu > 0.0) || !(problem.f_z_max > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "qp: mu and f_z_max must be > 0");
  if (!problem.g.allFinite() || !problem.H.allFinite() ||
      !problem.v_t.allFinite() || !problem.B_F.allFinite())
    throw Error(ErrorCode::kNonFinite, "qp: non-finite problem data");

  const std::vector<int> legs = problem.active_legs();
  const DenseQp qp = problem.reduced();
  const int n = static_cast<int>(qp.Q.rows());

  QpSolution sol;
  Eigen::VectorXd x(n);
  if (!problem.constrained) {
    Eigen::LLT<Eigen::MatrixXd> llt(qp.Q);
    if (n > 0 && llt.info() != Eigen::Success)
      throw Error(ErrorCode::kNumerical, "qp: Hessian is not positive definite");
    if (n > 0) x = llt.solve(-qp.c);
    sol.status = QpStatus::kOptimal;
    sol.iterations = n > 0 ? 1 : 0;
    sol.lambda = Eigen::VectorXd::Zero(0);
  } else {
    for (int a = 0; a < static_cast<int>(legs.size()); ++a)
      x.segment<3>(3 * a) = Vec3(0.0, 0.0, 0.5 * problem.f_z_max);
    ActiveSetSolver solver(opt);
    DenseQpResult r = solver.solve(qp, x);
    if (r.status == QpStatus::kInfeasible)
      throw Error(ErrorCode::kSolverFailure, "qp: infeasible start point");
    x = r.x;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.lambda = std::move(r.lambda);
    sol.working_set = std::move(r.working_set);
  }

  for (int a = 0; a < static_cast<int>(legs.size()); ++a)
    sol.F.segment<3>(3 * legs[a]) = x.segment<3>(3 * a);
  sol.v_next = problem.next_velocity(sol.F);
  sol.objective = problem.objective(sol.F);
  return sol;
}

QpProblem build_problem(const CentroidalState& x, const LegFlags& contacts,
                        const LegPoints& points, const ReducedExpansion& pred,
                        const ModelParams& p, const ForceLimits& limits,
                        const Mat12& R) {
  const VelocityLinearization lin = linearize_velocity(x, contacts, points, p);
  QpProblem prob;
  prob.g = pred.g;
  prob.H = pred.H;
  prob.R = R;
  prob.B_F = lin.B_F;
  prob.B_0 = lin.B_0;
  prob.v_t = x.velocity();
  prob.active = contacts;
  prob.mu = limits.mu;
  prob.f_z_max = limits.f_z_max;
  prob.constrained = limits.constrained;
  return prob;
}

ContactForces control_step(const CentroidalState& x, const LegFlags& contacts,
                           const LegPoints& points, const ReducedExpansion& pred,
                           const ModelParams& p, const ForceLimits& limits,
                           const Mat12& R, QpSolution* solution) {
  const QpProblem prob = build_problem(x, contacts, points, pred, p, limits, R);
  QpSolution sol = solve_qp(prob);
  ContactForces f = ContactForces::from_stacked(sol.F, contacts);
  if (solution) *solution = std::move(sol);
  return f;
}

}  // namespace vfqp
