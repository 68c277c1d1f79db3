#include "lqrsyn/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace lqrsyn {
namespace {

LinExpr trace_prod(const MatrixXd& C, const MatExpr& X) {
  if (C.rows() != X.cols() || C.cols() != X.rows())
    throw DimensionError("trace_prod: dimension mismatch");
  LinExpr e;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) e += C(j, i) * X(i, j);
  return e;
}

void require_alpha_one(const SystemModel& model, const char* who) {
  if (model.alpha != 1.0)
    throw std::invalid_argument(std::string(who) +
                                ": LMI synthesis is stated at alpha = 1");
}

// Closure of the strict cone: X >= eps I with a trace-scaled eps.
MatExpr shifted(const MatExpr& X, double eps) {
  return X - MatExpr(MatrixXd(eps * MatrixXd::Identity(X.rows(), X.cols())));
}

double strict_eps(const MatrixXd& Z) { return 1e-8 * (1.0 + Z.trace()); }

struct DesignParts {
  SdpProblem p;
  MatExpr S, G, K;
};

DesignParts design_core(const SystemModel& model, const CostSpec& cost,
                        const MatrixXd& Z, const char* who) {
  require_alpha_one(model, who);
  const int n = model.n(), m = model.m();
  const int d = n + m;
  if (cost.n() != n || cost.m() != m)
    throw DimensionError(std::string(who) + ": cost dimensions mismatch");
  if (Z.rows() != n || Z.cols() != n)
    throw DimensionError(std::string(who) + ": Z must be n x n");

  MatrixXd AB(n, d);
  AB << model.A, model.B;

  DesignParts parts;
  parts.S = parts.p.add_symmetric("S", d);
  parts.G = parts.p.add_rectangular("G", n, n);
  parts.K = parts.p.add_rectangular("K", m, n);
  const MatExpr& S = parts.S;
  const MatExpr& G = parts.G;
  const MatExpr& K = parts.K;

  parts.p.add_psd(shifted(S, strict_eps(Z)), "S_pd");

  MatExpr GtK(d, n);  // [G'; K]
  const MatExpr Gt = G.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) GtK(i, j) = Gt(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) GtK(n + i, j) = K(i, j);

  const MatExpr bottom = G + G.transpose() - congruence(AB, S) - MatExpr(Z);
  parts.p.add_psd(block2x2(S, GtK, GtK.transpose(), bottom), "design_lmi");
  parts.p.set_objective(trace_prod(cost.lambda(), S));
  return parts;
}

}  // namespace

SdpProblem build_sdp_design(const SystemModel& model, const CostSpec& cost,
                            const MatrixXd& Z) {
  return design_core(model, cost, Z, "build_sdp_design").p;
}

SdpProblem build_sdp_constrained(const SystemModel& model,
                                 const CostSpec& cost, const MatrixXd& Z,
                                 const ConstraintSpec& spec) {
  const int n = model.n(), m = model.m();
  const int d = n + m;
  if (spec.gammas.size() != d)
    throw DimensionError("build_sdp_constrained: gammas must have n+m rows");

  DesignParts parts = design_core(model, cost, Z, "build_sdp_constrained");
  const MatExpr& S = parts.S;
  const MatExpr& G = parts.G;
  const MatExpr& K = parts.K;

  // [[rho I, K], [K', G + G' - I]] >= 0.
  const MatExpr rhoI(MatrixXd(spec.rho * MatrixXd::Identity(m, m)));
  const MatExpr bottom =
      G + G.transpose() - MatExpr(MatrixXd(MatrixXd::Identity(n, n)));
  parts.p.add_psd(block2x2(rhoI, K, K.transpose(), bottom), "input_lmi");

  for (int i = 0; i < d; ++i)
    parts.p.add_scalar_ineq(LinExpr(spec.gammas(i)) - S(i, i),
                            "energy_" + std::to_string(i));
  return parts.p;
}

SdpProblem build_dual_sdp(const SystemModel& model, const CostSpec& cost,
                          const MatrixXd& Z) {
  require_alpha_one(model, "build_dual_sdp");
  const int n = model.n(), m = model.m();
  const int d = n + m;
  if (Z.rows() != n || Z.cols() != n)
    throw DimensionError("build_dual_sdp: Z must be n x n");

  MatrixXd AB(n, d);
  AB << model.A, model.B;

  SdpProblem p;
  MatExpr P = p.add_symmetric("P", d);
  MatExpr M = p.add_symmetric("M", n);

  auto sub = [&](const MatExpr& X, int r0, int c0, int r, int c) {
    MatExpr out(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) out(i, j) = X(r0 + i, c0 + j);
    return out;
  };
  const MatExpr P11 = sub(P, 0, 0, n, n);
  const MatExpr P12 = sub(P, 0, n, n, m);
  const MatExpr P22 = sub(P, n, n, m, m);

  // Value constraint: [[ [A B]' P11 [A B] - P + Lambda, [A B]' P12 ],
  //                    [ P12' [A B], P22 ]] >= 0.
  const MatExpr tl =
      congruence(MatrixXd(AB.transpose()), P11) - P + MatExpr(cost.lambda());
  const MatExpr tr = MatrixXd(AB.transpose()) * P12;
  p.add_psd(block2x2(tl, tr, tr.transpose(), P22), "value_lmi");
  p.add_psd(P, "P_psd");
  p.add_psd(shifted(P22, strict_eps(Z)), "P22_pd");
  // Epigraph of the concave objective: M <= P11 - P12 P22^{-1} P12'.
  p.add_psd(block2x2(P11 - M, P12, P12.transpose(), P22), "epigraph");

  p.set_objective(trace_prod(Z, M), /*maximize=*/true);
  return p;
}

Gain recover_gain(const SystemModel& model, const SdpSolution& solution) {
  if (solution.status != SdpStatus::kOptimal)
    throw NumericalError("recover_gain: solution is not optimal (" +
                         to_string(solution.status) + ")");
  const auto g_it = solution.values.find("G");
  const auto k_it = solution.values.find("K");
  if (g_it == solution.values.end() || k_it == solution.values.end())
    throw std::invalid_argument("recover_gain: solution lacks G / K blocks");
  const MatrixXd& G = g_it->second;
  const MatrixXd& K = k_it->second;

  Eigen::JacobiSVD<MatrixXd> svd(G);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 1e-10 * smax)
    throw NumericalError(
        "recover_gain: G is numerically singular (condition " +
        std::to_string(smax / std::max(smin, 1e-300)) +
        "); solver output is inaccurate");
  const MatrixXd F =
      G.transpose().partialPivLu().solve(K.transpose()).transpose();
  return make_gain(model, F);
}

VerifyReport verify_design(const SystemModel& model, const MatrixXd& F,
                           const CostSpec& cost, const MatrixXd& Z,
                           const std::optional<ConstraintSpec>& spec) {
  VerifyReport rep;
  const int n = model.n(), m = model.m();
  rep.rho_closed_loop = spectral_radius(model.A + model.B * F);
  rep.stabilizing = is_stabilizing(model, F);
  Eigen::SelfAdjointEigenSolver<MatrixXd> esf(F.transpose() * F);
  rep.lambda_max_FtF = esf.eigenvalues().maxCoeff();
  if (spec) {
    rep.gammas = spec->gammas;
    rep.rho_limit = spec->rho;
    rep.input_ok = rep.lambda_max_FtF <= spec->rho + 1e-6;
  }
  if (!rep.stabilizing) {
    rep.cost = std::numeric_limits<double>::infinity();
    rep.energy_ok = false;
    rep.pass = false;
    return rep;
  }

  MatrixXd stack(n + m, n);
  stack.topRows(n) = MatrixXd::Identity(n, n);
  stack.bottomRows(m) = F;
  const BlockSym S =
      solve_stein_covariance(model, F, stack * Z * stack.transpose());
  rep.cost = (cost.lambda() * S.full()).trace();
  rep.energies = S.full().diagonal();
  if (spec) {
    rep.energy_ok = true;
    for (int i = 0; i < rep.energies.size(); ++i)
      if (rep.energies(i) > spec->gammas(i) + 1e-6) rep.energy_ok = false;
  }
  rep.pass = rep.stabilizing && rep.energy_ok && rep.input_ok;
  return rep;
}

}  // namespace lqrsyn
