// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each check pins the tolerance it is graded at.

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lqrsyn/modelfree.hpp"
#include "lqrsyn/pgd.hpp"
#include "lqrsyn/synthesis.hpp"
#include "test_util.hpp"

using namespace lqrsyn;
using namespace lqrsyn::testing;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok,
            const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name
            << "): " << detail << "\n";
  if (!ok) g_failures++;
}

double exact_z_cost(const SystemModel& model, const CostSpec& cost,
                    const MatrixXd& F, const VectorXd& z) {
  const int n = model.n(), m = model.m();
  MatrixXd stack(n + m, n);
  stack.topRows(n) = MatrixXd::Identity(n, n);
  stack.bottomRows(m) = F;
  const BlockSym S = solve_stein_covariance(
      model, F, stack * z * z.transpose() * stack.transpose());
  return (cost.lambda() * S.full()).trace();
}

double gamma_cost(const SystemModel& model, const CostSpec& cost,
                  const MatrixXd& F, const MatrixXd& Gamma) {
  const BlockSym S = solve_stein_covariance(model, F, Gamma);
  return (cost.lambda() * S.full()).trace();
}

// --- criterion 1 + 2: worked-example SDP and Riccati agreement ------------

void criteria_1_2() {
  const SystemModel model = example2_model();
  const CostSpec cost = example2_cost();
  const MatrixXd Z = MatrixXd::Identity(2, 2);
  const auto sol = solve_sdp(build_sdp_design(model, cost, Z));
  MatrixXd F_pub(1, 2);
  F_pub << -0.5792, -1.5456;

  bool ok1 = sol.status == SdpStatus::kOptimal;
  std::ostringstream d1;
  if (ok1) {
    const Gain F = recover_gain(model, sol);
    ok1 = std::abs(sol.objective - 5.5499) <= 1e-3 &&
          (F.F - F_pub).cwiseAbs().maxCoeff() <= 1e-3;
    d1 << "objective " << sol.objective << " vs 5.5499 (tol 1e-3), gain ["
       << F.F(0, 0) << ", " << F.F(0, 1) << "] vs published (tol 1e-3)";
  } else {
    d1 << "solver status " << to_string(sol.status);
  }
  report(1, "worked-example SDP design", ok1, d1.str());

  const auto r = dare_oracle(model, cost);
  bool ok2 = sol.status == SdpStatus::kOptimal;
  std::ostringstream d2;
  if (ok2) {
    const Gain F = recover_gain(model, sol);
    const double dobj = std::abs(sol.objective - r.P.trace());
    const double dF = (F.F - r.gain.F).cwiseAbs().maxCoeff();
    ok2 = dobj <= 1e-4 && dF <= 1e-4;
    d2 << "|objective - trace(P*)| = " << dobj << " (tol 1e-4), "
       << "gain gap " << dF << " (tol 1e-4)";
  } else {
    d2 << "solver status " << to_string(sol.status);
  }
  report(2, "Riccati oracle agreement", ok2, d2.str());
}

// --- criterion 3: strong duality ------------------------------------------

void criterion_3() {
  std::mt19937 rng(101);
  bool ok = true;
  double worst = 0.0;
  int solved = 0;
  const auto check = [&](const SystemModel& model, const CostSpec& cost,
                         const MatrixXd& Z) {
    const auto primal = solve_sdp(build_sdp_design(model, cost, Z));
    const auto dual = solve_sdp(build_dual_sdp(model, cost, Z));
    if (primal.status != SdpStatus::kOptimal ||
        dual.status != SdpStatus::kOptimal) {
      ok = false;
      return;
    }
    const double rel = std::abs(dual.objective - primal.objective) /
                       (1.0 + std::abs(primal.objective));
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-4;
    solved++;
  };
  check(example2_model(), example2_cost(), MatrixXd::Identity(2, 2));
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + (trial % 3), m = 1 + (trial % 2);
    const auto inst = random_stabilizing(rng, n, m, 1.0);
    const CostSpec cost(MatrixXd(MatrixXd::Identity(n, n)),
                        random_psd(rng, m) + 0.3 * MatrixXd::Identity(m, m));
    const MatrixXd Z = random_psd(rng, n) + MatrixXd::Identity(n, n);
    check(inst.model, cost, Z);
  }
  std::ostringstream d;
  d << solved << "/11 instances solved, worst relative gap " << worst
    << " (tol 1e-4)";
  report(3, "strong duality", ok && solved == 11, d.str());
}

// --- criterion 4: constrained sweep shape ---------------------------------

void criterion_4() {
  const SystemModel model = example2_model();
  const CostSpec cost = example2_cost();
  const MatrixXd Z = MatrixXd::Identity(2, 2);
  const VectorXd gammas = VectorXd::Constant(3, 5.0);
  const auto unconstrained = solve_sdp(build_sdp_design(model, cost, Z));

  std::vector<double> objectives;
  bool all_feasible = true;
  for (int i = 0; i < 20; ++i) {
    const double rho = 1.2 + (5.0 - 1.2) * i / 19.0;
    const auto sol = solve_sdp(
        build_sdp_constrained(model, cost, Z, ConstraintSpec(gammas, rho)));
    if (sol.status != SdpStatus::kOptimal) {
      all_feasible = false;
      continue;
    }
    objectives.push_back(sol.objective);
  }

  bool monotone = true;
  for (size_t i = 1; i < objectives.size(); ++i)
    monotone = monotone && objectives[i] <= objectives[i - 1] + 1e-6;
  bool above = true;
  for (double o : objectives) above = above && o >= 5.5499 - 1e-3;
  const bool endpoint =
      !objectives.empty() &&
      std::abs(objectives.back() - unconstrained.objective) <=
          0.05 * unconstrained.objective;

  // The feasibility boundary sits just below 1.2 with this exact
  // formulation; probe it slightly under the sweep's low end.
  const auto probe = solve_sdp(
      build_sdp_constrained(model, cost, Z, ConstraintSpec(gammas, 1.0)));
  const bool infeasible_low = probe.status == SdpStatus::kInfeasible;

  std::ostringstream d;
  d << objectives.size() << "/20 feasible over [1.2, 5]"
    << (all_feasible ? "" : " (unexpected infeasible grid point)")
    << ", monotone=" << (monotone ? "yes" : "no")
    << ", all >= 5.5489: " << (above ? "yes" : "no")
    << ", rho=5 within 5% of unconstrained: " << (endpoint ? "yes" : "no")
    << ", rho=1.0 infeasible: " << (infeasible_low ? "yes" : "no");
  report(4, "constrained sweep shape",
         all_feasible && monotone && above && endpoint && infeasible_low,
         d.str());
}

// --- criterion 5: gradients vs finite differences -------------------------

void criterion_5() {
  std::mt19937 rng(103);
  double worst_z = 0.0, worst_g = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + (trial % 3), m = 1 + (trial % 2);
    const auto inst = random_stabilizing(rng, n, m, 0.9);
    const CostSpec cost(random_psd(rng, n) + 0.5 * MatrixXd::Identity(n, n),
                        random_psd(rng, m) + 0.5 * MatrixXd::Identity(m, m));

    const VectorXd z = random_matrix(rng, n, 1);
    const MatrixXd g = gradient_model_based(inst.model, inst.F, cost, z);
    const MatrixXd g_fd = finite_difference_gradient(
        [&](const MatrixXd& Fc) {
          return exact_z_cost(inst.model, cost, Fc, z);
        },
        inst.F);
    const double rel_z = (g - g_fd).norm() / (1.0 + g_fd.norm());
    worst_z = std::max(worst_z, rel_z);

    const MatrixXd Gamma = MatrixXd::Identity(n + m, n + m);
    const BlockSym S = solve_stein_covariance(inst.model, inst.F, Gamma);
    const BlockSym P = solve_stein_value(inst.model, inst.F, cost.lambda());
    const MatrixXd gf =
        gradient_model_free(P, S, inst.F, Gamma.topLeftCorner(n, n));
    const MatrixXd gf_fd = finite_difference_gradient(
        [&](const MatrixXd& Fc) {
          return gamma_cost(inst.model, cost, Fc, Gamma);
        },
        inst.F);
    const double rel_g = (gf - gf_fd).norm() / (1.0 + gf_fd.norm());
    worst_g = std::max(worst_g, rel_g);

    ok = ok && rel_z <= 1e-5 && rel_g <= 1e-5;
  }
  std::ostringstream d;
  d << "20 instances each; worst rel. error z-cost " << worst_z
    << ", Gamma-cost " << worst_g << " (tol 1e-5)";
  report(5, "analytic gradients vs finite differences", ok, d.str());
}

// --- criterion 6 + 7: PGD and model-free recovery -------------------------

void criteria_6_7() {
  const SystemModel model = example2_model(0.9);
  const CostSpec cost = example2_cost();
  const auto r = dare_oracle(model, cost);
  MatrixXd F0(1, 2);
  F0 << -0.4, -0.9;
  VectorXd z(2);
  z << 1, -1;

  PgdConfig cfg;
  cfg.max_iter = 6000;
  cfg.grad_tol = 1e-8;
  const auto run = pgd_run(model, cost, StructureMask::ones(1, 2), F0, z, cfg);
  const double dF = (run.final_gain.F - r.gain.F).cwiseAbs().maxCoeff();
  bool monotone = true;
  for (size_t i = 1; i < run.history.size(); ++i)
    monotone =
        monotone && run.history[i].cost <= run.history[i - 1].cost + 1e-12;
  std::ostringstream d6;
  d6 << "gain gap " << dF << " (tol 1e-2) after " << run.iterations
     << " Armijo iterations, cost history monotone: "
     << (monotone ? "yes" : "no");
  report(6, "unstructured PGD recovers the Riccati gain",
         dF <= 1e-2 && monotone, d6.str());

  const SystemTrajectorySource source(model);
  std::vector<VectorXd> seeds;
  for (int i = 0; i < 3; ++i) seeds.push_back(VectorXd::Unit(3, i));
  PgdConfig mf_cfg;
  mf_cfg.max_iter = 4000;
  mf_cfg.grad_tol = 1e-7;
  mf_cfg.horizon_eps = 1e-12;
  mf_cfg.record_history = false;
  const auto mf_run = pgd_modelfree_run(source, cost,
                                        StructureMask::ones(1, 2), F0, seeds,
                                        mf_cfg);
  const double dF_mf =
      (mf_run.final_gain.F - run.final_gain.F).cwiseAbs().maxCoeff();

  std::mt19937 rng(107);
  double worst_value = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = random_stabilizing(rng, 2, 1, 0.9);
    const BlockSym S = solve_stein_covariance(inst.model, inst.F,
                                              MatrixXd::Identity(3, 3));
    const MatrixXd W =
        closed_loop(inst.model, inst.F).augmented * S.full();
    const BlockSym P = solve_value_from_data(S, W, cost, 0.9);
    const BlockSym P_exact =
        solve_stein_value(inst.model, inst.F, cost.lambda());
    worst_value =
        std::max(worst_value, (P.full() - P_exact.full()).norm() /
                                  (1.0 + P_exact.full().norm()));
  }
  std::ostringstream d7;
  d7 << "model-free vs model-based gain gap " << dF_mf << " (tol 5e-2), "
     << "exact-data value recovery worst rel. error " << worst_value
     << " (tol 1e-6)";
  report(7, "model-free equivalence", dF_mf <= 5e-2 && worst_value <= 1e-6,
         d7.str());
}

// --- criterion 8: randomized property suites ------------------------------

void criterion_8() {
  std::mt19937 rng(109);
  bool schur_ok = true, stein_ok = true, mono_ok = true, proj_ok = true,
       w_ok = true;

  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + (trial % 3);
    // Schur lemma forward: G = P certifies A'PA - P' <= 0.
    const MatrixXd A = random_matrix(rng, d, d);
    const MatrixXd P = random_psd(rng, d) + 0.1 * MatrixXd::Identity(d, d);
    const MatrixXd Pp = A.transpose() * P * A + random_psd(rng, d);
    MatrixXd block(2 * d, 2 * d);
    block << Pp, A.transpose() * P, P * A, P;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es_f(block);
    schur_ok = schur_ok &&
               es_f.eigenvalues().minCoeff() >= -1e-9 * (1.0 + block.norm());
    // Schur lemma reverse: a feasible block implies the matrix inequality.
    const MatrixXd R = random_matrix(rng, d, d);
    const MatrixXd G = P + 0.05 * (R - R.transpose());
    const MatrixXd off = A.transpose() * G.transpose();
    const MatrixXd Pp2 = off * P.ldlt().solve(off.transpose()) +
                         0.01 * MatrixXd::Identity(d, d);
    MatrixXd T(d, 2 * d);
    T << MatrixXd::Identity(d, d), -A.transpose();
    MatrixXd blk2(2 * d, 2 * d);
    blk2 << Pp2, off, off.transpose(), P;
    const MatrixXd direct = A.transpose() * P * A - Pp2;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es_r(direct);
    schur_ok = schur_ok && es_r.eigenvalues().maxCoeff() <=
                               1e-9 * (1.0 + direct.norm());
    schur_ok = schur_ok && (-(T * blk2 * T.transpose()) - direct).norm() <=
                               1e-9 * (1.0 + direct.norm());
  }

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + (trial % 3), m = 1 + (trial % 2);
    const auto inst = random_stabilizing(rng, n, m, trial % 2 ? 1.0 : 0.9);
    const MatrixXd Lambda =
        random_psd(rng, n + m) + 0.1 * MatrixXd::Identity(n + m, n + m);
    const MatrixXd Af = closed_loop(inst.model, inst.F).augmented;
    const MatrixXd M = std::sqrt(inst.model.alpha) * Af;

    // Stein value solve vs truncated series.
    const BlockSym Pv = solve_stein_value(inst.model, inst.F, Lambda);
    stein_ok = stein_ok && (Pv.full() - series_value(M, Lambda, 400)).norm() <=
                               1e-7 * (1.0 + Pv.full().norm());

    // H-monotonicity: N1 <= N2 implies S(N1) <= S(N2).
    const MatrixXd N1 = random_psd(rng, n + m);
    const MatrixXd N2 = N1 + random_psd(rng, n + m);
    const MatrixXd S1 = solve_stein_covariance(inst.model, inst.F, N1).full();
    const MatrixXd S2 = solve_stein_covariance(inst.model, inst.F, N2).full();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es_m(S2 - S1);
    mono_ok = mono_ok &&
              es_m.eigenvalues().minCoeff() >= -1e-8 * (1.0 + S2.norm());

    // Projection: idempotent and nonexpansive.
    MatrixXd pat(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) pat(i, j) = (rng() % 2) ? 1.0 : 0.0;
    const StructureMask mask(pat);
    const MatrixXd X = random_matrix(rng, m, n);
    const MatrixXd Y = random_matrix(rng, m, n);
    const MatrixXd PX = project_structure(X, mask);
    proj_ok = proj_ok && (project_structure(PX, mask) - PX).norm() == 0.0;
    proj_ok = proj_ok && (PX - project_structure(Y, mask)).norm() <=
                             (X - Y).norm() + 1e-15;

    // W = A_F S~ identity from rollouts.
    std::vector<VectorXd> seeds;
    for (int i = 0; i < n + m; ++i) seeds.push_back(VectorXd::Unit(n + m, i));
    const int horizon = default_horizon(inst.model, inst.F, 1e-10);
    const auto agg = rollout_augmented(inst.model, inst.F, seeds, horizon);
    w_ok = w_ok && (agg.W - Af * agg.S.full()).norm() <=
                       1e-6 * (1.0 + agg.S.full().norm());
  }

  std::ostringstream d;
  d << "20 seeded instances per property; schur=" << (schur_ok ? "ok" : "FAIL")
    << " stein-series=" << (stein_ok ? "ok" : "FAIL")
    << " monotone=" << (mono_ok ? "ok" : "FAIL")
    << " projection=" << (proj_ok ? "ok" : "FAIL")
    << " W-identity=" << (w_ok ? "ok" : "FAIL");
  report(8, "randomized property suites",
         schur_ok && stein_ok && mono_ok && proj_ok && w_ok, d.str());
}

}  // namespace

int main() {
  criteria_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criteria_6_7();
  criterion_8();
  std::cout << (g_failures == 0 ? "ACCEPTANCE PASS"
                                : "ACCEPTANCE FAIL")
            << " (" << (8 - g_failures) << "/8)\n";
  return g_failures == 0 ? 0 : 1;
}
