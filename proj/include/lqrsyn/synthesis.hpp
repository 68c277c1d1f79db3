#pragma once

#include <optional>

#include "lqrsyn/linalg.hpp"
#include "lqrsyn/lmi.hpp"
#include "lqrsyn/types.hpp"

namespace lqrsyn {

/// Energy bounds e_i' S e_i <= gamma_i plus the state-dependent input bound
/// ||u||^2 <= rho ||x||^2.
struct ConstraintSpec {
  VectorXd gammas;  // length n+m, all > 0
  double rho = 0.0;

  ConstraintSpec(VectorXd g, double r) : gammas(std::move(g)), rho(r) {
    if ((gammas.array() <= 0.0).any())
      throw std::invalid_argument("ConstraintSpec: gammas must be positive");
    if (!(rho > 0.0))
      throw std::invalid_argument("ConstraintSpec: rho must be positive");
  }
};

/// Unconstrained LQR synthesis as a single LMI over (S, G, K):
///   min trace(Lambda S)  s.t.  S > 0,
///   [[S, [G'; K]], [[G, K'], G + G' - [A B] S [A B]' - Z]] >= 0.
/// Requires alpha = 1.
SdpProblem build_sdp_design(const SystemModel& model, const CostSpec& cost,
                            const MatrixXd& Z);

/// Energy/input-constrained synthesis: the design LMI plus
/// [[rho I, K], [K', G + G' - I]] >= 0 and e_i' S e_i <= gamma_i.
/// Its optimal value upper-bounds the constrained optimum.
SdpProblem build_sdp_constrained(const SystemModel& model,
                                 const CostSpec& cost, const MatrixXd& Z,
                                 const ConstraintSpec& spec);

/// Explicit dual: max trace(Z M) over P >= 0, P22 > 0 with the value
/// constraint LMI and the epigraph coupling
/// [[P11 - M, P12], [P12', P22]] >= 0.
SdpProblem build_dual_sdp(const SystemModel& model, const CostSpec& cost,
                          const MatrixXd& Z);

/// F = K (G')^{-1} from an optimal design solution, with a fresh
/// stabilizing certificate.
Gain recover_gain(const SystemModel& model, const SdpSolution& solution);

/// Post-solve check of a candidate gain against trajectory truth.
struct VerifyReport {
  bool stabilizing = false;
  double rho_closed_loop = 0.0;  // rho(A + BF), undiscounted
  double cost = 0.0;             // trace(Lambda S); +inf when unstable
  VectorXd energies;             // e_i' S e_i, empty when unstable
  std::optional<VectorXd> gammas;
  std::optional<double> rho_limit;
  double lambda_max_FtF = 0.0;
  bool energy_ok = true;   // against gammas, when given
  bool input_ok = true;    // lambda_max(F'F) <= rho, when given
  bool pass = false;
};

VerifyReport verify_design(const SystemModel& model, const MatrixXd& F,
                           const CostSpec& cost, const MatrixXd& Z,
                           const std::optional<ConstraintSpec>& spec = {});

}  // namespace lqrsyn
