#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lqrsyn/linalg.hpp"
#include "lqrsyn/lmi.hpp"
#include "lqrsyn/modelfree.hpp"
#include "lqrsyn/pgd.hpp"
#include "lqrsyn/synthesis.hpp"
#include "lqrsyn/trajectory.hpp"

namespace py = pybind11;
using namespace lqrsyn;

namespace {

PgdConfig make_config(const std::string& rule, double gamma, int max_iter,
                      double grad_tol, std::optional<int> horizon) {
  PgdConfig cfg;
  if (rule == "armijo") {
    cfg.rule = StepRule::kArmijo;
  } else if (rule == "constant") {
    cfg.rule = StepRule::kConstant;
    cfg.gamma = gamma;
  } else if (rule == "diminishing") {
    cfg.rule = StepRule::kDiminishing;
    cfg.gamma0 = gamma;
  } else {
    throw std::invalid_argument("unknown step rule: " + rule);
  }
  cfg.max_iter = max_iter;
  cfg.grad_tol = grad_tol;
  cfg.horizon = horizon;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_lqrsyn, mod) {
  mod.doc() = "LQR synthesis: structured projected gradient descent and "
              "LMI-based design";

  py::class_<SystemModel>(mod, "SystemModel")
      .def(py::init<MatrixXd, MatrixXd, double>(), py::arg("A"), py::arg("B"),
           py::arg("alpha") = 1.0)
      .def_readonly("A", &SystemModel::A)
      .def_readonly("B", &SystemModel::B)
      .def_readonly("alpha", &SystemModel::alpha);

  py::class_<CostSpec>(mod, "CostSpec")
      .def(py::init<MatrixXd, MatrixXd>(), py::arg("Q"), py::arg("R"))
      .def_readonly("Q", &CostSpec::Q)
      .def_readonly("R", &CostSpec::R)
      .def("lambda_", &CostSpec::lambda);

  py::class_<Gain>(mod, "Gain")
      .def_readonly("F", &Gain::F)
      .def_readonly("stabilizing", &Gain::stabilizing);

  py::class_<BlockSym>(mod, "BlockSym")
      .def("full", &BlockSym::full)
      .def("b11", [](const BlockSym& b) { return MatrixXd(b.b11()); })
      .def("b12", [](const BlockSym& b) { return MatrixXd(b.b12()); })
      .def("b22", [](const BlockSym& b) { return MatrixXd(b.b22()); });

  mod.def("spectral_radius", &spectral_radius, py::arg("M"));
  mod.def("is_stabilizing", &is_stabilizing, py::arg("model"), py::arg("F"));
  mod.def(
      "closed_loop",
      [](const SystemModel& model, const MatrixXd& F) {
        const auto cl = closed_loop(model, F);
        return py::make_tuple(cl.augmented, cl.state_map);
      },
      py::arg("model"), py::arg("F"),
      "Returns (augmented A_F, state map A + BF).");
  mod.def("solve_stein_value", &solve_stein_value, py::arg("model"),
          py::arg("F"), py::arg("Lambda"));
  mod.def("solve_stein_covariance", &solve_stein_covariance, py::arg("model"),
          py::arg("F"), py::arg("N"));
  mod.def(
      "dare_oracle",
      [](const SystemModel& model, const CostSpec& cost) {
        const auto r = dare_oracle(model, cost);
        return py::make_tuple(r.P, r.gain);
      },
      py::arg("model"), py::arg("cost"));

  mod.def("default_horizon", &default_horizon, py::arg("model"), py::arg("F"),
          py::arg("eps") = 1e-8, py::arg("max_horizon") = 2000000);
  mod.def("rollout_state_aggregate", &rollout_state_aggregate,
          py::arg("model"), py::arg("F"), py::arg("z"), py::arg("M"));
  mod.def("discounted_cost", &discounted_cost, py::arg("model"), py::arg("F"),
          py::arg("z"), py::arg("cost"), py::arg("M"));

  py::class_<StructureMask>(mod, "StructureMask")
      .def(py::init<MatrixXd>(), py::arg("pattern"))
      .def_readonly("pattern", &StructureMask::pattern);

  py::class_<PgdIterate>(mod, "PgdIterate")
      .def_readonly("t", &PgdIterate::t)
      .def_readonly("F", &PgdIterate::F)
      .def_readonly("cost", &PgdIterate::cost)
      .def_readonly("grad_norm", &PgdIterate::grad_norm);

  py::class_<PgdRun>(mod, "PgdRun")
      .def_readonly("history", &PgdRun::history)
      .def_readonly("final_gain", &PgdRun::final_gain)
      .def_readonly("final_cost", &PgdRun::final_cost)
      .def_readonly("iterations", &PgdRun::iterations)
      .def_readonly("termination", &PgdRun::termination);

  mod.def("project_structure", &project_structure, py::arg("F"),
          py::arg("mask"));
  mod.def("gradient_model_based", &gradient_model_based, py::arg("model"),
          py::arg("F"), py::arg("cost"), py::arg("z"));
  mod.def(
      "pgd_run",
      [](const SystemModel& model, const CostSpec& cost,
         const StructureMask& mask, const MatrixXd& F0, const VectorXd& z,
         const std::string& rule, double gamma, int max_iter, double grad_tol,
         bool simulated, std::optional<int> horizon) {
        const PgdConfig cfg =
            make_config(rule, gamma, max_iter, grad_tol, horizon);
        return pgd_run(model, cost, mask, F0, z, cfg,
                       simulated ? PgdMode::kSimulated : PgdMode::kExact);
      },
      py::arg("model"), py::arg("cost"), py::arg("mask"), py::arg("F0"),
      py::arg("z"), py::arg("rule") = "armijo", py::arg("gamma") = 1e-3,
      py::arg("max_iter") = 5000, py::arg("grad_tol") = 1e-6,
      py::arg("simulated") = false, py::arg("horizon") = py::none());
  mod.def(
      "pgd_modelfree_run",
      [](const SystemModel& model, const CostSpec& cost,
         const StructureMask& mask, const MatrixXd& F0,
         const std::vector<VectorXd>& v_set, const std::string& rule,
         double gamma, int max_iter, double grad_tol,
         std::optional<int> horizon) {
        const SystemTrajectorySource source(model);
        const PgdConfig cfg =
            make_config(rule, gamma, max_iter, grad_tol, horizon);
        return pgd_modelfree_run(source, cost, mask, F0, v_set, cfg);
      },
      py::arg("model"), py::arg("cost"), py::arg("mask"), py::arg("F0"),
      py::arg("v_set"), py::arg("rule") = "armijo", py::arg("gamma") = 1e-3,
      py::arg("max_iter") = 5000, py::arg("grad_tol") = 1e-6,
      py::arg("horizon") = py::none());

  py::class_<ConstraintSpec>(mod, "ConstraintSpec")
      .def(py::init<VectorXd, double>(), py::arg("gammas"), py::arg("rho"))
      .def_readonly("gammas", &ConstraintSpec::gammas)
      .def_readonly("rho", &ConstraintSpec::rho);

  py::class_<SdpProblem>(mod, "SdpProblem");

  py::class_<SdpSolution>(mod, "SdpSolution")
      .def_property_readonly(
          "status",
          [](const SdpSolution& s) { return to_string(s.status); })
      .def_readonly("objective", &SdpSolution::objective)
      .def_readonly("values", &SdpSolution::values)
      .def_readonly("iterations", &SdpSolution::iterations)
      .def_readonly("message", &SdpSolution::message);

  mod.def("build_sdp_design", &build_sdp_design, py::arg("model"),
          py::arg("cost"), py::arg("Z"));
  mod.def("build_sdp_constrained", &build_sdp_constrained, py::arg("model"),
          py::arg("cost"), py::arg("Z"), py::arg("spec"));
  mod.def("build_dual_sdp", &build_dual_sdp, py::arg("model"), py::arg("cost"),
          py::arg("Z"));
  mod.def(
      "solve_sdp",
      [](const SdpProblem& p) { return solve_sdp(p); }, py::arg("problem"));
  mod.def("recover_gain", &recover_gain, py::arg("model"), py::arg("solution"));

  py::class_<VerifyReport>(mod, "VerifyReport")
      .def_readonly("stabilizing", &VerifyReport::stabilizing)
      .def_readonly("rho_closed_loop", &VerifyReport::rho_closed_loop)
      .def_readonly("cost", &VerifyReport::cost)
      .def_readonly("energies", &VerifyReport::energies)
      .def_readonly("lambda_max_FtF", &VerifyReport::lambda_max_FtF)
      .def_readonly("energy_ok", &VerifyReport::energy_ok)
      .def_readonly("input_ok", &VerifyReport::input_ok)
      .def_readonly("pass_", &VerifyReport::pass);

  mod.def(
      "verify_design",
      [](const SystemModel& model, const MatrixXd& F, const CostSpec& cost,
         const MatrixXd& Z, std::optional<ConstraintSpec> spec) {
        return verify_design(model, F, cost, Z, spec);
      },
      py::arg("model"), py::arg("F"), py::arg("cost"), py::arg("Z"),
      py::arg("spec") = py::none());
}
