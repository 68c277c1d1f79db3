// Config-driven front end: parse a JSON problem description, dispatch to the
// synthesis routines, and emit a plain-text report plus plot-ready CSV.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqrsyn/modelfree.hpp"
#include "lqrsyn/pgd.hpp"
#include "lqrsyn/synthesis.hpp"

using json = nlohmann::json;
using namespace lqrsyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- config parsing ------------------------------------------------------

const json& require(const json& j, const std::string& field,
                    const std::string& path) {
  auto it = j.find(field);
  if (it == j.end()) throw ConfigError(path + field + ": missing");
  return *it;
}

double parse_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

VectorXd parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path + ": expected a non-empty numeric array");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = parse_number(j[i], path);
  return v;
}

MatrixXd parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError(path + ": expected a row-major 2-d numeric array");
  const size_t cols = j.front().size();
  MatrixXd M(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ConfigError(path + ": ragged rows");
    for (size_t k = 0; k < cols; ++k)
      M(static_cast<int>(i), static_cast<int>(k)) =
          parse_number(j[i][k], path);
  }
  return M;
}

MatrixXd parse_matrix_checked(const json& j, const std::string& path, int rows,
                              int cols) {
  const MatrixXd M = parse_matrix(j, path);
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << path << ": expected " << rows << "x" << cols << ", got " << M.rows()
       << "x" << M.cols();
    throw ConfigError(os.str());
  }
  return M;
}

SystemModel parse_model(const json& cfg) {
  const json& m = require(cfg, "model", "");
  const MatrixXd A = parse_matrix(require(m, "A", "model."), "model.A");
  const MatrixXd B = parse_matrix(require(m, "B", "model."), "model.B");
  const double alpha =
      m.contains("alpha") ? parse_number(m["alpha"], "model.alpha") : 1.0;
  if (A.rows() != A.cols()) throw ConfigError("model.A: must be square");
  if (B.rows() != A.rows())
    throw ConfigError("model.B: row count must match model.A");
  try {
    return SystemModel(A, B, alpha);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

CostSpec parse_cost(const json& cfg, int n, int m) {
  const json& c = require(cfg, "cost", "");
  const MatrixXd Q =
      parse_matrix_checked(require(c, "Q", "cost."), "cost.Q", n, n);
  const MatrixXd R =
      parse_matrix_checked(require(c, "R", "cost."), "cost.R", m, m);
  try {
    return CostSpec(Q, R);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cost: ") + e.what());
  }
}

MatrixXd parse_Z(const json& cfg, int n) {
  if (cfg.contains("excitation") && cfg["excitation"].contains("Z"))
    return parse_matrix_checked(cfg["excitation"]["Z"], "excitation.Z", n, n);
  return MatrixXd::Identity(n, n);
}

PgdConfig parse_pgd_config(const json& p) {
  PgdConfig cfg;
  if (p.contains("rule")) {
    const std::string r = p["rule"].get<std::string>();
    if (r == "armijo")
      cfg.rule = StepRule::kArmijo;
    else if (r == "constant")
      cfg.rule = StepRule::kConstant;
    else if (r == "diminishing")
      cfg.rule = StepRule::kDiminishing;
    else
      throw ConfigError("pgd.rule: unknown rule '" + r + "'");
  }
  if (p.contains("gamma")) cfg.gamma = parse_number(p["gamma"], "pgd.gamma");
  if (p.contains("gamma0"))
    cfg.gamma0 = parse_number(p["gamma0"], "pgd.gamma0");
  if (p.contains("max_iter"))
    cfg.max_iter = static_cast<int>(parse_number(p["max_iter"], "pgd.max_iter"));
  if (p.contains("grad_tol"))
    cfg.grad_tol = parse_number(p["grad_tol"], "pgd.grad_tol");
  if (p.contains("M")) {
    if (p["M"].is_string()) {
      if (p["M"].get<std::string>() != "auto")
        throw ConfigError("pgd.M: expected an integer or \"auto\"");
    } else {
      cfg.horizon = static_cast<int>(parse_number(p["M"], "pgd.M"));
    }
  }
  if (p.contains("horizon_eps"))
    cfg.horizon_eps = parse_number(p["horizon_eps"], "pgd.horizon_eps");
  return cfg;
}

// ---- report writing ------------------------------------------------------

struct Report {
  std::ostringstream os;

  Report() { os << std::setprecision(17); }

  template <typename T>
  void line(const std::string& key, const T& value) {
    os << key << ": " << value << "\n";
  }
  void matrix(const std::string& key, const MatrixXd& M) {
    os << key << ":";
    for (int i = 0; i < M.rows(); ++i) {
      os << (i == 0 ? " " : "; ");
      for (int j = 0; j < M.cols(); ++j)
        os << (j == 0 ? "" : " ") << (M(i, j) + 0.0);  // normalize -0
    }
    os << "\n";
  }
};

void add_verification(Report& rep, const VerifyReport& v) {
  rep.line("stabilizing", v.stabilizing ? "yes" : "no");
  rep.line("rho_closed_loop", v.rho_closed_loop);
  rep.line("verified_cost", v.cost);
  if (v.gammas) {
    rep.line("energy_ok", v.energy_ok ? "yes" : "no");
    rep.line("input_ok", v.input_ok ? "yes" : "no");
    rep.line("lambda_max_FtF", v.lambda_max_FtF);
  }
  rep.line("pass", v.pass ? "yes" : "no");
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

void write_history_csv(const std::filesystem::path& path, const PgdRun& run) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,J,grad_norm\n";
  for (const auto& it : run.history)
    os << it.t << "," << it.cost << "," << it.grad_norm << "\n";
  write_text(path, os.str());
}

// ---- dispatch ------------------------------------------------------------

struct Options {
  std::filesystem::path out_dir = ".";
  bool quiet = false;
};

void emit(const Options& opt, const json& cfg, const Report& rep,
          const std::string& default_name) {
  std::string name = default_name;
  if (cfg.contains("output") && cfg["output"].contains("report"))
    name = cfg["output"]["report"].get<std::string>();
  write_text(opt.out_dir / name, rep.os.str());
  if (!opt.quiet) std::cout << rep.os.str();
}

int run_oracle(const json& cfg, const Options& opt) {
  const SystemModel model = parse_model(cfg);
  const CostSpec cost = parse_cost(cfg, model.n(), model.m());
  const MatrixXd Z = parse_Z(cfg, model.n());
  DareResult r;
  try {
    r = dare_oracle(model, cost);
  } catch (const NumericalError& e) {
    std::cerr << "oracle: " << e.what() << "\n";
    return kExitSolver;  // non-stabilizable model: no stabilizing solution
  }
  Report rep;
  rep.line("kind", "oracle");
  rep.line("alpha", model.alpha);
  rep.matrix("P", r.P);
  rep.matrix("F", r.gain.F);
  rep.line("trace_PZ", (r.P * Z).trace());
  emit(opt, cfg, rep, "oracle.txt");
  return kExitOk;
}

int run_pgd(const json& cfg, const Options& opt, bool modelfree) {
  const SystemModel model = parse_model(cfg);
  const int n = model.n(), m = model.m();
  const CostSpec cost = parse_cost(cfg, n, m);
  const json& p = require(cfg, "pgd", "");
  const PgdConfig pcfg = parse_pgd_config(p);
  const MatrixXd F0 =
      parse_matrix_checked(require(p, "F0", "pgd."), "pgd.F0", m, n);
  StructureMask mask = StructureMask::ones(m, n);
  if (cfg.contains("mask")) {
    try {
      mask = StructureMask(parse_matrix_checked(cfg["mask"], "mask", m, n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("mask: ") + e.what());
    }
  }

  PgdRun run;
  if (modelfree) {
    std::vector<VectorXd> seeds;
    if (cfg.contains("excitation") && cfg["excitation"].contains("v")) {
      const json& vs = cfg["excitation"]["v"];
      if (!vs.is_array() || vs.empty())
        throw ConfigError("excitation.v: expected a list of vectors");
      for (size_t i = 0; i < vs.size(); ++i) {
        const VectorXd v = parse_vector(vs[i], "excitation.v");
        if (v.size() != n + m)
          throw ConfigError("excitation.v: seeds must have length n+m");
        seeds.push_back(v);
      }
    } else {
      for (int i = 0; i < n + m; ++i) seeds.push_back(VectorXd::Unit(n + m, i));
    }
    const SystemTrajectorySource source(model);
    run = pgd_modelfree_run(source, cost, mask, F0, seeds, pcfg);
  } else {
    VectorXd z;
    if (cfg.contains("excitation") && cfg["excitation"].contains("z")) {
      z = parse_vector(cfg["excitation"]["z"], "excitation.z");
      if (z.size() != n) throw ConfigError("excitation.z: length must be n");
    } else {
      z = VectorXd::Ones(n);
    }
    const PgdMode mode =
        (p.contains("mode") && p["mode"].get<std::string>() == "simulated")
            ? PgdMode::kSimulated
            : PgdMode::kExact;
    run = pgd_run(model, cost, mask, F0, z, pcfg, mode);
  }

  Report rep;
  rep.line("kind", modelfree ? "pgd-modelfree" : "pgd");
  rep.line("alpha", model.alpha);
  rep.line("status", run.termination);
  rep.line("iterations", run.iterations);
  rep.line("objective", run.final_cost);
  rep.matrix("F", run.final_gain.F);
  rep.line("stabilizing", run.final_gain.stabilizing ? "yes" : "no");
  emit(opt, cfg, rep, "report.txt");

  std::string csv = "history.csv";
  if (cfg.contains("output") && cfg["output"].contains("history_csv"))
    csv = cfg["output"]["history_csv"].get<std::string>();
  write_history_csv(opt.out_dir / csv, run);
  return kExitOk;
}

int sdp_exit_code(const SdpSolution& sol) {
  switch (sol.status) {
    case SdpStatus::kOptimal:
      return kExitOk;
    case SdpStatus::kInfeasible:
      return kExitSolver;
    default:
      return kExitNumerical;
  }
}

std::optional<ConstraintSpec> parse_constraints(const json& cfg, int n, int m) {
  if (!cfg.contains("constraints")) return std::nullopt;
  const json& c = cfg["constraints"];
  if (!c.contains("gammas") || !c.contains("rho")) return std::nullopt;
  VectorXd g = parse_vector(c["gammas"], "constraints.gammas");
  if (g.size() != n + m)
    throw ConfigError("constraints.gammas: length must be n+m");
  try {
    return ConstraintSpec(g, parse_number(c["rho"], "constraints.rho"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("constraints: ") + e.what());
  }
}

int run_sdp(const json& cfg, const Options& opt, const std::string& kind) {
  const SystemModel model = parse_model(cfg);
  if (model.alpha != 1.0)
    throw ConfigError("model.alpha: SDP kinds require alpha = 1");
  const int n = model.n(), m = model.m();
  const CostSpec cost = parse_cost(cfg, n, m);
  const MatrixXd Z = parse_Z(cfg, n);

  // rho-sweep: one constrained solve per grid point, CSV ordered by rho.
  if (kind == "sdp-constrained" && cfg.contains("constraints") &&
      cfg["constraints"].contains("rho_sweep")) {
    const json& c = cfg["constraints"];
    const VectorXd sw = parse_vector(c["rho_sweep"], "constraints.rho_sweep");
    if (sw.size() != 3 || sw(2) < 2.0)
      throw ConfigError("constraints.rho_sweep: expected [lo, hi, count>=2]");
    VectorXd g = parse_vector(require(c, "gammas", "constraints."),
                              "constraints.gammas");
    if (g.size() != n + m)
      throw ConfigError("constraints.gammas: length must be n+m");
    const int count = static_cast<int>(sw(2));

    std::ostringstream csv;
    csv << std::setprecision(17) << "rho,objective,status\n";
    int feasible = 0;
    for (int i = 0; i < count; ++i) {
      const double rho = sw(0) + (sw(1) - sw(0)) * i / (count - 1);
      const auto sol =
          solve_sdp(build_sdp_constrained(model, cost, Z,
                                          ConstraintSpec(g, rho)));
      csv << rho << ",";
      if (sol.status == SdpStatus::kOptimal) {
        csv << sol.objective;
        feasible++;
      } else {
        csv << "nan";
      }
      csv << "," << to_string(sol.status) << "\n";
    }
    std::string name = "sweep.csv";
    if (cfg.contains("output") && cfg["output"].contains("sweep_csv"))
      name = cfg["output"]["sweep_csv"].get<std::string>();
    write_text(opt.out_dir / name, csv.str());

    Report rep;
    rep.line("kind", "sdp-constrained");
    rep.line("sweep_points", count);
    rep.line("sweep_feasible", feasible);
    emit(opt, cfg, rep, "report.txt");
    return kExitOk;
  }

  SdpSolution sol;
  std::optional<ConstraintSpec> spec;
  if (kind == "sdp") {
    sol = solve_sdp(build_sdp_design(model, cost, Z));
  } else if (kind == "sdp-constrained") {
    spec = parse_constraints(cfg, n, m);
    if (!spec)
      throw ConfigError("constraints: gammas and rho required for "
                        "sdp-constrained");
    sol = solve_sdp(build_sdp_constrained(model, cost, Z, *spec));
  } else {  // dual
    sol = solve_sdp(build_dual_sdp(model, cost, Z));
  }

  Report rep;
  rep.line("kind", kind);
  rep.line("alpha", model.alpha);
  rep.line("status", to_string(sol.status));
  if (!sol.message.empty()) rep.line("message", sol.message);
  if (sol.status == SdpStatus::kOptimal ||
      sol.status == SdpStatus::kInaccurate) {
    rep.line("objective", sol.objective);
    if (kind != "dual") {
      const Gain F = recover_gain(model, sol);
      rep.matrix("F", F.F);
      add_verification(rep, verify_design(model, F.F, cost, Z, spec));
    }
  }
  emit(opt, cfg, rep, "report.txt");
  return sdp_exit_code(sol);
}

int dispatch(const std::string& config_path, const Options& opt,
             bool oracle_cmd) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config error: cannot open " << config_path << "\n";
    return kExitConfig;
  }
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::filesystem::create_directories(opt.out_dir);
  try {
    if (oracle_cmd) return run_oracle(cfg, opt);
    const std::string kind =
        require(cfg, "kind", "").get<std::string>();
    if (kind == "oracle") return run_oracle(cfg, opt);
    if (kind == "pgd") return run_pgd(cfg, opt, false);
    if (kind == "pgd-modelfree") return run_pgd(cfg, opt, true);
    if (kind == "sdp" || kind == "sdp-constrained" || kind == "dual")
      return run_sdp(cfg, opt, kind);
    throw ConfigError("kind: unknown problem kind '" + kind + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InstabilityError& e) {
    std::cerr << "solver: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ExcitationError& e) {
    std::cerr << "solver: " << e.what() << "\n";
    return kExitSolver;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LQR synthesis: structured PGD and LMI-based design"};
  app.require_subcommand(1);

  std::string config_path;
  Options opt;
  int seed = 0;  // reserved for randomized fixtures; never touches the math
  app.add_option("--out", opt.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--seed", seed, "seed for randomized fixtures");
  app.add_flag("--quiet", opt.quiet, "suppress stdout echo");

  auto* run = app.add_subcommand("run", "solve the problem in the config");
  run->add_option("config", config_path, "config file")->required();
  run->fallthrough();
  auto* oracle =
      app.add_subcommand("oracle", "Riccati ground truth for the config");
  oracle->add_option("config", config_path, "config file")->required();
  oracle->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  const int code = dispatch(config_path, opt, oracle->parsed());
  if (!opt.quiet) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cout << "elapsed_ms: " << ms << "\n";  // stdout only: reports stay
                                                // byte-stable across runs
  }
  return code;
}
