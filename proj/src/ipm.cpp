#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <limits>

#include "lqrsyn/lmi.hpp"

namespace lqrsyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One affine PSD block C0 + sum_i x_i C_i in coefficient form.
struct Block {
  MatrixXd C0;
  std::vector<int> vars;          // variable indices appearing in the block
  std::vector<MatrixXd> coeffs;   // aligned with vars
  int dim = 0;
};

std::vector<Block> compile(const SdpProblem& p, int extra_vars) {
  std::vector<Block> blocks;
  blocks.reserve(p.constraints().size());
  for (const auto& expr : p.constraints()) {
    Block b;
    b.dim = expr.rows();
    b.C0 = MatrixXd::Zero(b.dim, b.dim);
    std::map<int, MatrixXd> by_var;
    for (int i = 0; i < b.dim; ++i)
      for (int j = 0; j < b.dim; ++j) {
        const LinExpr& e = expr(i, j);
        b.C0(i, j) = e.constant;
        for (const auto& [v, c] : e.terms) {
          auto [it, inserted] =
              by_var.emplace(v, MatrixXd::Zero(b.dim, b.dim));
          it->second(i, j) += c;
        }
      }
    b.C0 = 0.5 * (b.C0 + b.C0.transpose()).eval();
    for (auto& [v, C] : by_var) {
      b.vars.push_back(v);
      b.coeffs.push_back(0.5 * (C + C.transpose()));
    }
    blocks.push_back(std::move(b));
  }
  (void)extra_vars;
  return blocks;
}

MatrixXd block_eval(const Block& b, const VectorXd& x) {
  MatrixXd M = b.C0;
  for (size_t k = 0; k < b.vars.size(); ++k) M += x(b.vars[k]) * b.coeffs[k];
  return M;
}

// -sum_j log det A_j(x); +inf outside the cone.
double barrier(const std::vector<Block>& blocks, const VectorXd& x) {
  double phi = 0.0;
  for (const auto& b : blocks) {
    Eigen::LLT<MatrixXd> llt(block_eval(b, x));
    if (llt.info() != Eigen::Success) return kInf;
    double logdet = 0.0;
    for (int i = 0; i < b.dim; ++i) {
      const double lii = llt.matrixL()(i, i);
      if (!(lii > 0.0)) return kInf;
      logdet += std::log(lii);
    }
    phi -= 2.0 * logdet;
  }
  return phi;
}

struct NewtonResult {
  bool converged = false;
  double objective = 0.0;
};

// Centers min t c'x + phi(x) by damped Newton; x must start strictly
// feasible and stays so. `stop` lets phase I bail out early once a strictly
// feasible point appears.
NewtonResult center(const std::vector<Block>& blocks, const VectorXd& c,
                    double t, VectorXd& x, int max_newton,
                    const std::function<bool(const VectorXd&)>& stop = {}) {
  const int p = static_cast<int>(x.size());
  NewtonResult res;
  double fx = t * c.dot(x) + barrier(blocks, x);
  for (int it = 0; it < max_newton; ++it) {
    if (stop && stop(x)) {
      res.converged = true;
      break;
    }
    VectorXd g = t * c;
    MatrixXd H = MatrixXd::Zero(p, p);
    for (const auto& b : blocks) {
      Eigen::LLT<MatrixXd> llt(block_eval(b, x));
      if (llt.info() != Eigen::Success) return res;  // should not happen
      const MatrixXd Ainv =
          llt.solve(MatrixXd::Identity(b.dim, b.dim));
      std::vector<MatrixXd> M(b.vars.size());
      for (size_t k = 0; k < b.vars.size(); ++k) {
        M[k] = Ainv * b.coeffs[k];
        g(b.vars[k]) -= M[k].trace();
      }
      for (size_t k = 0; k < b.vars.size(); ++k)
        for (size_t l = k; l < b.vars.size(); ++l) {
          const double h = M[k].cwiseProduct(M[l].transpose()).sum();
          H(b.vars[k], b.vars[l]) += h;
          if (l != k) H(b.vars[l], b.vars[k]) += h;
        }
    }

    VectorXd dx;
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::LDLT<MatrixXd> ldlt(
          H + reg * MatrixXd::Identity(p, p));
      dx = ldlt.solve(-g);
      if (ldlt.info() == Eigen::Success && dx.allFinite() &&
          g.dot(dx) < 0.0)
        break;
      reg = (reg == 0.0) ? 1e-12 * (1.0 + H.diagonal().maxCoeff()) : reg * 100;
    }
    if (!dx.allFinite()) return res;

    const double decrement = -g.dot(dx);
    if (decrement <= 1e-12 * (1.0 + std::abs(fx))) {
      res.converged = true;
      break;
    }

    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const VectorXd xn = x + step * dx;
      const double fn = t * c.dot(xn) + barrier(blocks, xn);
      if (fn < fx - 1e-4 * step * decrement) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      res.converged = true;  // line search exhausted: numerically centered
      break;
    }
  }
  res.objective = c.dot(x);
  return res;
}

double min_eig_over_blocks(const std::vector<Block>& blocks,
                           const VectorXd& x) {
  double me = kInf;
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(block_eval(b, x));
    me = std::min(me, es.eigenvalues().minCoeff());
  }
  return me;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const IpmOptions& opts) {
  SdpSolution sol;
  const int p = problem.num_vars();
  if (problem.constraints().empty()) {
    sol.status = SdpStatus::kError;
    sol.message = "no constraints";
    return sol;
  }

  int m_total = 0;
  double scale = 1.0;
  for (const auto& e : problem.constraints()) m_total += e.rows();

  // ---- Phase I: min s subject to A_j(x) + s I >= 0, s >= -1. ----
  // The slack gets variable index p.
  std::vector<Block> blocks = compile(problem, 1);
  for (auto& b : blocks) {
    b.vars.push_back(p);
    b.coeffs.push_back(MatrixXd::Identity(b.dim, b.dim));
    scale = std::max(scale, b.C0.cwiseAbs().maxCoeff());
  }
  {
    Block floor_block;  // s + 1 >= 0 bounds the slack from below
    floor_block.dim = 1;
    floor_block.C0 = MatrixXd::Constant(1, 1, 1.0);
    floor_block.vars.push_back(p);
    floor_block.coeffs.push_back(MatrixXd::Identity(1, 1));
    blocks.push_back(floor_block);
  }
  // Box bounds |x_i| <= R keep the phase I barrier bounded below: without
  // them the unpenalized variables can run off along recession directions.
  const double box = 1e6 * (1.0 + scale);
  for (int i = 0; i < p; ++i) {
    Block b;
    b.dim = 2;
    b.C0 = box * MatrixXd::Identity(2, 2);
    MatrixXd C = MatrixXd::Zero(2, 2);
    C(0, 1) = C(1, 0) = 1.0;
    b.vars.push_back(i);
    b.coeffs.push_back(C);
    blocks.push_back(std::move(b));
  }

  VectorXd xs = VectorXd::Zero(p + 1);
  {
    std::vector<Block> raw = compile(problem, 0);
    double worst = 0.0;
    for (const auto& b : raw) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(b.C0);
      worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    xs(p) = worst + 1.0 + 0.1 * scale;
  }
  VectorXd cs = VectorXd::Zero(p + 1);
  cs(p) = 1.0;

  double t = 1.0;
  bool feasible_found = false;
  const auto deep_inside = [&](const VectorXd& v) {
    return v(p) < -1e-2;
  };
  const int m_phase1 = m_total + 1 + 2 * p;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    center(blocks, cs, t, xs, opts.max_newton, deep_inside);
    // Absolute thresholds: relative ones break down when the constraint
    // constants are huge (the slack floor caps s at -1 regardless of scale).
    if (xs(p) < -10.0 * opts.feas_margin) {
      feasible_found = true;
      break;
    }
    if (m_phase1 / t < 1e-8) break;
    t *= opts.mu;
    sol.iterations++;
  }
  if (!feasible_found) {
    if (xs(p) > opts.feas_margin) {
      sol.status = SdpStatus::kInfeasible;
      sol.message = "phase I slack bounded away from zero";
    } else {
      sol.status = SdpStatus::kInaccurate;
      sol.message = "phase I inconclusive near the feasibility boundary";
    }
    return sol;
  }

  // ---- Phase II: barrier path following from the interior point. ----
  std::vector<Block> main_blocks = compile(problem, 0);
  VectorXd x = xs.head(p);
  const double sense = problem.maximize() ? -1.0 : 1.0;
  VectorXd c = VectorXd::Zero(p);
  for (const auto& [i, coeff] : problem.objective().terms)
    c(i) = sense * coeff;

  double obj_scale = 1.0;
  t = 1.0;
  double gap = kInf;
  double obj_prev = kInf;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    center(main_blocks, c, t, x, opts.max_newton);
    const double obj_now = c.dot(x);
    obj_scale = 1.0 + std::abs(obj_now);
    gap = m_total / t;
    // Require both a small barrier gap and a stabilized objective; the gap
    // test alone passes spuriously when |obj| is still far from its limit.
    if (gap <= opts.gap_tol * obj_scale &&
        std::abs(obj_now - obj_prev) <= 1e-7 * obj_scale)
      break;
    obj_prev = obj_now;
    t *= opts.mu;
    sol.iterations++;
  }

  sol.x = x;
  sol.objective = problem.objective().eval(x);
  for (const auto& name : problem.variable_names())
    sol.values[name] = problem.value(name, x);
  sol.min_constraint_eig = min_eig_over_blocks(main_blocks, x);
  if (gap <= 1e-6 * obj_scale) {
    sol.status = SdpStatus::kOptimal;
  } else {
    sol.status = SdpStatus::kInaccurate;
    sol.message = "barrier gap did not reach tolerance";
  }
  return sol;
}

}  // namespace lqrsyn
