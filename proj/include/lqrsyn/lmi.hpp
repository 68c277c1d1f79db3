#pragma once

#include <map>
#include <string>
#include <vector>

#include "lqrsyn/types.hpp"

namespace lqrsyn {

/// Affine scalar expression c + sum_i coeff_i * x_i over the flattened
/// decision vector of an SdpProblem.
struct LinExpr {
  double constant = 0.0;
  std::map<int, double> terms;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static LinExpr variable(int index, double coeff = 1.0) {
    LinExpr e;
    e.terms[index] = coeff;
    return e;
  }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  double eval(const VectorXd& x) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);

/// Dense matrix of affine scalar expressions.
class MatExpr {
 public:
  MatExpr() = default;
  MatExpr(int rows, int cols) : rows_(rows), cols_(cols), at_(rows * cols) {}
  /// Constant lift.
  explicit MatExpr(const MatrixXd& C);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  LinExpr& operator()(int i, int j) { return at_[i * cols_ + j]; }
  const LinExpr& operator()(int i, int j) const { return at_[i * cols_ + j]; }

  MatExpr transpose() const;
  MatrixXd eval(const VectorXd& x) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<LinExpr> at_;
};

MatExpr operator+(const MatExpr& a, const MatExpr& b);
MatExpr operator-(const MatExpr& a, const MatExpr& b);
MatExpr operator*(double s, const MatExpr& a);
// Products with constant matrices (the expression stays affine).
MatExpr operator*(const MatrixXd& C, const MatExpr& a);
MatExpr operator*(const MatExpr& a, const MatrixXd& C);
/// C * X * C' for constant C.
MatExpr congruence(const MatrixXd& C, const MatExpr& X);
/// [[A, B], [C, D]] block assembly.
MatExpr block2x2(const MatExpr& A, const MatExpr& B, const MatExpr& C,
                 const MatExpr& D);

/// A linear-objective problem over affine positive-semidefinite constraints.
/// Scalar inequalities enter as 1x1 blocks.
class SdpProblem {
 public:
  /// Declares a symmetric d x d variable; returns its MatExpr view.
  MatExpr add_symmetric(const std::string& name, int d);
  /// Declares a general rows x cols variable.
  MatExpr add_rectangular(const std::string& name, int rows, int cols);

  void add_psd(MatExpr expr, const std::string& label = "");
  /// expr >= 0 as a 1x1 PSD block.
  void add_scalar_ineq(const LinExpr& expr, const std::string& label = "");
  /// Objective defaults to minimization; pass maximize = true to flip.
  void set_objective(const LinExpr& obj, bool maximize = false) {
    objective_ = obj;
    maximize_ = maximize;
  }

  int num_vars() const { return num_vars_; }
  const LinExpr& objective() const { return objective_; }
  bool maximize() const { return maximize_; }
  std::vector<std::string> variable_names() const;
  const std::vector<MatExpr>& constraints() const { return constraints_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Extracts a named variable from a solution vector.
  MatrixXd value(const std::string& name, const VectorXd& x) const;

 private:
  struct VarInfo {
    int offset;
    int rows, cols;
    bool symmetric;
  };
  int num_vars_ = 0;
  std::map<std::string, VarInfo> vars_;
  LinExpr objective_;
  bool maximize_ = false;
  std::vector<MatExpr> constraints_;
  std::vector<std::string> labels_;
};

enum class SdpStatus { kOptimal, kInfeasible, kInaccurate, kError };

std::string to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::kError;
  double objective = 0.0;
  VectorXd x;  // flattened decision vector
  std::map<std::string, MatrixXd> values;
  int iterations = 0;
  double min_constraint_eig = 0.0;  // over all PSD blocks at x
  std::string message;
};

struct IpmOptions {
  double gap_tol = 1e-11;        // target relative duality gap (m_total / t)
  double feas_margin = 1e-7;     // phase-I margin deciding infeasibility
  double mu = 20.0;              // barrier parameter growth factor
  int max_newton = 400;
  int max_outer = 120;
};

/// Log-barrier path-following solver for small dense LMI problems.
SdpSolution solve_sdp(const SdpProblem& problem, const IpmOptions& opts = {});

}  // namespace lqrsyn
