#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqrsyn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExcitationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative PSD tolerance, shared by all modules.
inline constexpr double kPsdTol = 1e-9;

// Spectral radii below 1 - kStabilityMargin count as stabilizing.
inline constexpr double kStabilityMargin = 1e-9;

/// Discrete-time plant x(k+1) = A x(k) + B u(k) with discount alpha.
struct SystemModel {
  MatrixXd A;
  MatrixXd B;
  double alpha = 1.0;

  SystemModel(MatrixXd A_in, MatrixXd B_in, double alpha_in = 1.0)
      : A(std::move(A_in)), B(std::move(B_in)), alpha(alpha_in) {
    if (A.rows() != A.cols())
      throw DimensionError("SystemModel: A must be square");
    if (B.rows() != A.rows())
      throw DimensionError("SystemModel: rows(B) must equal rows(A)");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("SystemModel: alpha must lie in (0, 1]");
  }

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

/// Stage cost x'Qx + u'Ru; Lambda = diag(Q, R).
struct CostSpec {
  MatrixXd Q;
  MatrixXd R;

  CostSpec(MatrixXd Q_in, MatrixXd R_in);

  int n() const { return static_cast<int>(Q.rows()); }
  int m() const { return static_cast<int>(R.rows()); }

  /// Block-diagonal (n+m)x(n+m) matrix diag(Q, R).
  MatrixXd lambda() const;
};

/// Symmetric (n+m)x(n+m) matrix with named 2x2 block views.
class BlockSym {
 public:
  BlockSym() = default;
  /// Symmetrizes on construction; throws if the asymmetry exceeds 1e-12
  /// relative to the norm.
  BlockSym(const MatrixXd& M, int n);

  const MatrixXd& full() const { return M_; }
  int n() const { return n_; }
  int m() const { return static_cast<int>(M_.rows()) - n_; }

  Eigen::Block<const MatrixXd> b11() const { return M_.topLeftCorner(n_, n_); }
  Eigen::Block<const MatrixXd> b12() const {
    return M_.topRightCorner(n_, m());
  }
  Eigen::Block<const MatrixXd> b22() const {
    return M_.bottomRightCorner(m(), m());
  }

 private:
  MatrixXd M_;
  int n_ = 0;
};

/// Feedback gain u = Fx with a recomputed stabilizing certificate
/// (rho(sqrt(alpha) (A + BF)) < 1).
struct Gain {
  MatrixXd F;
  bool stabilizing = false;
};

/// Excitation data for the model-free pathway: Gram matrices Z (state) and
/// Gamma (augmented), optionally given as generating vectors.
struct ExcitationSpec {
  MatrixXd Z;      // n x n, PD
  MatrixXd Gamma;  // (n+m) x (n+m), PD

  MatrixXd gamma11(int n) const { return Gamma.topLeftCorner(n, n); }

  static MatrixXd gram(const std::vector<VectorXd>& vecs);
};

}  // namespace lqrsyn
