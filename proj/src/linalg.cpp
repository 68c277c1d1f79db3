#include "lqrsyn/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

namespace lqrsyn {

CostSpec::CostSpec(MatrixXd Q_in, MatrixXd R_in)
    : Q(std::move(Q_in)), R(std::move(R_in)) {
  if (Q.rows() != Q.cols()) throw DimensionError("CostSpec: Q must be square");
  if (R.rows() != R.cols()) throw DimensionError("CostSpec: R must be square");
  if ((Q - Q.transpose()).norm() > 1e-10 * (1.0 + Q.norm()))
    throw std::invalid_argument("CostSpec: Q must be symmetric");
  if ((R - R.transpose()).norm() > 1e-10 * (1.0 + R.norm()))
    throw std::invalid_argument("CostSpec: R must be symmetric");
  Q = 0.5 * (Q + Q.transpose()).eval();
  R = 0.5 * (R + R.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> esq(Q);
  if (esq.eigenvalues().minCoeff() < -kPsdTol * (1.0 + Q.trace()))
    throw std::invalid_argument("CostSpec: Q must be positive semidefinite");
  Eigen::SelfAdjointEigenSolver<MatrixXd> esr(R);
  if (esr.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("CostSpec: R must be positive definite");
}

MatrixXd CostSpec::lambda() const {
  const int n = this->n(), m = this->m();
  MatrixXd L = MatrixXd::Zero(n + m, n + m);
  L.topLeftCorner(n, n) = Q;
  L.bottomRightCorner(m, m) = R;
  return L;
}

BlockSym::BlockSym(const MatrixXd& M, int n) : M_(M), n_(n) {
  if (M.rows() != M.cols()) throw DimensionError("BlockSym: matrix not square");
  if (n < 0 || n > M.rows()) throw DimensionError("BlockSym: bad block split");
  if ((M - M.transpose()).norm() > 1e-12 * (1.0 + M.norm()) + 1e-12)
    throw std::invalid_argument("BlockSym: matrix not symmetric");
  M_ = 0.5 * (M + M.transpose()).eval();
}

MatrixXd ExcitationSpec::gram(const std::vector<VectorXd>& vecs) {
  if (vecs.empty()) throw std::invalid_argument("gram: empty vector set");
  const auto d = vecs.front().size();
  MatrixXd G = MatrixXd::Zero(d, d);
  for (const auto& v : vecs) {
    if (v.size() != d) throw DimensionError("gram: inconsistent vector sizes");
    G += v * v.transpose();
  }
  return G;
}

double spectral_radius(const MatrixXd& M) {
  if (M.rows() != M.cols())
    throw DimensionError("spectral_radius: matrix must be square");
  if (M.rows() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stabilizing(const SystemModel& model, const MatrixXd& F) {
  if (F.rows() != model.m() || F.cols() != model.n())
    throw DimensionError("is_stabilizing: F must be m x n");
  const MatrixXd Acl = model.A + model.B * F;
  return std::sqrt(model.alpha) * spectral_radius(Acl) <
         1.0 - kStabilityMargin;
}

Gain make_gain(const SystemModel& model, const MatrixXd& F) {
  return Gain{F, is_stabilizing(model, F)};
}

ClosedLoop closed_loop(const SystemModel& model, const MatrixXd& F) {
  const int n = model.n(), m = model.m();
  if (F.rows() != m || F.cols() != n)
    throw DimensionError("closed_loop: F must be m x n");
  ClosedLoop cl;
  cl.augmented.resize(n + m, n + m);
  cl.augmented.topLeftCorner(n, n) = model.A;
  cl.augmented.topRightCorner(n, m) = model.B;
  cl.augmented.bottomLeftCorner(m, n) = F * model.A;
  cl.augmented.bottomRightCorner(m, m) = F * model.B;
  cl.state_map = model.A + model.B * F;
  return cl;
}

namespace detail {

MatrixXd stein_fixed_point(const MatrixXd& M, const MatrixXd& N) {
  const auto d = M.rows();
  if (M.cols() != d || N.rows() != d || N.cols() != d)
    throw DimensionError("stein_fixed_point: dimension mismatch");
  const MatrixXd K =
      MatrixXd::Identity(d * d, d * d) - Eigen::kroneckerProduct(M, M);
  Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible())
    throw NumericalError("stein_fixed_point: vectorized system is singular");
  VectorXd x = lu.solve(VectorXd{N.reshaped()});
  MatrixXd X = x.reshaped(d, d);
  return 0.5 * (X + X.transpose());
}

}  // namespace detail

static MatrixXd discounted_loop(const SystemModel& model, const MatrixXd& F) {
  const MatrixXd Af = closed_loop(model, F).augmented;
  const MatrixXd M = std::sqrt(model.alpha) * Af;
  if (spectral_radius(M) >= 1.0 - kStabilityMargin)
    throw InstabilityError(
        "Stein solve: gain is not stabilizing for the given discount");
  return M;
}

BlockSym solve_stein_value(const SystemModel& model, const MatrixXd& F,
                           const MatrixXd& Lambda) {
  const int d = model.n() + model.m();
  if (Lambda.rows() != d || Lambda.cols() != d)
    throw DimensionError("solve_stein_value: Lambda must be (n+m) x (n+m)");
  const MatrixXd M = discounted_loop(model, F);
  return BlockSym(detail::stein_fixed_point(M.transpose(), Lambda), model.n());
}

BlockSym solve_stein_covariance(const SystemModel& model, const MatrixXd& F,
                                const MatrixXd& N) {
  const int d = model.n() + model.m();
  if (N.rows() != d || N.cols() != d)
    throw DimensionError("solve_stein_covariance: N must be (n+m) x (n+m)");
  const MatrixXd M = discounted_loop(model, F);
  return BlockSym(detail::stein_fixed_point(M, N), model.n());
}

DareResult dare_oracle(const SystemModel& model, const CostSpec& cost,
                       int max_iter) {
  const int n = model.n();
  if (cost.n() != n || cost.m() != model.m())
    throw DimensionError("dare_oracle: cost dimensions do not match model");
  const double a = model.alpha;
  const MatrixXd& A = model.A;
  const MatrixXd& B = model.B;

  MatrixXd P = cost.Q;
  int it = 0;
  for (; it < max_iter; ++it) {
    const MatrixXd BtP = B.transpose() * P;
    const MatrixXd G = cost.R + a * BtP * B;
    Eigen::LDLT<MatrixXd> ldlt(G);
    const MatrixXd Pn =
        cost.Q + a * A.transpose() * P * A -
        a * a * A.transpose() * P * B * ldlt.solve(BtP * A);
    const double step = (Pn - P).norm();
    P = 0.5 * (Pn + Pn.transpose());
    if (step <= 1e-12 * (1.0 + P.norm())) break;
  }
  if (it == max_iter)
    throw NumericalError("dare_oracle: value iteration did not converge");

  const MatrixXd G = cost.R + a * B.transpose() * P * B;
  const MatrixXd F = -a * G.ldlt().solve(B.transpose() * P * A);
  DareResult out{P, make_gain(model, F), it + 1};
  if (!out.gain.stabilizing)
    throw NumericalError("dare_oracle: resulting gain is not stabilizing");
  return out;
}

}  // namespace lqrsyn
