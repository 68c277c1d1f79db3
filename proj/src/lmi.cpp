#include "lqrsyn/lmi.hpp"

namespace lqrsyn {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  for (const auto& [i, c] : o.terms) {
    auto [it, inserted] = terms.emplace(i, c);
    if (!inserted) it->second += c;
  }
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  constant -= o.constant;
  for (const auto& [i, c] : o.terms) {
    auto [it, inserted] = terms.emplace(i, -c);
    if (!inserted) it->second -= c;
  }
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  constant *= s;
  for (auto& [i, c] : terms) c *= s;
  return *this;
}

double LinExpr::eval(const VectorXd& x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x(i);
  return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }

MatExpr::MatExpr(const MatrixXd& C)
    : rows_(static_cast<int>(C.rows())), cols_(static_cast<int>(C.cols())),
      at_(rows_ * cols_) {
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) = LinExpr(C(i, j));
}

MatExpr MatExpr::transpose() const {
  MatExpr t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

MatrixXd MatExpr::eval(const VectorXd& x) const {
  MatrixXd M(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) M(i, j) = (*this)(i, j).eval(x);
  return M;
}

MatExpr operator+(const MatExpr& a, const MatExpr& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("MatExpr: addition dimension mismatch");
  MatExpr out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) += b(i, j);
  return out;
}

MatExpr operator-(const MatExpr& a, const MatExpr& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("MatExpr: subtraction dimension mismatch");
  MatExpr out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
  return out;
}

MatExpr operator*(double s, const MatExpr& a) {
  MatExpr out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) *= s;
  return out;
}

MatExpr operator*(const MatrixXd& C, const MatExpr& a) {
  if (C.cols() != a.rows())
    throw DimensionError("MatExpr: left product dimension mismatch");
  MatExpr out(static_cast<int>(C.rows()), a.cols());
  for (int i = 0; i < C.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      LinExpr e;
      for (int k = 0; k < C.cols(); ++k) e += C(i, k) * a(k, j);
      out(i, j) = e;
    }
  return out;
}

MatExpr operator*(const MatExpr& a, const MatrixXd& C) {
  if (a.cols() != C.rows())
    throw DimensionError("MatExpr: right product dimension mismatch");
  MatExpr out(a.rows(), static_cast<int>(C.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < C.cols(); ++j) {
      LinExpr e;
      for (int k = 0; k < a.cols(); ++k) e += C(k, j) * a(i, k);
      out(i, j) = e;
    }
  return out;
}

MatExpr congruence(const MatrixXd& C, const MatExpr& X) {
  return C * X * MatrixXd(C.transpose());
}

MatExpr block2x2(const MatExpr& A, const MatExpr& B, const MatExpr& C,
                 const MatExpr& D) {
  if (A.rows() != B.rows() || C.rows() != D.rows() || A.cols() != C.cols() ||
      B.cols() != D.cols())
    throw DimensionError("block2x2: incompatible block dimensions");
  MatExpr out(A.rows() + C.rows(), A.cols() + B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) out(i, j) = A(i, j);
    for (int j = 0; j < B.cols(); ++j) out(i, A.cols() + j) = B(i, j);
  }
  for (int i = 0; i < C.rows(); ++i) {
    for (int j = 0; j < C.cols(); ++j) out(A.rows() + i, j) = C(i, j);
    for (int j = 0; j < D.cols(); ++j) out(A.rows() + i, A.cols() + j) = D(i, j);
  }
  return out;
}

MatExpr SdpProblem::add_symmetric(const std::string& name, int d) {
  if (vars_.count(name)) throw std::invalid_argument("duplicate variable");
  VarInfo info{num_vars_, d, d, true};
  vars_[name] = info;
  MatExpr e(d, d);
  int q = info.offset;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j, ++q) {
      e(i, j) = LinExpr::variable(q);
      e(j, i) = LinExpr::variable(q);
    }
  num_vars_ += d * (d + 1) / 2;
  return e;
}

MatExpr SdpProblem::add_rectangular(const std::string& name, int rows,
                                    int cols) {
  if (vars_.count(name)) throw std::invalid_argument("duplicate variable");
  VarInfo info{num_vars_, rows, cols, false};
  vars_[name] = info;
  MatExpr e(rows, cols);
  int q = info.offset;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j, ++q) e(i, j) = LinExpr::variable(q);
  num_vars_ += rows * cols;
  return e;
}

void SdpProblem::add_psd(MatExpr expr, const std::string& label) {
  if (expr.rows() != expr.cols())
    throw DimensionError("add_psd: expression must be square");
  constraints_.push_back(std::move(expr));
  labels_.push_back(label);
}

void SdpProblem::add_scalar_ineq(const LinExpr& expr,
                                 const std::string& label) {
  MatExpr e(1, 1);
  e(0, 0) = expr;
  constraints_.push_back(std::move(e));
  labels_.push_back(label);
}

MatrixXd SdpProblem::value(const std::string& name, const VectorXd& x) const {
  const auto it = vars_.find(name);
  if (it == vars_.end())
    throw std::invalid_argument("SdpProblem: unknown variable " + name);
  const VarInfo& v = it->second;
  MatrixXd M(v.rows, v.cols);
  int q = v.offset;
  if (v.symmetric) {
    for (int i = 0; i < v.rows; ++i)
      for (int j = i; j < v.cols; ++j, ++q) M(i, j) = M(j, i) = x(q);
  } else {
    for (int i = 0; i < v.rows; ++i)
      for (int j = 0; j < v.cols; ++j, ++q) M(i, j) = x(q);
  }
  return M;
}

std::vector<std::string> SdpProblem::variable_names() const {
  std::vector<std::string> names;
  names.reserve(vars_.size());
  for (const auto& [name, info] : vars_) names.push_back(name);
  return names;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kInfeasible: return "infeasible";
    case SdpStatus::kInaccurate: return "inaccurate";
    case SdpStatus::kError: return "error";
  }
  return "error";
}

}  // namespace lqrsyn
