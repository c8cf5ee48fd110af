#include "hmment/model_curve.hpp"

#include <cmath>

namespace hmment {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

ModelCurve::ModelCurve(std::vector<Eigen::MatrixXd> coefficients, SymbolMap phi)
    : coefficients_(std::move(coefficients)), phi_(std::move(phi)) {
  if (coefficients_.empty()) throw Error(ErrorCode::InvalidModel, "curve has no coefficients");
  const Eigen::Index n = coefficients_.front().rows();
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    const auto& c = coefficients_[j];
    if (c.rows() != n || c.cols() != n) {
      throw Error(ErrorCode::InvalidModel, "curve coefficient " + std::to_string(j) +
                                               " has inconsistent shape");
    }
    const double target = j == 0 ? 1.0 : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(c.row(i).sum() - target) > kStochasticTolerance) {
        throw Error(ErrorCode::InvalidModel, "curve coefficient " + std::to_string(j) + " row " +
                                                 std::to_string(i) + " sums to " +
                                                 std::to_string(c.row(i).sum()) + ", expected " +
                                                 std::to_string(target));
      }
    }
  }
  if (phi_.state_count() != n) {
    throw Error(ErrorCode::InvalidModel, "symbol map length does not match curve dimension");
  }
}

ModelCurve ModelCurve::binary_symmetric(const Eigen::Matrix2d& pi) {
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd slope = Eigen::MatrixXd::Zero(4, 4);
  for (int y = 0; y < 2; ++y) {
    for (int e = 0; e < 2; ++e) {
      const int row = 2 * y + e;
      for (int y2 = 0; y2 < 2; ++y2) {
        base(row, 2 * y2) = pi(y, y2);
        slope(row, 2 * y2) = -pi(y, y2);
        slope(row, 2 * y2 + 1) = pi(y, y2);
      }
    }
  }
  return ModelCurve({base, slope}, SymbolMap({0, 1, 1, 0}, 2));
}

ModelCurve ModelCurve::constant(const HiddenMarkovModel& m) {
  return ModelCurve({m.delta().matrix()}, m.phi());
}

ModelCurve ModelCurve::affine(const Eigen::MatrixXd& base, const Eigen::MatrixXd& direction,
                              SymbolMap phi) {
  return ModelCurve({base, direction}, std::move(phi));
}

Eigen::MatrixXd ModelCurve::matrix_at(double eps) const {
  Eigen::MatrixXd m = coefficients_.back();
  for (auto it = coefficients_.rbegin() + 1; it != coefficients_.rend(); ++it) m = m * eps + *it;
  return m;
}

HiddenMarkovModel ModelCurve::at(double eps) const {
  Eigen::MatrixXd m = matrix_at(eps);
  // Clean roundoff below zero; genuine negatives still fail validation.
  m = (m.array().abs() < 1e-15).select(0.0, m);
  return HiddenMarkovModel(StochasticMatrix(std::move(m)), phi_);
}

MatrixSeries ModelCurve::expand(double eps0, int order) const {
  if (order < 0 || order > kMaxJetOrder) {
    throw Error(ErrorCode::OrderMismatch, "expansion order out of range");
  }
  const Eigen::Index n = state_count();
  MatrixSeries s(order, n, n);
  const int degree = static_cast<int>(coefficients_.size()) - 1;
  // Delta(eps0 + t) = sum_j D_j sum_k C(j,k) eps0^(j-k) t^k.
  for (int k = 0; k <= std::min(order, degree); ++k) {
    for (int j = k; j <= degree; ++j) {
      s.terms[static_cast<std::size_t>(k)] +=
          binomial(j, k) * std::pow(eps0, j - k) * coefficients_[static_cast<std::size_t>(j)];
    }
  }
  s.terms[0] = (s.terms[0].array().abs() < 1e-15).select(0.0, s.terms[0]);
  [[maybe_unused]] const StochasticMatrix valid_at_eps0(s.terms[0]);
  return s;
}

MatrixSeries stationary_series(const MatrixSeries& delta) {
  const Eigen::Index n = delta.rows();
  const int K = delta.order();
  // Bordered system: columns of (Delta^T - I) with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a0 = delta.terms[0].transpose() - Eigen::MatrixXd::Identity(n, n);
  a0.row(n - 1).setOnes();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a0);
  if (lu.rank() < n) {
    throw Error(ErrorCode::NotIrreducible,
                "chain has no unique stationary distribution (more than one closed class)");
  }
  MatrixSeries pi(K, 1, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  pi.terms[0] = lu.solve(rhs).transpose();
  for (int k = 1; k <= K; ++k) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int j = 1; j <= k; ++j) {
      Eigen::MatrixXd aj = delta.terms[static_cast<std::size_t>(j)].transpose();
      aj.row(n - 1).setZero();
      r -= aj * pi.terms[static_cast<std::size_t>(k - j)].transpose();
    }
    pi.terms[static_cast<std::size_t>(k)] = lu.solve(r).transpose();
  }
  // States outside the closed class carry exactly zero mass; drop solver noise.
  for (auto& t : pi.terms) t = (t.array().abs() < 1e-15).select(0.0, t);
  return pi;
}

}  // namespace hmment
