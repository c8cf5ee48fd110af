#pragma once

#include <Eigen/Dense>

#include <vector>

#include "hmment/hmm.hpp"
#include "hmment/jet.hpp"

namespace hmment {

/**
 * One-parameter family of hidden Markov models, Delta(eps) = sum_j D_j eps^j,
 * with a fixed symbol map. D_0 rows sum to one and every higher coefficient has
 * zero row sums, so each member of the family is row-stochastic wherever its
 * entries are nonnegative.
 */
class ModelCurve {
 public:
  ModelCurve(std::vector<Eigen::MatrixXd> coefficients, SymbolMap phi);

  /// Binary Markov chain Pi observed through a binary symmetric channel of
  /// crossover eps; states ordered (y,e) = (0,0),(0,1),(1,0),(1,1), phi = y xor e.
  static ModelCurve binary_symmetric(const Eigen::Matrix2d& pi);
  static ModelCurve constant(const HiddenMarkovModel& m);
  /// Delta(eps) = base + eps * direction.
  static ModelCurve affine(const Eigen::MatrixXd& base, const Eigen::MatrixXd& direction,
                           SymbolMap phi);

  const SymbolMap& phi() const noexcept { return phi_; }
  Eigen::Index state_count() const noexcept { return coefficients_.front().rows(); }
  const std::vector<Eigen::MatrixXd>& coefficients() const noexcept { return coefficients_; }

  Eigen::MatrixXd matrix_at(double eps) const;
  /// Validated model at eps; throws InvalidModel outside the stochastic domain.
  HiddenMarkovModel at(double eps) const;
  /// Taylor expansion of Delta around eps0, truncated at `order`.
  MatrixSeries expand(double eps0, int order) const;

 private:
  std::vector<Eigen::MatrixXd> coefficients_;
  SymbolMap phi_;
};

/**
 * Taylor series of the stationary row vector of Delta(t). The chain at t = 0
 * must have a unique stationary distribution (one closed communicating class);
 * irreducibility is not required.
 */
MatrixSeries stationary_series(const MatrixSeries& delta);

}  // namespace hmment
