#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hmment/errors.hpp"

namespace hmment {

inline constexpr double kStochasticTolerance = 1e-12;

/// Row-stochastic B x B matrix; rows sum to one within 1e-12.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Eigen::MatrixXd m, double tol = kStochasticTolerance);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  Eigen::Index size() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// Strong connectivity of the positive-entry graph.
  bool irreducible() const;

 private:
  Eigen::MatrixXd m_;
};

/// State-to-symbol map with every symbol attained by at least one state.
class SymbolMap {
 public:
  explicit SymbolMap(std::vector<int> phi, int alphabet_size = -1);

  int alphabet_size() const noexcept { return alphabet_; }
  Eigen::Index state_count() const noexcept { return static_cast<Eigen::Index>(phi_.size()); }
  int operator[](Eigen::Index state) const { return phi_[static_cast<std::size_t>(state)]; }
  const std::vector<int>& values() const noexcept { return phi_; }
  /// States j with phi(j) == a, ascending.
  const std::vector<int>& states_of(int a) const;

 private:
  std::vector<int> phi_;
  int alphabet_ = 0;
  std::vector<std::vector<int>> columns_;
};

class HiddenMarkovModel {
 public:
  HiddenMarkovModel(StochasticMatrix delta, SymbolMap phi);

  const StochasticMatrix& delta() const noexcept { return delta_; }
  const SymbolMap& phi() const noexcept { return phi_; }
  Eigen::Index state_count() const noexcept { return delta_.size(); }
  int alphabet_size() const noexcept { return phi_.alphabet_size(); }

 private:
  StochasticMatrix delta_;
  SymbolMap phi_;
};

/// Probability vector over hidden states.
class BeliefState {
 public:
  explicit BeliefState(Eigen::RowVectorXd w, double tol = kStochasticTolerance);

  const Eigen::RowVectorXd& vector() const noexcept { return w_; }
  Eigen::Index size() const noexcept { return w_.size(); }
  double operator[](Eigen::Index i) const { return w_[i]; }

 private:
  Eigen::RowVectorXd w_;
};

/// Solves pi (M - I) = 0, pi 1 = 1 on the bordered system; requires irreducibility.
BeliefState stationary_distribution(const StochasticMatrix& m);

/// Delta restricted to the columns of symbol `a` (zero elsewhere).
Eigen::MatrixXd symbol_matrix(const HiddenMarkovModel& m, int a);

/// r_a(w) = w Delta_a 1.
double symbol_probability(const HiddenMarkovModel& m, int a, const BeliefState& w);

/// f_a(w) = w Delta_a / r_a(w).
BeliefState update_belief(const HiddenMarkovModel& m, int a, const BeliefState& w);

enum class ColumnKind { Positive, Zero, Mixed };

struct SymbolRankReport {
  int symbol = 0;
  bool rank_one = false;
  /// sigma_2 / sigma_1 of Delta_a (0 when rank one exactly).
  double singular_ratio = 0.0;
  /// Largest relative residual of a nonzero column against the dominant one.
  double proportionality_residual = 0.0;
  std::vector<ColumnKind> columns;
  bool columns_ok = false;
};

struct BlackHoleReport {
  bool black_hole = false;
  std::vector<SymbolRankReport> symbols;

  std::string describe() const;
};

BlackHoleReport is_black_hole(const HiddenMarkovModel& m, double tol = 1e-12);

/// Reverse chain diag(pi)^-1 Delta^T diag(pi) with the same symbol map.
HiddenMarkovModel reverse_model(const HiddenMarkovModel& m);

}  // namespace hmment
