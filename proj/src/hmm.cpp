#include "hmment/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hmment {

namespace {

std::string index_pair(Eigen::Index i, Eigen::Index j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::vector<bool> reachable_from(const Eigen::MatrixXd& m, Eigen::Index start, bool transpose) {
  const Eigen::Index n = m.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double e = transpose ? m(j, i) : m(i, j);
      if (e > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd m, double tol) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw Error(ErrorCode::InvalidModel, "transition matrix must be square and nonempty, got " +
                                             std::to_string(m_.rows()) + "x" +
                                             std::to_string(m_.cols()));
  }
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      if (!std::isfinite(m_(i, j)) || m_(i, j) < 0.0) {
        throw Error(ErrorCode::InvalidModel,
                    "entry " + index_pair(i, j) + " = " + std::to_string(m_(i, j)) +
                        " is not a nonnegative number");
      }
    }
    const double s = m_.row(i).sum();
    if (std::abs(s - 1.0) > tol) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << i << " sums to " << s << ", expected 1";
      throw Error(ErrorCode::InvalidModel, os.str());
    }
  }
}

bool StochasticMatrix::irreducible() const {
  const auto fwd = reachable_from(m_, 0, false);
  const auto bwd = reachable_from(m_, 0, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

SymbolMap::SymbolMap(std::vector<int> phi, int alphabet_size) : phi_(std::move(phi)) {
  if (phi_.empty()) throw Error(ErrorCode::InvalidModel, "symbol map is empty");
  const int max_symbol = *std::max_element(phi_.begin(), phi_.end());
  alphabet_ = alphabet_size < 0 ? max_symbol + 1 : alphabet_size;
  columns_.assign(static_cast<std::size_t>(alphabet_), {});
  for (std::size_t j = 0; j < phi_.size(); ++j) {
    if (phi_[j] < 0 || phi_[j] >= alphabet_) {
      throw Error(ErrorCode::SymbolOutOfRange, "phi[" + std::to_string(j) + "] = " +
                                                   std::to_string(phi_[j]) + " outside [0, " +
                                                   std::to_string(alphabet_) + ")");
    }
    columns_[static_cast<std::size_t>(phi_[j])].push_back(static_cast<int>(j));
  }
  for (int a = 0; a < alphabet_; ++a) {
    if (columns_[static_cast<std::size_t>(a)].empty()) {
      throw Error(ErrorCode::InvalidModel,
                  "symbol " + std::to_string(a) + " is not produced by any state");
    }
  }
}

const std::vector<int>& SymbolMap::states_of(int a) const {
  if (a < 0 || a >= alphabet_) {
    throw Error(ErrorCode::SymbolOutOfRange, "symbol " + std::to_string(a) + " outside [0, " +
                                                 std::to_string(alphabet_) + ")");
  }
  return columns_[static_cast<std::size_t>(a)];
}

HiddenMarkovModel::HiddenMarkovModel(StochasticMatrix delta, SymbolMap phi)
    : delta_(std::move(delta)), phi_(std::move(phi)) {
  if (phi_.state_count() != delta_.size()) {
    throw Error(ErrorCode::InvalidModel, "symbol map has " + std::to_string(phi_.state_count()) +
                                             " entries for " + std::to_string(delta_.size()) +
                                             " states");
  }
}

BeliefState::BeliefState(Eigen::RowVectorXd w, double tol) : w_(std::move(w)) {
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (!(w_[i] >= 0.0)) {
      throw Error(ErrorCode::InvalidModel, "belief entry " + std::to_string(i) + " is negative");
    }
  }
  if (std::abs(w_.sum() - 1.0) > tol) {
    throw Error(ErrorCode::InvalidModel, "belief sums to " + std::to_string(w_.sum()));
  }
}

BeliefState stationary_distribution(const StochasticMatrix& m) {
  if (!m.irreducible()) {
    throw Error(ErrorCode::NotIrreducible, "positive-entry graph is not strongly connected");
  }
  const Eigen::Index n = m.size();
  Eigen::MatrixXd a = m.matrix().transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::RowVectorXd pi = a.fullPivLu().solve(rhs).transpose();
  // Irreducible chains have strictly positive stationary mass; clip roundoff.
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return BeliefState(pi);
}

Eigen::MatrixXd symbol_matrix(const HiddenMarkovModel& m, int a) {
  const auto& cols = m.phi().states_of(a);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.state_count(), m.state_count());
  for (int j : cols) d.col(j) = m.delta().matrix().col(j);
  return d;
}

double symbol_probability(const HiddenMarkovModel& m, int a, const BeliefState& w) {
  if (w.size() != m.state_count()) {
    throw Error(ErrorCode::InvalidModel, "belief has wrong dimension");
  }
  double r = 0.0;
  for (int j : m.phi().states_of(a)) r += w.vector().dot(m.delta().matrix().col(j));
  return r;
}

BeliefState update_belief(const HiddenMarkovModel& m, int a, const BeliefState& w) {
  const double r = symbol_probability(m, a, w);
  if (!(r > 0.0)) {
    throw Error(ErrorCode::ZeroProbabilitySymbol,
                "symbol " + std::to_string(a) + " has zero probability from this belief");
  }
  Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(m.state_count());
  for (int j : m.phi().states_of(a)) next[j] = w.vector().dot(m.delta().matrix().col(j)) / r;
  next /= next.sum();
  return BeliefState(next);
}

BlackHoleReport is_black_hole(const HiddenMarkovModel& m, double tol) {
  BlackHoleReport report;
  report.black_hole = true;
  const Eigen::MatrixXd& delta = m.delta().matrix();
  for (int a = 0; a < m.alphabet_size(); ++a) {
    SymbolRankReport s;
    s.symbol = a;
    const auto& cols = m.phi().states_of(a);
    s.columns.assign(static_cast<std::size_t>(m.state_count()), ColumnKind::Zero);
    s.columns_ok = true;
    for (Eigen::Index j = 0; j < m.state_count(); ++j) {
      const bool in_symbol = std::find(cols.begin(), cols.end(), j) != cols.end();
      if (!in_symbol) continue;
      const auto col = delta.col(j);
      if ((col.array() > 0.0).all()) {
        s.columns[static_cast<std::size_t>(j)] = ColumnKind::Positive;
      } else if ((col.array() == 0.0).all()) {
        s.columns[static_cast<std::size_t>(j)] = ColumnKind::Zero;
      } else {
        s.columns[static_cast<std::size_t>(j)] = ColumnKind::Mixed;
        s.columns_ok = false;
      }
    }

    const Eigen::MatrixXd da = symbol_matrix(m, a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(da);
    const auto& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv[0] : 0.0;
    s.singular_ratio = (top > 0.0 && sv.size() > 1) ? sv[1] / top : 0.0;

    // Structural check: every nonzero column parallel to the dominant column.
    Eigen::Index ref = -1;
    double best = 0.0;
    for (int j : cols) {
      const double nrm = delta.col(j).norm();
      if (nrm > best) {
        best = nrm;
        ref = j;
      }
    }
    if (ref >= 0) {
      const Eigen::VectorXd u = delta.col(ref) / best;
      for (int j : cols) {
        const Eigen::VectorXd c = delta.col(j);
        const double nrm = c.norm();
        if (nrm == 0.0) continue;
        const double resid = (c - u.dot(c) * u).norm() / nrm;
        s.proportionality_residual = std::max(s.proportionality_residual, resid);
      }
    }
    s.rank_one = top > 0.0 && s.singular_ratio < tol && s.proportionality_residual <= tol;
    report.black_hole = report.black_hole && s.rank_one && s.columns_ok;
    report.symbols.push_back(std::move(s));
  }
  return report;
}

std::string BlackHoleReport::describe() const {
  std::ostringstream os;
  os.precision(3);
  for (const auto& s : symbols) {
    os << "symbol " << s.symbol << ": " << (s.rank_one ? "rank one" : "not rank one")
       << " (sigma2/sigma1=" << s.singular_ratio
       << ", column residual=" << s.proportionality_residual << "), columns ";
    for (auto k : s.columns) {
      os << (k == ColumnKind::Positive ? '+' : k == ColumnKind::Zero ? '0' : '?');
    }
    os << (s.columns_ok ? "" : " [mixed column]") << "\n";
  }
  return os.str();
}

HiddenMarkovModel reverse_model(const HiddenMarkovModel& m) {
  const Eigen::RowVectorXd pi = stationary_distribution(m.delta()).vector();
  Eigen::MatrixXd rev = pi.cwiseInverse().asDiagonal() * m.delta().matrix().transpose() *
                        pi.asDiagonal();
  // Row sums equal one up to roundoff of the stationary solve; renormalize.
  for (Eigen::Index i = 0; i < rev.rows(); ++i) rev.row(i) /= rev.row(i).sum();
  return HiddenMarkovModel(StochasticMatrix(std::move(rev)), m.phi());
}

}  // namespace hmment
