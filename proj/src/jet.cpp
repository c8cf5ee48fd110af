#include "hmment/jet.hpp"

#include <cmath>
#include <string>

namespace hmment {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw Error(ErrorCode::OrderMismatch,
                "jet order " + std::to_string(order) + " outside [0, " +
                    std::to_string(kMaxJetOrder) + "]");
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Jet::Jet(int order) {
  check_order(order);
  coeffs_ = Coeffs::Zero(order + 1);
}

Jet Jet::constant(double value, int order) {
  Jet j(order);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::variable(double at, int order) {
  Jet j = constant(at, order);
  if (order >= 1) j.coeffs_[1] = 1.0;
  return j;
}

Jet Jet::from_coeffs(std::span<const double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorCode::OrderMismatch, "jet needs at least one coefficient");
  Jet j(static_cast<int>(coeffs.size()) - 1);
  for (std::size_t k = 0; k < coeffs.size(); ++k) j.coeffs_[static_cast<Eigen::Index>(k)] = coeffs[k];
  return j;
}

double Jet::derivative(int k) const {
  if (k < 0 || k > order()) {
    throw Error(ErrorCode::OrderMismatch, "derivative " + std::to_string(k) +
                                              " requested from a jet of order " +
                                              std::to_string(order()));
  }
  return factorial(k) * coeffs_[k];
}

void require_same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) {
    throw Error(ErrorCode::OrderMismatch, "mixed jet orders " + std::to_string(a.order()) +
                                              " and " + std::to_string(b.order()));
  }
}

Jet& Jet::operator+=(const Jet& rhs) {
  require_same_order(*this, rhs);
  coeffs_ += rhs.coeffs_;
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  require_same_order(*this, rhs);
  coeffs_ -= rhs.coeffs_;
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }
Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet operator-(const Jet& a) {
  Jet r(a.order());
  for (int k = 0; k <= a.order(); ++k) r[k] = -a[k];
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

// Leibniz rule on normalized coefficients is a plain convolution.
Jet operator*(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  const int K = a.order();
  Jet r(K);
  for (int k = 0; k <= K; ++k) {
    // Pair the terms j and k - j so that a * b and b * a round identically.
    double s = 0.0;
    for (int j = 0; 2 * j < k; ++j) s += a[j] * b[k - j] + a[k - j] * b[j];
    if (k % 2 == 0) s += a[k / 2] * b[k / 2];
    r[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  if (b.value() == 0.0) {
    throw Error(ErrorCode::DivisionByZeroConstantTerm, "jet divisor has zero constant term");
  }
  const int K = a.order();
  Jet q(K);
  for (int k = 0; k <= K; ++k) {
    double s = a[k];
    for (int j = 1; j <= k; ++j) s -= b[j] * q[k - j];
    q[k] = s / b.value();
  }
  return q;
}

Jet operator+(Jet a, double b) { return a += b; }
Jet operator+(double a, Jet b) { return b += a; }
Jet operator-(Jet a, double b) { return a -= b; }
Jet operator-(double a, const Jet& b) { return -b + a; }
Jet operator*(Jet a, double b) { return a *= b; }
Jet operator*(double a, Jet b) { return b *= a; }
Jet operator/(Jet a, double b) { return a /= b; }
Jet operator/(double a, const Jet& b) { return Jet::constant(a, b.order()) / b; }

Jet reciprocal(const Jet& a) { return 1.0 / a; }

Jet log(const Jet& a) {
  if (!(a.value() > 0.0)) {
    throw Error(ErrorCode::NonpositiveConstantTerm,
                "log of a jet with constant term " + std::to_string(a.value()));
  }
  const int K = a.order();
  Jet l(K);
  l[0] = std::log(a.value());
  for (int k = 1; k <= K; ++k) {
    double s = a[k];
    for (int j = 1; j < k; ++j) s -= (static_cast<double>(j) / k) * l[j] * a[k - j];
    l[k] = s / a.value();
  }
  return l;
}

Jet exp(const Jet& a) {
  const int K = a.order();
  Jet e(K);
  e[0] = std::exp(a.value());
  for (int k = 1; k <= K; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) {
    throw Error(ErrorCode::NonpositiveConstantTerm,
                "sqrt of a jet with constant term " + std::to_string(a.value()));
  }
  const int K = a.order();
  Jet s(K);
  s[0] = std::sqrt(a.value());
  for (int k = 1; k <= K; ++k) {
    double acc = a[k];
    for (int j = 1; j < k; ++j) acc -= s[j] * s[k - j];
    s[k] = acc / (2.0 * s[0]);
  }
  return s;
}

Jet xlogx(const Jet& a) { return a * log(a); }

Jet differentiate(const Jet& a) {
  if (a.order() == 0) throw Error(ErrorCode::OrderMismatch, "cannot differentiate an order-0 jet");
  Jet d(a.order() - 1);
  for (int k = 0; k < a.order(); ++k) d[k] = (k + 1) * a[k + 1];
  return d;
}

Jet truncate(const Jet& a, int order) {
  if (order > a.order()) {
    throw Error(ErrorCode::OrderMismatch, "cannot raise jet order by truncation");
  }
  Jet t(order);
  for (int k = 0; k <= order; ++k) t[k] = a[k];
  return t;
}

void JetAccumulator::add(const Jet& x) {
  if (x.order() + 1 != sum_.size()) {
    throw Error(ErrorCode::OrderMismatch, "accumulator order mismatch");
  }
  for (Eigen::Index k = 0; k < sum_.size(); ++k) {
    const double t = sum_[k] + x[static_cast<int>(k)];
    if (std::abs(sum_[k]) >= std::abs(x[static_cast<int>(k)])) {
      carry_[k] += (sum_[k] - t) + x[static_cast<int>(k)];
    } else {
      carry_[k] += (x[static_cast<int>(k)] - t) + sum_[k];
    }
    sum_[k] = t;
  }
}

void JetAccumulator::add(const JetAccumulator& other) {
  add(other.total());
}

Jet JetAccumulator::total() const {
  Jet t(static_cast<int>(sum_.size()) - 1);
  for (Eigen::Index k = 0; k < sum_.size(); ++k) t[static_cast<int>(k)] = sum_[k] + carry_[k];
  return t;
}

MatrixSeries::MatrixSeries(int order, Eigen::Index rows, Eigen::Index cols)
    : terms(static_cast<std::size_t>(order + 1), Eigen::MatrixXd::Zero(rows, cols)) {}

MatrixSeries MatrixSeries::constant(const Eigen::MatrixXd& m, int order) {
  MatrixSeries s(order, m.rows(), m.cols());
  s.terms[0] = m;
  return s;
}

Jet MatrixSeries::entry(Eigen::Index i, Eigen::Index j) const {
  Jet r(order());
  for (int k = 0; k <= order(); ++k) r[k] = terms[static_cast<std::size_t>(k)](i, j);
  return r;
}

Jet MatrixSeries::sum() const {
  Jet r(order());
  for (int k = 0; k <= order(); ++k) r[k] = terms[static_cast<std::size_t>(k)].sum();
  return r;
}

MatrixSeries MatrixSeries::columns(std::span<const int> idx) const {
  MatrixSeries s(order(), rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      s.terms[k].col(static_cast<Eigen::Index>(c)) = terms[k].col(idx[c]);
    }
  }
  return s;
}

MatrixSeries MatrixSeries::block(std::span<const int> row_idx, std::span<const int> col_idx) const {
  MatrixSeries s(order(), static_cast<Eigen::Index>(row_idx.size()),
                 static_cast<Eigen::Index>(col_idx.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    for (std::size_t r = 0; r < row_idx.size(); ++r) {
      for (std::size_t c = 0; c < col_idx.size(); ++c) {
        s.terms[k](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            terms[k](row_idx[r], col_idx[c]);
      }
    }
  }
  return s;
}

void multiply(const MatrixSeries& a, const MatrixSeries& b, MatrixSeries& out) {
  if (a.order() != b.order()) {
    throw Error(ErrorCode::OrderMismatch, "matrix series of different orders");
  }
  const int K = a.order();
  out.terms.resize(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) {
    auto& o = out.terms[static_cast<std::size_t>(k)];
    o.noalias() = a.terms[0] * b.terms[static_cast<std::size_t>(k)];
    for (int j = 1; j <= k; ++j) {
      o.noalias() += a.terms[static_cast<std::size_t>(j)] * b.terms[static_cast<std::size_t>(k - j)];
    }
  }
}

}  // namespace hmment
