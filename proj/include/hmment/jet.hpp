#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "hmment/errors.hpp"

namespace hmment {

inline constexpr int kMaxJetOrder = 16;
inline constexpr int kDefaultJetOrder = 4;

/**
 * Truncated univariate Taylor series c_0 + c_1 t + ... + c_K t^K.
 *
 * Coefficients are stored normalized (c_k = f^(k)(t0) / k!), so the k-th
 * derivative is k! * c_k. Binary arithmetic requires both operands to carry
 * the same order K; plain doubles act as constants of any order.
 */
class Jet {
 public:
  using Coeffs = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxJetOrder + 1, 1>;

  Jet() : coeffs_(Coeffs::Zero(1)) {}
  explicit Jet(int order);

  static Jet constant(double value, int order);
  /// The identity jet t0 + t, i.e. the expansion variable itself.
  static Jet variable(double at, int order);
  static Jet from_coeffs(std::span<const double> coeffs);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  double value() const noexcept { return coeffs_[0]; }
  double operator[](int k) const { return coeffs_[k]; }
  double& operator[](int k) { return coeffs_[k]; }
  const Coeffs& coeffs() const noexcept { return coeffs_; }

  /// k-th derivative at the expansion point: k! * c_k.
  double derivative(int k) const;
  bool is_zero() const noexcept { return (coeffs_.array() == 0.0).all(); }

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs) { coeffs_[0] += rhs; return *this; }
  Jet& operator-=(double rhs) { coeffs_[0] -= rhs; return *this; }
  Jet& operator*=(double rhs) { coeffs_ *= rhs; return *this; }
  Jet& operator/=(double rhs) { coeffs_ /= rhs; return *this; }

 private:
  Coeffs coeffs_;
};

void require_same_order(const Jet& a, const Jet& b);

Jet operator-(const Jet& a);
Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double b);
Jet operator+(double a, Jet b);
Jet operator-(Jet a, double b);
Jet operator-(double a, const Jet& b);
Jet operator*(Jet a, double b);
Jet operator*(double a, Jet b);
Jet operator/(Jet a, double b);
Jet operator/(double a, const Jet& b);

Jet reciprocal(const Jet& a);
Jet log(const Jet& a);
Jet exp(const Jet& a);
Jet sqrt(const Jet& a);
/// a * log(a); identical to a * log(a) computed through the primitives.
Jet xlogx(const Jet& a);
/// Derivative in the expansion variable, one order lower.
Jet differentiate(const Jet& a);
Jet truncate(const Jet& a, int order);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

/// Compensated (Neumaier) summation of jets, coefficient-wise.
class JetAccumulator {
 public:
  explicit JetAccumulator(int order) : sum_(Jet::Coeffs::Zero(order + 1)), carry_(sum_) {}

  void add(const Jet& x);
  void add(const JetAccumulator& other);
  Jet total() const;

 private:
  Jet::Coeffs sum_;
  Jet::Coeffs carry_;
};

/**
 * Truncated Taylor series with matrix coefficients, M(t) = sum_k M_k t^k.
 * Row vectors are 1-row instances.
 */
struct MatrixSeries {
  std::vector<Eigen::MatrixXd> terms;

  MatrixSeries() = default;
  MatrixSeries(int order, Eigen::Index rows, Eigen::Index cols);
  static MatrixSeries constant(const Eigen::MatrixXd& m, int order);

  int order() const noexcept { return static_cast<int>(terms.size()) - 1; }
  Eigen::Index rows() const { return terms.front().rows(); }
  Eigen::Index cols() const { return terms.front().cols(); }
  const Eigen::MatrixXd& value() const { return terms.front(); }

  Jet entry(Eigen::Index i, Eigen::Index j) const;
  Jet sum() const;
  MatrixSeries columns(std::span<const int> idx) const;
  MatrixSeries block(std::span<const int> row_idx, std::span<const int> col_idx) const;
};

/// Truncated Cauchy product; `out` is resized as needed.
void multiply(const MatrixSeries& a, const MatrixSeries& b, MatrixSeries& out);

}  // namespace hmment
