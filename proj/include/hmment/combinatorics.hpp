#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <vector>

#include "hmment/jet.hpp"

namespace hmment::comb {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
__extension__ typedef __int128 Int128;

/// Parts a_1 >= a_2 >= ... >= a_m >= 1.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const noexcept { return parts_; }
  int size() const noexcept { return static_cast<int>(parts_.size()); }
  int sum() const noexcept;
  int largest() const { return parts_.front(); }
  std::string to_string() const;

  auto operator<=>(const Partition&) const = default;

 private:
  std::vector<int> parts_;
};

/// Partitions of n in reverse-lexicographic order ([n] first, [1,...,1] last).
std::vector<Partition> partitions_of(int n);

/// m! / (m_1! ... m_j!) over the multiplicity blocks.
Integer permutation_count(const Partition& p);

/// (-1)^(m+1) (1/m) P(a) (a_1 + ... + a_m)! / (a_1! ... a_m!).
Rational coefficient_closed_form(const Partition& p);

/// Same coefficients built up from C_[1] = 1 by differentiating the expansion once more.
class CoefficientRecursion {
 public:
  Rational operator()(const Partition& p);

 private:
  std::map<std::vector<int>, Rational> memo_;
};

Rational coefficient_recursion(const Partition& p);

struct Term {
  Partition partition;
  Rational coefficient;
};

/// (y'/y)^(n) = sum_a C_a y^(a_1) ... y^(a_m) / y^m over partitions a of n + 1.
std::vector<Term> yprime_over_y_expansion(int n);

/// Evaluates a monomial expansion: sum_t c_t prod_i y^(a_i) / y^(m - shift).
double evaluate_terms(const std::vector<Term>& terms, const Jet& y, int shift = 0);

/**
 * (y log y)^(N) = (log y + 1) y^(N) + sum_a E_a y^(a_1) ... y^(a_m) / y^(m-1)
 * over partitions a of N with at least two parts. q_i collects the monomials
 * with largest part i.
 */
class YLogYExpansion {
 public:
  explicit YLogYExpansion(int order);

  int order() const noexcept { return order_; }
  /// Smallest index of the high part, ceil((N+1)/2).
  int high_start() const noexcept { return (order_ + 2) / 2; }
  /// Largest index of the low part, ceil((N-1)/2).
  int low_end() const noexcept { return order_ / 2; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// q_i[y] (so that the N-th derivative is sum_i q_i[y] y^(i)).
  double q(int i, const Jet& y) const;
  double full(const Jet& y) const;
  double high(const Jet& y) const;
  double low(const Jet& y) const;

 private:
  int order_;
  std::vector<Term> terms_;
};

struct HighPartCoefficients {
  int order = 0;
  /// C_{i,N} for i = high_start..N, as extracted.
  std::map<int, double> extracted;
  std::map<int, long long> rounded;
  /// Largest spread of q_i / (log y + 1)^(N-i) across the sample jets.
  double max_spread = 0.0;
  double max_integer_distance = 0.0;
  bool matches_binomial = false;
};

/// Extracts C_{i,N} from random positive jets and compares with binomial(N, i).
HighPartCoefficients extract_high_coefficients(int order, int samples, unsigned seed);

struct LowPartReport {
  int order = 0;
  /// G(x) = sum_k Low[a_k x] - Low[x] for a partition of unity {a_k}:
  /// additivity residual of G, change under truncating x above ceil((N-1)/2),
  /// and the a = 1 and x = 1 residuals.
  double additivity_residual = 0.0;
  double truncation_residual = 0.0;
  double unit_a_residual = 0.0;
  double unit_x_residual = 0.0;
  bool pass = false;
};

LowPartReport lowpart_structure_check(int order, int samples, unsigned seed, double tol = 1e-9);

struct BinomialMoments {
  int n = 0;
  Int128 s1 = 0;
  Int128 s2 = 0;
  Int128 closed1 = 0;
  Int128 closed2 = 0;

  bool holds() const noexcept { return s1 == closed1 && s2 == closed2; }
};

std::string to_string(Int128 v);

/// sum_i i C(n,i) and sum_i i^2 C(n,i) by direct summation, with their closed forms.
BinomialMoments binomial_moment_identities(int n);

}  // namespace hmment::comb
