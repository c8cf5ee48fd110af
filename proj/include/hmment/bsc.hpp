#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "hmment/bsc_maps.hpp"
#include "hmment/hmm.hpp"

namespace hmment::bsc {

/// Binary Markov chain Pi seen through a binary symmetric channel of crossover eps.
class BinaryChainParams {
 public:
  BinaryChainParams(const Eigen::Matrix2d& pi, double epsilon);

  const Eigen::Matrix2d& pi() const noexcept { return pi_; }
  double epsilon() const noexcept { return eps_; }
  double det() const noexcept { return pi_.determinant(); }
  /// det Pi > 0, every pi_ij > 0 and eps > 0.
  bool standard_regime() const noexcept;
  /// Stationary probability of y = 0.
  double stationary0() const noexcept { return pi_(1, 0) / (pi_(0, 1) + pi_(1, 0)); }
  BinaryChainParams with_epsilon(double eps) const { return {pi_, eps}; }

 private:
  Eigen::Matrix2d pi_;
  double eps_;
};

/// Parses "p00,p01,p10,p11" row-major.
Eigen::Matrix2d parse_pi(const std::string& text);

/// 4x4 Delta over states (y,e) = (0,0),(0,1),(1,0),(1,1) with phi = (0,1,1,0).
HiddenMarkovModel build_model(const BinaryChainParams& p);

/// x -> (c_z pi00 x + c_z pi10) / (pi01 x + pi11), stored as x -> (a x + b) / (c x + d).
struct MobiusMap {
  double a = 0, b = 0, c = 0, d = 0;

  double operator()(double x) const { return (a * x + b) / (c * x + d); }
  double derivative(double x) const {
    const double den = c * x + d;
    return (a * d - b * c) / (den * den);
  }
};

struct MobiusPair {
  MobiusMap f0;
  MobiusMap f1;

  const MobiusMap& operator[](int z) const { return z == 0 ? f0 : f1; }
};

MobiusPair mobius_pair(const BinaryChainParams& p);

double r0(const BinaryChainParams& p, double x);
double r1(const BinaryChainParams& p, double x);
/// r(x) = -(r0 log r0 + r1 log r1).
double r(const BinaryChainParams& p, double x);

struct FixedPoints {
  double p1 = 0.0;
  double p0 = 0.0;
  /// det Pi = 0: both maps are constant.
  bool degenerate = false;
  double residual0 = 0.0;
  double residual1 = 0.0;
};

/// Attracting fixed points of f_1 and f_0 (p1 <= p0).
FixedPoints fixed_points(const BinaryChainParams& p);

enum class SupportKind { CantorSet, Interval, Degenerate };

std::string to_string(SupportKind kind);

struct SupportClass {
  SupportKind kind = SupportKind::Degenerate;
  double p0 = 0.0;
  double p1 = 0.0;
  double f1_p0 = 0.0;
  double f0_p1 = 0.0;
  /// |f0(p1) - f1(p0)| within 1e-12.
  bool boundary = false;
  /// f0(I) and f1(I) overlap or touch, so their union is I.
  bool union_covers_interval = false;

  double lo() const noexcept { return p1; }
  double hi() const noexcept { return p0; }
};

inline constexpr double kBoundaryBand = 1e-12;
inline constexpr double kMassSlack = 1e-14;

SupportClass classify_support(const BinaryChainParams& p);

/// All n-fold compositions applied to p0 and p1, sorted and deduplicated at 1e-14.
std::vector<double> support_points(const BinaryChainParams& p, int n);

struct Cylinder {
  /// Word bits, z_1 in the most significant of n bits.
  std::uint64_t word = 0;
  double point = 0.0;
  double probability = 0.0;
  /// Image of I = [p1, p0] under f_{z_n} o ... o f_{z_1}.
  double lo = 0.0;
  double hi = 0.0;
};

struct CylinderLevel {
  int level = 0;
  /// Sorted by point.
  std::vector<Cylinder> cylinders;

  double total_probability() const;
  /// Q_n mass of the closed interval [lo, hi], widened by kMassSlack relative.
  double mass_in(double lo, double hi) const;
  std::string word_string(std::uint64_t word) const;
};

CylinderLevel cylinder_level(const BinaryChainParams& p, int n);

struct EntropyBounds {
  int level = 0;
  double lower = 0.0;
  double upper = 0.0;

  double width() const noexcept { return upper - lower; }
};

/// Min and max of r over a closed interval; the only interior critical point is where r0 = 1/2.
std::pair<double, double> r_extrema(const BinaryChainParams& p, double lo, double hi);

EntropyBounds entropy_bounds(const BinaryChainParams& p, int n);

/// sum_i p_{n,i} r(x_{n,i}); equals H(Z_{n+1} | Z_1^n).
double blackwell_entropy(const BinaryChainParams& p, int n);

struct DeletedInterval {
  int level = 0;
  std::uint64_t word = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// f_w(I^d) for every word w of length 0..n, I^d = (f1(p0), f0(p1)); ordered by level then word.
std::vector<DeletedInterval> deleted_intervals(const BinaryChainParams& p, int n);

/// xi = max over I of max(r0, r1).
double max_output_probability(const BinaryChainParams& p);

}  // namespace hmment::bsc
