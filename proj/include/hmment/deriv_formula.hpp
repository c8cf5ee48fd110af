#pragma once

#include <vector>

#include "hmment/bsc.hpp"
#include "hmment/entropy.hpp"

namespace hmment::bsc {

/// g = dr/dx.
double g_function(const BinaryChainParams& p, double x);
/// dg/d eps = d^2 r / dx d eps.
double g_eps_derivative(const BinaryChainParams& p, double x);
/// dr/d eps at fixed x.
double r_eps_derivative(const BinaryChainParams& p, double x);

/// dp0/d eps from the fixed-point equation p0 = f0(eps, p0).
double fixed_point_eps_derivative(const BinaryChainParams& p);

/// Cylinder points and probabilities with their eps-derivatives, in word order.
struct LocationJets {
  int level = 0;
  std::vector<double> x;
  std::vector<double> dx;
  std::vector<double> p;
  std::vector<double> dp;
};

LocationJets location_jets(const BinaryChainParams& p, int n);

/// F_n(x) = sum of p_{n,i} over x_{n,i} <= x, and its eps-derivative at fixed x.
struct CdfSteps {
  int level = 0;
  /// Sorted cylinder points.
  std::vector<double> points;
  /// F and dF/d eps just right of points[k] (cumulative through k).
  std::vector<double> F;
  std::vector<double> dF;

  double cdf(double x) const;
  double cdf_eps(double x) const;
};

CdfSteps probability_cdf_jets(const BinaryChainParams& p, int n);

struct HpzBreakdown {
  int level = 0;
  int quad_points = 0;
  /// Total derivative of r(eps, p0(eps)).
  double term1 = 0.0;
  /// sum_i p_{n,i} x'_{n,i} g(x_{n,i}).
  double term2 = 0.0;
  /// -int_I F'_n g dx (Simpson).
  double term3 = 0.0;
  /// -int_I F_n g' dx (Simpson).
  double term4 = 0.0;
  /// -g(p0) p0', the moving upper limit of int_I F_n g dx.
  double endpoint_correction = 0.0;
  double total = 0.0;
  /// Terms 3 and 4 integrated exactly between cylinder points.
  double exact_term3 = 0.0;
  double exact_term4 = 0.0;
  double exact_total = 0.0;
  double p0 = 0.0;
  double dp0 = 0.0;
  double p1 = 0.0;
  /// Simpson spacing, and nodes moved off cylinder points.
  double node_spacing = 0.0;
  int snapped_nodes = 0;
};

inline constexpr int kDefaultQuadPoints = 4097;

HpzBreakdown hpz_derivative(const BinaryChainParams& p, int n, int quad_points = kDefaultQuadPoints);

/// dH_N/d eps from order-1 jets through the word enumeration.
double entropy_derivative_reference(const BinaryChainParams& p, int N, EnumerationOptions opts = {});

/// det Pi = 0: Z is i.i.d. with P(z = 0) = pi00 (1 - eps) + pi01 eps.
double iid_entropy(const BinaryChainParams& p);

/// Binary entropy of eps.
double two_zero_entropy(double eps);

struct SlopeRow {
  double eps = 0.0;
  double slope = 0.0;
  /// slope / |log eps|.
  double ratio = 0.0;
};

struct SlopeProbe {
  int level = 0;
  std::vector<SlopeRow> rows;
  /// Least-squares fit slope = a |log eps| + b.
  double fit_a = 0.0;
  double fit_b = 0.0;
  double r_squared = 0.0;
};

/// Central differences (step eps/100) of H_n(eps) on the grid.
SlopeProbe entropy_slope_probe(const Eigen::Matrix2d& pi, const std::vector<double>& eps_grid, int n,
                               EnumerationOptions opts = {});

/// Same probe restricted to pi00 = 0, pi01 = 1, 0 < pi10 < 1.
SlopeProbe one_zero_divergence_probe(const Eigen::Matrix2d& pi, const std::vector<double>& eps_grid,
                                     int n, EnumerationOptions opts = {});

/// -4 ((pi10 - pi01) / (pi10 + pi01))^2.
double low_snr_second_derivative(const Eigen::Matrix2d& pi);

struct LowSnrRow {
  int n = 0;
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
  double closed_form = 0.0;
  double gap = 0.0;
};

/// H_k at eps = 1/2 as order-2 jets for k = 0..n.
std::vector<LowSnrRow> low_snr_numeric_check(const Eigen::Matrix2d& pi, int n,
                                             EnumerationOptions opts = {});

}  // namespace hmment::bsc
