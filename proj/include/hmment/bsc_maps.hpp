#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "hmment/jet.hpp"

// Scalar-generic kernels of the binary-symmetric-channel dynamics. Every
// function works with T = double or T = Jet (Jet carries the crossover
// probability as the expansion variable).

namespace hmment::bsc {

inline double constant_like(double, double v) { return v; }
inline Jet constant_like(const Jet& ref, double v) { return Jet::constant(v, ref.order()); }

inline double plogp(double p) { return p == 0.0 ? 0.0 : p * std::log(p); }
inline Jet plogp(const Jet& p) { return xlogx(p); }

/// Channel law p_E(e): 1 - eps for e = 0, eps for e = 1.
template <class T>
T crossover(const T& eps, int e) {
  return e == 0 ? T(1.0 - eps) : eps;
}

/// f_z(x) = (p_E(z) / p_E(1-z)) (pi00 x + pi10) / (pi01 x + pi11).
template <class T>
T ifs_map(const Eigen::Matrix2d& pi, const T& eps, int z, const T& x) {
  const T num = pi(0, 0) * x + pi(1, 0);
  const T den = pi(0, 1) * x + pi(1, 1);
  return crossover(eps, z) / crossover(eps, 1 - z) * num / den;
}

/// r_z(x) = p(z_i = z | x_{i-1} = x).
template <class T>
T output_probability(const Eigen::Matrix2d& pi, const T& eps, int z, const T& x) {
  const T keep = crossover(eps, z);
  const T flip = crossover(eps, 1 - z);
  return ((keep * pi(0, 0) + flip * pi(0, 1)) * x + (keep * pi(1, 0) + flip * pi(1, 1))) /
         (x + 1.0);
}

/// r(x) = -(r_0 log r_0 + r_1 log r_1), the Blackwell integrand.
template <class T>
T output_entropy(const Eigen::Matrix2d& pi, const T& eps, const T& x) {
  return -(plogp(output_probability(pi, eps, 0, x)) + plogp(output_probability(pi, eps, 1, x)));
}

/// Positive root of pi01 x^2 + (pi11 - c pi00) x - c pi10 = 0 with c = p_E(z)/p_E(1-z),
/// using the cancellation-free branch.
template <class T>
T fixed_point(const Eigen::Matrix2d& pi, const T& eps, int z) {
  using std::sqrt;
  const T c = crossover(eps, z) / crossover(eps, 1 - z);
  const T b = pi(1, 1) - c * pi(0, 0);
  const T s = sqrt(b * b + 4.0 * pi(0, 1) * pi(1, 0) * c);
  if (value_of(b) >= 0.0) return 2.0 * pi(1, 0) * c / (b + s);
  return (s - b) / (2.0 * pi(0, 1));
}

template <class T>
struct CylinderNode {
  T point;  // x_n = a_n / b_n
  T a;      // p(z_1..z_n, y_n = 0)
  T b;      // p(z_1..z_n, y_n = 1)
};

/**
 * All 2^n words of length n in lexicographic order (bit n-1 of the index is
 * z_1). Starts from x_0 = pi10/pi01 with (a_0, b_0) the stationary law of Y.
 */
template <class T>
std::vector<CylinderNode<T>> cylinder_nodes(const Eigen::Matrix2d& pi, const T& eps, int n) {
  const double pi0 = pi(1, 0) / (pi(0, 1) + pi(1, 0));
  std::vector<CylinderNode<T>> level{
      {constant_like(eps, pi(1, 0) / pi(0, 1)), constant_like(eps, pi0), constant_like(eps, 1.0 - pi0)}};
  for (int k = 0; k < n; ++k) {
    std::vector<CylinderNode<T>> next;
    next.reserve(level.size() * 2);
    for (const auto& node : level) {
      for (int z = 0; z < 2; ++z) {
        const T keep = crossover(eps, z);
        const T flip = crossover(eps, 1 - z);
        CylinderNode<T> child{ifs_map(pi, eps, z, node.point),
                              keep * (pi(0, 0) * node.a + pi(1, 0) * node.b),
                              flip * (pi(0, 1) * node.a + pi(1, 1) * node.b)};
        next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace hmment::bsc
