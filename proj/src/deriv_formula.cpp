#include "hmment/deriv_formula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hmment/model_curve.hpp"
#include "hmment/summation.hpp"

namespace hmment::bsc {

namespace {

constexpr double kSnap = 1e-12;

struct OutputParts {
  double q0;     // r0
  double q1;     // r1
  double q0_x;   // dr0/dx
  double q0_e;   // dr0/d eps
  double q0_xe;  // d^2 r0 / dx d eps
};

OutputParts output_parts(const BinaryChainParams& p, double x) {
  const Eigen::Matrix2d& pi = p.pi();
  const double e = p.epsilon();
  const double alpha = (1.0 - e) * pi(0, 0) + e * pi(0, 1);
  const double beta = (1.0 - e) * pi(1, 0) + e * pi(1, 1);
  const double dalpha = pi(0, 1) - pi(0, 0);
  const double dbeta = pi(1, 1) - pi(1, 0);
  const double s = x + 1.0;
  OutputParts o{};
  o.q0 = r0(p, x);
  o.q1 = r1(p, x);
  o.q0_x = (alpha - beta) / (s * s);
  o.q0_e = (dalpha * x + dbeta) / s;
  o.q0_xe = (dalpha - dbeta) / (s * s);
  return o;
}

void require_cantor(const BinaryChainParams& p, const char* what) {
  if (!p.standard_regime()) {
    throw Error(ErrorCode::RegimeViolation, std::string(what) + " needs det Pi > 0, pi_ij > 0, eps > 0");
  }
  const SupportClass s = classify_support(p);
  if (s.kind != SupportKind::CantorSet) {
    throw Error(ErrorCode::NotNonOverlapping,
                std::string(what) + " needs f1(p0) < f0(p1); got f1(p0) = " + std::to_string(s.f1_p0) +
                    ", f0(p1) = " + std::to_string(s.f0_p1));
  }
}

double binary_entropy(double q) { return -(plogp(q) + plogp(1.0 - q)); }

double simpson(const std::vector<double>& y, double h) {
  CompensatedSum s;
  const std::size_t last = y.size() - 1;
  for (std::size_t j = 0; j <= last; ++j) {
    const double w = (j == 0 || j == last) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    s.add(w * y[j]);
  }
  return s.total() * h / 3.0;
}

}  // namespace

double g_function(const BinaryChainParams& p, double x) {
  const OutputParts o = output_parts(p, x);
  return -o.q0_x * std::log(o.q0 / o.q1);
}

double r_eps_derivative(const BinaryChainParams& p, double x) {
  const OutputParts o = output_parts(p, x);
  return -o.q0_e * std::log(o.q0 / o.q1);
}

double g_eps_derivative(const BinaryChainParams& p, double x) {
  const OutputParts o = output_parts(p, x);
  return -o.q0_xe * std::log(o.q0 / o.q1) - o.q0_x * o.q0_e * (1.0 / o.q0 + 1.0 / o.q1);
}

double fixed_point_eps_derivative(const BinaryChainParams& p) {
  const FixedPoints fp = fixed_points(p);
  const MobiusPair f = mobius_pair(p);
  const double e = p.epsilon();
  // f0 = ((1 - e) / e) m(x), so df0/de = -f0 / (e (1 - e)); at the fixed point f0 = p0.
  const double f0_e = -fp.p0 / (e * (1.0 - e));
  return f0_e / (1.0 - f.f0.derivative(fp.p0));
}

LocationJets location_jets(const BinaryChainParams& p, int n) {
  if (!p.standard_regime()) {
    throw Error(ErrorCode::RegimeViolation, "location_jets needs det Pi > 0, pi_ij > 0, eps > 0");
  }
  if (n < 0 || n > kEnumerationLog2Limit) {
    throw Error(ErrorCode::EnumerationTooLarge, "location_jets: level " + std::to_string(n) + " out of range");
  }
  const auto nodes = cylinder_nodes(p.pi(), Jet::variable(p.epsilon(), 1), n);
  LocationJets out;
  out.level = n;
  out.x.reserve(nodes.size());
  for (const auto& node : nodes) {
    const Jet prob = node.a + node.b;
    out.x.push_back(node.point.value());
    out.dx.push_back(node.point[1]);
    out.p.push_back(prob.value());
    out.dp.push_back(prob[1]);
  }
  return out;
}

double CdfSteps::cdf(double x) const {
  const auto it = std::upper_bound(points.begin(), points.end(), x);
  if (it == points.begin()) return 0.0;
  return F[static_cast<std::size_t>(it - points.begin()) - 1];
}

double CdfSteps::cdf_eps(double x) const {
  const auto it = std::upper_bound(points.begin(), points.end(), x);
  if (it == points.begin()) return 0.0;
  return dF[static_cast<std::size_t>(it - points.begin()) - 1];
}

CdfSteps probability_cdf_jets(const BinaryChainParams& p, int n) {
  require_cantor(p, "probability_cdf_jets");
  const LocationJets lj = location_jets(p, n);
  std::vector<std::size_t> order(lj.x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lj.x[a] < lj.x[b]; });
  CdfSteps out;
  out.level = n;
  CompensatedSum F;
  CompensatedSum dF;
  for (std::size_t i : order) {
    F.add(lj.p[i]);
    dF.add(lj.dp[i]);
    out.points.push_back(lj.x[i]);
    out.F.push_back(F.total());
    out.dF.push_back(dF.total());
  }
  return out;
}

HpzBreakdown hpz_derivative(const BinaryChainParams& p, int n, int quad_points) {
  require_cantor(p, "hpz_derivative");
  if (quad_points % 2 == 0) {
    throw Error(ErrorCode::DomainError, "Simpson quadrature needs an odd node count, got " +
                                            std::to_string(quad_points));
  }
  const SupportClass s = classify_support(p);
  const double h = (s.p0 - s.p1) / (quad_points - 1);
  if (quad_points < 5 || h > s.f0_p1 - s.f1_p0) {
    throw Error(ErrorCode::QuadratureTooCoarse,
                std::to_string(quad_points) + " nodes give spacing " + std::to_string(h) +
                    ", wider than the deleted interval of length " + std::to_string(s.f0_p1 - s.f1_p0));
  }

  HpzBreakdown out;
  out.level = n;
  out.quad_points = quad_points;
  out.p0 = s.p0;
  out.p1 = s.p1;
  out.dp0 = fixed_point_eps_derivative(p);
  out.node_spacing = h;

  const double g_p0 = g_function(p, s.p0);
  out.term1 = r_eps_derivative(p, s.p0) + g_p0 * out.dp0;
  out.endpoint_correction = -g_p0 * out.dp0;

  const LocationJets lj = location_jets(p, n);
  CompensatedSum t2;
  for (std::size_t i = 0; i < lj.x.size(); ++i) t2.add(lj.p[i] * lj.dx[i] * g_function(p, lj.x[i]));
  out.term2 = t2.total();

  const CdfSteps steps = probability_cdf_jets(p, n);
  std::vector<double> y3(static_cast<std::size_t>(quad_points));
  std::vector<double> y4(static_cast<std::size_t>(quad_points));
  for (int j = 0; j < quad_points; ++j) {
    double x = j == quad_points - 1 ? s.p0 : s.p1 + j * h;
    const auto it = std::lower_bound(steps.points.begin(), steps.points.end(), x - kSnap);
    if (it != steps.points.end() && std::abs(*it - x) < kSnap) {
      x = *it + kSnap;
      ++out.snapped_nodes;
    }
    y3[static_cast<std::size_t>(j)] = steps.cdf_eps(x) * g_function(p, x);
    y4[static_cast<std::size_t>(j)] = steps.cdf(x) * g_eps_derivative(p, x);
  }
  out.term3 = -simpson(y3, h);
  out.term4 = -simpson(y4, h);
  out.total = out.term1 + out.term2 + out.term3 + out.term4 + out.endpoint_correction;

  // Between consecutive cylinder points F and F' are constant, g = dr/dx and g' = d(r_eps)/dx.
  CompensatedSum e3;
  CompensatedSum e4;
  double left = s.p1;
  double r_left = r(p, left);
  double re_left = r_eps_derivative(p, left);
  for (std::size_t k = 0; k <= steps.points.size(); ++k) {
    const double right = k < steps.points.size() ? steps.points[k] : s.p0;
    const double r_right = r(p, right);
    const double re_right = r_eps_derivative(p, right);
    const double F = k == 0 ? 0.0 : steps.F[k - 1];
    const double dF = k == 0 ? 0.0 : steps.dF[k - 1];
    e3.add(-dF * (r_right - r_left));
    e4.add(-F * (re_right - re_left));
    left = right;
    r_left = r_right;
    re_left = re_right;
  }
  out.exact_term3 = e3.total();
  out.exact_term4 = e4.total();
  out.exact_total = out.term1 + out.term2 + out.exact_term3 + out.exact_term4 + out.endpoint_correction;
  return out;
}

double entropy_derivative_reference(const BinaryChainParams& p, int N, EnumerationOptions opts) {
  return conditional_entropy(ModelCurve::binary_symmetric(p.pi()), p.epsilon(), 1, N, opts).derivative(1);
}

double iid_entropy(const BinaryChainParams& p) {
  if (std::abs(p.det()) > 1e-12) {
    throw Error(ErrorCode::NotRankOne, "iid_entropy needs det Pi = 0, got " + std::to_string(p.det()));
  }
  const double e = p.epsilon();
  return binary_entropy(p.pi()(0, 0) * (1.0 - e) + p.pi()(0, 1) * e);
}

double two_zero_entropy(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw Error(ErrorCode::DomainError, "two_zero_entropy needs 0 < eps < 1, got " + std::to_string(eps));
  }
  return binary_entropy(eps);
}

SlopeProbe entropy_slope_probe(const Eigen::Matrix2d& pi, const std::vector<double>& eps_grid, int n,
                               EnumerationOptions opts) {
  const ModelCurve curve = ModelCurve::binary_symmetric(pi);
  SlopeProbe out;
  out.level = n;
  for (double e : eps_grid) {
    if (!(e > 0.0 && e < 0.5)) {
      throw Error(ErrorCode::DomainError, "probe grid point " + std::to_string(e) + " is outside (0, 1/2)");
    }
    const double step = e / 100.0;
    const double up = conditional_entropy(curve.at(e + step), n, opts);
    const double down = conditional_entropy(curve.at(e - step), n, opts);
    const double slope = (up - down) / (2.0 * step);
    out.rows.push_back({e, slope, slope / std::abs(std::log(e))});
  }
  const auto m = static_cast<Eigen::Index>(out.rows.size());
  if (m >= 2) {
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      A(i, 0) = std::abs(std::log(out.rows[static_cast<std::size_t>(i)].eps));
      A(i, 1) = 1.0;
      y(i) = out.rows[static_cast<std::size_t>(i)].slope;
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
    out.fit_a = c(0);
    out.fit_b = c(1);
    const double ss_res = (A * c - y).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return out;
}

SlopeProbe one_zero_divergence_probe(const Eigen::Matrix2d& pi, const std::vector<double>& eps_grid,
                                     int n, EnumerationOptions opts) {
  if (pi(0, 0) != 0.0 || pi(0, 1) != 1.0 || !(pi(1, 0) > 0.0 && pi(1, 0) < 1.0)) {
    throw Error(ErrorCode::DomainError, "one-zero probe needs pi00 = 0, pi01 = 1, 0 < pi10 < 1");
  }
  return entropy_slope_probe(pi, eps_grid, n, opts);
}

double low_snr_second_derivative(const Eigen::Matrix2d& pi) {
  const StochasticMatrix check(pi);
  if ((pi.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidModel, "low-SNR closed form needs every pi_ij > 0");
  }
  const double d = (pi(1, 0) - pi(0, 1)) / (pi(1, 0) + pi(0, 1));
  return -4.0 * d * d;
}

std::vector<LowSnrRow> low_snr_numeric_check(const Eigen::Matrix2d& pi, int n, EnumerationOptions opts) {
  const double closed = low_snr_second_derivative(pi);
  const auto h = entropy_sequence(ModelCurve::binary_symmetric(pi), 0.5, 2, n, opts);
  std::vector<LowSnrRow> rows;
  for (int k = 0; k <= n; ++k) {
    const Jet& j = h[static_cast<std::size_t>(k)];
    rows.push_back({k, j.value(), j.derivative(1), j.derivative(2), closed, std::abs(j.derivative(2) - closed)});
  }
  return rows;
}

}  // namespace hmment::bsc
