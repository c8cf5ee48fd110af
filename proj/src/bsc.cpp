#include "hmment/bsc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hmment/entropy.hpp"
#include "hmment/model_curve.hpp"
#include "hmment/summation.hpp"

namespace hmment::bsc {

namespace {

constexpr double kDetTolerance = 1e-12;

std::string describe(const BinaryChainParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "Pi = [[" << p.pi()(0, 0) << ", " << p.pi()(0, 1) << "], [" << p.pi()(1, 0) << ", "
     << p.pi()(1, 1) << "]], eps = " << p.epsilon();
  return os.str();
}

void require_standard(const BinaryChainParams& p, const char* what) {
  std::string why;
  if (p.det() < -kDetTolerance) {
    why = "det Pi = " + std::to_string(p.det()) + " < 0";
  } else if (std::abs(p.det()) <= kDetTolerance) {
    why = "det Pi = 0";
  } else if ((p.pi().array() <= 0.0).any()) {
    why = "Pi has a zero entry";
  } else if (p.epsilon() <= 0.0) {
    why = "eps = 0";
  }
  if (!why.empty()) {
    throw Error(ErrorCode::RegimeViolation,
                std::string(what) + " needs the standard regime (" + why + "): " + describe(p));
  }
}

void check_levels(int n, int extra, const char* what) {
  if (n < 0) throw Error(ErrorCode::DomainError, std::string(what) + ": level must be nonnegative");
  if (n + extra > kEnumerationLog2Limit) {
    throw Error(ErrorCode::EnumerationTooLarge,
                std::string(what) + ": 2^" + std::to_string(n + extra) + " items exceed the 2^" +
                    std::to_string(kEnumerationLog2Limit) + " limit");
  }
}

void require_non_overlapping(const BinaryChainParams& p, const char* what) {
  const SupportClass s = classify_support(p);
  if (s.kind != SupportKind::CantorSet) {
    std::ostringstream os;
    os.precision(17);
    os << what << " needs f1(p0) < f0(p1); got f1(p0) = " << s.f1_p0 << ", f0(p1) = " << s.f0_p1
       << " (" << describe(p) << ")";
    throw Error(ErrorCode::NotNonOverlapping, os.str());
  }
}

double binary_entropy(double q) { return -(plogp(q) + plogp(1.0 - q)); }

}  // namespace

BinaryChainParams::BinaryChainParams(const Eigen::Matrix2d& pi, double epsilon)
    : pi_(pi), eps_(epsilon) {
  const StochasticMatrix check(pi_);
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
    throw Error(ErrorCode::InvalidModel,
                "crossover probability " + std::to_string(epsilon) + " is outside [0, 1/2]");
  }
}

bool BinaryChainParams::standard_regime() const noexcept {
  return det() > kDetTolerance && (pi_.array() > 0.0).all() && eps_ > 0.0;
}

Eigen::Matrix2d parse_pi(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidModel, "cannot parse '" + item + "' in Pi = '" + text + "'");
    }
  }
  if (v.size() != 4) {
    throw Error(ErrorCode::InvalidModel,
                "Pi needs 4 comma-separated entries p00,p01,p10,p11, got " + std::to_string(v.size()));
  }
  Eigen::Matrix2d pi;
  pi << v[0], v[1], v[2], v[3];
  return pi;
}

HiddenMarkovModel build_model(const BinaryChainParams& p) {
  return ModelCurve::binary_symmetric(p.pi()).at(p.epsilon());
}

MobiusPair mobius_pair(const BinaryChainParams& p) {
  if (p.epsilon() <= 0.0) {
    throw Error(ErrorCode::RegimeViolation, "f_0 is undefined at eps = 0");
  }
  const Eigen::Matrix2d& pi = p.pi();
  const double c0 = (1.0 - p.epsilon()) / p.epsilon();
  const double c1 = 1.0 / c0;
  return {{c0 * pi(0, 0), c0 * pi(1, 0), pi(0, 1), pi(1, 1)},
          {c1 * pi(0, 0), c1 * pi(1, 0), pi(0, 1), pi(1, 1)}};
}

double r0(const BinaryChainParams& p, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeState, "state ratio x = " + std::to_string(x) + " < 0");
  return output_probability(p.pi(), p.epsilon(), 0, x);
}

double r1(const BinaryChainParams& p, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeState, "state ratio x = " + std::to_string(x) + " < 0");
  return output_probability(p.pi(), p.epsilon(), 1, x);
}

double r(const BinaryChainParams& p, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeState, "state ratio x = " + std::to_string(x) + " < 0");
  return output_entropy(p.pi(), p.epsilon(), x);
}

FixedPoints fixed_points(const BinaryChainParams& p) {
  const bool degenerate = std::abs(p.det()) <= kDetTolerance && (p.pi().array() > 0.0).all() &&
                          p.epsilon() > 0.0;
  if (!degenerate) require_standard(p, "fixed_points");
  FixedPoints out;
  out.degenerate = degenerate;
  out.p0 = fixed_point(p.pi(), p.epsilon(), 0);
  out.p1 = fixed_point(p.pi(), p.epsilon(), 1);
  const MobiusPair f = mobius_pair(p);
  out.residual0 = std::abs(f.f0(out.p0) - out.p0);
  out.residual1 = std::abs(f.f1(out.p1) - out.p1);
  return out;
}

std::string to_string(SupportKind kind) {
  switch (kind) {
    case SupportKind::CantorSet: return "CantorSet";
    case SupportKind::Interval: return "Interval";
    case SupportKind::Degenerate: return "Degenerate";
  }
  return "?";
}

SupportClass classify_support(const BinaryChainParams& p) {
  const FixedPoints fp = fixed_points(p);
  const MobiusPair f = mobius_pair(p);
  SupportClass s;
  s.p0 = fp.p0;
  s.p1 = fp.p1;
  s.f1_p0 = f.f1(fp.p0);
  s.f0_p1 = f.f0(fp.p1);
  const double gap = s.f0_p1 - s.f1_p0;
  s.boundary = std::abs(gap) <= kBoundaryBand;
  if (fp.degenerate) {
    s.kind = SupportKind::Degenerate;
  } else {
    s.kind = gap > kBoundaryBand ? SupportKind::CantorSet : SupportKind::Interval;
  }
  s.union_covers_interval = s.kind == SupportKind::Interval;
  return s;
}

std::vector<double> support_points(const BinaryChainParams& p, int n) {
  require_standard(p, "support_points");
  check_levels(n, 1, "support_points");
  const FixedPoints fp = fixed_points(p);
  const MobiusPair f = mobius_pair(p);
  std::vector<double> pts{fp.p1, fp.p0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> next;
    next.reserve(pts.size() * 2);
    for (double x : pts) {
      next.push_back(f.f0(x));
      next.push_back(f.f1(x));
    }
    pts = std::move(next);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts) {
    if (out.empty() || x - out.back() > 1e-14) out.push_back(x);
  }
  return out;
}

double CylinderLevel::total_probability() const {
  CompensatedSum s;
  for (const auto& c : cylinders) s.add(c.probability);
  return s.total();
}

double CylinderLevel::mass_in(double lo, double hi) const {
  // Iterated points can round a few ulps past the closed-form interval ends.
  lo -= kMassSlack * std::abs(lo);
  hi += kMassSlack * std::abs(hi);
  auto first = std::lower_bound(cylinders.begin(), cylinders.end(), lo,
                                [](const Cylinder& c, double v) { return c.point < v; });
  CompensatedSum s;
  for (auto it = first; it != cylinders.end() && it->point <= hi; ++it) s.add(it->probability);
  return s.total();
}

std::string CylinderLevel::word_string(std::uint64_t word) const {
  std::string s(static_cast<std::size_t>(level), '0');
  for (int k = 0; k < level; ++k) {
    if ((word >> (level - 1 - k)) & 1u) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

CylinderLevel cylinder_level(const BinaryChainParams& p, int n) {
  require_standard(p, "cylinder_level");
  check_levels(n, 0, "cylinder_level");
  const FixedPoints fp = fixed_points(p);
  const MobiusPair f = mobius_pair(p);
  const auto nodes = cylinder_nodes(p.pi(), p.epsilon(), n);

  std::vector<std::pair<double, double>> ends{{fp.p1, fp.p0}};
  for (int k = 0; k < n; ++k) {
    std::vector<std::pair<double, double>> next;
    next.reserve(ends.size() * 2);
    for (const auto& [lo, hi] : ends) {
      next.emplace_back(f.f0(lo), f.f0(hi));
      next.emplace_back(f.f1(lo), f.f1(hi));
    }
    ends = std::move(next);
  }

  CylinderLevel out;
  out.level = n;
  out.cylinders.resize(nodes.size());
  for (std::size_t w = 0; w < nodes.size(); ++w) {
    out.cylinders[w] = {w, nodes[w].point, nodes[w].a + nodes[w].b, ends[w].first, ends[w].second};
  }
  std::stable_sort(out.cylinders.begin(), out.cylinders.end(),
                   [](const Cylinder& a, const Cylinder& b) { return a.point < b.point; });
  return out;
}

std::pair<double, double> r_extrema(const BinaryChainParams& p, double lo, double hi) {
  // r = h(r0) with r0 monotone in x and h unimodal with peak log 2 at 1/2.
  const double q_lo = r0(p, lo);
  const double q_hi = r0(p, hi);
  const double h_lo = binary_entropy(q_lo);
  const double h_hi = binary_entropy(q_hi);
  double top = std::max(h_lo, h_hi);
  if ((q_lo - 0.5) * (q_hi - 0.5) < 0.0) top = std::log(2.0);
  return {std::min(h_lo, h_hi), top};
}

EntropyBounds entropy_bounds(const BinaryChainParams& p, int n) {
  require_standard(p, "entropy_bounds");
  require_non_overlapping(p, "entropy_bounds");
  const CylinderLevel level = cylinder_level(p, n);
  CompensatedSum lower;
  CompensatedSum upper;
  for (const auto& c : level.cylinders) {
    const auto [lo, hi] = r_extrema(p, c.lo, c.hi);
    lower.add(c.probability * lo);
    upper.add(c.probability * hi);
  }
  return {n, lower.total(), upper.total()};
}

double blackwell_entropy(const BinaryChainParams& p, int n) {
  require_standard(p, "blackwell_entropy");
  check_levels(n, 0, "blackwell_entropy");
  CompensatedSum s;
  for (const auto& node : cylinder_nodes(p.pi(), p.epsilon(), n)) {
    s.add((node.a + node.b) * output_entropy(p.pi(), p.epsilon(), node.point));
  }
  return s.total();
}

std::vector<DeletedInterval> deleted_intervals(const BinaryChainParams& p, int n) {
  require_standard(p, "deleted_intervals");
  require_non_overlapping(p, "deleted_intervals");
  check_levels(n, 1, "deleted_intervals");
  const SupportClass s = classify_support(p);
  const MobiusPair f = mobius_pair(p);
  std::vector<DeletedInterval> out;
  std::vector<DeletedInterval> level{{0, 0, s.f1_p0, s.f0_p1}};
  for (int k = 0; k <= n; ++k) {
    out.insert(out.end(), level.begin(), level.end());
    if (k == n) break;
    std::vector<DeletedInterval> next;
    next.reserve(level.size() * 2);
    for (const auto& d : level) {
      for (int z = 0; z < 2; ++z) {
        next.push_back({k + 1, 2 * d.word + static_cast<std::uint64_t>(z), f[z](d.lo), f[z](d.hi)});
      }
    }
    level = std::move(next);
  }
  return out;
}

double max_output_probability(const BinaryChainParams& p) {
  require_standard(p, "max_output_probability");
  const FixedPoints fp = fixed_points(p);
  return std::max({r0(p, fp.p1), r0(p, fp.p0), r1(p, fp.p1), r1(p, fp.p0)});
}

}  // namespace hmment::bsc
