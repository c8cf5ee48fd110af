#include "hmment/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hmment::comb {

namespace {

__extension__ typedef unsigned __int128 UInt128;

Integer factorial(int n) {
  Integer f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Positive constant term in [0.5, 2], other coefficients in [-1, 1].
Jet random_positive_jet(int order, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> head(0.5, 2.0);
  std::uniform_real_distribution<double> tail(-1.0, 1.0);
  Jet j(order);
  j[0] = head(rng);
  for (int k = 1; k <= order; ++k) j[k] = tail(rng);
  return j;
}

double log_plus_one_derivative(const Jet& y, int k) {
  if (k == 0) return std::log(y.value()) + 1.0;
  return log(y).derivative(k);
}

double monomial(const std::vector<int>& parts, std::size_t from, const Jet& y, int power) {
  double v = 1.0;
  for (std::size_t i = from; i < parts.size(); ++i) v *= y.derivative(parts[i]);
  return v / std::pow(y.value(), power);
}

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error(ErrorCode::DomainError, "a partition needs at least one part");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 1) throw Error(ErrorCode::DomainError, "partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1]) {
      throw Error(ErrorCode::DomainError, "partition parts must be nonincreasing: " + to_string());
    }
  }
}

int Partition::sum() const noexcept {
  int s = 0;
  for (int a : parts_) s += a;
  return s;
}

std::string Partition::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts_[i]);
  }
  return s + "]";
}

std::vector<Partition> partitions_of(int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "partitions_of needs n >= 1");
  std::vector<Partition> out;
  std::vector<int> a{n};
  while (true) {
    out.emplace_back(a);
    // Next in reverse-lexicographic order: strip trailing ones, decrement the
    // last part above one, then refill greedily.
    int ones = 0;
    while (!a.empty() && a.back() == 1) {
      a.pop_back();
      ++ones;
    }
    if (a.empty()) break;
    const int v = --a.back();
    int rest = ones + 1;
    while (rest > 0) {
      const int part = std::min(v, rest);
      a.push_back(part);
      rest -= part;
    }
  }
  return out;
}

Integer permutation_count(const Partition& p) {
  Integer count = factorial(p.size());
  const auto& a = p.parts();
  std::size_t i = 0;
  while (i < a.size()) {
    std::size_t j = i;
    while (j < a.size() && a[j] == a[i]) ++j;
    count /= factorial(static_cast<int>(j - i));
    i = j;
  }
  return count;
}

Rational coefficient_closed_form(const Partition& p) {
  const int m = p.size();
  Integer denom = 1;
  for (int a : p.parts()) denom *= factorial(a);
  Rational c(permutation_count(p) * factorial(p.sum()), denom * m);
  return m % 2 == 1 ? c : Rational(-c);
}

Rational CoefficientRecursion::operator()(const Partition& p) {
  const auto& a = p.parts();
  if (a.size() == 1 && a[0] == 1) return 1;
  if (auto it = memo_.find(a); it != memo_.end()) return it->second;

  // Differentiating y^(b_1)...y^(b_m)/y^m raises one factor's order, or brings
  // down -m y'/y. Collect every predecessor b that produces a.
  Rational c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 2 || (i > 0 && a[i] == a[i - 1])) continue;
    std::vector<int> b = a;
    --b[i];
    std::sort(b.begin(), b.end(), std::greater<>());
    const auto mult = std::count(b.begin(), b.end(), a[i] - 1);
    c += Rational(static_cast<long long>(mult)) * (*this)(Partition(b));
  }
  if (a.back() == 1) {
    std::vector<int> b(a.begin(), a.end() - 1);
    c -= Rational(static_cast<long long>(a.size() - 1)) * (*this)(Partition(b));
  }
  memo_.emplace(a, c);
  return c;
}

Rational coefficient_recursion(const Partition& p) {
  CoefficientRecursion rec;
  return rec(p);
}

std::vector<Term> yprime_over_y_expansion(int n) {
  if (n < 0) throw Error(ErrorCode::DomainError, "expansion order must be nonnegative");
  std::vector<Term> out;
  for (auto& p : partitions_of(n + 1)) out.push_back({p, coefficient_closed_form(p)});
  return out;
}

double evaluate_terms(const std::vector<Term>& terms, const Jet& y, int shift) {
  if (!(y.value() > 0.0)) {
    throw Error(ErrorCode::NonpositiveConstantTerm, "evaluation needs a positive constant term");
  }
  double s = 0.0;
  for (const auto& t : terms) s += to_double(t.coefficient) * monomial(t.partition.parts(), 0, y, t.partition.size() - shift);
  return s;
}

YLogYExpansion::YLogYExpansion(int order) : order_(order) {
  if (order < 1) throw Error(ErrorCode::DomainError, "y log y expansion needs N >= 1");
  for (auto& a : partitions_of(order)) {
    if (a.size() < 2) continue;
    Rational e = 0;
    const auto& parts = a.parts();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0 && parts[i] == parts[i - 1]) continue;
      std::vector<int> rest = parts;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      e += Rational(binomial(order - 1, parts[i] - 1)) * coefficient_closed_form(Partition(rest));
    }
    if (e != 0) terms_.push_back({a, e});
  }
}

double YLogYExpansion::q(int i, const Jet& y) const {
  if (!(y.value() > 0.0)) {
    throw Error(ErrorCode::NonpositiveConstantTerm, "y log y expansion needs a positive constant term");
  }
  if (y.order() < order_) throw Error(ErrorCode::OrderMismatch, "jet order below the expansion order");
  if (i == order_) return std::log(y.value()) + 1.0;
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.partition.largest() != i) continue;
    s += to_double(t.coefficient) * monomial(t.partition.parts(), 1, y, t.partition.size() - 1);
  }
  return s;
}

double YLogYExpansion::full(const Jet& y) const {
  double s = 0.0;
  for (int i = 1; i <= order_; ++i) s += q(i, y) * y.derivative(i);
  return s;
}

double YLogYExpansion::high(const Jet& y) const {
  double s = 0.0;
  for (int i = high_start(); i <= order_; ++i) s += q(i, y) * y.derivative(i);
  return s;
}

double YLogYExpansion::low(const Jet& y) const {
  double s = 0.0;
  for (int i = 1; i <= low_end(); ++i) s += q(i, y) * y.derivative(i);
  return s;
}

HighPartCoefficients extract_high_coefficients(int order, int samples, unsigned seed) {
  const YLogYExpansion ex(order);
  std::mt19937_64 rng(seed);
  HighPartCoefficients out;
  out.order = order;
  std::map<int, std::pair<double, double>> range;
  for (int s = 0; s < samples; ++s) {
    const Jet y = random_positive_jet(order, rng);
    for (int i = ex.high_start(); i <= order; ++i) {
      const double ratio = ex.q(i, y) / log_plus_one_derivative(y, order - i);
      auto [it, fresh] = range.try_emplace(i, ratio, ratio);
      if (!fresh) {
        it->second.first = std::min(it->second.first, ratio);
        it->second.second = std::max(it->second.second, ratio);
      }
    }
  }
  out.matches_binomial = true;
  for (const auto& [i, mm] : range) {
    const double c = 0.5 * (mm.first + mm.second);
    out.extracted[i] = c;
    out.rounded[i] = std::llround(c);
    out.max_spread = std::max(out.max_spread, mm.second - mm.first);
    out.max_integer_distance = std::max(out.max_integer_distance, std::abs(c - std::round(c)));
    if (Integer(out.rounded[i]) != binomial(order, i)) out.matches_binomial = false;
  }
  return out;
}

LowPartReport lowpart_structure_check(int order, int samples, unsigned seed, double tol) {
  if (order < 2) throw Error(ErrorCode::DomainError, "lowpart check needs N >= 2");
  const YLogYExpansion ex(order);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> share(0.2, 0.4);
  LowPartReport out;
  out.order = order;
  const Jet one = Jet::constant(1.0, order);

  for (int s = 0; s < samples; ++s) {
    // Partition of unity a_1 + a_2 + a_3 = 1 with nonconstant members.
    std::vector<Jet> a(3);
    for (int k = 0; k < 2; ++k) {
      a[static_cast<std::size_t>(k)] = random_positive_jet(order, rng);
      a[static_cast<std::size_t>(k)][0] = share(rng);
    }
    a[2] = one - a[0] - a[1];
    auto G = [&](const Jet& x) {
      double g = -ex.low(x);
      for (const auto& ak : a) g += ex.low(ak * x);
      return g;
    };
    const Jet x1 = random_positive_jet(order, rng);
    const Jet x2 = random_positive_jet(order, rng);
    const double g1 = G(x1);
    const double g2 = G(x2);
    const double g12 = G(x1 + x2);
    const double scale = std::max({1.0, std::abs(g1), std::abs(g2), std::abs(g12)});
    out.additivity_residual = std::max(out.additivity_residual, std::abs(g12 - g1 - g2) / scale);

    Jet xt = x1;
    for (int k = ex.low_end() + 1; k <= order; ++k) xt[k] = 2.0 * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    out.truncation_residual = std::max(out.truncation_residual, std::abs(G(xt) - g1) / scale);

    const double lx = ex.low(x1);
    out.unit_a_residual = std::max(out.unit_a_residual, std::abs(ex.low(one * x1) - lx) / std::max(1.0, std::abs(lx)));
    const double la = ex.low(a[0]);
    out.unit_x_residual = std::max(out.unit_x_residual, std::abs(ex.low(a[0] * one) - la) / std::max(1.0, std::abs(la)));
  }
  out.pass = out.additivity_residual < tol && out.truncation_residual < tol && out.unit_a_residual < tol &&
             out.unit_x_residual < tol;
  return out;
}

std::string to_string(Int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  UInt128 u = neg ? static_cast<UInt128>(-(v + 1)) + 1 : static_cast<UInt128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

BinomialMoments binomial_moment_identities(int n) {
  if (n < 0) throw Error(ErrorCode::DomainError, "n must be nonnegative");
  if (n > 62) throw Error(ErrorCode::Overflow, "n = " + std::to_string(n) + " exceeds the exact range n <= 62");
  BinomialMoments out;
  out.n = n;
  Int128 c = 1;  // C(n, i)
  for (int i = 0; i <= n; ++i) {
    out.s1 += static_cast<Int128>(i) * c;
    out.s2 += static_cast<Int128>(i) * i * c;
    c = c * (n - i) / (i + 1);
  }
  const Int128 p2 = static_cast<Int128>(1) << n;
  out.closed1 = n == 0 ? 0 : static_cast<Int128>(n) * (p2 / 2);
  out.closed2 = out.closed1 + (n < 2 ? 0 : static_cast<Int128>(n) * (n - 1) * (p2 / 4));
  return out;
}

}  // namespace hmment::comb
