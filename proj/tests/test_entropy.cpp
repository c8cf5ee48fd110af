#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hmment/bsc.hpp"
#include "hmment/entropy.hpp"

using namespace hmment;

namespace {

Eigen::Matrix2d pi_a() {
  Eigen::Matrix2d pi;
  pi << 0.7, 0.3, 0.4, 0.6;
  return pi;
}

Eigen::Matrix2d random_positive_pi(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Eigen::Matrix2d pi;
  const double a = u(rng), b = u(rng);
  pi << 1 - a, a, b, 1 - b;
  return pi;
}

Eigen::MatrixXd random_stochastic(int B, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(B, B);
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < B; ++j) m(i, j) = u(rng);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

double binary_entropy(double q) { return -(q * std::log(q) + (1 - q) * std::log(1 - q)); }

std::vector<int> word_of(unsigned bits, int n) {
  std::vector<int> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = static_cast<int>((bits >> (n - 1 - k)) & 1u);
  return w;
}

}  // namespace

TEST_CASE("word probabilities") {
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const HiddenMarkovModel iid(StochasticMatrix(half), SymbolMap({0, 1}));
  for (int n = 1; n <= 6; ++n) {
    for (unsigned w = 0; w < (1u << n); ++w) {
      CHECK(word_probability(iid, word_of(w, n)) == doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-15));
    }
  }

  // Brute force over hidden (y, e) paths for the BSC.
  const double e = 0.1;
  const HiddenMarkovModel m = bsc::build_model({pi_a(), e});
  const double st[2] = {4.0 / 7.0, 3.0 / 7.0};
  for (unsigned w = 0; w < 4; ++w) {
    const auto z = word_of(w, 2);
    double p = 0;
    for (int y1 = 0; y1 < 2; ++y1) {
      for (int y2 = 0; y2 < 2; ++y2) {
        const double pe1 = (z[0] ^ y1) ? e : 1 - e;
        const double pe2 = (z[1] ^ y2) ? e : 1 - e;
        p += st[y1] * pi_a()(y1, y2) * pe1 * pe2;
      }
    }
    CHECK(word_probability(m, z) == doctest::Approx(p).epsilon(1e-14));
  }

  double total = 0;
  for (unsigned w = 0; w < (1u << 7); ++w) total += word_probability(m, word_of(w, 7));
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("word mass is conserved to every order") {
  const ModelCurve c = ModelCurve::binary_symmetric(pi_a());
  for (double at : {0.0, 0.1, 0.5}) {
    const auto mass = word_mass(c, at, 3, 8);
    for (const Jet& j : mass) {
      CHECK(std::abs(j.value() - 1.0) < 1e-12);
      for (int k = 1; k <= 3; ++k) CHECK(std::abs(j[k]) < 1e-12);
    }
  }
  const Jet p = word_probability(c, 0.1, 2, std::vector<int>{0, 0});
  CHECK(p.value() == doctest::Approx(word_probability(c.at(0.1), std::vector<int>{0, 0})).epsilon(1e-15));
}

TEST_CASE("conditional entropies of simple models") {
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const HiddenMarkovModel iid(StochasticMatrix(half), SymbolMap({0, 1}));
  const EntropySequence h = entropy_sequence(iid, 8);
  for (int n = 0; n <= 8; ++n) CHECK(h[n] == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 3; ++rep) {
    const HiddenMarkovModel coin = bsc::build_model({random_positive_pi(rng), 0.5});
    const EntropySequence hc = entropy_sequence(coin, 8);
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(hc[n] - std::log(2.0)) < 1e-13);
  }

  // Noiseless injective phi: H_n is the Markov entropy for n >= 1.
  const Eigen::MatrixXd d = random_stochastic(3, rng);
  const HiddenMarkovModel markov(StochasticMatrix(d), SymbolMap({0, 1, 2}));
  const auto st = stationary_distribution(markov.delta()).vector();
  double rate = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) rate -= st[i] * d(i, j) * std::log(d(i, j));
  }
  const EntropySequence hm = entropy_sequence(markov, 6);
  for (int n = 1; n <= 6; ++n) CHECK(hm[n] == doctest::Approx(rate).epsilon(1e-13));
}

TEST_CASE("monotonicity on random models") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const HiddenMarkovModel m(StochasticMatrix(random_stochastic(4, rng)), SymbolMap({0, 1, 1, 0}));
    const EntropySequence h = entropy_sequence(m, 10);
    CHECK(h.nonincreasing(1e-12));
  }
}

TEST_CASE("entropy rate estimate") {
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const auto iid = entropy_rate_estimate(HiddenMarkovModel(StochasticMatrix(half), SymbolMap({0, 1})), 6, 1e-12);
  CHECK(iid.converged);
  CHECK(iid.n_used == 1);
  CHECK(iid.gap == doctest::Approx(0.0));
  CHECK(iid.estimate == doctest::Approx(std::log(2.0)));

  Eigen::Matrix2d rank_one;
  rank_one << 0.3, 0.7, 0.3, 0.7;
  for (double e : {0.0, 0.1, 0.3}) {
    const auto est = entropy_rate_estimate(bsc::build_model({rank_one, e}), 6, 1e-12);
    CHECK(std::abs(est.estimate - binary_entropy(0.3 * (1 - e) + 0.7 * e)) < 1e-12);
    CHECK(est.gap < 1e-12);
  }

  const bsc::BinaryChainParams p(pi_a(), 0.1);
  const auto est = entropy_rate_estimate(bsc::build_model(p), 16, 1e-15);
  const auto b = bsc::entropy_bounds(p, 16);
  CHECK(est.estimate >= b.lower - 1e-12);
  CHECK(est.estimate <= b.upper + 1e-12);
}

TEST_CASE("results do not depend on the worker count") {
  std::mt19937_64 rng(23);
  const HiddenMarkovModel m(StochasticMatrix(random_stochastic(5, rng)), SymbolMap({0, 1, 2, 1, 0}));
  const auto base = entropy_sequence(m, 8, {1}).values();
  for (int t : {2, 3, 7}) CHECK(entropy_sequence(m, 8, {t}).values() == base);

  const ModelCurve c = ModelCurve::binary_symmetric(pi_a());
  const auto j1 = entropy_sequence(c, 0.1, 2, 13, {1});
  const auto j4 = entropy_sequence(c, 0.1, 2, 13, {4});
  for (std::size_t n = 0; n < j1.size(); ++n) {
    for (int k = 0; k <= 2; ++k) CHECK(j1[n][k] == j4[n][k]);
  }
}

TEST_CASE("enumeration guard") {
  const HiddenMarkovModel m = bsc::build_model({pi_a(), 0.1});
  try {
    entropy_sequence(m, 26);
    FAIL("guard not raised");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnumerationTooLarge);
  }
}

TEST_CASE("jets match finite differences of H_n") {
  const ModelCurve c = ModelCurve::binary_symmetric(pi_a());
  const double e = 0.1, h = 1e-4;
  const Jet j = conditional_entropy(c, e, 2, 5);
  const double up = conditional_entropy(c.at(e + h), 5);
  const double mid = conditional_entropy(c.at(e), 5);
  const double down = conditional_entropy(c.at(e - h), 5);
  CHECK(j.value() == doctest::Approx(mid).epsilon(1e-14));
  CHECK(std::abs(j.derivative(1) - (up - down) / (2 * h)) < 1e-6);
  CHECK(std::abs(j.derivative(2) - (up - 2 * mid + down) / (h * h)) < 1e-3);
}

TEST_CASE("stabilization at the Black Hole for orders up to 4") {
  std::mt19937_64 rng(24);
  std::vector<Eigen::Matrix2d> pis{pi_a()};
  for (int i = 0; i < 3; ++i) pis.push_back(random_positive_pi(rng));
  for (const auto& pi : pis) {
    const ModelCurve c = ModelCurve::binary_symmetric(pi);
    const auto h = entropy_sequence(c, 0.0, 4, 8);
    for (int N = 1; N <= 4; ++N) {
      const int n0 = stabilizing_length(N);
      const double ref = h[static_cast<std::size_t>(n0)].derivative(N);
      for (int n = n0; n <= 8; ++n) {
        const double v = h[static_cast<std::size_t>(n)].derivative(N);
        CHECK(std::abs(v - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
      }
    }
    const auto d2 = stabilized_derivative(c, 0.0, 2);
    CHECK(d2.stabilizing_length == 2);
    CHECK(d2.value == doctest::Approx(d2.long_value).epsilon(1e-10));
    CHECK(d2.black_hole.black_hole);
    CHECK(markov_first_derivative(c, 0.0) == doctest::Approx(stabilized_derivative(c, 0.0, 1).value).epsilon(1e-11));
  }
  CHECK(stabilizing_length(1) == 1);
  CHECK(stabilizing_length(2) == 2);
  CHECK(stabilizing_length(3) == 2);
  CHECK(stabilizing_length(4) == 3);
}

TEST_CASE("stabilized derivative needs a Black Hole") {
  const ModelCurve c = ModelCurve::binary_symmetric(pi_a());
  try {
    stabilized_derivative(c, 0.5, 1);
    FAIL("accepted a non Black Hole");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotABlackHole);
    CHECK(std::string(e.what()).find("symbol") != std::string::npos);
  }
}

TEST_CASE("Markov output: first derivative of H_n equals that of H_1") {
  // At this base point Z is itself a Markov chain: state 0 emits 0, states 1 and 2 emit 1.
  Eigen::MatrixXd base(3, 3);
  base << 0.25, 0.25, 0.5, 0.0, 1.0 / 6, 5.0 / 6, 7.0 / 8, 1.0 / 8, 0.0;
  Eigen::MatrixXd dir(3, 3);
  dir << -0.1, 0.0, 0.1, 0.1, 0.0, -0.1, 0.0, -0.1, 0.1;
  const ModelCurve c = ModelCurve::affine(base, dir, SymbolMap({0, 1, 1}));
  const EntropySequence h0 = entropy_sequence(c.at(0.0), 8);
  for (int n = 2; n <= 8; ++n) CHECK(h0[n] == doctest::Approx(h0[1]).epsilon(1e-13));
  const double d1 = markov_first_derivative(c, 0.0);
  const auto h = entropy_sequence(c, 0.0, 1, 8);
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(h[static_cast<std::size_t>(n)].derivative(1) - d1) < 1e-11);
  CHECK(std::abs(d1) > 1e-3);

  const ModelCurve flat = ModelCurve::constant(c.at(0.0));
  CHECK(markov_first_derivative(flat, 0.0) == 0.0);
}
