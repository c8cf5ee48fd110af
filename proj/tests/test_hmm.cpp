#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hmment/bsc.hpp"
#include "hmment/hmm.hpp"
#include "hmment/io.hpp"

using namespace hmment;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::DomainError;
}

Eigen::Matrix2d pi_a() {
  Eigen::Matrix2d pi;
  pi << 0.7, 0.3, 0.4, 0.6;
  return pi;
}

HiddenMarkovModel bsc_model(double eps) { return bsc::build_model({pi_a(), eps}); }

Eigen::MatrixXd random_stochastic(int B, std::mt19937_64& rng, double floor = 0.0) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  Eigen::MatrixXd m(B, B);
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < B; ++j) m(i, j) = u(rng);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

}  // namespace

TEST_CASE("validation reports indices") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  try {
    StochasticMatrix m(bad);
    FAIL("accepted a bad row");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidModel);
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
  }
  bad << 1.1, -0.1, 0.5, 0.5;
  CHECK(code_of([&] { StochasticMatrix m(bad); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { SymbolMap s({0, 2}, 3); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { SymbolMap s({0, -1}); }) == ErrorCode::SymbolOutOfRange);
  CHECK(code_of([] { HiddenMarkovModel m(StochasticMatrix(Eigen::MatrixXd::Identity(2, 2)), SymbolMap({0, 1, 1})); }) ==
        ErrorCode::InvalidModel);
}

TEST_CASE("stationary distribution") {
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const BeliefState u = stationary_distribution(StochasticMatrix(half));
  CHECK(u[0] == doctest::Approx(0.5));
  const BeliefState p = stationary_distribution(StochasticMatrix(pi_a()));
  CHECK(p[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(code_of([] { stationary_distribution(StochasticMatrix(Eigen::MatrixXd::Identity(2, 2))); }) ==
        ErrorCode::NotIrreducible);
}

TEST_CASE("symbol matrices partition the columns") {
  const HiddenMarkovModel m = bsc_model(0.1);
  const Eigen::MatrixXd d0 = symbol_matrix(m, 0);
  const Eigen::MatrixXd d1 = symbol_matrix(m, 1);
  CHECK((d0 + d1 - m.delta().matrix()).norm() == 0.0);
  // phi = (0,1,1,0): symbol 0 keeps the first and last columns.
  CHECK(d0.col(1).norm() == 0.0);
  CHECK(d0.col(2).norm() == 0.0);
  CHECK(d0.col(0) == m.delta().matrix().col(0));
  CHECK(d0.col(3) == m.delta().matrix().col(3));
  CHECK(code_of([&] { symbol_matrix(m, 2); }) == ErrorCode::SymbolOutOfRange);

  const HiddenMarkovModel single(StochasticMatrix(pi_a()), SymbolMap({0, 0}));
  CHECK(symbol_matrix(single, 0) == pi_a());
}

TEST_CASE("BSC matrix entries by substitution") {
  const double e = 0.1;
  const Eigen::MatrixXd d = bsc_model(e).delta().matrix();
  const Eigen::Matrix2d pi = pi_a();
  for (int y = 0; y < 2; ++y) {
    for (int ey = 0; ey < 2; ++ey) {
      for (int y2 = 0; y2 < 2; ++y2) {
        CHECK(d(2 * y + ey, 2 * y2) == doctest::Approx(pi(y, y2) * (1 - e)).epsilon(1e-15));
        CHECK(d(2 * y + ey, 2 * y2 + 1) == doctest::Approx(pi(y, y2) * e).epsilon(1e-15));
      }
    }
  }
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(d.row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
  const Eigen::MatrixXd d0 = bsc_model(0.0).delta().matrix();
  CHECK(d0.col(1).norm() == 0.0);
  CHECK(d0.col(3).norm() == 0.0);
}

TEST_CASE("r_a and f_a") {
  const HiddenMarkovModel m = bsc_model(0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::RowVectorXd w(4);
    for (int i = 0; i < 4; ++i) w[i] = u(rng);
    const BeliefState b(w / w.sum());
    CHECK(symbol_probability(m, 0, b) + symbol_probability(m, 1, b) == doctest::Approx(1.0).epsilon(1e-14));
    const BeliefState f = update_belief(m, 1, b);
    CHECK(f[0] == 0.0);
    CHECK(f[3] == 0.0);
    CHECK(f.vector().sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Stationary belief: r_0 is the output marginal (1 - eps) pi(0) + eps pi(1).
  const double pi0 = 4.0 / 7.0;
  Eigen::RowVectorXd st(4);
  st << pi0 * 0.9, pi0 * 0.1, (1 - pi0) * 0.9, (1 - pi0) * 0.1;
  CHECK(symbol_probability(m, 0, BeliefState(st)) == doctest::Approx(0.9 * pi0 + 0.1 * (1 - pi0)).epsilon(1e-14));
  // Unit vector: row sum of Delta_a.
  Eigen::RowVectorXd e2 = Eigen::RowVectorXd::Zero(4);
  e2[2] = 1.0;
  CHECK(symbol_probability(m, 0, BeliefState(e2)) == doctest::Approx(symbol_matrix(m, 0).row(2).sum()));

  const HiddenMarkovModel ident(StochasticMatrix(pi_a()), SymbolMap({0, 1}));
  Eigen::RowVectorXd half(2);
  half << 0.5, 0.5;
  CHECK(update_belief(ident, 1, BeliefState(half))[1] == 1.0);

  Eigen::MatrixXd absorbing(2, 2);
  absorbing << 1.0, 0.0, 0.5, 0.5;
  const HiddenMarkovModel stuck(StochasticMatrix(absorbing), SymbolMap({0, 1}));
  Eigen::RowVectorXd first(2);
  first << 1.0, 0.0;
  CHECK(symbol_probability(stuck, 1, BeliefState(first)) == 0.0);
  CHECK(code_of([&] { update_belief(stuck, 1, BeliefState(first)); }) == ErrorCode::ZeroProbabilitySymbol);
}

TEST_CASE("Black Hole detection") {
  const HiddenMarkovModel at0 = bsc_model(0.0);
  const BlackHoleReport r0 = is_black_hole(at0);
  CHECK(r0.black_hole);
  // At a Black Hole the update forgets the input.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::RowVectorXd w1(4), w2(4);
  for (int i = 0; i < 4; ++i) {
    w1[i] = u(rng);
    w2[i] = u(rng);
  }
  const BeliefState a = update_belief(at0, 0, BeliefState(w1 / w1.sum()));
  const BeliefState b = update_belief(at0, 0, BeliefState(w2 / w2.sum()));
  CHECK((a.vector() - b.vector()).norm() < 1e-15);

  const BlackHoleReport r1 = is_black_hole(bsc_model(0.1));
  CHECK_FALSE(r1.black_hole);
  CHECK_FALSE(r1.symbols[0].rank_one);
  CHECK_FALSE(r1.describe().empty());

  Eigen::MatrixXd mixed(2, 2);
  mixed << 0.5, 0.5, 0.0, 1.0;
  const BlackHoleReport r2 = is_black_hole(HiddenMarkovModel(StochasticMatrix(mixed), SymbolMap({0, 0})));
  CHECK_FALSE(r2.black_hole);
}

TEST_CASE("Black Hole detection is invariant under state relabeling") {
  const HiddenMarkovModel m = bsc_model(0.0);
  const std::vector<int> perm{2, 0, 3, 1};
  Eigen::MatrixXd d(4, 4);
  std::vector<int> phi(4);
  for (int i = 0; i < 4; ++i) {
    phi[static_cast<std::size_t>(i)] = m.phi()[perm[static_cast<std::size_t>(i)]];
    for (int j = 0; j < 4; ++j) d(i, j) = m.delta()(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const HiddenMarkovModel p{StochasticMatrix(d), SymbolMap(phi)};
  CHECK(is_black_hole(p).black_hole == is_black_hole(m).black_hole);
  CHECK_FALSE(is_black_hole(bsc_model(0.2)).black_hole);
}

TEST_CASE("reverse model") {
  const HiddenMarkovModel m(StochasticMatrix(pi_a()), SymbolMap({0, 1}));
  const HiddenMarkovModel r = reverse_model(m);
  Eigen::Matrix2d expected = Eigen::Vector2d(7.0 / 4, 7.0 / 3).asDiagonal() * pi_a().transpose() *
                             Eigen::Vector2d(4.0 / 7, 3.0 / 7).asDiagonal();
  CHECK((r.delta().matrix() - expected).norm() < 1e-14);

  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const HiddenMarkovModel g(StochasticMatrix(random_stochastic(4, rng, 0.05)), SymbolMap({0, 1, 0, 1}));
    const HiddenMarkovModel rr = reverse_model(reverse_model(g));
    CHECK((rr.delta().matrix() - g.delta().matrix()).norm() < 1e-12);
    const auto p1 = stationary_distribution(g.delta()).vector();
    const auto p2 = stationary_distribution(reverse_model(g).delta()).vector();
    CHECK((p1 - p2).norm() < 1e-12);
  }
  Eigen::MatrixXd sym(2, 2);
  sym << 0.8, 0.2, 0.2, 0.8;
  const HiddenMarkovModel s(StochasticMatrix(sym), SymbolMap({0, 1}));
  CHECK((reverse_model(s).delta().matrix() - sym).norm() < 1e-15);
}

TEST_CASE("model JSON") {
  const auto m = io::model_from_json(R"({"delta": [[0.7, 0.3], [0.4, 0.6]], "phi": [0, 1]})");
  CHECK(m.state_count() == 2);
  CHECK(code_of([] { io::model_from_json(R"({"delta": [[0.7, 0.2], [0.4, 0.6]], "phi": [0, 1]})"); }) ==
        ErrorCode::InvalidModel);
  CHECK(code_of([] { io::model_from_json(R"({"delta": [[1.0]]})"); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { io::model_from_json("{not json"); }) == ErrorCode::InvalidModel);
  const auto c = io::curve_from_json(R"({"type": "bsc", "pi": [[0.7, 0.3], [0.4, 0.6]]})");
  CHECK((c.matrix_at(0.1) - bsc_model(0.1).delta().matrix()).norm() < 1e-15);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}
