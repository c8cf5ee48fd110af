#pragma once

#include <span>
#include <vector>

#include "hmment/hmm.hpp"
#include "hmment/jet.hpp"
#include "hmment/model_curve.hpp"

namespace hmment {

/// Word enumeration is refused beyond 2^26 words of the longest length.
inline constexpr int kEnumerationLog2Limit = 26;

struct EnumerationOptions {
  /// 0 selects default_worker_count(). Results are identical for every value.
  int threads = 0;
};

/// p(z_1..z_n) = pi Delta_{z_1} ... Delta_{z_n} 1 with the stationary pi.
double word_probability(const HiddenMarkovModel& m, std::span<const int> word);
Jet word_probability(const ModelCurve& curve, double at, int order, std::span<const int> word);

/// H_0, H_1, ..., H_n in nats, where H_k = H(Z_0 | Z_-k .. Z_-1).
class EntropySequence {
 public:
  explicit EntropySequence(std::vector<double> values) : values_(std::move(values)) {}

  int max_n() const noexcept { return static_cast<int>(values_.size()) - 1; }
  double operator[](int n) const { return values_[static_cast<std::size_t>(n)]; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool nonincreasing(double tol = 1e-12) const;

 private:
  std::vector<double> values_;
};

EntropySequence entropy_sequence(const HiddenMarkovModel& m, int n_max,
                                 EnumerationOptions opts = {});
/// Jets of H_0..H_n in the curve parameter, expanded at `at`.
std::vector<Jet> entropy_sequence(const ModelCurve& curve, double at, int order, int n_max,
                                  EnumerationOptions opts = {});

double conditional_entropy(const HiddenMarkovModel& m, int n, EnumerationOptions opts = {});
Jet conditional_entropy(const ModelCurve& curve, double at, int order, int n,
                        EnumerationOptions opts = {});

/// Total probability of all words of length 1..n_max as jets (index k -> length k+1).
std::vector<Jet> word_mass(const ModelCurve& curve, double at, int order, int n_max,
                           EnumerationOptions opts = {});

struct EntropyRateEstimate {
  double estimate = 0.0;
  int n_used = 0;
  /// H_{n_used - 1} - H_{n_used}.
  double gap = 0.0;
  bool converged = false;
};

/// Smallest n <= n_max with H_{n-1} - H_n < gap_tol; H_n bounds H(Z) from above.
EntropyRateEstimate entropy_rate_estimate(const HiddenMarkovModel& m, int n_max, double gap_tol,
                                          EnumerationOptions opts = {});

inline int stabilizing_length(int order) { return (order + 2) / 2; }

struct StabilizedDerivative {
  int order = 0;
  double value = 0.0;
  int stabilizing_length = 0;
  /// Same derivative from H_N (the longer, first stabilization bound).
  int long_length = 0;
  double long_value = 0.0;
  /// Derivative of H_{n*-1}; recorded only, never asserted.
  double pre_stabilization_value = 0.0;
  bool pre_stabilization_differs = false;
  BlackHoleReport black_hole;
};

/// d^N H / d eps^N at a Black Hole, read off H_{ceil((N+1)/2)}.
StabilizedDerivative stabilized_derivative(const ModelCurve& curve, double at, int order,
                                           EnumerationOptions opts = {});

/// dH_1/d eps at `at`; equals dH/d eps when Z is itself Markov there.
double markov_first_derivative(const ModelCurve& curve, double at);

}  // namespace hmment
