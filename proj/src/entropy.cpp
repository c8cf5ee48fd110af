#include "hmment/entropy.hpp"

#include <cmath>

#include "hmment/parallel.hpp"

namespace hmment {

namespace {

void check_enumeration(int alphabet, int length) {
  const double log2_words = length * std::log2(static_cast<double>(alphabet));
  if (log2_words > kEnumerationLog2Limit + 1e-9) {
    throw Error(ErrorCode::EnumerationTooLarge,
                std::to_string(alphabet) + "^" + std::to_string(length) +
                    " words exceed the 2^" + std::to_string(kEnumerationLog2Limit) + " limit");
  }
}

/// Per-length sums over all words w of length d+1: p(w) log p(w_last | w_prefix) and p(w).
struct LengthSums {
  std::vector<JetAccumulator> conditional;
  std::vector<JetAccumulator> mass;

  LengthSums(int lengths, int order)
      : conditional(static_cast<std::size_t>(lengths), JetAccumulator(order)),
        mass(static_cast<std::size_t>(lengths), JetAccumulator(order)) {}
};

struct Node {
  MatrixSeries belief;  // unnormalized row vector over the states of `last`
  int last = -1;
  Jet probability;
};

/**
 * Depth-first enumeration of all words up to a fixed length. Between symbols
 * only the states emitting the previous symbol carry mass, so each step
 * multiplies by the block Delta(states_of(b), states_of(a)).
 */
class WordTree {
 public:
  WordTree(const MatrixSeries& delta, const SymbolMap& phi, int max_length)
      : phi_(phi), max_length_(max_length), order_(delta.order()) {
    const int A = phi.alphabet_size();
    check_enumeration(A, max_length);
    const MatrixSeries pi = stationary_series(delta);
    blocks_.resize(static_cast<std::size_t>(A));
    first_.resize(static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
      const auto& to = phi.states_of(a);
      multiply(pi, delta.columns(to), first_[static_cast<std::size_t>(a)]);
      for (int b = 0; b < A; ++b) {
        blocks_[static_cast<std::size_t>(b)].push_back(delta.block(phi.states_of(b), to));
      }
    }
  }

  int order() const noexcept { return order_; }

  LengthSums run(int workers) const {
    LengthSums sums(max_length_, order_);
    const int A = phi_.alphabet_size();
    // Expand breadth-first (lexicographic within each length) until there are
    // enough subtrees to hand out; the split depends only on A and the length.
    int split = 0;
    std::size_t frontier_size = 1;
    while (split < max_length_ - 1 && frontier_size < 64) {
      ++split;
      frontier_size *= static_cast<std::size_t>(A);
    }
    if (std::pow(static_cast<double>(A), max_length_) < 4096.0) split = 0;

    Node root;
    root.probability = Jet::constant(1.0, order_);
    std::vector<Node> frontier{root};
    for (int d = 0; d < split; ++d) {
      std::vector<Node> next;
      for (const Node& n : frontier) {
        for (int a = 0; a < A; ++a) {
          Node child;
          if (!extend(n, a, child)) continue;
          account(sums, d, n, child);
          next.push_back(std::move(child));
        }
      }
      frontier = std::move(next);
    }

    std::vector<LengthSums> partial(frontier.size(), LengthSums(max_length_, order_));
    for_each_chunk(frontier.size(), workers, [&](std::size_t i) {
      visit(frontier[i], split, partial[i]);
    });
    for (const auto& p : partial) {
      for (int d = split; d < max_length_; ++d) {
        sums.conditional[static_cast<std::size_t>(d)].add(p.conditional[static_cast<std::size_t>(d)]);
        sums.mass[static_cast<std::size_t>(d)].add(p.mass[static_cast<std::size_t>(d)]);
      }
    }
    return sums;
  }

 private:
  bool extend(const Node& parent, int a, Node& child) const {
    if (parent.last < 0) {
      child.belief = first_[static_cast<std::size_t>(a)];
    } else {
      multiply(parent.belief, blocks_[static_cast<std::size_t>(parent.last)][static_cast<std::size_t>(a)],
               child.belief);
    }
    child.last = a;
    child.probability = child.belief.sum();
    return !child.probability.is_zero();
  }

  static void account(LengthSums& sums, int d, const Node& parent, const Node& child) {
    const Jet& p = child.probability;
    sums.conditional[static_cast<std::size_t>(d)].add(p * log(p / parent.probability));
    sums.mass[static_cast<std::size_t>(d)].add(p);
  }

  void visit(const Node& node, int depth, LengthSums& sums) const {
    if (depth >= max_length_) return;
    const int A = phi_.alphabet_size();
    Node child;
    for (int a = 0; a < A; ++a) {
      if (node.last < 0) {
        child.belief = first_[static_cast<std::size_t>(a)];
      } else {
        multiply(node.belief, blocks_[static_cast<std::size_t>(node.last)][static_cast<std::size_t>(a)],
                 child.belief);
      }
      child.last = a;
      child.probability = child.belief.sum();
      // 0 log 0 = 0 only for an identically zero jet; a zero constant term
      // with a nonzero tail reaches log() and is rejected there.
      if (child.probability.is_zero()) continue;
      account(sums, depth, node, child);
      visit(child, depth + 1, sums);
    }
  }

  const SymbolMap& phi_;
  int max_length_;
  int order_;
  std::vector<MatrixSeries> first_;
  std::vector<std::vector<MatrixSeries>> blocks_;
};

std::vector<Jet> sequence_from(const LengthSums& sums) {
  std::vector<Jet> h;
  for (const auto& c : sums.conditional) h.push_back(-c.total());
  return h;
}

Jet word_probability_series(const MatrixSeries& delta, const SymbolMap& phi,
                            std::span<const int> word) {
  const MatrixSeries pi = stationary_series(delta);
  MatrixSeries v = pi;
  MatrixSeries tmp;
  for (int a : word) {
    const auto& states = phi.states_of(a);
    MatrixSeries da(delta.order(), delta.rows(), delta.cols());
    for (int k = 0; k <= delta.order(); ++k) {
      for (int j : states) da.terms[static_cast<std::size_t>(k)].col(j) = delta.terms[static_cast<std::size_t>(k)].col(j);
    }
    multiply(v, da, tmp);
    v = tmp;
  }
  return v.sum();
}

}  // namespace

bool EntropySequence::nonincreasing(double tol) const {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] > values_[i - 1] + tol) return false;
  }
  return true;
}

double word_probability(const HiddenMarkovModel& m, std::span<const int> word) {
  return word_probability_series(MatrixSeries::constant(m.delta().matrix(), 0), m.phi(), word).value();
}

Jet word_probability(const ModelCurve& curve, double at, int order, std::span<const int> word) {
  return word_probability_series(curve.expand(at, order), curve.phi(), word);
}

EntropySequence entropy_sequence(const HiddenMarkovModel& m, int n_max, EnumerationOptions opts) {
  if (n_max < 0) throw Error(ErrorCode::DomainError, "n must be nonnegative");
  const WordTree tree(MatrixSeries::constant(m.delta().matrix(), 0), m.phi(), n_max + 1);
  std::vector<double> values;
  for (const Jet& j : sequence_from(tree.run(opts.threads))) values.push_back(j.value());
  return EntropySequence(std::move(values));
}

std::vector<Jet> entropy_sequence(const ModelCurve& curve, double at, int order, int n_max,
                                  EnumerationOptions opts) {
  if (n_max < 0) throw Error(ErrorCode::DomainError, "n must be nonnegative");
  const WordTree tree(curve.expand(at, order), curve.phi(), n_max + 1);
  return sequence_from(tree.run(opts.threads));
}

double conditional_entropy(const HiddenMarkovModel& m, int n, EnumerationOptions opts) {
  return entropy_sequence(m, n, opts)[n];
}

Jet conditional_entropy(const ModelCurve& curve, double at, int order, int n,
                        EnumerationOptions opts) {
  return entropy_sequence(curve, at, order, n, opts).back();
}

std::vector<Jet> word_mass(const ModelCurve& curve, double at, int order, int n_max,
                           EnumerationOptions opts) {
  const WordTree tree(curve.expand(at, order), curve.phi(), n_max);
  const LengthSums sums = tree.run(opts.threads);
  std::vector<Jet> out;
  for (const auto& m : sums.mass) out.push_back(m.total());
  return out;
}

EntropyRateEstimate entropy_rate_estimate(const HiddenMarkovModel& m, int n_max, double gap_tol,
                                          EnumerationOptions opts) {
  if (n_max < 1) throw Error(ErrorCode::DomainError, "n_max must be at least 1");
  const EntropySequence h = entropy_sequence(m, n_max, opts);
  EntropyRateEstimate est;
  for (int n = 1; n <= n_max; ++n) {
    est.n_used = n;
    est.estimate = h[n];
    est.gap = h[n - 1] - h[n];
    if (est.gap < gap_tol) {
      est.converged = true;
      break;
    }
  }
  return est;
}

StabilizedDerivative stabilized_derivative(const ModelCurve& curve, double at, int order,
                                           EnumerationOptions opts) {
  if (order < 0) throw Error(ErrorCode::DomainError, "derivative order must be nonnegative");
  StabilizedDerivative out;
  out.order = order;
  out.black_hole = is_black_hole(curve.at(at));
  if (!out.black_hole.black_hole) {
    throw Error(ErrorCode::NotABlackHole, "model at " + std::to_string(at) +
                                              " is not a Black Hole:\n" +
                                              out.black_hole.describe());
  }
  out.stabilizing_length = stabilizing_length(order);
  out.long_length = std::max(order, out.stabilizing_length);
  const auto h = entropy_sequence(curve, at, order, out.long_length, opts);
  out.value = h[static_cast<std::size_t>(out.stabilizing_length)].derivative(order);
  out.long_value = h[static_cast<std::size_t>(out.long_length)].derivative(order);
  out.pre_stabilization_value = h[static_cast<std::size_t>(out.stabilizing_length - 1)].derivative(order);
  out.pre_stabilization_differs =
      std::abs(out.pre_stabilization_value - out.value) > 1e-10 * std::max(1.0, std::abs(out.value));
  return out;
}

double markov_first_derivative(const ModelCurve& curve, double at) {
  return conditional_entropy(curve, at, 1, 1).derivative(1);
}

}  // namespace hmment
