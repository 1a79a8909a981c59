#pragma once

// Proof strategies: finite trees whose nodes carry a theory and a capital.
// A deterministic node adds one derived statement. A probabilistic node
// branches on a certified (frac tau A R), one child per element a of A, and
// child a adds R(a) with capital reduced by tau.
//
// Text form:
//
//   tree := (strategy v1 NODE)
//   NODE := (leaf CAP)
//         | (det CAP STMT DERIV NODE)
//         | (prob CAP STMT DERIV NODE*)        ; children in set order
//
// DERIV proves STMT from the node's theory; it may be (derivation) under the
// semantic backend.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/logic.hpp"

namespace kolmo {

enum class Backend { semantic, syntactic };

struct StrategyNode {
  enum class Kind { leaf, deterministic, probabilistic };
  Kind kind = Kind::leaf;
  Rational capital;
  Statement added;   // det: the new statement; prob: the branching frac
  Derivation proof;  // of `added` from the node's theory
  std::vector<StrategyNode> children;

  static StrategyNode leaf(Rational capital);
  static StrategyNode det(Rational capital, Statement s, Derivation proof, StrategyNode child);
  static StrategyNode prob(Rational capital, Statement frac, Derivation proof, std::vector<StrategyNode> children);
  friend bool operator==(const StrategyNode&, const StrategyNode&) = default;
};

struct StrategyTree {
  StrategyNode root;
  const Rational& epsilon() const { return root.capital; }
  std::size_t node_count() const;
  std::size_t depth() const;
  std::string serialize() const;
  static StrategyTree parse(std::string_view text);
  friend bool operator==(const StrategyTree&, const StrategyTree&) = default;
};

struct TreeViolation {
  std::string node;  // path such as "root/2/0"
  std::string message;
};

std::vector<TreeViolation> validate_tree(const StrategyTree& tree, Backend backend, const FinitizedModel& m);

// Whether a leaf with theory t yields phi: membership or axiom under the
// syntactic backend, semantic_entails under the semantic one.
bool leaf_yields(const Theory& t, const Statement& phi, Backend backend, const FinitizedModel& m);

struct EvalResult {
  Statement target;
  Rational p;
  std::map<std::string, bool> leaves;  // leaf path -> yields target
};

// Exact backward induction with uniform weights at probabilistic nodes.
EvalResult prove_probability(const StrategyTree& tree, const Statement& phi, Backend backend, const FinitizedModel& m);

// Measure of leaves whose theory holds a statement false in m.
Rational false_statement_probability(const StrategyTree& tree, const FinitizedModel& m);

struct MonteCarloResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0;
};

// Uniform random root-to-leaf walks; trial i draws from its own generator
// seeded with (seed, i), so results do not depend on evaluation order.
MonteCarloResult monte_carlo(const StrategyTree& tree, const Statement& phi, Backend backend,
                             const FinitizedModel& m, std::uint64_t trials, std::uint64_t seed);

struct Extraction {
  Rational p;
  bool sufficient = false;  // p > epsilon
  std::optional<Derivation> derivation;
};

// Randomness-free derivation of phi from the base theory when p > epsilon,
// combining strong children with disj_from_frac at probabilistic nodes.
// Throws InternalError if the combination is impossible despite p > epsilon.
Extraction extract_deterministic(const StrategyTree& tree, const Statement& phi, const FinitizedModel& m);

// Tree with deterministic chains removed: each node keeps the statements
// added on the way to it.
struct CompressedNode {
  std::vector<Statement> added;
  std::vector<CompressedNode> children;  // empty for leaves
};
CompressedNode compress(const StrategyTree& tree);
Rational compressed_probability(const CompressedNode& root, const Statement& phi, Backend backend,
                                const FinitizedModel& m);

// ---- generators -----------------------------------------------------------

struct FuzzCase {
  StrategyTree tree;
  Statement target;
  std::string label;
};

struct FuzzOptions {
  unsigned max_depth = 6;
  unsigned max_branch = 8;
  std::size_t max_nodes = 3000;
};

// Valid tree with root capital epsilon drawn from certifiable frac instances
// over strings of length <= 3; needs a model with a plain table, N >= 4.
FuzzCase fuzz_tree(std::uint64_t seed, const Rational& epsilon, const FinitizedModel& m,
                   const FuzzOptions& options = {});

// Fixed adversarial cases: boundary strong counts, saturated capital, tau = 0
// and |A| = 1 nodes, long deterministic chains, nested combinations.
std::vector<FuzzCase> hand_built_trees(const FinitizedModel& m);

// Chained probabilistic nodes branching on
// (frac 2^-c_i (len n_i) (cge _ n_i - c_i)), certified in m.
StrategyTree build_random_axiom_strategy(const std::vector<unsigned>& n, const std::vector<unsigned>& c,
                                         const Rational& epsilon, const FinitizedModel& m);

struct IndependenceReport {
  unsigned m = 0, n = 0, c = 0;
  std::uint64_t trials = 0;
  std::uint64_t all_consistent = 0;   // every sign pattern consistent
  std::uint64_t dependent = 0;        // trials - all_consistent
  std::uint64_t single_implication = 0;
  std::uint64_t implication_into_disjunction = 0;
  std::uint64_t conjunction_into_implication = 0;
};

// Samples `count` uniform length-n strings per trial and tests the sign
// patterns of (cge x_i n-c) for consistency with the base theory over the
// admissible variants of m (C values of sampled strings may be lowered,
// subject to the counting facts for length n).
IndependenceReport independence_experiment(unsigned count, unsigned n, unsigned c, std::uint64_t trials,
                                           std::uint64_t seed, const FinitizedModel& m);

}  // namespace kolmo
