#pragma once

// QBF arithmetization over a prime field and the interactive protocol for it,
// compiled into proof strategies.
//
// QBF grammar (ASCII or the usual symbols):
//
//   qbf   := quant* expr
//   quant := ("forall" | "exists" | "∀" | "∃") IDENT ["."]
//          | "forall_"IDENT ["."] | "exists_"IDENT ["."]
//   expr  := term (("|" | "∨" | "or") term)*
//   term  := unary (("&" | "∧" | "and") unary)*
//   unary := ("!" | "~" | "¬" | "not") unary | IDENT | "0" | "1" | "(" expr ")"
//
// Arithmetization: not a = 1-a, a and b = ab, a or b = a+b-ab,
// forall x = f0 f1, exists x = 1-(1-f0)(1-f1), and the linearization
// L_x f = (1-x) f0 + x f1. Linearizations are inserted so that no variable's
// degree exceeds the cap after a quantifier step.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kolmo/rational.hpp"
#include "kolmo/strategy.hpp"

namespace kolmo {

struct Formula {
  enum class Kind { var, constant, negation, conj, disj };
  Kind kind = Kind::constant;
  std::string name;    // var
  bool value = false;  // constant
  std::vector<Formula> kids;
  friend bool operator==(const Formula&, const Formula&) = default;
};

struct Quantifier {
  bool universal = true;
  std::string var;
  friend bool operator==(const Quantifier&, const Quantifier&) = default;
};

inline constexpr unsigned kMaxQbfVariables = 8;

struct Qbf {
  std::vector<Quantifier> prefix;
  Formula matrix;

  // Throws UsageError with the byte offset, or for unbound/duplicate
  // variables and more than kMaxQbfVariables quantifiers.
  static Qbf parse(std::string_view text);
  std::string str() const;
  bool truth() const;  // brute force
  friend bool operator==(const Qbf&, const Qbf&) = default;
};

// Field element per quantified variable (in prefix order); unset outside the
// polynomial's free variables.
using Point = std::vector<std::optional<std::uint64_t>>;

struct ArithOp {
  enum class Kind { forall, exists, linearize };
  Kind kind = Kind::forall;
  unsigned var = 0;     // index into the prefix
  unsigned degree = 0;  // degree of var in the polynomial the op applies to
};

inline constexpr unsigned kDefaultDegreeCap = 4;

// ops[0] is outermost: f_k = ops[k](f_{k+1}), f_K = matrix, f_0 is closed.
class Arithmetization {
 public:
  Arithmetization(Qbf q, std::uint64_t p, unsigned degree_cap = kDefaultDegreeCap);

  const Qbf& qbf() const { return q_; }
  std::uint64_t prime() const { return p_; }
  unsigned degree_cap() const { return cap_; }
  const std::vector<ArithOp>& ops() const { return ops_; }
  std::size_t rounds() const { return ops_.size(); }
  unsigned degree_sum() const;
  Rational soundness_bound() const;  // sum of degrees / p

  std::uint64_t evaluate(std::size_t k, const Point& rho) const;  // f_k(rho)
  std::uint64_t final_value() const { return evaluate(0, empty_point()); }
  // Coefficients (low first, length degree+1) of X -> f_{k+1}(rho[var_k := X]).
  std::vector<std::uint64_t> slice(std::size_t k, const Point& rho) const;
  // Value the round-k check expects from a prover message.
  std::uint64_t combine(std::size_t k, const Point& rho, std::uint64_t g0, std::uint64_t g1) const;
  Point empty_point() const { return Point(q_.prefix.size()); }

 private:
  std::uint64_t eval_matrix(const Formula& f, const Point& rho) const;

  Qbf q_;
  std::uint64_t p_;
  unsigned cap_;
  std::vector<ArithOp> ops_;
};

bool is_prime(std::uint64_t n);
// Smallest prime above twice the degree sum of the schedule.
std::uint64_t smallest_valid_prime(const Qbf& q, unsigned degree_cap = kDefaultDegreeCap);
// DomainError("field_too_small") naming the minimum when p is not valid.
void require_valid_field(const Arithmetization& a);

std::uint64_t poly_eval(const std::vector<std::uint64_t>& coeffs, std::uint64_t x, std::uint64_t p);

// Prover message for round k given the current point and claim.
using Prover = std::function<std::vector<std::uint64_t>(std::size_t k, const Point& rho, std::uint64_t claim)>;
Prover honest_prover(std::shared_ptr<const Arithmetization> a);

struct RoundRecord {
  std::size_t op = 0;
  std::vector<std::uint64_t> message;
  std::uint64_t claim = 0;
  bool consistent = false;
  std::uint64_t challenge = 0;
  Rational cost;  // degree / p
};

struct Transcript {
  std::uint64_t prime = 0;
  std::vector<RoundRecord> rounds;
  bool final_check = false;
  bool accepted = false;
  Rational total_cost;
};

// Runs the protocol with the given challenges (one per round).
Transcript run_protocol(const Arithmetization& a, const Prover& prover, const std::vector<std::uint64_t>& challenges);

// Model whose ext atoms sc_val, sc_agree and sc_ident describe the protocol's
// polynomials.
FinitizedModel protocol_model(std::shared_ptr<const Arithmetization> a);
// (ext sc_val "0" <empty point> "1"): the QBF is true.
Statement protocol_target(const Arithmetization& a);
std::string point_token(const Point& rho);

struct CompiledStrategy {
  std::shared_ptr<const Arithmetization> arith;
  StrategyTree tree;
  Statement target;
  FinitizedModel model;
};

// One probabilistic node per round, branching on
// (frac d/p (range p) (imp (ext sc_agree k rho g _) (ext sc_ident k rho g))),
// and a deterministic node deriving the target at accepting leaves.
// DomainError("work_ceiling") when the tree would exceed max_leaves.
CompiledStrategy compile_strategy(std::shared_ptr<const Arithmetization> a, const Prover& prover,
                                  std::size_t max_leaves = 50000);
CompiledStrategy compile_honest_strategy(std::shared_ptr<const Arithmetization> a, std::size_t max_leaves = 50000);

struct Acceptance {
  Rational value;
  Rational bound;           // soundness_bound()
  std::uint64_t work = 0;   // field operations spent
  Prover best_prover;       // attains value
};

// Exact max over prover messages of the acceptance probability, by backward
// induction over (round, point, claim). DomainError("work_ceiling") with the
// estimate when it exceeds the ceiling.
std::uint64_t adversarial_work_estimate(const Arithmetization& a);
Acceptance max_adversarial_acceptance(std::shared_ptr<const Arithmetization> a, double work_ceiling = 4e9);

// Fixed suite: at least 20 true and 20 false QBFs with at most 3 quantifiers.
std::vector<std::string> sumcheck_suite();

}  // namespace kolmo
