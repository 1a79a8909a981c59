#pragma once

// Ground statement language over complexity and halting atoms, a finitized
// model to evaluate it in, and linear derivations with a checker.
//
// Text form (s-expressions, strings in double quotes, "" is the empty string):
//
//   stmt  := (true) | (false)
//          | (cge TERM K) | (ccge TERM TERM K) | (kge TERM K)
//          | (nonterm TERM) | (halts TERM T)
//          | (frac RATIONAL SET stmt)          ; template: holes allowed inside
//          | (ext NAME ARG*)
//          | (not stmt) | (and stmt stmt) | (or stmt stmt) | (imp stmt stmt)
//   TERM  := "bits" | _ | (prefix _ J)
//   ARG   := "token" | _
//   SET   := (len N) | (set "bits"*) | (range M)   ; range: tokens "0".."M-1"
//
// Derivation text:
//
//   deriv := (derivation step*)
//   step  := (step stmt JUST)
//   JUST  := (axiom KIND ["witness"]) | (extra) | (hyp) | (rule NAME INDEX*)

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kolmo/bits.hpp"
#include "kolmo/complexity.hpp"
#include "kolmo/rational.hpp"

namespace kolmo {

// ---- s-expressions ---------------------------------------------------------

struct Sexpr {
  bool is_list = false;
  bool quoted = false;  // atom came from a "..." literal
  std::string atom;
  std::vector<Sexpr> items;

  static Sexpr sym(std::string s) { return Sexpr{false, false, std::move(s), {}}; }
  static Sexpr str(std::string s) { return Sexpr{false, true, std::move(s), {}}; }
  static Sexpr list(std::vector<Sexpr> v) { return Sexpr{true, false, {}, std::move(v)}; }
  friend bool operator==(const Sexpr&, const Sexpr&) = default;
};

// Throws UsageError with the byte offset on malformed input.
Sexpr parse_sexpr(std::string_view text);
// Parses a whitespace-separated sequence of expressions.
std::vector<Sexpr> parse_sexprs(std::string_view text);
std::string print(const Sexpr& s);

// ---- statements -----------------------------------------------------------

struct Term {
  bool hole = false;
  std::string text;                 // bits or ext token when not a hole
  std::optional<unsigned> prefix;  // (prefix _ j)
  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct SetDesc {
  enum class Kind { length, list, range };
  Kind kind = Kind::list;
  unsigned n = 0;  // length or range bound
  std::vector<std::string> items;

  static SetDesc of_length(unsigned n) { return {Kind::length, n, {}}; }
  static SetDesc of_range(unsigned m) { return {Kind::range, m, {}}; }
  static SetDesc of_list(std::vector<std::string> v) { return {Kind::list, 0, std::move(v)}; }
  std::uint64_t size() const;
  std::vector<std::string> elements() const;
  friend bool operator==(const SetDesc&, const SetDesc&) = default;
};

enum class Op { truth, falsity, cge, ccge, kge, nonterm, halts, frac, ext, negation, conj, disj, implies };

struct Statement {
  Op op = Op::truth;
  std::vector<Term> terms;    // cge [x], ccge [x y], kge [x], nonterm/halts [p], ext args
  std::uint64_t number = 0;   // k or t
  std::string name;           // ext
  Rational delta;             // frac
  SetDesc set;                // frac
  std::vector<Statement> kids;

  static Statement truth() { return {}; }
  static Statement falsity();
  static Statement cge(const BitString& x, std::uint64_t k);
  static Statement ccge(const BitString& x, const BitString& y, std::uint64_t k);
  static Statement kge(const BitString& x, std::uint64_t k);
  static Statement nonterm(const BitString& p);
  static Statement halts(const BitString& p, std::uint64_t t);
  static Statement frac(Rational delta, SetDesc set, Statement templ);
  static Statement ext(std::string name, std::vector<Term> args);
  static Statement negation(Statement a);
  static Statement conj(Statement a, Statement b);
  static Statement disj(Statement a, Statement b);
  static Statement implies(Statement a, Statement b);

  bool has_hole() const;
  std::string str() const;  // canonical text
  static Statement parse(std::string_view text);
  friend bool operator==(const Statement&, const Statement&) = default;
};

Term hole();
Term hole_prefix(unsigned j);
Term bits_term(const BitString& b);
Term token(std::string t);

Sexpr to_sexpr(const Statement& s);
Statement statement_from_sexpr(const Sexpr& e);

// Fills every hole of a frac template with `element` (prefix holes take its
// first j symbols).
Statement instantiate(const Statement& templ, const std::string& element);

// ---- model ----------------------------------------------------------------

// Truth of an ext atom given its arguments. Throws DomainError for arguments
// outside its domain.
using ExtEvaluator = std::function<bool(const std::vector<std::string>& args)>;

struct FinitizedModel {
  MachineConfig machine = MachineConfig::reference(Variant::plain);
  std::uint64_t t_inf = 10000;
  std::optional<ComplexityTable> plain;
  std::optional<ComplexityTable> prefix;
  std::map<BitString, ComplexityTable> conditional;  // keyed by condition
  std::map<std::string, ExtEvaluator> ext;
  // Replaces plain C values for individual strings (admissible variants).
  std::map<BitString, unsigned> plain_override;

  static FinitizedModel reference(unsigned N, unsigned L, std::uint64_t t_inf);
};

// Throws UsageError on holes, DomainError("out_of_limits") naming the atom.
bool eval_statement(const Statement& s, const FinitizedModel& m);

// ---- theories and derivations ---------------------------------------------

inline constexpr std::string_view kBaseTheory = "finitized-base";

struct Theory {
  std::string base = std::string(kBaseTheory);
  std::vector<Statement> extras;  // duplicate-free

  bool contains(const Statement& s) const;
  // Copy with s appended unless already present.
  Theory with(const Statement& s) const;
};

bool semantic_entails(const Theory& t, const Statement& phi, const FinitizedModel& m);

enum class Justification { axiom, extra, hyp, rule };

struct Step {
  Statement statement;
  Justification just = Justification::axiom;
  // axiom: trivial | c_upper | halting | frac_count | decide
  // rule:  mp | and_i | and_e | or_i | weaken | imp_i | disj_from_frac
  std::string name;
  std::vector<std::size_t> premises;
  std::optional<BitString> witness;  // c_upper
  friend bool operator==(const Step&, const Step&) = default;
};

struct Derivation {
  std::vector<Step> steps;
  const Statement& conclusion() const { return steps.back().statement; }
  std::size_t push(Step s);  // returns the new index
  // Appends `other`, shifting its premise indices. Returns the offset.
  std::size_t splice(const Derivation& other);
  std::string str() const;      // s-expression
  std::string listing() const;  // numbered steps
  static Derivation parse(std::string_view text);
  friend bool operator==(const Derivation&, const Derivation&) = default;
};

Sexpr to_sexpr(const Derivation& d);
Derivation derivation_from_sexpr(const Sexpr& e);

struct CheckResult {
  bool ok = false;
  std::size_t bad_step = 0;  // index of the first invalid step when !ok
  std::string reason;
};

// Axioms are checked by computation in `m`; extras must be in `t`; hyp steps
// open an assumption closed only by imp_i. The conclusion must not rest on
// open assumptions.
CheckResult check_derivation(const Derivation& d, const Theory& t, const FinitizedModel& m);

// Axiom step for s if one of the axiom kinds certifies it in m.
std::optional<Step> certify_axiom(const Statement& s, const FinitizedModel& m);

struct FracCertificate {
  Step step;  // axiom frac_count
  std::uint64_t false_count = 0;
  std::uint64_t set_size = 0;
};

// Exhaustive count of falsified instances; DomainError("certification_failed")
// naming the count when it exceeds delta * |A|.
FracCertificate frac_forall_certify(const Rational& delta, const SetDesc& set, const Statement& templ,
                                    const FinitizedModel& m);

// Template "every nonempty prefix x' of _ has K(x') >= |x'| - c" for
// length-N strings; bounds below zero are clamped to zero.
Statement all_prefix_incompressible(unsigned N, unsigned c);

}  // namespace kolmo
