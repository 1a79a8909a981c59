#include "kolmo/logic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "kolmo/error.hpp"

namespace kolmo {

// ---- s-expressions ---------------------------------------------------------

namespace {

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  Sexpr read() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      ++pos_;
      Sexpr out = Sexpr::list({});
      for (;;) {
        skip();
        if (pos_ >= text_.size()) fail("unclosed '('");
        if (text_[pos_] == ')') {
          ++pos_;
          return out;
        }
        out.items.push_back(read());
      }
    }
    if (c == '"') {
      ++pos_;
      std::string s;
      for (;;) {
        if (pos_ >= text_.size()) fail("unterminated string");
        const char d = text_[pos_++];
        if (d == '"') return Sexpr::str(std::move(s));
        if (d == '\\') {
          if (pos_ >= text_.size()) fail("unterminated string");
          s.push_back(text_[pos_++]);
        } else {
          s.push_back(d);
        }
      }
    }
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != '"' && text_[pos_] != ';') {
      ++pos_;
    }
    return Sexpr::sym(std::string(text_.substr(start, pos_ - start)));
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  [[noreturn]] void fail(const std::string& what) {
    throw UsageError("s-expression syntax error at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_to(const Sexpr& s, std::string& out) {
  if (s.is_list) {
    out.push_back('(');
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      if (i) out.push_back(' ');
      print_to(s.items[i], out);
    }
    out.push_back(')');
  } else if (s.quoted) {
    out.push_back('"');
    for (char c : s.atom) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
  } else {
    out += s.atom;
  }
}

}  // namespace

Sexpr parse_sexpr(std::string_view text) {
  SexprReader r(text);
  Sexpr e = r.read();
  if (!r.at_end()) throw UsageError("trailing input after s-expression");
  return e;
}

std::vector<Sexpr> parse_sexprs(std::string_view text) {
  SexprReader r(text);
  std::vector<Sexpr> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

std::string print(const Sexpr& s) {
  std::string out;
  print_to(s, out);
  return out;
}

// ---- statements -----------------------------------------------------------

namespace {

std::uint64_t parse_count(const Sexpr& e, const char* what) {
  if (e.is_list || e.quoted) throw UsageError(std::string("expected a number for ") + what);
  std::uint64_t v = 0;
  const auto* end = e.atom.data() + e.atom.size();
  const auto [p, ec] = std::from_chars(e.atom.data(), end, v);
  if (ec != std::errc() || p != end || e.atom.empty()) {
    throw UsageError(std::string("bad number '") + e.atom + "' for " + what);
  }
  return v;
}

void require_bits(const std::string& s) {
  for (char c : s) {
    if (c != '0' && c != '1') throw UsageError("'" + s + "' is not a bit string");
  }
}

Sexpr term_sexpr(const Term& t) {
  if (!t.hole) return Sexpr::str(t.text);
  if (t.prefix) return Sexpr::list({Sexpr::sym("prefix"), Sexpr::sym("_"), Sexpr::sym(std::to_string(*t.prefix))});
  return Sexpr::sym("_");
}

Term term_from(const Sexpr& e, bool bits) {
  if (!e.is_list && !e.quoted && e.atom == "_") return hole();
  if (e.is_list) {
    if (bits && e.items.size() == 3 && !e.items[0].is_list && e.items[0].atom == "prefix" &&
        !e.items[1].is_list && e.items[1].atom == "_") {
      return hole_prefix(static_cast<unsigned>(parse_count(e.items[2], "prefix length")));
    }
    throw UsageError("bad term " + print(e));
  }
  if (!e.quoted) throw UsageError("strings must be quoted: " + e.atom);
  if (bits) require_bits(e.atom);
  return Term{false, e.atom, std::nullopt};
}

bool template_ok(const Statement& s, bool inside) {
  if (s.op == Op::frac && inside) return false;
  for (const auto& k : s.kids) {
    if (!template_ok(k, inside || s.op == Op::frac)) return false;
  }
  return true;
}

bool any_hole(const Statement& s) {
  for (const auto& t : s.terms) {
    if (t.hole) return true;
  }
  if (s.op == Op::frac) return false;
  return std::any_of(s.kids.begin(), s.kids.end(), any_hole);
}

BitString term_bits(const Term& t) {
  if (t.hole) throw UsageError("statement has an unfilled hole");
  return BitString::parse(t.text);
}

const char* op_name(Op op) {
  switch (op) {
    case Op::truth: return "true";
    case Op::falsity: return "false";
    case Op::cge: return "cge";
    case Op::ccge: return "ccge";
    case Op::kge: return "kge";
    case Op::nonterm: return "nonterm";
    case Op::halts: return "halts";
    case Op::frac: return "frac";
    case Op::ext: return "ext";
    case Op::negation: return "not";
    case Op::conj: return "and";
    case Op::disj: return "or";
    case Op::implies: return "imp";
  }
  return "?";
}

}  // namespace

Term hole() { return Term{true, {}, std::nullopt}; }
Term hole_prefix(unsigned j) { return Term{true, {}, j}; }
Term bits_term(const BitString& b) { return Term{false, b.str(), std::nullopt}; }
Term token(std::string t) { return Term{false, std::move(t), std::nullopt}; }

std::uint64_t SetDesc::size() const {
  switch (kind) {
    case Kind::length: return std::uint64_t{1} << n;
    case Kind::range: return n;
    case Kind::list: return items.size();
  }
  return 0;
}

std::vector<std::string> SetDesc::elements() const {
  std::vector<std::string> out;
  switch (kind) {
    case Kind::length:
      if (n > 20) throw UsageError("set (len " + std::to_string(n) + ") is too large to enumerate");
      for (std::uint64_t i = 0; i < size(); ++i) out.push_back(BitString::from_word(i, n).str());
      break;
    case Kind::range:
      for (unsigned i = 0; i < n; ++i) out.push_back(std::to_string(i));
      break;
    case Kind::list:
      out = items;
      break;
  }
  return out;
}

Statement Statement::falsity() {
  Statement s;
  s.op = Op::falsity;
  return s;
}

Statement Statement::cge(const BitString& x, std::uint64_t k) {
  Statement s;
  s.op = Op::cge;
  s.terms = {bits_term(x)};
  s.number = k;
  return s;
}

Statement Statement::ccge(const BitString& x, const BitString& y, std::uint64_t k) {
  Statement s;
  s.op = Op::ccge;
  s.terms = {bits_term(x), bits_term(y)};
  s.number = k;
  return s;
}

Statement Statement::kge(const BitString& x, std::uint64_t k) {
  Statement s = cge(x, k);
  s.op = Op::kge;
  return s;
}

Statement Statement::nonterm(const BitString& p) {
  Statement s;
  s.op = Op::nonterm;
  s.terms = {bits_term(p)};
  return s;
}

Statement Statement::halts(const BitString& p, std::uint64_t t) {
  Statement s;
  s.op = Op::halts;
  s.terms = {bits_term(p)};
  s.number = t;
  return s;
}

Statement Statement::frac(Rational delta, SetDesc set, Statement templ) {
  if (delta < 0 || delta > 1) throw UsageError("frac delta must lie in [0, 1], got " + to_string(delta));
  if (!any_hole(templ)) throw UsageError("frac template has no hole: " + templ.str());
  if (!template_ok(templ, true)) throw UsageError("frac templates cannot nest frac");
  if (set.kind == SetDesc::Kind::length && set.n > 20) throw UsageError("frac set (len n) needs n <= 20");
  if (set.kind == SetDesc::Kind::list) {
    for (const auto& it : set.items) require_bits(it);
    auto sorted = set.items;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw UsageError("frac set lists an element twice");
    }
  }
  if (set.size() == 0) throw UsageError("frac set is empty");
  Statement s;
  s.op = Op::frac;
  s.delta = std::move(delta);
  s.set = std::move(set);
  s.kids = {std::move(templ)};
  return s;
}

Statement Statement::ext(std::string name, std::vector<Term> args) {
  if (name.empty()) throw UsageError("ext atom needs a name");
  for (const auto& a : args) {
    if (a.prefix) throw UsageError("ext arguments take plain holes only");
  }
  Statement s;
  s.op = Op::ext;
  s.name = std::move(name);
  s.terms = std::move(args);
  return s;
}

Statement Statement::negation(Statement a) {
  Statement s;
  s.op = Op::negation;
  s.kids = {std::move(a)};
  return s;
}

Statement Statement::conj(Statement a, Statement b) {
  Statement s;
  s.op = Op::conj;
  s.kids = {std::move(a), std::move(b)};
  return s;
}

Statement Statement::disj(Statement a, Statement b) {
  Statement s = conj(std::move(a), std::move(b));
  s.op = Op::disj;
  return s;
}

Statement Statement::implies(Statement a, Statement b) {
  Statement s = conj(std::move(a), std::move(b));
  s.op = Op::implies;
  return s;
}

bool Statement::has_hole() const { return any_hole(*this); }

std::string Statement::str() const { return print(to_sexpr(*this)); }

Statement Statement::parse(std::string_view text) { return statement_from_sexpr(parse_sexpr(text)); }

Sexpr to_sexpr(const Statement& s) {
  std::vector<Sexpr> v{Sexpr::sym(op_name(s.op))};
  switch (s.op) {
    case Op::truth:
    case Op::falsity:
      break;
    case Op::cge:
    case Op::ccge:
    case Op::kge:
    case Op::halts:
      for (const auto& t : s.terms) v.push_back(term_sexpr(t));
      v.push_back(Sexpr::sym(std::to_string(s.number)));
      break;
    case Op::nonterm:
      v.push_back(term_sexpr(s.terms[0]));
      break;
    case Op::frac: {
      v.push_back(Sexpr::sym(to_string(s.delta)));
      Sexpr set;
      switch (s.set.kind) {
        case SetDesc::Kind::length:
          set = Sexpr::list({Sexpr::sym("len"), Sexpr::sym(std::to_string(s.set.n))});
          break;
        case SetDesc::Kind::range:
          set = Sexpr::list({Sexpr::sym("range"), Sexpr::sym(std::to_string(s.set.n))});
          break;
        case SetDesc::Kind::list:
          set = Sexpr::list({Sexpr::sym("set")});
          for (const auto& it : s.set.items) set.items.push_back(Sexpr::str(it));
          break;
      }
      v.push_back(std::move(set));
      v.push_back(to_sexpr(s.kids[0]));
      break;
    }
    case Op::ext:
      v.push_back(Sexpr::sym(s.name));
      for (const auto& t : s.terms) v.push_back(term_sexpr(t));
      break;
    case Op::negation:
    case Op::conj:
    case Op::disj:
    case Op::implies:
      for (const auto& k : s.kids) v.push_back(to_sexpr(k));
      break;
  }
  return Sexpr::list(std::move(v));
}

Statement statement_from_sexpr(const Sexpr& e) {
  if (!e.is_list || e.items.empty() || e.items[0].is_list || e.items[0].quoted) {
    throw UsageError("expected a statement, got " + print(e));
  }
  const std::string& head = e.items[0].atom;
  const auto& it = e.items;
  auto arity = [&](std::size_t n) {
    if (it.size() != n + 1) throw UsageError("'" + head + "' takes " + std::to_string(n) + " arguments: " + print(e));
  };
  Statement s;
  if (head == "true") {
    arity(0);
  } else if (head == "false") {
    arity(0);
    s.op = Op::falsity;
  } else if (head == "cge" || head == "kge") {
    arity(2);
    s.op = head == "cge" ? Op::cge : Op::kge;
    s.terms = {term_from(it[1], true)};
    s.number = parse_count(it[2], "k");
  } else if (head == "ccge") {
    arity(3);
    s.op = Op::ccge;
    s.terms = {term_from(it[1], true), term_from(it[2], true)};
    s.number = parse_count(it[3], "k");
  } else if (head == "nonterm") {
    arity(1);
    s.op = Op::nonterm;
    s.terms = {term_from(it[1], true)};
  } else if (head == "halts") {
    arity(2);
    s.op = Op::halts;
    s.terms = {term_from(it[1], true)};
    s.number = parse_count(it[2], "t");
  } else if (head == "frac") {
    arity(3);
    if (it[1].is_list || it[1].quoted) throw UsageError("frac delta must be a rational");
    const Sexpr& set = it[2];
    if (!set.is_list || set.items.empty() || set.items[0].is_list) throw UsageError("bad frac set " + print(set));
    SetDesc d;
    const std::string& kind = set.items[0].atom;
    if (kind == "len" || kind == "range") {
      if (set.items.size() != 2) throw UsageError("bad frac set " + print(set));
      const auto n = parse_count(set.items[1], kind.c_str());
      if ((kind == "len" && n > 20) || n > 1'000'000) throw UsageError("frac set too large: " + print(set));
      d = kind == "len" ? SetDesc::of_length(static_cast<unsigned>(n)) : SetDesc::of_range(static_cast<unsigned>(n));
    } else if (kind == "set") {
      std::vector<std::string> items;
      for (std::size_t i = 1; i < set.items.size(); ++i) {
        if (!set.items[i].quoted) throw UsageError("set elements must be quoted");
        items.push_back(set.items[i].atom);
      }
      d = SetDesc::of_list(std::move(items));
    } else {
      throw UsageError("unknown set kind '" + kind + "'");
    }
    return Statement::frac(parse_rational(it[1].atom), std::move(d), statement_from_sexpr(it[3]));
  } else if (head == "ext") {
    if (it.size() < 2 || it[1].is_list || it[1].quoted) throw UsageError("ext needs a name: " + print(e));
    std::vector<Term> args;
    for (std::size_t i = 2; i < it.size(); ++i) args.push_back(term_from(it[i], false));
    return Statement::ext(it[1].atom, std::move(args));
  } else if (head == "not") {
    arity(1);
    return Statement::negation(statement_from_sexpr(it[1]));
  } else if (head == "and" || head == "or" || head == "imp") {
    arity(2);
    s.op = head == "and" ? Op::conj : head == "or" ? Op::disj : Op::implies;
    s.kids = {statement_from_sexpr(it[1]), statement_from_sexpr(it[2])};
  } else {
    throw UsageError("unknown statement '" + head + "'");
  }
  return s;
}

Statement instantiate(const Statement& templ, const std::string& element) {
  Statement s = templ;
  for (auto& t : s.terms) {
    if (!t.hole) continue;
    std::string v = element;
    if (t.prefix) {
      if (*t.prefix > v.size()) {
        throw UsageError("prefix " + std::to_string(*t.prefix) + " of '" + element + "' is out of range");
      }
      v.resize(*t.prefix);
    }
    if (s.op != Op::ext) require_bits(v);
    t = Term{false, std::move(v), std::nullopt};
  }
  if (s.op != Op::frac) {
    for (auto& k : s.kids) k = instantiate(k, element);
  }
  return s;
}

// ---- model ----------------------------------------------------------------

FinitizedModel FinitizedModel::reference(unsigned N, unsigned L, std::uint64_t t_inf) {
  FinitizedModel m;
  m.t_inf = t_inf;
  m.plain = ComplexityTable::build(m.machine, N, L, t_inf);
  unsigned np = N;
  while (np > 0 && np + literal_overhead(Variant::prefix, np) > L) --np;
  m.prefix = prefix_table(MachineConfig::reference(Variant::prefix), np, L, t_inf);
  return m;
}

namespace {

[[noreturn]] void out_of_limits(const Statement& s, const std::string& why) {
  throw DomainError("out_of_limits", "atom " + s.str() + " is outside the model: " + why);
}

bool value_at_least(const Statement& s, const ComplexityTable& t, const BitString& x) {
  if (!t.covers(x)) out_of_limits(s, "string longer than N = " + std::to_string(t.max_string_length()));
  const auto v = t.value(x);
  if (v) return *v >= s.number;
  // Nothing of length <= L prints x, so the value exceeds L.
  if (s.number <= t.max_program_length() + 1) return true;
  out_of_limits(s, "value above L = " + std::to_string(t.max_program_length()) + " is unknown");
}

RunResult run_checked(const Statement& s, const FinitizedModel& m, const BitString& p, std::uint64_t budget) {
  if (p.size() > m.machine.max_program_length) out_of_limits(s, "program longer than max_program_length");
  if (budget > m.machine.max_steps_hard) out_of_limits(s, "step bound above max_steps_hard");
  return run_plain(m.machine, p, budget);
}

std::uint64_t count_false(const Statement& frac, const FinitizedModel& m) {
  std::uint64_t bad = 0;
  for (const auto& a : frac.set.elements()) {
    if (!eval_statement(instantiate(frac.kids[0], a), m)) ++bad;
  }
  return bad;
}

bool frac_holds(const Rational& delta, std::uint64_t bad, std::uint64_t size) {
  return Rational(bad) <= delta * Rational(size);
}

}  // namespace

bool eval_statement(const Statement& s, const FinitizedModel& m) {
  if (s.has_hole()) throw UsageError("cannot evaluate a statement with holes: " + s.str());
  switch (s.op) {
    case Op::truth: return true;
    case Op::falsity: return false;
    case Op::cge: {
      const auto x = term_bits(s.terms[0]);
      if (auto it = m.plain_override.find(x); it != m.plain_override.end()) return it->second >= s.number;
      if (!m.plain) out_of_limits(s, "no plain table");
      return value_at_least(s, *m.plain, x);
    }
    case Op::ccge: {
      const auto y = term_bits(s.terms[1]);
      const auto it = m.conditional.find(y);
      if (it == m.conditional.end()) out_of_limits(s, "no conditional table for this condition");
      return value_at_least(s, it->second, term_bits(s.terms[0]));
    }
    case Op::kge:
      if (!m.prefix) out_of_limits(s, "no prefix table");
      return value_at_least(s, *m.prefix, term_bits(s.terms[0]));
    case Op::nonterm: return !run_checked(s, m, term_bits(s.terms[0]), m.t_inf).halted();
    case Op::halts: return run_checked(s, m, term_bits(s.terms[0]), s.number).halted();
    case Op::frac: return frac_holds(s.delta, count_false(s, m), s.set.size());
    case Op::ext: {
      const auto it = m.ext.find(s.name);
      if (it == m.ext.end()) out_of_limits(s, "no evaluator for '" + s.name + "'");
      std::vector<std::string> args;
      for (const auto& t : s.terms) args.push_back(t.text);
      return it->second(args);
    }
    case Op::negation: return !eval_statement(s.kids[0], m);
    case Op::conj: return eval_statement(s.kids[0], m) && eval_statement(s.kids[1], m);
    case Op::disj: return eval_statement(s.kids[0], m) || eval_statement(s.kids[1], m);
    case Op::implies: return !eval_statement(s.kids[0], m) || eval_statement(s.kids[1], m);
  }
  throw InternalError("unhandled statement kind");
}

// ---- theories -------------------------------------------------------------

bool Theory::contains(const Statement& s) const { return std::find(extras.begin(), extras.end(), s) != extras.end(); }

Theory Theory::with(const Statement& s) const {
  Theory t = *this;
  if (!contains(s)) t.extras.push_back(s);
  return t;
}

bool semantic_entails(const Theory& t, const Statement& phi, const FinitizedModel& m) {
  if (t.base != kBaseTheory) throw UsageError("unknown base theory '" + t.base + "'");
  for (const auto& e : t.extras) {
    if (!eval_statement(e, m)) return true;
  }
  return eval_statement(phi, m);
}

// ---- derivations ----------------------------------------------------------

std::size_t Derivation::push(Step s) {
  steps.push_back(std::move(s));
  return steps.size() - 1;
}

std::size_t Derivation::splice(const Derivation& other) {
  const auto off = steps.size();
  for (Step s : other.steps) {
    for (auto& p : s.premises) p += off;
    steps.push_back(std::move(s));
  }
  return off;
}

namespace {

const char* just_name(Justification j) {
  switch (j) {
    case Justification::axiom: return "axiom";
    case Justification::extra: return "extra";
    case Justification::hyp: return "hyp";
    case Justification::rule: return "rule";
  }
  return "?";
}

Sexpr just_sexpr(const Step& s) {
  std::vector<Sexpr> v{Sexpr::sym(just_name(s.just))};
  if (s.just == Justification::axiom || s.just == Justification::rule) v.push_back(Sexpr::sym(s.name));
  if (s.witness) v.push_back(Sexpr::str(s.witness->str()));
  for (auto p : s.premises) v.push_back(Sexpr::sym(std::to_string(p)));
  return Sexpr::list(std::move(v));
}

}  // namespace

Sexpr to_sexpr(const Derivation& d) {
  std::vector<Sexpr> v{Sexpr::sym("derivation")};
  for (const auto& s : d.steps) v.push_back(Sexpr::list({Sexpr::sym("step"), to_sexpr(s.statement), just_sexpr(s)}));
  return Sexpr::list(std::move(v));
}

Derivation derivation_from_sexpr(const Sexpr& e) {
  if (!e.is_list || e.items.empty() || e.items[0].atom != "derivation") throw UsageError("expected (derivation ...)");
  Derivation d;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const Sexpr& st = e.items[i];
    if (!st.is_list || st.items.size() != 3 || st.items[0].atom != "step" || !st.items[2].is_list ||
        st.items[2].items.empty()) {
      throw UsageError("bad derivation step " + print(st));
    }
    Step s;
    s.statement = statement_from_sexpr(st.items[1]);
    const auto& j = st.items[2].items;
    const std::string& kind = j[0].atom;
    std::size_t next = 1;
    if (kind == "axiom" || kind == "rule") {
      s.just = kind == "axiom" ? Justification::axiom : Justification::rule;
      if (j.size() < 2 || j[1].is_list) throw UsageError(kind + " needs a name");
      s.name = j[1].atom;
      next = 2;
    } else if (kind == "extra") {
      s.just = Justification::extra;
    } else if (kind == "hyp") {
      s.just = Justification::hyp;
    } else {
      throw UsageError("unknown justification '" + kind + "'");
    }
    for (; next < j.size(); ++next) {
      if (j[next].quoted) {
        if (s.witness) throw UsageError("more than one witness");
        s.witness = BitString::parse(j[next].atom);
      } else {
        s.premises.push_back(parse_count(j[next], "premise index"));
      }
    }
    d.steps.push_back(std::move(s));
  }
  return d;
}

std::string Derivation::str() const { return print(to_sexpr(*this)); }

std::string Derivation::listing() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out += std::to_string(i) + ". " + steps[i].statement.str() + "  " + print(just_sexpr(steps[i])) + "\n";
  }
  return out;
}

Derivation Derivation::parse(std::string_view text) { return derivation_from_sexpr(parse_sexpr(text)); }

namespace {

bool decidable(const Statement& s) {
  switch (s.op) {
    case Op::truth:
    case Op::falsity:
    case Op::ext:
    case Op::halts:
      return true;
    case Op::negation:
    case Op::conj:
    case Op::disj:
    case Op::implies:
      return std::all_of(s.kids.begin(), s.kids.end(), decidable);
    default:
      return false;
  }
}

// Empty string when the axiom checks, else the reason.
std::string check_axiom(const Step& st, const FinitizedModel& m) {
  const Statement& s = st.statement;
  if (s.has_hole()) return "axiom has holes";
  if (st.name == "trivial") {
    if (s.op == Op::truth) return {};
    if ((s.op == Op::cge || s.op == Op::ccge || s.op == Op::kge) && s.number == 0) return {};
    return "not a trivial fact";
  }
  if (st.name == "halting") {
    if (s.op != Op::halts) return "halting axiom must be (halts p t)";
    return eval_statement(s, m) ? std::string() : "program does not halt within t";
  }
  if (st.name == "frac_count") {
    if (s.op != Op::frac) return "frac_count axiom must be a frac statement";
    return eval_statement(s, m) ? std::string() : "fraction bound fails";
  }
  if (st.name == "decide") {
    if (!decidable(s)) return "decide covers ext/halts combinations only";
    return eval_statement(s, m) ? std::string() : "evaluates to false";
  }
  if (st.name == "c_upper") {
    if (s.op != Op::negation || (s.kids[0].op != Op::cge && s.kids[0].op != Op::kge && s.kids[0].op != Op::ccge)) {
      return "c_upper axiom must negate cge, kge or ccge";
    }
    if (!st.witness) return "c_upper needs a witness program";
    const Statement& a = s.kids[0];
    if (st.witness->size() >= a.number) return "witness is not shorter than k";
    const auto x = term_bits(a.terms[0]);
    RunResult r;
    if (a.op == Op::cge) {
      r = run_plain(m.machine, *st.witness, m.t_inf);
    } else if (a.op == Op::kge) {
      const auto cfg = m.prefix ? m.prefix->machine() : MachineConfig::reference(Variant::prefix);
      r = run_prefix(cfg, *st.witness, m.t_inf);
      if (r.halted() && *r.bits_consumed != st.witness->size()) return "prefix witness does not consume itself";
    } else {
      r = run_conditional(MachineConfig::reference(Variant::conditional), *st.witness, term_bits(a.terms[1]), m.t_inf);
    }
    if (!r.halted() || r.output != x) return "witness does not print x within T_inf";
    return {};
  }
  return "unknown axiom kind '" + st.name + "'";
}

bool weakens(const Statement& from, const Statement& to) {
  if (from.op != to.op) return false;
  switch (from.op) {
    case Op::cge:
    case Op::ccge:
    case Op::kge:
      return from.terms == to.terms && to.number <= from.number;
    case Op::halts:
      return from.terms == to.terms && to.number >= from.number;
    case Op::frac:
      return from.set == to.set && from.kids == to.kids && to.delta >= from.delta;
    default:
      return false;
  }
}

}  // namespace

CheckResult check_derivation(const Derivation& d, const Theory& t, const FinitizedModel& m) {
  if (t.base != kBaseTheory) throw UsageError("unknown base theory '" + t.base + "'");
  if (d.steps.empty()) return {false, 0, "empty derivation"};
  std::vector<std::set<std::string>> open(d.steps.size());
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const Step& st = d.steps[i];
    const Statement& s = st.statement;
    auto bad = [&](std::string why) { return CheckResult{false, i, std::move(why)}; };
    for (auto p : st.premises) {
      if (p >= i) return bad("premise " + std::to_string(p) + " does not precede the step");
    }
    auto prem = [&](std::size_t k) -> const Statement& { return d.steps[st.premises[k]].statement; };
    auto inherit = [&] {
      for (auto p : st.premises) open[i].insert(open[p].begin(), open[p].end());
    };
    switch (st.just) {
      case Justification::axiom: {
        if (!st.premises.empty()) return bad("axioms take no premises");
        std::string why;
        try {
          why = check_axiom(st, m);
        } catch (const DomainError& e) {
          why = e.what();
        }
        if (!why.empty()) return bad(why);
        break;
      }
      case Justification::extra:
        if (!t.contains(s)) return bad("not an extra of the theory");
        break;
      case Justification::hyp:
        open[i].insert(s.str());
        break;
      case Justification::rule: {
        const auto n = st.premises.size();
        if (st.name == "mp") {
          if (n != 2 || prem(1) != Statement::implies(prem(0), s)) return bad("mp needs A and (imp A B)");
        } else if (st.name == "and_i") {
          if (n != 2 || s != Statement::conj(prem(0), prem(1))) return bad("and_i needs A and B");
        } else if (st.name == "and_e") {
          if (n != 1 || prem(0).op != Op::conj || (prem(0).kids[0] != s && prem(0).kids[1] != s)) {
            return bad("and_e needs a conjunction containing the statement");
          }
        } else if (st.name == "or_i") {
          if (n != 1 || s.op != Op::disj || (s.kids[0] != prem(0) && s.kids[1] != prem(0))) {
            return bad("or_i needs one side of the disjunction");
          }
        } else if (st.name == "weaken") {
          if (n != 1 || !weakens(prem(0), s)) return bad("not a weakening of the premise");
        } else if (st.name == "imp_i") {
          if (n != 1 || s.op != Op::implies || s.kids[1] != prem(0)) return bad("imp_i needs the consequent");
          inherit();
          open[i].erase(s.kids[0].str());
          continue;
        } else if (st.name == "disj_from_frac") {
          if (n < 1 || prem(0).op != Op::frac) return bad("disj_from_frac needs a frac premise first");
          const Statement& f = prem(0);
          std::set<std::string> wanted;
          for (std::size_t k = 1; k < n; ++k) {
            if (prem(k).op != Op::implies || prem(k).kids[1] != s) return bad("premise is not (imp R(a) phi)");
            wanted.insert(prem(k).kids[0].str());
          }
          // Elements whose instances coincide are covered together.
          std::uint64_t covered = 0;
          std::set<std::string> matched;
          for (const auto& a : f.set.elements()) {
            const auto inst = instantiate(f.kids[0], a).str();
            if (wanted.count(inst)) {
              ++covered;
              matched.insert(inst);
            }
          }
          if (matched.size() != wanted.size()) return bad("an antecedent is not an instance of the template");
          if (!(Rational(covered) > f.delta * Rational(f.set.size()))) {
            return bad("covers " + std::to_string(covered) + " of " + std::to_string(f.set.size()) +
                       " elements, needs more than " + to_string(f.delta * Rational(f.set.size())));
          }
        } else {
          return bad("unknown rule '" + st.name + "'");
        }
        inherit();
        break;
      }
    }
  }
  if (!open.back().empty()) return {false, d.steps.size() - 1, "conclusion rests on open hypotheses"};
  return {true, 0, {}};
}

std::optional<Step> certify_axiom(const Statement& s, const FinitizedModel& m) {
  if (s.has_hole()) return std::nullopt;
  Step st;
  st.statement = s;
  auto try_kind = [&](const char* kind) {
    st.name = kind;
    try {
      return check_axiom(st, m).empty();
    } catch (const DomainError&) {
      return false;
    }
  };
  if (s.op == Op::negation && s.kids[0].op == Op::cge && m.plain) {
    const auto x = term_bits(s.kids[0].terms[0]);
    if (m.plain->covers(x) && m.plain->entry(x).value) {
      st.witness = m.plain->entry(x).witness;
      if (try_kind("c_upper")) return st;
      st.witness.reset();
    }
  }
  if (s.op == Op::negation && s.kids[0].op == Op::kge && m.prefix) {
    const auto x = term_bits(s.kids[0].terms[0]);
    if (m.prefix->covers(x) && m.prefix->entry(x).value) {
      st.witness = m.prefix->entry(x).witness;
      if (try_kind("c_upper")) return st;
      st.witness.reset();
    }
  }
  for (const char* kind : {"trivial", "halting", "decide", "frac_count"}) {
    if (try_kind(kind)) return st;
  }
  return std::nullopt;
}

FracCertificate frac_forall_certify(const Rational& delta, const SetDesc& set, const Statement& templ,
                                    const FinitizedModel& m) {
  const Statement f = Statement::frac(delta, set, templ);
  FracCertificate c;
  c.false_count = count_false(f, m);
  c.set_size = set.size();
  if (!frac_holds(delta, c.false_count, c.set_size)) {
    throw DomainError("certification_failed", std::to_string(c.false_count) + " of " + std::to_string(c.set_size) +
                                                  " instances are false, more than " + to_string(delta) +
                                                  " of the set: " + f.str());
  }
  c.step.statement = f;
  c.step.name = "frac_count";
  return c;
}

Statement all_prefix_incompressible(unsigned N, unsigned c) {
  if (N == 0) throw UsageError("all_prefix_incompressible needs N >= 1");
  auto component = [&](unsigned j) {
    Statement s;
    s.op = Op::kge;
    s.terms = {hole_prefix(j)};
    s.number = j > c ? j - c : 0;
    return s;
  };
  Statement r = component(N);
  for (unsigned j = N - 1; j >= 1; --j) r = Statement::conj(component(j), std::move(r));
  return r;
}

}  // namespace kolmo
