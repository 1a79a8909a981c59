#include "kolmo/sumcheck.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

// ---- QBF text --------------------------------------------------------------

struct Token {
  enum class Kind { ident, forall, exists, neg, conj, disj, lparen, rparen, dot, zero, one, end };
  Kind kind = Kind::end;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
      Token t;
      t.pos = i_;
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      if (match("\xE2\x88\x80")) {
        t.kind = Token::Kind::forall;
      } else if (match("\xE2\x88\x83")) {
        t.kind = Token::Kind::exists;
      } else if (match("\xE2\x88\xA7")) {
        t.kind = Token::Kind::conj;
      } else if (match("\xE2\x88\xA8")) {
        t.kind = Token::Kind::disj;
      } else if (match("\xC2\xAC")) {
        t.kind = Token::Kind::neg;
      } else {
        const char c = s_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          std::size_t j = i_;
          while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
          std::string word(s_.substr(i_, j - i_));
          i_ = j;
          if (word == "forall" || word == "exists") {
            t.kind = word == "forall" ? Token::Kind::forall : Token::Kind::exists;
          } else if (word.rfind("forall_", 0) == 0 || word.rfind("exists_", 0) == 0) {
            t.kind = word[0] == 'f' ? Token::Kind::forall : Token::Kind::exists;
            out.push_back(t);
            Token v;
            v.kind = Token::Kind::ident;
            v.text = word.substr(7);
            v.pos = t.pos + 7;
            if (v.text.empty()) throw UsageError("qbf: missing variable at offset " + std::to_string(v.pos));
            out.push_back(v);
            continue;
          } else if (word == "not") {
            t.kind = Token::Kind::neg;
          } else if (word == "and") {
            t.kind = Token::Kind::conj;
          } else if (word == "or") {
            t.kind = Token::Kind::disj;
          } else {
            t.kind = Token::Kind::ident;
            t.text = word;
          }
          out.push_back(t);
          continue;
        }
        ++i_;
        switch (c) {
          case '!':
          case '~': t.kind = Token::Kind::neg; break;
          case '&': t.kind = Token::Kind::conj; break;
          case '|': t.kind = Token::Kind::disj; break;
          case '(': t.kind = Token::Kind::lparen; break;
          case ')': t.kind = Token::Kind::rparen; break;
          case '.': t.kind = Token::Kind::dot; break;
          case '0': t.kind = Token::Kind::zero; break;
          case '1': t.kind = Token::Kind::one; break;
          default:
            throw UsageError("qbf: unexpected character at offset " + std::to_string(t.pos));
        }
      }
      out.push_back(t);
    }
  }

 private:
  bool match(std::string_view lit) {
    if (s_.substr(i_, lit.size()) != lit) return false;
    i_ += lit.size();
    return true;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Qbf qbf() {
    Qbf q;
    while (peek().kind == Token::Kind::forall || peek().kind == Token::Kind::exists) {
      Quantifier qu;
      qu.universal = next().kind == Token::Kind::forall;
      const Token& v = next();
      if (v.kind != Token::Kind::ident) fail("expected variable", v);
      qu.var = v.text;
      if (peek().kind == Token::Kind::dot) next();
      q.prefix.push_back(qu);
    }
    q.matrix = expr();
    if (peek().kind != Token::Kind::end) fail("trailing input", peek());
    return q;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  const Token& next() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }
  [[noreturn]] static void fail(const std::string& what, const Token& t) {
    throw UsageError("qbf: " + what + " at offset " + std::to_string(t.pos));
  }

  Formula expr() {
    Formula f = term();
    while (peek().kind == Token::Kind::disj) {
      next();
      f = Formula{Formula::Kind::disj, {}, false, {std::move(f), term()}};
    }
    return f;
  }

  Formula term() {
    Formula f = unary();
    while (peek().kind == Token::Kind::conj) {
      next();
      f = Formula{Formula::Kind::conj, {}, false, {std::move(f), unary()}};
    }
    return f;
  }

  Formula unary() {
    const Token& t = next();
    switch (t.kind) {
      case Token::Kind::neg: return Formula{Formula::Kind::negation, {}, false, {unary()}};
      case Token::Kind::ident: return Formula{Formula::Kind::var, t.text, false, {}};
      case Token::Kind::zero: return Formula{Formula::Kind::constant, {}, false, {}};
      case Token::Kind::one: return Formula{Formula::Kind::constant, {}, true, {}};
      case Token::Kind::lparen: {
        Formula f = expr();
        const Token& close = next();
        if (close.kind != Token::Kind::rparen) fail("expected ')'", close);
        return f;
      }
      default: fail("expected formula", t);
    }
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
};

void collect_vars(const Formula& f, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::var) out.insert(f.name);
  for (const auto& k : f.kids) collect_vars(k, out);
}

std::string print_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::var: return f.name;
    case Formula::Kind::constant: return f.value ? "1" : "0";
    case Formula::Kind::negation: return "!" + print_formula(f.kids[0]);
    case Formula::Kind::conj: return "(" + print_formula(f.kids[0]) + " & " + print_formula(f.kids[1]) + ")";
    case Formula::Kind::disj: return "(" + print_formula(f.kids[0]) + " | " + print_formula(f.kids[1]) + ")";
  }
  throw InternalError("print_formula: bad kind");
}

bool eval_bool(const Formula& f, const std::map<std::string, bool>& env) {
  switch (f.kind) {
    case Formula::Kind::var: return env.at(f.name);
    case Formula::Kind::constant: return f.value;
    case Formula::Kind::negation: return !eval_bool(f.kids[0], env);
    case Formula::Kind::conj: return eval_bool(f.kids[0], env) && eval_bool(f.kids[1], env);
    case Formula::Kind::disj: return eval_bool(f.kids[0], env) || eval_bool(f.kids[1], env);
  }
  throw InternalError("eval_bool: bad kind");
}

bool truth_from(const Qbf& q, std::size_t i, std::map<std::string, bool>& env) {
  if (i == q.prefix.size()) return eval_bool(q.matrix, env);
  const auto& v = q.prefix[i].var;
  env[v] = false;
  const bool a = truth_from(q, i + 1, env);
  env[v] = true;
  const bool b = truth_from(q, i + 1, env);
  return q.prefix[i].universal ? a && b : a || b;
}

// Degree of each variable in the arithmetized matrix.
void matrix_degrees(const Formula& f, const std::map<std::string, unsigned>& index, std::vector<unsigned>& deg) {
  switch (f.kind) {
    case Formula::Kind::var: deg[index.at(f.name)] = 1; return;
    case Formula::Kind::constant: return;
    case Formula::Kind::negation: matrix_degrees(f.kids[0], index, deg); return;
    case Formula::Kind::conj:
    case Formula::Kind::disj: {
      std::vector<unsigned> a(deg.size()), b(deg.size());
      matrix_degrees(f.kids[0], index, a);
      matrix_degrees(f.kids[1], index, b);
      for (std::size_t i = 0; i < deg.size(); ++i) deg[i] = a[i] + b[i];
      return;
    }
  }
}

// ---- field ------------------------------------------------------------------

std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a + b) % p; }
std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a + p - b) % p; }
std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return a * b % p; }

std::uint64_t power(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t inverse(std::uint64_t a, std::uint64_t p) { return power(a, p - 2, p); }

// Coefficients of the polynomial of degree <= n through (i, values[i]),
// i = 0..n.
std::vector<std::uint64_t> interpolate(const std::vector<std::uint64_t>& values, std::uint64_t p) {
  const std::size_t n = values.size();
  std::vector<std::uint64_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint64_t> basis{1};
    std::uint64_t denom = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<std::uint64_t> next(basis.size() + 1, 0);
      for (std::size_t t = 0; t < basis.size(); ++t) {
        next[t + 1] = add(next[t + 1], basis[t], p);
        next[t] = sub(next[t], mul(basis[t], j % p, p), p);
      }
      basis = std::move(next);
      denom = mul(denom, sub(i % p, j % p, p), p);
    }
    const std::uint64_t scale = mul(values[i] % p, inverse(denom, p), p);
    for (std::size_t t = 0; t < n; ++t) out[t] = add(out[t], mul(basis[t], scale, p), p);
  }
  return out;
}

// ---- protocol statements ---------------------------------------------------

std::string coeff_token(const std::vector<std::uint64_t>& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(g[i]);
  }
  return s;
}

std::uint64_t parse_number(const std::string& s, const char* what) {
  if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw DomainError("out_of_limits", std::string("bad ") + what + " '" + s + "'");
  }
  return std::stoull(s);
}

std::vector<std::uint64_t> parse_coeffs(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (true) {
    const auto dot = s.find('.', start);
    out.push_back(parse_number(s.substr(start, dot - start), "coefficient"));
    if (dot == std::string::npos) return out;
    start = dot + 1;
  }
}

Point parse_point(const std::string& s, std::size_t vars) {
  Point rho(vars);
  if (vars == 0) {
    if (!s.empty()) throw DomainError("out_of_limits", "bad point '" + s + "'");
    return rho;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i < vars; ++i) {
    const auto dot = s.find('.', start);
    if ((dot == std::string::npos) != (i + 1 == vars)) throw DomainError("out_of_limits", "bad point '" + s + "'");
    const std::string part = s.substr(start, dot - start);
    if (part != "-") rho[i] = parse_number(part, "point value");
    start = dot + 1;
  }
  return rho;
}

Statement val_stmt(std::size_t k, const Point& rho, std::uint64_t v) {
  return Statement::ext("sc_val", {token(std::to_string(k)), token(point_token(rho)), token(std::to_string(v))});
}

Statement agree_stmt(std::size_t k, const Point& rho, const std::vector<std::uint64_t>& g, std::optional<std::uint64_t> r) {
  return Statement::ext("sc_agree", {token(std::to_string(k)), token(point_token(rho)), token(coeff_token(g)),
                                     r ? token(std::to_string(*r)) : hole()});
}

Statement ident_stmt(std::size_t k, const Point& rho, const std::vector<std::uint64_t>& g) {
  return Statement::ext("sc_ident", {token(std::to_string(k)), token(point_token(rho)), token(coeff_token(g))});
}

Step axiom(Statement s) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::axiom;
  st.name = "decide";
  return st;
}

Step rule(Statement s, std::string name, std::vector<std::size_t> premises) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::rule;
  st.name = std::move(name);
  st.premises = std::move(premises);
  return st;
}

Step extra(Statement s) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::extra;
  return st;
}

struct PathRound {
  Point rho;
  std::uint64_t claim;
  std::vector<std::uint64_t> g;
  std::uint64_t r;
  Statement added;  // R_k(r)
};

// Derives sc_val(0, rho_0, v_0) from the added statements along the path.
Derivation leaf_derivation(const std::vector<PathRound>& path, const Point& final_rho, std::uint64_t final_claim) {
  Derivation d;
  std::size_t cur = d.push(axiom(val_stmt(path.size(), final_rho, final_claim)));
  for (std::size_t k = path.size(); k-- > 0;) {
    const auto& pr = path[k];
    const Statement agree = agree_stmt(k, pr.rho, pr.g, pr.r);
    const Statement ident = ident_stmt(k, pr.rho, pr.g);
    const Statement val = val_stmt(k, pr.rho, pr.claim);
    const std::size_t i1 = d.push(axiom(Statement::implies(d.steps[cur].statement, agree)));
    const std::size_t a = d.push(rule(agree, "mp", {cur, i1}));
    const std::size_t e = d.push(extra(pr.added));
    const std::size_t id = d.push(rule(ident, "mp", {a, e}));
    const std::size_t i2 = d.push(axiom(Statement::implies(ident, val)));
    cur = d.push(rule(val, "mp", {id, i2}));
  }
  return d;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t e, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

}  // namespace

// ---- Qbf ---------------------------------------------------------------------

Qbf Qbf::parse(std::string_view text) {
  Qbf q = Parser(Lexer(text).run()).qbf();
  if (q.prefix.size() > kMaxQbfVariables) {
    throw UsageError("qbf: more than " + std::to_string(kMaxQbfVariables) + " quantified variables");
  }
  std::set<std::string> bound;
  for (const auto& qu : q.prefix) {
    if (!bound.insert(qu.var).second) throw UsageError("qbf: variable '" + qu.var + "' quantified twice");
  }
  std::set<std::string> used;
  collect_vars(q.matrix, used);
  for (const auto& v : used) {
    if (!bound.count(v)) throw UsageError("qbf: unbound variable '" + v + "'");
  }
  return q;
}

std::string Qbf::str() const {
  std::string s;
  for (const auto& qu : prefix) s += (qu.universal ? "forall " : "exists ") + qu.var + ". ";
  return s + print_formula(matrix);
}

bool Qbf::truth() const {
  std::map<std::string, bool> env;
  return truth_from(*this, 0, env);
}

// ---- arithmetization --------------------------------------------------------

Arithmetization::Arithmetization(Qbf q, std::uint64_t p, unsigned degree_cap)
    : q_(std::move(q)), p_(p), cap_(degree_cap) {
  if (!is_prime(p_)) throw UsageError("field size " + std::to_string(p_) + " is not prime");
  if (p_ >= (1ull << 31)) throw UsageError("field size must be below 2^31");
  if (cap_ < 2) throw UsageError("degree cap must be at least 2");
  std::map<std::string, unsigned> index;
  for (unsigned i = 0; i < q_.prefix.size(); ++i) index[q_.prefix[i].var] = i;
  std::vector<unsigned> deg(q_.prefix.size(), 0);
  matrix_degrees(q_.matrix, index, deg);

  // Built innermost first, reversed at the end.
  std::vector<ArithOp> rev;
  for (unsigned i = static_cast<unsigned>(q_.prefix.size()); i-- > 0;) {
    if (deg[i] > cap_) {
      rev.push_back({ArithOp::Kind::linearize, i, deg[i]});
      deg[i] = 1;
    }
    for (unsigned j = 0; j < i; ++j) {
      if (2 * deg[j] > cap_) {
        rev.push_back({ArithOp::Kind::linearize, j, deg[j]});
        deg[j] = 1;
      }
    }
    rev.push_back({q_.prefix[i].universal ? ArithOp::Kind::forall : ArithOp::Kind::exists, i, deg[i]});
    deg[i] = 0;
    for (unsigned j = 0; j < i; ++j) deg[j] *= 2;
  }
  ops_.assign(rev.rbegin(), rev.rend());
}

unsigned Arithmetization::degree_sum() const {
  unsigned s = 0;
  for (const auto& op : ops_) s += op.degree;
  return s;
}

Rational Arithmetization::soundness_bound() const { return Rational(degree_sum(), p_); }

std::uint64_t Arithmetization::eval_matrix(const Formula& f, const Point& rho) const {
  switch (f.kind) {
    case Formula::Kind::var: {
      for (std::size_t i = 0; i < q_.prefix.size(); ++i) {
        if (q_.prefix[i].var == f.name) {
          if (!rho[i]) throw InternalError("eval_matrix: unset variable " + f.name);
          return *rho[i];
        }
      }
      throw InternalError("eval_matrix: unknown variable " + f.name);
    }
    case Formula::Kind::constant: return f.value ? 1 : 0;
    case Formula::Kind::negation: return sub(1, eval_matrix(f.kids[0], rho), p_);
    case Formula::Kind::conj: return mul(eval_matrix(f.kids[0], rho), eval_matrix(f.kids[1], rho), p_);
    case Formula::Kind::disj: {
      const auto a = eval_matrix(f.kids[0], rho);
      const auto b = eval_matrix(f.kids[1], rho);
      return sub(add(a, b, p_), mul(a, b, p_), p_);
    }
  }
  throw InternalError("eval_matrix: bad kind");
}

std::uint64_t Arithmetization::combine(std::size_t k, const Point& rho, std::uint64_t g0, std::uint64_t g1) const {
  const auto& op = ops_.at(k);
  switch (op.kind) {
    case ArithOp::Kind::forall: return mul(g0, g1, p_);
    case ArithOp::Kind::exists: return sub(1, mul(sub(1, g0, p_), sub(1, g1, p_), p_), p_);
    case ArithOp::Kind::linearize: {
      const std::uint64_t x = rho[op.var].value();
      return add(mul(sub(1, x, p_), g0, p_), mul(x, g1, p_), p_);
    }
  }
  throw InternalError("combine: bad kind");
}

std::uint64_t Arithmetization::evaluate(std::size_t k, const Point& rho) const {
  if (k == ops_.size()) return eval_matrix(q_.matrix, rho);
  Point r = rho;
  const unsigned v = ops_[k].var;
  r[v] = 0;
  const auto f0 = evaluate(k + 1, r);
  r[v] = 1;
  const auto f1 = evaluate(k + 1, r);
  return combine(k, rho, f0, f1);
}

std::vector<std::uint64_t> Arithmetization::slice(std::size_t k, const Point& rho) const {
  const auto& op = ops_.at(k);
  Point r = rho;
  std::vector<std::uint64_t> values(op.degree + 1);
  for (unsigned i = 0; i <= op.degree; ++i) {
    r[op.var] = i;
    values[i] = evaluate(k + 1, r);
  }
  return interpolate(values, p_);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t smallest_valid_prime(const Qbf& q, unsigned degree_cap) {
  const unsigned sum = Arithmetization(q, 2, degree_cap).degree_sum();
  std::uint64_t p = 2 * static_cast<std::uint64_t>(sum) + 1;
  while (!is_prime(p)) ++p;
  return p;
}

void require_valid_field(const Arithmetization& a) {
  const std::uint64_t need = 2 * static_cast<std::uint64_t>(a.degree_sum());
  if (a.prime() <= need) {
    std::uint64_t p = need + 1;
    while (!is_prime(p)) ++p;
    throw DomainError("field_too_small", "field size " + std::to_string(a.prime()) + " is too small; need p > " +
                                             std::to_string(need) + ", smallest valid p is " + std::to_string(p));
  }
}

std::uint64_t poly_eval(const std::vector<std::uint64_t>& coeffs, std::uint64_t x, std::uint64_t p) {
  std::uint64_t r = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) r = add(mul(r, x % p, p), coeffs[i] % p, p);
  return r;
}

std::string point_token(const Point& rho) {
  std::string s;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (i) s += '.';
    s += rho[i] ? std::to_string(*rho[i]) : "-";
  }
  return s;
}

Prover honest_prover(std::shared_ptr<const Arithmetization> a) {
  return [a](std::size_t k, const Point& rho, std::uint64_t) { return a->slice(k, rho); };
}

// ---- protocol ----------------------------------------------------------------

namespace {

bool message_ok(const Arithmetization& a, std::size_t k, const Point& rho, std::uint64_t claim,
                const std::vector<std::uint64_t>& g) {
  if (g.size() != a.ops()[k].degree + 1) return false;
  if (std::any_of(g.begin(), g.end(), [&](std::uint64_t c) { return c >= a.prime(); })) return false;
  const std::uint64_t p = a.prime();
  return a.combine(k, rho, poly_eval(g, 0, p), poly_eval(g, 1, p)) == claim;
}

}  // namespace

Transcript run_protocol(const Arithmetization& a, const Prover& prover, const std::vector<std::uint64_t>& challenges) {
  require_valid_field(a);
  if (challenges.size() != a.rounds()) {
    throw UsageError("run_protocol: expected " + std::to_string(a.rounds()) + " challenges, got " +
                     std::to_string(challenges.size()));
  }
  Transcript t;
  t.prime = a.prime();
  t.total_cost = a.soundness_bound();
  Point rho = a.empty_point();
  std::uint64_t claim = 1;
  for (std::size_t k = 0; k < a.rounds(); ++k) {
    if (challenges[k] >= a.prime()) throw UsageError("challenge outside the field");
    RoundRecord rec;
    rec.op = k;
    rec.claim = claim;
    rec.message = prover(k, rho, claim);
    rec.consistent = message_ok(a, k, rho, claim, rec.message);
    rec.cost = Rational(a.ops()[k].degree, a.prime());
    rec.challenge = challenges[k];
    t.rounds.push_back(rec);
    if (!rec.consistent) return t;
    claim = poly_eval(rec.message, challenges[k], a.prime());
    rho[a.ops()[k].var] = challenges[k];
  }
  t.final_check = a.evaluate(a.rounds(), rho) == claim;
  t.accepted = t.final_check;
  return t;
}

FinitizedModel protocol_model(std::shared_ptr<const Arithmetization> a) {
  FinitizedModel m;
  const std::size_t vars = a->qbf().prefix.size();
  auto round = [a](const std::string& s, bool allow_end) {
    const auto k = parse_number(s, "round");
    if (k > a->rounds() || (!allow_end && k == a->rounds())) throw DomainError("out_of_limits", "bad round " + s);
    return static_cast<std::size_t>(k);
  };
  auto field = [a](const std::string& s) {
    const auto v = parse_number(s, "field element");
    if (v >= a->prime()) throw DomainError("out_of_limits", "field element " + s + " outside the field");
    return v;
  };
  auto arity = [](const std::vector<std::string>& args, std::size_t n, const char* name) {
    if (args.size() != n) throw DomainError("out_of_limits", std::string(name) + " takes " + std::to_string(n) + " arguments");
  };
  m.ext["sc_val"] = [=](const std::vector<std::string>& args) {
    arity(args, 3, "sc_val");
    return a->evaluate(round(args[0], true), parse_point(args[1], vars)) == field(args[2]);
  };
  m.ext["sc_agree"] = [=](const std::vector<std::string>& args) {
    arity(args, 4, "sc_agree");
    const auto k = round(args[0], false);
    Point rho = parse_point(args[1], vars);
    const auto g = parse_coeffs(args[2]);
    const auto r = field(args[3]);
    rho[a->ops()[k].var] = r;
    return a->evaluate(k + 1, rho) == poly_eval(g, r, a->prime());
  };
  m.ext["sc_ident"] = [=](const std::vector<std::string>& args) {
    arity(args, 3, "sc_ident");
    const auto k = round(args[0], false);
    auto g = parse_coeffs(args[2]);
    auto s = a->slice(k, parse_point(args[1], vars));
    while (g.size() > 1 && g.back() == 0) g.pop_back();
    while (s.size() > 1 && s.back() == 0) s.pop_back();
    return g == s;
  };
  return m;
}

Statement protocol_target(const Arithmetization& a) { return val_stmt(0, a.empty_point(), 1); }

namespace {

struct Compiler {
  const Arithmetization& a;
  const Prover& prover;
  const FinitizedModel& model;
  std::vector<PathRound> path;

  StrategyNode node(std::size_t k, const Point& rho, std::uint64_t claim, const Rational& capital) {
    const std::uint64_t p = a.prime();
    if (k == a.rounds()) {
      if (a.evaluate(k, rho) != claim) return StrategyNode::leaf(capital);
      Derivation d = leaf_derivation(path, rho, claim);
      Statement phi = d.conclusion();
      return StrategyNode::det(capital, std::move(phi), std::move(d), StrategyNode::leaf(capital));
    }
    std::vector<std::uint64_t> g = prover(k, rho, claim);
    if (!message_ok(a, k, rho, claim, g)) return StrategyNode::leaf(capital);
    const auto& op = a.ops()[k];
    const Rational tau(op.degree, p);
    const Statement templ = Statement::implies(agree_stmt(k, rho, g, std::nullopt), ident_stmt(k, rho, g));
    const SetDesc set = SetDesc::of_range(static_cast<unsigned>(p));
    FracCertificate cert = frac_forall_certify(tau, set, templ, model);
    Derivation proof;
    proof.push(cert.step);
    std::vector<StrategyNode> children;
    children.reserve(p);
    for (std::uint64_t r = 0; r < p; ++r) {
      Point next = rho;
      next[op.var] = r;
      path.push_back({rho, claim, g, r, instantiate(templ, std::to_string(r))});
      children.push_back(node(k + 1, next, poly_eval(g, r, p), capital - tau));
      path.pop_back();
    }
    return StrategyNode::prob(capital, cert.step.statement, std::move(proof), std::move(children));
  }
};

}  // namespace

CompiledStrategy compile_strategy(std::shared_ptr<const Arithmetization> a, const Prover& prover,
                                  std::size_t max_leaves) {
  require_valid_field(*a);
  const std::uint64_t leaves = checked_pow(a->prime(), a->rounds(), max_leaves);
  if (leaves > max_leaves) {
    throw DomainError("work_ceiling", "strategy would have " + std::to_string(a->prime()) + "^" +
                                          std::to_string(a->rounds()) + " leaves, more than " +
                                          std::to_string(max_leaves));
  }
  CompiledStrategy out;
  out.arith = a;
  out.model = protocol_model(a);
  out.target = protocol_target(*a);
  Compiler c{*a, prover, out.model, {}};
  out.tree.root = c.node(0, a->empty_point(), 1, a->soundness_bound());
  return out;
}

CompiledStrategy compile_honest_strategy(std::shared_ptr<const Arithmetization> a, std::size_t max_leaves) {
  if (!a->qbf().truth()) throw UsageError("honest strategy needs a true QBF");
  return compile_strategy(a, honest_prover(a), max_leaves);
}

// ---- adversarial acceptance ---------------------------------------------------

std::uint64_t adversarial_work_estimate(const Arithmetization& a) {
  const std::uint64_t p = a.prime();
  constexpr std::uint64_t cap = 1ull << 62;
  std::uint64_t total = 0;
  std::set<unsigned> set_vars;
  for (std::size_t k = 0; k < a.rounds(); ++k) {
    const auto& op = a.ops()[k];
    const std::uint64_t points = checked_pow(p, set_vars.size(), cap);
    const std::uint64_t per = checked_pow(p, op.degree + 2, cap);
    if (points > cap / std::max<std::uint64_t>(per, 1)) return cap;
    total += points * per;
    if (total > cap) return cap;
    set_vars.insert(op.var);
  }
  return total;
}

namespace {

// Table of best acceptance numerators (denominator p^(K-k)) for every claim at
// (k, rho), with the message attaining each.
struct StateTable {
  std::vector<std::uint64_t> best;
  std::vector<std::vector<std::uint64_t>> argmax;  // values of g at 0..d
};

class Adversary {
 public:
  explicit Adversary(std::shared_ptr<const Arithmetization> a) : a_(std::move(a)), p_(a_->prime()) {}

  const StateTable& table(std::size_t k, const Point& rho) {
    const auto key = std::make_pair(k, point_token(rho));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    StateTable t = build(k, rho);
    return memo_.emplace(key, std::move(t)).first->second;
  }

  std::uint64_t work = 0;

 private:
  StateTable build(std::size_t k, const Point& rho) {
    StateTable t;
    t.best.assign(p_, 0);
    t.argmax.assign(p_, {});
    if (k == a_->rounds()) {
      t.best[a_->evaluate(k, rho)] = 1;
      ++work;
      return t;
    }
    const auto& op = a_->ops()[k];
    const unsigned d = op.degree;
    // child[r][w]: best numerator after challenge r with claim w.
    std::vector<const std::vector<std::uint64_t>*> child(p_);
    for (std::uint64_t r = 0; r < p_; ++r) {
      Point next = rho;
      next[op.var] = r;
      child[r] = &table(k + 1, next).best;
    }
    // basis[j][r] = L_j(r) for interpolation nodes 0..d.
    std::vector<std::vector<std::uint64_t>> basis(d + 1, std::vector<std::uint64_t>(p_));
    for (unsigned j = 0; j <= d; ++j) {
      std::vector<std::uint64_t> unit(d + 1, 0);
      unit[j] = 1;
      const auto coeffs = interpolate(unit, p_);
      for (std::uint64_t r = 0; r < p_; ++r) basis[j][r] = poly_eval(coeffs, r, p_);
    }
    std::vector<std::uint64_t> vals(d + 1, 0);  // g at 0..d, odometer
    std::vector<std::uint64_t> g(p_, 0);        // g at every r
    std::vector<bool> seen(p_, false);
    while (true) {
      std::uint64_t score = 0;
      for (std::uint64_t r = 0; r < p_; ++r) score += (*child[r])[g[r]];
      work += p_;
      const std::uint64_t g1 = d == 0 ? vals[0] : vals[1];
      const std::uint64_t w = a_->combine(k, rho, vals[0], g1);
      if (!seen[w] || score > t.best[w]) {
        seen[w] = true;
        t.best[w] = score;
        t.argmax[w] = vals;
      }
      unsigned j = d + 1;
      while (j-- > 0) {
        vals[j] = (vals[j] + 1) % p_;
        for (std::uint64_t r = 0; r < p_; ++r) g[r] = add(g[r], basis[j][r], p_);
        if (vals[j] != 0) break;
      }
      if (j == static_cast<unsigned>(-1)) break;
    }
    return t;
  }

  std::shared_ptr<const Arithmetization> a_;
  std::uint64_t p_;
  std::map<std::pair<std::size_t, std::string>, StateTable> memo_;
};

}  // namespace

Acceptance max_adversarial_acceptance(std::shared_ptr<const Arithmetization> a, double work_ceiling) {
  require_valid_field(*a);
  const std::uint64_t estimate = adversarial_work_estimate(*a);
  if (static_cast<double>(estimate) > work_ceiling) {
    throw DomainError("work_ceiling", "exact acceptance needs about " + std::to_string(estimate) +
                                          " field operations, above the ceiling " +
                                          std::to_string(static_cast<std::uint64_t>(work_ceiling)));
  }
  auto adv = std::make_shared<Adversary>(a);
  Acceptance out;
  const auto& root = adv->table(0, a->empty_point());
  BigInt den = 1;
  for (std::size_t k = 0; k < a->rounds(); ++k) den *= a->prime();
  out.value = Rational(BigInt(root.best[1]), den);
  out.bound = a->soundness_bound();
  out.work = adv->work;
  out.best_prover = [a, adv](std::size_t k, const Point& rho, std::uint64_t claim) {
    const auto& vals = adv->table(k, rho).argmax.at(claim);
    if (vals.empty()) return std::vector<std::uint64_t>(a->ops()[k].degree + 1, 0);
    return interpolate(vals, a->prime());
  };
  return out;
}

// ---- suite ---------------------------------------------------------------------

std::vector<std::string> sumcheck_suite() {
  return {
      // true
      "1",
      "exists x. x",
      "forall x. (x | !x)",
      "exists x. !x",
      "forall x. exists y. (x | y)",
      "forall x. exists y. (!x | y)",
      "exists x. forall y. (x | y)",
      "forall x. exists y. !(x & y)",
      "exists x. exists y. (x & y)",
      "forall x. forall y. (x | !x)",
      "forall x. exists y. exists z. ((x | y) & z)",
      "exists x. forall y. exists z. (x & (y | z))",
      "forall x. forall y. exists z. (x | (y | z))",
      "exists x. exists y. exists z. (x & (!y & z))",
      "forall x. exists y. forall z. (y | (x & z))",
      "exists x. forall y. forall z. (x | (y & !y))",
      "forall x. exists y. (x | !y)",
      "exists x. (x & x)",
      "forall x. exists y. ((x & y) | (!x & !y))",
      "exists x. forall y. (y | !y)",
      "forall x. exists y. forall z. (z | (!z | (x & y)))",
      "exists x. exists y. (!x & !y)",
      // false
      "0",
      "forall x. x",
      "exists x. (x & !x)",
      "forall x. !x",
      "forall x. forall y. (x | y)",
      "exists x. forall y. (x & y)",
      "forall x. exists y. (x & y)",
      "forall x. exists y. forall z. (y & z)",
      "exists x. exists y. (x & (y & !x))",
      "forall x. forall y. forall z. (x | (y | z))",
      "exists x. forall y. exists z. (y & (x | z))",
      "forall x. exists y. (!x & y)",
      "exists x. forall y. (x & !y)",
      "forall x. forall y. (x & !y)",
      "exists x. exists y. ((x & !x) | (y & !y))",
      "forall x. exists y. forall z. (x | (y & z))",
      "forall x. (x | x)",
      "exists x. forall y. ((x & y) | (!x & !y))",
      "forall x. forall y. exists z. ((x | y) & z)",
      "exists x. !(x | !x)",
      "forall x. exists y. forall z. (z & (x | y))",
      "forall x. exists y. (x & !y)",
  };
}

}  // namespace kolmo
