#include <random>

#include "doctest.h"
#include "golden.hpp"
#include "kolmo/error.hpp"
#include "kolmo/logic.hpp"
#include "reference_interpreter.hpp"

using kolmo::BitString;
using kolmo::Derivation;
using kolmo::FinitizedModel;
using kolmo::Justification;
using kolmo::Rational;
using kolmo::SetDesc;
using kolmo::Statement;
using kolmo::Step;
using kolmo::Theory;

namespace {

const FinitizedModel& model() {
  static const FinitizedModel m = FinitizedModel::reference(6, 14, 10000);
  return m;
}

BitString bits(const char* s) { return BitString::parse(s); }

Step axiom(Statement s, const char* kind) {
  Step st;
  st.statement = std::move(s);
  st.name = kind;
  return st;
}

Step extra(Statement s) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::extra;
  return st;
}

Step hyp(Statement s) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::hyp;
  return st;
}

Step rule(Statement s, const char* name, std::vector<std::size_t> premises) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::rule;
  st.name = name;
  st.premises = std::move(premises);
  return st;
}

Statement random_atom(std::mt19937_64& rng) {
  const auto x = BitString::from_index(rng() % 63);
  switch (rng() % 5) {
    case 0: return Statement::cge(x, rng() % 8);
    case 1: return Statement::kge(x, rng() % 10);
    case 2: return Statement::halts(x, rng() % 12);
    case 3: return Statement::nonterm(x);
    default: return rng() % 2 ? Statement::truth() : Statement::falsity();
  }
}

Statement random_statement(std::mt19937_64& rng, int depth) {
  if (depth == 0 || rng() % 3 == 0) {
    if (rng() % 6 == 0) {
      const Statement t = rng() % 2 ? Statement::cge(BitString(), 0) : Statement::halts(BitString(), 1);
      Statement templ = t;
      templ.terms[0] = kolmo::hole();
      templ.number = t.op == kolmo::Op::cge ? rng() % 5 : 1 + rng() % 9;
      return Statement::frac(Rational(rng() % 5, 4), SetDesc::of_length(static_cast<unsigned>(rng() % 4)), templ);
    }
    return random_atom(rng);
  }
  switch (rng() % 4) {
    case 0: return Statement::negation(random_statement(rng, depth - 1));
    case 1: return Statement::conj(random_statement(rng, depth - 1), random_statement(rng, depth - 1));
    case 2: return Statement::disj(random_statement(rng, depth - 1), random_statement(rng, depth - 1));
    default: return Statement::implies(random_statement(rng, depth - 1), random_statement(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("s-expression syntax") {
  const auto e = kolmo::parse_sexpr(" (a \"b c\" (d) ; note\n e) ");
  CHECK(kolmo::print(e) == "(a \"b c\" (d) e)");
  CHECK_THROWS_AS(kolmo::parse_sexpr("(a"), kolmo::UsageError);
  CHECK_THROWS_AS(kolmo::parse_sexpr("a)"), kolmo::UsageError);
  CHECK_THROWS_AS(kolmo::parse_sexpr("\"open"), kolmo::UsageError);
  CHECK(kolmo::parse_sexprs("(a) (b)").size() == 2);
}

TEST_CASE("statement text round trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto s = random_statement(rng, 4);
    CHECK(Statement::parse(s.str()) == s);
  }
  const auto s = Statement::parse("(frac 1/4 (len 6) (cge _ 4))");
  CHECK(s.str() == "(frac 1/4 (len 6) (cge _ 4))");
  CHECK(Statement::parse("(ext claim \"3\" _)").terms.size() == 2);
  CHECK_THROWS_AS(Statement::parse("(cge 0101 3)"), kolmo::UsageError);
  CHECK_THROWS_AS(Statement::parse("(cge \"012\" 3)"), kolmo::UsageError);
  CHECK_THROWS_AS(Statement::parse("(frac 1/4 (len 2) (cge \"0\" 1))"), kolmo::UsageError);
  CHECK_THROWS_AS(Statement::parse("(frac 5/4 (len 2) (cge _ 1))"), kolmo::UsageError);
  CHECK_THROWS_AS(Statement::parse("(and (true))"), kolmo::UsageError);
  CHECK_THROWS_AS(Statement::parse("(frac 1/2 (len 1) (frac 1/2 (len 1) (cge _ 1)))"), kolmo::UsageError);
}

TEST_CASE("evaluation") {
  const auto& m = model();
  for (const auto& x : kolmo::enumerate_programs(6)) CHECK(eval_statement(Statement::cge(x, 0), m));
  // Counting instance, checked against an independent direct scan.
  const auto f = Statement::parse("(frac 1/4 (len 6) (cge _ 4))");
  CHECK(eval_statement(f, m));
  int bad = 0;
  for (std::uint64_t w = 0; w < 64; ++w) {
    const auto x = BitString::from_word(w, 6).str();
    if (*ref::direct_value("plain", x, "", 14, 10000).length < 4) ++bad;
  }
  CHECK(bad <= 16);
  CHECK(eval_statement(Statement::parse("(frac " + std::to_string(bad) + "/64 (len 6) (cge _ 4))"), m));
  if (bad > 0) {
    CHECK_FALSE(eval_statement(Statement::parse("(frac " + std::to_string(bad - 1) + "/64 (len 6) (cge _ 4))"), m));
  }

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_statement(rng, 3);
    CHECK_FALSE(eval_statement(Statement::conj(s, Statement::negation(s)), m));
  }
  CHECK(eval_statement(Statement::halts(bits("000"), 4), m));
  CHECK_FALSE(eval_statement(Statement::halts(bits("000"), 3), m));
  CHECK(eval_statement(Statement::nonterm(bits("1111110111110")), m));
  CHECK(eval_statement(Statement::cge(bits("0101"), 5), m) ==
        (*ref::direct_value("plain", "0101", "", 14, 10000).length >= 5));

  try {
    eval_statement(Statement::cge(bits("0000000"), 3), m);
    FAIL("expected out_of_limits");
  } catch (const kolmo::DomainError& e) {
    CHECK(e.kind() == "out_of_limits");
    CHECK(std::string(e.what()).find("(cge \"0000000\" 3)") != std::string::npos);
  }
  CHECK_THROWS_AS(eval_statement(Statement::ext("nothing", {}), m), kolmo::DomainError);
  CHECK_THROWS_AS(eval_statement(Statement::parse("(cge _ 1)"), m), kolmo::UsageError);
}

TEST_CASE("ext atoms and prefix holes") {
  FinitizedModel m = model();
  m.ext["even"] = [](const std::vector<std::string>& a) { return std::stoi(a.at(0)) % 2 == 0; };
  CHECK(eval_statement(Statement::parse("(frac 1/2 (range 10) (ext even _))"), m));
  CHECK_FALSE(eval_statement(Statement::parse("(frac 2/5 (range 10) (ext even _))"), m));
  const auto t = Statement::parse("(kge (prefix _ 2) 1)");
  CHECK(kolmo::instantiate(t, "0110").str() == "(kge \"01\" 1)");
  CHECK_THROWS_AS(kolmo::instantiate(t, "0"), kolmo::UsageError);
}

TEST_CASE("semantic entailment") {
  const auto& m = model();
  const auto f = Statement::falsity();
  Theory t;
  CHECK(semantic_entails(t, Statement::truth(), m));
  CHECK_FALSE(semantic_entails(t, f, m));
  CHECK(semantic_entails(t.with(f), f, m));
  CHECK(semantic_entails(t.with(f), Statement::cge(bits("0"), 40), m));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    Theory a;
    for (int k = 0; k < 3; ++k) a = a.with(random_statement(rng, 2));
    const auto phi = random_statement(rng, 3);
    const auto b = a.with(random_statement(rng, 2));
    if (semantic_entails(a, phi, m)) CHECK(semantic_entails(b, phi, m));
    for (const auto& e : a.extras) CHECK(semantic_entails(a, e, m));
  }
  CHECK(t.with(f).with(f).extras.size() == 1);
}

TEST_CASE("derivation checking") {
  const auto& m = model();
  const auto a = Statement::parse("(cge \"0110\" 3)");
  const auto b = Statement::parse("(halts \"000\" 9)");
  const Theory t = Theory().with(a).with(Statement::implies(a, b));

  Derivation one;
  one.push(extra(a));
  CHECK(check_derivation(one, t, m).ok);
  CHECK_FALSE(check_derivation(Derivation{}, t, m).ok);

  Derivation d;
  d.push(extra(a));
  d.push(extra(Statement::implies(a, b)));
  d.push(rule(b, "mp", {0, 1}));
  d.push(axiom(Statement::halts(bits("000"), 4), "halting"));
  d.push(rule(Statement::conj(b, Statement::halts(bits("000"), 4)), "and_i", {2, 3}));
  d.push(rule(b, "and_e", {4}));
  d.push(rule(Statement::disj(Statement::falsity(), b), "or_i", {5}));
  d.push(rule(Statement::parse("(cge \"0110\" 1)"), "weaken", {0}));
  CHECK(check_derivation(d, t, m).ok);
  CHECK(Derivation::parse(d.str()) == d);
  CHECK(d.listing().rfind("0. (cge \"0110\" 3)  (extra)\n", 0) == 0);

  auto broken = d;
  broken.steps[5].premises = {6};
  auto r = check_derivation(broken, t, m);
  CHECK_FALSE(r.ok);
  CHECK(r.bad_step == 5);
  broken = d;
  broken.steps[7].statement = Statement::parse("(cge \"0110\" 4)");
  r = check_derivation(broken, t, m);
  CHECK(r.bad_step == 7);
  broken = d;
  broken.steps[3].statement = Statement::halts(bits("000"), 3);
  CHECK(check_derivation(broken, t, m).bad_step == 3);
  CHECK(check_derivation(one, Theory(), m).bad_step == 0);

  // Hypotheses must be discharged.
  Derivation h;
  h.push(hyp(a));
  h.push(rule(Statement::parse("(cge \"0110\" 2)"), "weaken", {0}));
  CHECK_FALSE(check_derivation(h, Theory(), m).ok);
  h.push(rule(Statement::implies(a, Statement::parse("(cge \"0110\" 2)")), "imp_i", {1}));
  CHECK(check_derivation(h, Theory(), m).ok);

  // c_upper with a witness.
  const auto x = bits("0000");
  Derivation u;
  Step st = axiom(Statement::negation(Statement::cge(x, 4)), "c_upper");
  st.witness = model().plain->entry(x).witness;
  u.push(st);
  CHECK(check_derivation(u, Theory(), m).ok);
  u.steps[0].statement = Statement::negation(Statement::cge(x, 1));
  CHECK_FALSE(check_derivation(u, Theory(), m).ok);
}

TEST_CASE("disj_from_frac needs strictly more than tau |A| cases") {
  FinitizedModel m = model();
  m.ext["small"] = [](const std::vector<std::string>& a) { return std::stoi(a.at(0)) < 6; };
  const auto phi = Statement::parse("(halts \"\" 1)");
  const auto templ = Statement::parse("(ext small _)");
  const auto f = Statement::frac(Rational(1, 4), SetDesc::of_range(8), templ);
  auto build = [&](int covered) {
    Derivation d;
    d.push(axiom(f, "frac_count"));
    const auto phi_at = d.push(axiom(phi, "halting"));
    std::vector<std::size_t> prem{0};
    for (int i = 0; i < covered; ++i) {
      const auto inst = kolmo::instantiate(templ, std::to_string(i));
      d.push(hyp(inst));
      prem.push_back(d.push(rule(Statement::implies(inst, phi), "imp_i", {phi_at})));
    }
    d.push(rule(phi, "disj_from_frac", prem));
    return d;
  };
  const auto at = check_derivation(build(2), Theory(), m);
  CHECK_FALSE(at.ok);
  CHECK(at.bad_step == build(2).steps.size() - 1);
  CHECK(check_derivation(build(3), Theory(), m).ok);
  CHECK(check_derivation(build(5), Theory(), m).ok);
}

TEST_CASE("rule soundness on random derivations") {
  // Builds derivations by random rule applications over a mixed-truth theory
  // and checks that valid ones with true extras have true conclusions.
  const auto& m = model();
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Theory t;
    for (int k = 0; k < 4; ++k) t = t.with(random_statement(rng, 2));
    bool extras_true = true;
    for (const auto& e : t.extras) extras_true = extras_true && eval_statement(e, m);
    Derivation d;
    for (int k = 0; k < 10; ++k) {
      const auto n = d.steps.size();
      const auto pick = [&] { return static_cast<std::size_t>(rng() % n); };
      switch (n == 0 ? rng() % 2 : rng() % 7) {
        case 0: d.push(extra(t.extras[rng() % t.extras.size()])); break;
        case 1: {
          const auto s = random_atom(rng);
          if (auto ax = kolmo::certify_axiom(s, m)) d.push(*ax);
          else d.push(hyp(s));
          break;
        }
        case 2: {
          const auto i = pick(), j = pick();
          d.push(rule(Statement::conj(d.steps[i].statement, d.steps[j].statement), "and_i", {i, j}));
          break;
        }
        case 3: {
          const auto i = pick();
          d.push(rule(Statement::disj(random_atom(rng), d.steps[i].statement), "or_i", {i}));
          break;
        }
        case 4: {
          const auto i = pick(), j = pick();
          const auto& imp = d.steps[j].statement;
          if (imp.op == kolmo::Op::implies) d.push(rule(imp.kids[1], "mp", {i, j}));
          break;
        }
        case 5: {
          const auto i = pick(), j = pick();
          d.push(rule(Statement::implies(d.steps[j].statement, d.steps[i].statement), "imp_i", {i}));
          break;
        }
        default: {
          const auto i = pick();
          const auto& s = d.steps[i].statement;
          if (s.op == kolmo::Op::conj) d.push(rule(s.kids[rng() % 2], "and_e", {i}));
          break;
        }
      }
    }
    for (std::size_t end = 1; end <= d.steps.size(); ++end) {
      Derivation prefix;
      prefix.steps.assign(d.steps.begin(), d.steps.begin() + static_cast<long>(end));
      if (check_derivation(prefix, t, m).ok && extras_true) {
        ++checked;
        CHECK(eval_statement(prefix.conclusion(), m));
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("frac certificates") {
  const auto& m = model();
  const auto templ = Statement::parse("(cge _ 7)");
  const auto one = kolmo::frac_forall_certify(Rational(1), SetDesc::of_length(6), templ, m);
  CHECK(one.step.name == "frac_count");
  Derivation d;
  d.push(one.step);
  CHECK(check_derivation(d, Theory(), m).ok);

  // One false instance at delta = 0.
  const auto single = Statement::parse("(halts _ 3)");
  try {
    kolmo::frac_forall_certify(Rational(0), SetDesc::of_list({"", "0", "000"}), single, m);
    FAIL("expected certification failure");
  } catch (const kolmo::DomainError& e) {
    CHECK(e.kind() == "certification_failed");
    CHECK(std::string(e.what()).rfind("1 of 3", 0) == 0);
  }

  // Counting instance: at least (1 - 2^-c) 2^N length-N strings have every
  // prefix K-incompressible up to c.
  std::string results;
  for (unsigned N = 1; N <= 6; ++N) {
    for (unsigned c = 0; c <= 3; ++c) {
      const auto r = kolmo::all_prefix_incompressible(N, c);
      std::uint64_t bad = 0;
      for (std::uint64_t w = 0; w < (1ULL << N); ++w) {
        const auto x = BitString::from_word(w, static_cast<unsigned>(N));
        for (unsigned j = 1; j <= N; ++j) {
          if (*m.prefix->value(x.prefix(j)) + c < j) {
            ++bad;
            break;
          }
        }
      }
      bool certified = true;
      try {
        const auto cert = kolmo::frac_forall_certify(kolmo::pow2_neg(c), SetDesc::of_length(N), r, m);
        CHECK(cert.false_count == bad);
      } catch (const kolmo::DomainError&) {
        certified = false;
      }
      CHECK(certified == (bad * (1ULL << c) <= (1ULL << N)));
      results += certified ? '1' : '0';
    }
  }
  golden::check("prefix_counting_certified_N1to6_c0to3", results);
}
