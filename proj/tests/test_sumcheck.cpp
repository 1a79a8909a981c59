#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "golden.hpp"
#include "kolmo/error.hpp"
#include "kolmo/sumcheck.hpp"

using kolmo::Arithmetization;
using kolmo::Backend;
using kolmo::Formula;
using kolmo::Point;
using kolmo::Qbf;
using kolmo::Rational;

namespace {

Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
  const auto pick = rng() % (depth <= 0 ? 2 : 5);
  switch (pick) {
    case 0:
      if (!vars.empty()) return Formula{Formula::Kind::var, vars[rng() % vars.size()], false, {}};
      [[fallthrough]];
    case 1: return Formula{Formula::Kind::constant, {}, rng() % 2 == 0, {}};
    case 2: return Formula{Formula::Kind::negation, {}, false, {random_formula(rng, vars, depth - 1)}};
    case 3:
      return Formula{Formula::Kind::conj, {}, false,
                     {random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1)}};
    default:
      return Formula{Formula::Kind::disj, {}, false,
                     {random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1)}};
  }
}

Qbf random_qbf(std::mt19937_64& rng, unsigned max_vars, int depth) {
  Qbf q;
  const unsigned v = static_cast<unsigned>(rng() % (max_vars + 1));
  std::vector<std::string> names;
  for (unsigned i = 0; i < v; ++i) {
    names.push_back("v" + std::to_string(i));
    q.prefix.push_back({rng() % 2 == 0, names.back()});
  }
  q.matrix = random_formula(rng, names, depth);
  return q;
}

// Plain recursive minimax over every coefficient vector, no memo.
Rational brute_acceptance(const Arithmetization& a, std::size_t k, Point rho, std::uint64_t claim) {
  const auto p = a.prime();
  if (k == a.rounds()) return a.evaluate(k, rho) == claim ? 1 : 0;
  const auto& op = a.ops()[k];
  std::vector<std::uint64_t> g(op.degree + 1, 0);
  Rational best = 0;
  while (true) {
    const auto g0 = kolmo::poly_eval(g, 0, p), g1 = kolmo::poly_eval(g, 1, p);
    if (a.combine(k, rho, g0, g1) == claim) {
      Rational sum = 0;
      for (std::uint64_t r = 0; r < p; ++r) {
        Point next = rho;
        next[op.var] = r;
        sum += brute_acceptance(a, k + 1, next, kolmo::poly_eval(g, r, p));
      }
      sum /= p;
      if (sum > best) best = sum;
    }
    std::size_t i = 0;
    while (i < g.size() && ++g[i] == p) g[i++] = 0;
    if (i == g.size()) break;
  }
  return best;
}

std::shared_ptr<const Arithmetization> arith(const std::string& text, std::uint64_t p = 0) {
  const Qbf q = Qbf::parse(text);
  return std::make_shared<Arithmetization>(q, p ? p : kolmo::smallest_valid_prime(q));
}

}  // namespace

TEST_CASE("qbf syntax") {
  const Qbf a = Qbf::parse("\xE2\x88\x80x \xE2\x88\x83y (x \xE2\x88\xA8 y)");
  const Qbf b = Qbf::parse("forall x. exists y. (x | y)");
  CHECK(a == b);
  CHECK(a.str() == "forall x. exists y. (x | y)");
  CHECK(Qbf::parse("forall_x.x") == Qbf::parse("forall x x"));
  CHECK(Qbf::parse("exists x not x and 1 or 0").str() == "exists x. ((!x & 1) | 0)");
  CHECK(a.truth());
  CHECK_FALSE(Qbf::parse("forall x. x").truth());
  CHECK_THROWS_AS(Qbf::parse("forall x. y"), kolmo::UsageError);
  CHECK_THROWS_AS(Qbf::parse("forall x. forall x. x"), kolmo::UsageError);
  CHECK_THROWS_WITH_AS(Qbf::parse("forall x. (x"), "qbf: expected ')' at offset 12", kolmo::UsageError);
  CHECK_THROWS_AS(Qbf::parse("x $"), kolmo::UsageError);
  CHECK_THROWS_AS(Qbf::parse("forall a b c d e f g h i . a"), kolmo::UsageError);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Qbf q = random_qbf(rng, 4, 4);
    CHECK(Qbf::parse(q.str()) == q);
  }
}

TEST_CASE("arithmetization agrees with boolean semantics") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Qbf q = random_qbf(rng, 6, 4);
    for (unsigned cap : {2u, 4u}) {
      const Arithmetization a(q, 17, cap);
      INFO(q.str());
      CHECK(a.final_value() == (q.truth() ? 1u : 0u));
      for (const auto& op : a.ops()) {
        if (op.kind != kolmo::ArithOp::Kind::linearize) CHECK(op.degree <= cap);
      }
    }
  }
}

TEST_CASE("slices have the scheduled degree") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 60; ++i) {
    const Qbf q = random_qbf(rng, 4, 4);
    const Arithmetization a(q, 101, 2);
    Point rho = a.empty_point();
    for (std::size_t k = 0; k < a.rounds(); ++k) {
      const auto& op = a.ops()[k];
      const auto s = a.slice(k, rho);
      REQUIRE(s.size() == op.degree + 1);
      for (std::uint64_t x = 0; x < 101; x += 7) {
        Point at = rho;
        at[op.var] = x;
        CHECK(kolmo::poly_eval(s, x, 101) == a.evaluate(k + 1, at));
      }
      CHECK(a.combine(k, rho, kolmo::poly_eval(s, 0, 101), kolmo::poly_eval(s, 1, 101)) == a.evaluate(k, rho));
      rho[op.var] = rng() % 101;
    }
  }
}

TEST_CASE("field size") {
  const Qbf q = Qbf::parse("forall x. x");
  CHECK(kolmo::smallest_valid_prime(q) == 3);
  CHECK(kolmo::smallest_valid_prime(Qbf::parse("1")) == 2);
  CHECK(kolmo::smallest_valid_prime(Qbf::parse("forall x. exists y. exists z. ((x | y) & z)")) == 17);
  const Arithmetization small(Qbf::parse("forall x. exists y. (x | y)"), 3);
  CHECK_THROWS_WITH_AS(kolmo::require_valid_field(small),
                       "field size 3 is too small; need p > 6, smallest valid p is 7", kolmo::DomainError);
  CHECK_THROWS_AS(Arithmetization(q, 15), kolmo::UsageError);
}

TEST_CASE("honest runs accept") {
  std::mt19937_64 rng(2);
  for (const auto& text : kolmo::sumcheck_suite()) {
    const auto a = arith(text);
    if (!a->qbf().truth()) continue;
    std::vector<std::uint64_t> ch(a->rounds());
    for (auto& c : ch) c = rng() % a->prime();
    const auto t = kolmo::run_protocol(*a, kolmo::honest_prover(a), ch);
    CHECK(t.accepted);
    CHECK(t.total_cost == a->soundness_bound());
  }
}

TEST_CASE("exact adversarial acceptance") {
  SUBCASE("single round at p = 17") {
    const auto a = arith("forall x. x", 17);
    const auto acc = kolmo::max_adversarial_acceptance(a);
    CHECK(acc.value == Rational(1, 17));
    CHECK(acc.value <= acc.bound);
  }
  SUBCASE("brute force on small cases") {
    for (const char* text : {"forall x. x", "exists x. (x & !x)", "forall x. forall y. (x | y)",
                             "exists x. forall y. (x & y)", "forall x. exists y. (x & !y)", "exists x. (x & x)"}) {
      for (std::uint64_t p : {7u, 11u}) {
        const auto a = std::make_shared<Arithmetization>(Qbf::parse(text), p);
        if (p <= 2 * a->degree_sum()) continue;
        INFO(text << " p=" << p);
        CHECK(kolmo::max_adversarial_acceptance(a).value == brute_acceptance(*a, 0, a->empty_point(), 1));
      }
    }
  }
  SUBCASE("true formulas give 1") {
    CHECK(kolmo::max_adversarial_acceptance(arith("forall x. exists y. (x | y)")).value == 1);
  }
  SUBCASE("work ceiling") {
    const auto a = arith("forall x. exists y. forall z. (x | (y & z))");
    CHECK_THROWS_AS(kolmo::max_adversarial_acceptance(a, 1000), kolmo::DomainError);
  }
}

TEST_CASE("compiled honest strategy") {
  for (const char* text : {"1", "exists x. x", "forall x. exists y. (x | y)", "exists x. (x & x)",
                           "forall x. exists y. ((x & y) | (!x & !y))"}) {
    INFO(text);
    const auto a = arith(text);
    const auto c = kolmo::compile_honest_strategy(a);
    CHECK(c.tree.epsilon() == a->soundness_bound());
    CHECK(kolmo::validate_tree(c.tree, Backend::syntactic, c.model).empty());
    CHECK(kolmo::prove_probability(c.tree, c.target, Backend::syntactic, c.model).p == 1);
    CHECK(kolmo::false_statement_probability(c.tree, c.model) == 0);
    CHECK(kolmo::StrategyTree::parse(c.tree.serialize()) == c.tree);
    const auto ex = kolmo::extract_deterministic(c.tree, c.target, c.model);
    REQUIRE(ex.derivation);
    CHECK(ex.derivation->conclusion() == c.target);
    CHECK(kolmo::check_derivation(*ex.derivation, kolmo::Theory{}, c.model).ok);
  }
  CHECK_THROWS_AS(kolmo::compile_honest_strategy(arith("forall x. x")), kolmo::UsageError);
  CHECK_THROWS_AS(kolmo::compile_honest_strategy(arith("forall x. exists y. forall z. (z | (!z | (x & y)))"), 100),
                  kolmo::DomainError);
}

TEST_CASE("optimal cheating prover as a strategy") {
  for (const char* text : {"forall x. x", "forall x. forall y. (x | y)", "exists x. forall y. ((x & y) | (!x & !y))"}) {
    INFO(text);
    const auto a = arith(text);
    const auto acc = kolmo::max_adversarial_acceptance(a);
    const auto c = kolmo::compile_strategy(a, acc.best_prover);
    CHECK(kolmo::validate_tree(c.tree, Backend::syntactic, c.model).empty());
    const auto p = kolmo::prove_probability(c.tree, c.target, Backend::syntactic, c.model).p;
    CHECK(p == acc.value);
    CHECK(p > 0);
    CHECK(kolmo::false_statement_probability(c.tree, c.model) <= c.tree.epsilon());
    CHECK_FALSE(eval_statement(c.target, c.model));
  }
}

TEST_CASE("suite") {
  const auto suite = kolmo::sumcheck_suite();
  unsigned t = 0, f = 0;
  std::string values;
  for (const auto& text : suite) {
    const auto a = arith(text);
    CHECK(a->qbf().prefix.size() <= 3);
    (a->qbf().truth() ? t : f) += 1;
    if (a->qbf().truth()) continue;
    const auto acc = kolmo::max_adversarial_acceptance(a);
    INFO(text);
    CHECK(acc.value <= acc.bound);
    values += (values.empty() ? "" : ",") + kolmo::to_string(acc.value);
  }
  CHECK(t >= 20);
  CHECK(f >= 20);
  golden::check("sumcheck_suite_false_acceptance", values);
}
