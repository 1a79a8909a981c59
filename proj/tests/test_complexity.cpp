#include <sstream>

#include "doctest.h"
#include "golden.hpp"
#include "kolmo/complexity.hpp"
#include "kolmo/error.hpp"
#include "reference_interpreter.hpp"

using kolmo::BitString;
using kolmo::ComplexityTable;
using kolmo::MachineConfig;
using kolmo::Variant;

namespace {

const MachineConfig kPlain = MachineConfig::reference(Variant::plain);
const MachineConfig kCond = MachineConfig::reference(Variant::conditional);
const MachineConfig kPrefix = MachineConfig::reference(Variant::prefix);

const ComplexityTable& table6() {
  static const ComplexityTable t = ComplexityTable::build(kPlain, 6, 14, 10000);
  return t;
}

const ComplexityTable& prefix5() {
  static const ComplexityTable t = kolmo::prefix_table(kPrefix, 5, 12, 10000);
  return t;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + (s.empty() ? std::string("-") : s);
  return out;
}

}  // namespace

TEST_CASE("table cells match an independent direct scan") {
  const auto& t = table6();
  for (const auto& e : t.entries()) {
    const auto best = ref::direct_value("plain", e.x.str(), "", 14, 10000);
    REQUIRE(best.length.has_value());
    REQUIRE(e.value.has_value());
    CHECK(*e.value == static_cast<unsigned>(*best.length));
    CHECK(e.stabilization_time == static_cast<std::uint64_t>(best.steps));
  }
  for (const auto& e : prefix5().entries()) {
    const auto best = ref::direct_value("prefix", e.x.str(), "", 12, 10000);
    REQUIRE(best.length.has_value());
    CHECK(*e.value == static_cast<unsigned>(*best.length));
  }
}

TEST_CASE("table invariants") {
  const auto& t = table6();
  CHECK(*t.value(BitString()) <= 2);
  for (const auto& e : t.entries()) {
    REQUIRE(e.value);
    CHECK(*e.value <= e.x.size() + 2);
    const auto r = kolmo::run_plain(kPlain, e.witness, t.budget());
    CHECK(r.halted());
    CHECK(r.output == e.x);
    CHECK(e.witness.size() == *e.value);
    CHECK(r.steps == e.stabilization_time);
    if (!e.x.empty()) CHECK_FALSE(kolmo::time_bounded_c(t, e.x, 0).has_value());
    CHECK(kolmo::time_bounded_c(t, e.x, t.budget()) == e.value);
    CHECK(kolmo::time_bounded_c(t, e.x, e.stabilization_time) == e.value);
    if (e.stabilization_time > 0) {
      const auto before = kolmo::time_bounded_c(t, e.x, e.stabilization_time - 1);
      CHECK((!before || *before > *e.value));
    }
    std::optional<unsigned> prev;
    for (std::uint64_t s = 0; s <= 40; ++s) {
      const auto c = kolmo::time_bounded_c(t, e.x, s);
      if (prev) CHECK((c && *c <= *prev));
      if (c) prev = c;
    }
  }
  CHECK(kolmo::machine_constant(t) == 2);
}

TEST_CASE("staircase sample") {
  // 0^6: shorter descriptions appear as time grows.
  const auto x = BitString::zeros(6);
  std::vector<std::string> stairs;
  for (std::uint64_t s = 0; s <= 12; ++s) {
    const auto c = kolmo::time_bounded_c(table6(), x, s);
    stairs.push_back(c ? std::to_string(*c) : "u");
  }
  golden::check("staircase_000000", join(stairs));
}

TEST_CASE("build is worker-count independent and serializes byte-identically") {
  kolmo::BuildOptions three;
  three.workers = 3;
  const auto t3 = ComplexityTable::build(kPlain, 6, 14, 10000, {}, three);
  CHECK(t3.serialize() == table6().serialize());
  CHECK(ComplexityTable::build(kPlain, 6, 14, 10000).serialize() == table6().serialize());
  const auto back = ComplexityTable::deserialize(table6().serialize());
  CHECK(back == table6());
  golden::check_file("table_plain_N6_L14_T10000.txt", table6().serialize());
  golden::check_file("table_prefix_N5_L12_T10000.txt", prefix5().serialize());
}

TEST_CASE("csv export") {
  const auto csv = table6().to_csv();
  CHECK(csv.rfind("string,C,witness,stab_time\n,2,10,1\n0,0,,1\n", 0) == 0);
}

TEST_CASE("table file errors") {
  auto text = table6().serialize();
  CHECK_THROWS_AS(ComplexityTable::deserialize("nonsense"), kolmo::UsageError);
  auto bad = text;
  bad.replace(bad.find("memory_limit 64"), 15, "memory_limit 63");
  CHECK_THROWS_AS(ComplexityTable::deserialize(bad), kolmo::DomainError);
  CHECK_THROWS_AS(ComplexityTable::deserialize(text.substr(0, text.size() / 2)), kolmo::UsageError);
}

TEST_CASE("build preconditions") {
  CHECK_THROWS_AS(ComplexityTable::build(kPlain, 6, 6, 100), kolmo::UsageError);
  kolmo::BuildOptions tight;
  tight.work_ceiling = 1e6;
  CHECK_THROWS_AS(ComplexityTable::build(kPlain, 6, 14, 10000, {}, tight), kolmo::DomainError);
  CHECK_THROWS_AS(ComplexityTable::build(kPlain, 6, 14, 2'000'000), kolmo::UsageError);
  CHECK_THROWS_AS(table6().entry(BitString::zeros(7)), kolmo::UsageError);
}

TEST_CASE("stabilization bound and halting bound check") {
  const auto& t = table6();
  CHECK(kolmo::stabilization_bound(t, 0) == t.entry(BitString()).stabilization_time);
  for (unsigned k = 0; k < 6; ++k) {
    CHECK(kolmo::stabilization_bound(t, k) <= kolmo::stabilization_bound(t, k + 1));
  }
  const auto b6 = kolmo::stabilization_bound(t, 6);
  golden::check_u64("B6_plain_L14_T10000", b6);

  const auto vacuous = kolmo::halting_bound_check(t, 6, 6);
  CHECK(vacuous.violations.empty());
  const auto rep = kolmo::halting_bound_check(t, 6, 0);
  CHECK(rep.bound == b6);
  CHECK(rep.consistent);
  golden::check_u64("cstar_halting_N6", rep.minimal_margin);
  const auto at_star = kolmo::halting_bound_check(t, 6, rep.minimal_margin);
  CHECK(at_star.violations.empty());
  if (rep.minimal_margin > 0) {
    CHECK_FALSE(kolmo::halting_bound_check(t, 6, rep.minimal_margin - 1).violations.empty());
  }
  // Independent recount of the violation set.
  std::size_t late = 0;
  for (const auto& p : kolmo::enumerate_programs(6)) {
    const auto r = ref::run("plain", p.str(), "", 10000);
    if (r.halted && static_cast<std::uint64_t>(r.steps) > b6) ++late;
  }
  CHECK(late == rep.violations.size());
}

TEST_CASE("first incompressible strings") {
  const auto& t = table6();
  std::vector<std::string> rs;
  for (unsigned n = 0; n <= 6; ++n) {
    const auto rep = kolmo::rn_report(t, n);
    rs.push_back(rep.r.str());
    CHECK(rep.r.size() == n);
    CHECK(*t.value(rep.r) >= n);
    for (auto i = kolmo::first_index_of_length(n); i < rep.r.index(); ++i) {
      const auto y = BitString::from_index(i);
      CHECK(t.entry(y).witness.size() < n);
      CHECK(*kolmo::time_bounded_c(t, y, rep.predecessor_bound) < n);
    }
  }
  golden::check("rn_plain_N6", join(rs));
}

TEST_CASE("counting bound") {
  const auto& t = table6();
  for (unsigned n = 0; n <= 6; ++n) {
    std::uint64_t prev = ~std::uint64_t{0};
    for (unsigned c = 0; c <= n; ++c) {
      const auto k = kolmo::count_compressible(t, n, c);
      CHECK(k < (std::uint64_t{1} << (n - c)));
      CHECK(k <= prev);
      prev = k;
    }
    CHECK(kolmo::count_compressible(t, n, n) == 0);
  }
  golden::check_u64("count_6_2", kolmo::count_compressible(t, 6, 2));
}

TEST_CASE("conditional tables") {
  std::ostringstream dump;
  int lift = -100;
  for (const auto& y : kolmo::enumerate_programs(3)) {
    const auto tc = ComplexityTable::build(kCond, 5, 12, 10000, y);
    if (y.size() <= 5) CHECK(*kolmo::conditional_complexity(tc, y, y) <= kolmo::echo_program().size());
    lift = std::max(lift, kolmo::lift_constant(table6(), tc));
    dump << "condition " << (y.empty() ? "-" : y.str()) << "\n";
    for (const auto& e : tc.entries()) {
      dump << (e.x.empty() ? "-" : e.x.str()) << ' ' << *e.value << "\n";
    }
    CHECK_THROWS_AS(kolmo::conditional_complexity(tc, y, y + BitString::parse("1")), kolmo::UsageError);
  }
  golden::check("c_lift", std::to_string(lift));
  golden::check_file("conditional_N5_Y3_L12_T10000.txt", dump.str());
  // Direct scan spot check.
  const auto y = BitString::parse("101");
  const auto tc = ComplexityTable::build(kCond, 5, 12, 10000, y);
  for (const auto& e : tc.entries()) {
    CHECK(*e.value == static_cast<unsigned>(*ref::direct_value("conditional", e.x.str(), y.str(), 12, 10000).length));
  }
}

TEST_CASE("prefix table") {
  const auto& k = prefix5();
  CHECK(kolmo::kraft_sum(k) <= 1);
  const int gap = kolmo::prefix_gap(table6(), k);
  golden::check("c_pk", std::to_string(gap));
  for (const auto& e : k.entries()) CHECK(*e.value + gap >= *table6().value(e.x));
}
