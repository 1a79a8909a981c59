#include <set>

#include "doctest.h"
#include "golden.hpp"
#include "kolmo/dnc.hpp"
#include "kolmo/error.hpp"
#include "reference_interpreter.hpp"

using kolmo::BitString;
using kolmo::MachineConfig;
using kolmo::Variant;

namespace {

const MachineConfig kPlain = MachineConfig::reference(Variant::plain);
const MachineConfig kCond = MachineConfig::reference(Variant::conditional);
constexpr std::uint64_t kTinf = 10000;

// Independent oracle: reference interpreter, string outputs.
std::string ref_first_complex(const std::string& u, unsigned c) {
  std::set<std::string> printed;
  for (std::uint64_t i = 0; i < (std::uint64_t{2} << c) - 1; ++i) {
    const auto r = ref::run("conditional", ref::from_index(i), u, kTinf);
    if (r.halted) printed.insert(r.output);
  }
  for (std::uint64_t i = 0;; ++i) {
    const auto y = ref::from_index(i);
    if (!printed.count(y)) return y;
  }
}

}  // namespace

TEST_CASE("oracle answers match the reference scan") {
  for (unsigned c = 0; c <= 6; ++c) {
    for (const auto& u : kolmo::enumerate_programs(4)) {
      const auto a = kolmo::first_complex_string(kCond, u, c, kTinf);
      CHECK(a.y.str() == ref_first_complex(u.str(), c));
      // The time-bounded oracle at needed_time agrees.
      CHECK(kolmo::first_complex_string(kCond, u, c, a.needed_time).y == a.y);
    }
  }
}

TEST_CASE("diagonal construction") {
  const auto c = kolmo::measure_dnc_constant(kPlain, kCond, 5, 12, kTinf);
  REQUIRE(c.has_value());
  golden::check_u64("c_dnc", *c);
  const auto oracle = kolmo::exact_oracle(kCond, *c, kTinf);
  for (unsigned n = 0; n <= 5; ++n) {
    const auto r = kolmo::dnc_construct(oracle, kPlain, kCond, n, *c, kTinf);
    CHECK(r.diagonal);
    CHECK(r.verified);
    CHECK(r.queries.size() == kolmo::count_up_to(n));
    // Independent check: no program of length < n prints the output.
    for (std::uint64_t i = 0; n > 0 && i < kolmo::count_up_to(n - 1); ++i) {
      const auto run = ref::run("plain", ref::from_index(i), "", kTinf);
      CHECK_FALSE((run.halted && run.output == r.output.str()));
    }
    // Decoding the output returns each answer at its position.
    const auto z = kolmo::decode_sequence(r.output);
    for (const auto& q : r.queries) CHECK(kolmo::sequence_term(z, q.position) == q.answer);

    const auto fast = kolmo::dnc_construct(kolmo::time_bounded_oracle(kCond, *c, r.stabilization_time), kPlain,
                                           kCond, n, *c, kTinf);
    CHECK(fast.output == r.output);
  }
  if (*c > 0) {
    bool any_fail = false;
    const auto below = kolmo::exact_oracle(kCond, *c - 1, kTinf);
    for (unsigned n = 0; n <= 5; ++n) {
      const auto r = kolmo::dnc_construct(below, kPlain, kCond, n, *c - 1, kTinf);
      any_fail = any_fail || !r.diagonal || !r.verified;
    }
    CHECK(any_fail);
  }
}

TEST_CASE("a lying oracle is caught") {
  const kolmo::ConditionalOracle liar = [](const BitString&) { return kolmo::OracleAnswer{BitString::parse("0"), 0}; };
  CHECK_THROWS_AS(kolmo::dnc_construct(liar, kPlain, kCond, 2, 2, kTinf), kolmo::DomainError);
  CHECK_THROWS_AS(kolmo::exact_oracle(kPlain, 2, kTinf), kolmo::UsageError);
}
