#include <random>
#include <set>

#include "doctest.h"
#include "kolmo/bits.hpp"
#include "kolmo/error.hpp"
#include "kolmo/rational.hpp"

using kolmo::BitString;

TEST_CASE("length-lex bijection") {
  CHECK(BitString::from_index(0).str() == "");
  CHECK(BitString::from_index(1).str() == "0");
  CHECK(BitString::from_index(2).str() == "1");
  CHECK(BitString::from_index(3).str() == "00");
  CHECK(BitString::from_index(6).str() == "11");
  CHECK(BitString::from_index(7).str() == "000");
  for (std::uint64_t i = 0; i < 5000; ++i) CHECK(BitString::from_index(i).index() == i);
  CHECK(BitString::parse("0") < BitString::parse("1"));
  CHECK(BitString::parse("1") < BitString::parse("00"));
  CHECK(BitString::parse("") < BitString::parse("0"));
  CHECK_THROWS_AS(BitString::parse("012"), kolmo::UsageError);
}

TEST_CASE("counts") {
  CHECK(kolmo::count_up_to(0) == 1);
  CHECK(kolmo::count_up_to(2) == 7);
  CHECK(kolmo::count_up_to(12) == 8191);
  CHECK(kolmo::first_index_of_length(3) == 7);
}

TEST_CASE("self-delimiting code and pairing") {
  const auto s = BitString::parse("101");
  CHECK(kolmo::self_delimit(s).str() == "11001101");
  const auto p = kolmo::pair(s, BitString::parse("0"));
  std::size_t pos = 0;
  BitString a;
  REQUIRE(kolmo::read_self_delimited(p, pos, a));
  CHECK(a == s);
  CHECK(p.substr(pos, 100).str() == "0");
  pos = 0;
  CHECK_FALSE(kolmo::read_self_delimited(BitString::parse("1100"), pos, a));
  CHECK(pos == 0);
  CHECK_FALSE(kolmo::read_self_delimited(BitString::parse("10"), pos, a));
}

TEST_CASE("pairing is injective on small strings") {
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < 63; ++i) {
    for (std::uint64_t j = 0; j < 63; ++j) {
      CHECK(seen.insert(kolmo::pair(BitString::from_index(i), BitString::from_index(j)).str()).second);
    }
  }
}

TEST_CASE("sequence encoding round trip") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    kolmo::FiniteSequence seq;
    std::uint64_t pos = 0;
    const int n = static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) {
      pos += 1 + rng() % 9;
      seq.push_back({pos, BitString::from_index(1 + rng() % 60)});
    }
    const auto enc = kolmo::encode_sequence(seq);
    CHECK(kolmo::decode_sequence(enc) == seq);
    for (const auto& e : seq) CHECK(kolmo::sequence_term(seq, e.position) == e.term);
  }
  CHECK(kolmo::decode_sequence(BitString()).empty());
  // Garbage decodes to something; no throw.
  CHECK_NOTHROW(kolmo::decode_sequence(BitString::parse("1011001")));
}

TEST_CASE("decoding: last write wins, empty terms dropped") {
  using kolmo::self_delimit;
  const auto i2 = self_delimit(BitString::from_index(2));
  const auto enc = i2 + self_delimit(BitString::parse("0")) + i2 + self_delimit(BitString::parse("11")) +
                   self_delimit(BitString::from_index(5)) + self_delimit(BitString());
  const auto seq = kolmo::decode_sequence(enc);
  REQUIRE(seq.size() == 1);
  CHECK(seq[0].position == 2);
  CHECK(seq[0].term.str() == "11");
}

TEST_CASE("rationals") {
  CHECK(kolmo::to_string(kolmo::parse_rational("2/4")) == "1/2");
  CHECK(kolmo::to_string(kolmo::parse_rational("3")) == "3/1");
  CHECK(kolmo::to_string(kolmo::pow2_neg(3)) == "1/8");
  CHECK_THROWS_AS(kolmo::parse_rational("1/0"), kolmo::UsageError);
  CHECK_THROWS_AS(kolmo::parse_rational("a/2"), kolmo::UsageError);
}
