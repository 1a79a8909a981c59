#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kolmo/bits.hpp"
#include "kolmo/machine.hpp"

namespace kolmo {

// Answer to "give me some y with C(y | u) > c".
struct OracleAnswer {
  BitString y;
  // Least t at which every string before y already has C^t(.|u) <= c, i.e.
  // the time after which a C^t-based search returns the same y.
  std::uint64_t needed_time = 0;
};

using ConditionalOracle = std::function<OracleAnswer(const BitString& condition)>;

// First y in length-lex order that no conditional program of length <= c
// prints on `condition` within `budget` steps.
OracleAnswer first_complex_string(const MachineConfig& conditional, const BitString& condition, unsigned c,
                                  std::uint64_t budget);

// Oracles built on first_complex_string: the exact one uses T_inf, the
// time-bounded one a smaller t.
ConditionalOracle exact_oracle(const MachineConfig& conditional, unsigned c, std::uint64_t t_inf);
ConditionalOracle time_bounded_oracle(const MachineConfig& conditional, unsigned c, std::uint64_t t);

struct DncQuery {
  std::uint64_t position = 0;  // length-lex index of the program
  Program program;
  BitString condition;  // pair(position string, program)
  BitString answer;
  std::uint64_t needed_time = 0;
  // The program's output read as a sequence has answer != its term at position.
  bool differs = true;
};

struct DncResult {
  unsigned n = 0;
  unsigned c = 0;
  BitString output;
  std::vector<DncQuery> queries;
  bool diagonal = true;  // every query differs
  // No plain program of length < n prints the output within T_inf.
  bool verified = false;
  std::uint64_t stabilization_time = 0;  // max needed_time over the queries
};

// Builds a string of plain complexity >= n by diagonalizing against every
// program of length <= n: position i of a finite-support sequence gets an
// answer of the oracle on pair(i, q_i), and the output is the sequence's
// encoding. Each answer is audited against a direct conditional scan; an
// answer printed by a program of length <= c raises oracle_contradiction.
DncResult dnc_construct(const ConditionalOracle& oracle, const MachineConfig& plain,
                        const MachineConfig& conditional, unsigned n, unsigned c, std::uint64_t t_inf);

// Least c <= max_c for which dnc_construct is diagonal and verified for every
// n <= max_n. Empty if none.
std::optional<unsigned> measure_dnc_constant(const MachineConfig& plain, const MachineConfig& conditional,
                                             unsigned max_n, unsigned max_c, std::uint64_t t_inf);

}  // namespace kolmo
