#pragma once

#include <cstdint>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>

#include "kolmo/bits.hpp"

namespace kolmo {

// The toy interpreter. One opcode table ("toy-v2") in three variants.
//
// A program is a sequence of instructions acting on an output tape that
// starts as "0" and a register r that starts at 0. Plain and conditional
// programs are decoded up front (a trailing incomplete instruction is an
// illegal decode: fault, 0 steps) and halt implicitly at the end of the code.
// Prefix programs are read from a bit source on demand and stop only through
// LIT or HALT.
//
//   0         EMIT0  append 0
//   10        LIT    tape := literal, halt. Plain/conditional: the literal is
//                    the rest of the program. Prefix: Elias gamma of (|x|+1),
//                    then x
//   110       EMIT1  append 1
//   1110      DUP    tape := tape tape
//   11110     BEGIN  open a loop whose body runs r+1 times (r read now)
//   111110    END    close the innermost loop; with no open loop, jump to the
//                    first instruction (an unconditional restart)
//   1111110   INC    r := r + 1
//   11111110  DBL    r := 2r + 1
//   11111111  HALT   (plain, prefix) stop;  ECHO (conditional) tape := condition
//
// Each instruction costs one step, as does the implicit halt at the end of
// plain/conditional code. Reaching that end with loops still open behaves as
// END. A tape longer than memory_limit is a fault.
enum class Variant { plain, prefix, conditional };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

struct MachineConfig {
  Variant variant = Variant::plain;
  std::string opcode_table = "toy-v2";
  std::uint64_t max_steps_hard = 1'000'000;
  unsigned memory_limit = 64;
  unsigned max_program_length = 64;

  static MachineConfig reference(Variant v);

  // Throws UsageError when a field is out of range.
  void validate() const;

  // Key-value text, one "key = value" per line, '#' comments allowed.
  std::string to_text() const;
  static MachineConfig parse(std::string_view text);

  // 16 hex digits; stable across releases for equal configs.
  std::string fingerprint() const;

  friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

using Program = BitString;

enum class Outcome : std::uint8_t { halted, budget_exceeded, fault };
enum class FaultKind : std::uint8_t { none, illegal_decode, memory_exceeded, source_exhausted };

std::string_view to_string(Outcome o);
std::string_view to_string(FaultKind f);

struct RunResult {
  Outcome outcome = Outcome::fault;
  BitString output;  // meaningful only when halted
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> bits_consumed;  // prefix variant only
  FaultKind fault = FaultKind::none;

  bool halted() const { return outcome == Outcome::halted; }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

RunResult run_plain(const MachineConfig& config, const Program& p, std::uint64_t budget);
RunResult run_prefix(const MachineConfig& config, const BitString& bit_source, std::uint64_t budget);
RunResult run_conditional(const MachineConfig& config, const Program& p, const BitString& condition,
                          std::uint64_t budget);
// Dispatches on config.variant; `condition` is ignored unless conditional.
RunResult run(const MachineConfig& config, const Program& p, const BitString& condition,
              std::uint64_t budget);

// Allocation-free form used by enumeration. Program, condition and output are
// packed most-significant-bit first.
struct PackedRun {
  Outcome outcome = Outcome::fault;
  FaultKind fault = FaultKind::none;
  unsigned output_length = 0;
  unsigned consumed = 0;
  std::uint64_t output = 0;
  std::uint64_t steps = 0;
};

PackedRun run_packed(const MachineConfig& config, std::uint64_t program, unsigned length,
                     std::uint64_t condition, unsigned condition_length, std::uint64_t budget);

// All bitstrings of length <= max_len in length-lex order.
inline auto enumerate_programs(unsigned max_len) {
  return std::views::iota(std::uint64_t{0}, count_up_to(max_len)) |
         std::views::transform([](std::uint64_t i) { return BitString::from_index(i); });
}

// FNV-1a over (program, outcome, fault, output, steps, consumed) for every
// program of length <= max_len.
std::uint64_t halting_fingerprint(const MachineConfig& config, unsigned max_len, std::uint64_t budget,
                                  const BitString& condition = {});

// Shortest literal program printing x, and its overhead over |x|.
Program literal_program(Variant v, const BitString& x);
unsigned literal_overhead(Variant v, std::size_t length);

// The single-instruction program that prints its condition (conditional variant).
Program echo_program();

}  // namespace kolmo
