#include "kolmo/dnc.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

// Least steps of a conditional program of length <= c printing each output.
std::map<BitString, std::uint64_t> conditional_outputs(const MachineConfig& cfg, const BitString& condition,
                                                       unsigned c, std::uint64_t budget) {
  std::map<BitString, std::uint64_t> seen;
  const std::uint64_t cond = condition.word();
  const auto cond_len = static_cast<unsigned>(condition.size());
  for (std::uint64_t i = 0; i < count_up_to(c); ++i) {
    const auto len = static_cast<unsigned>(std::bit_width(i + 1) - 1);
    const PackedRun r = run_packed(cfg, i + 1 - (std::uint64_t{1} << len), len, cond, cond_len, budget);
    if (r.outcome != Outcome::halted) continue;
    const auto out = BitString::from_word(r.output, r.output_length);
    auto [it, fresh] = seen.emplace(out, r.steps);
    if (!fresh) it->second = std::min(it->second, r.steps);
  }
  return seen;
}

void check_conditional(const MachineConfig& cfg, unsigned c, std::uint64_t budget) {
  cfg.validate();
  if (cfg.variant != Variant::conditional) throw UsageError("oracle needs the conditional machine");
  if (c > 24) throw UsageError("oracle constant c must be <= 24");
  if (budget > cfg.max_steps_hard) throw UsageError("budget exceeds max_steps_hard");
}

}  // namespace

OracleAnswer first_complex_string(const MachineConfig& conditional, const BitString& condition, unsigned c,
                                  std::uint64_t budget) {
  check_conditional(conditional, c, budget);
  if (condition.size() > 64) throw UsageError("condition longer than 64 bits");
  const auto seen = conditional_outputs(conditional, condition, c, budget);
  OracleAnswer a;
  // At most 2^(c+1) - 1 strings are printed, so the search ends.
  for (std::uint64_t i = 0;; ++i) {
    const auto y = BitString::from_index(i);
    const auto it = seen.find(y);
    if (it == seen.end()) {
      a.y = y;
      return a;
    }
    a.needed_time = std::max(a.needed_time, it->second);
  }
}

ConditionalOracle exact_oracle(const MachineConfig& conditional, unsigned c, std::uint64_t t_inf) {
  check_conditional(conditional, c, t_inf);
  return [=](const BitString& u) { return first_complex_string(conditional, u, c, t_inf); };
}

ConditionalOracle time_bounded_oracle(const MachineConfig& conditional, unsigned c, std::uint64_t t) {
  return exact_oracle(conditional, c, t);
}

DncResult dnc_construct(const ConditionalOracle& oracle, const MachineConfig& plain,
                        const MachineConfig& conditional, unsigned n, unsigned c, std::uint64_t t_inf) {
  plain.validate();
  if (plain.variant != Variant::plain) throw UsageError("dnc_construct needs the plain machine");
  check_conditional(conditional, c, t_inf);
  if (t_inf > plain.max_steps_hard) throw UsageError("budget exceeds max_steps_hard");
  if (n > 16) throw UsageError("n must be <= 16");

  DncResult res;
  res.n = n;
  res.c = c;
  FiniteSequence z;
  for (std::uint64_t i = 0; i < count_up_to(n); ++i) {
    DncQuery q;
    q.position = i;
    q.program = BitString::from_index(i);
    q.condition = pair(BitString::from_index(i), q.program);
    if (q.condition.size() > 64) throw UsageError("condition for position " + std::to_string(i) + " exceeds 64 bits");
    const OracleAnswer a = oracle(q.condition);
    q.answer = a.y;
    q.needed_time = a.needed_time;

    const auto printed = conditional_outputs(conditional, q.condition, c, t_inf);
    if (printed.count(a.y) > 0) {
      throw DomainError("oracle_contradiction", "oracle answer '" + a.y.str() + "' for position " +
                                                    std::to_string(i) + " has C(y|u) <= " + std::to_string(c));
    }

    const RunResult r = run_plain(plain, q.program, t_inf);
    if (r.halted()) q.differs = sequence_term(decode_sequence(r.output), i) != a.y;
    res.diagonal = res.diagonal && q.differs;
    res.stabilization_time = std::max(res.stabilization_time, q.needed_time);
    if (!a.y.empty()) z.push_back({i, a.y});
    res.queries.push_back(std::move(q));
  }
  res.output = encode_sequence(z);

  res.verified = true;
  if (n > 0 && res.output.size() <= plain.memory_limit) {
    for (const auto& p : enumerate_programs(n - 1)) {
      const RunResult r = run_plain(plain, p, t_inf);
      if (r.halted() && r.output == res.output) {
        res.verified = false;
        break;
      }
    }
  }
  return res;
}

std::optional<unsigned> measure_dnc_constant(const MachineConfig& plain, const MachineConfig& conditional,
                                             unsigned max_n, unsigned max_c, std::uint64_t t_inf) {
  for (unsigned c = 0; c <= max_c; ++c) {
    const auto oracle = exact_oracle(conditional, c, t_inf);
    bool ok = true;
    for (unsigned n = 0; n <= max_n && ok; ++n) {
      const auto r = dnc_construct(oracle, plain, conditional, n, c, t_inf);
      ok = r.diagonal && r.verified;
    }
    if (ok) return c;
  }
  return std::nullopt;
}

}  // namespace kolmo
