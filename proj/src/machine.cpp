#include "kolmo/machine.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

constexpr std::string_view kOpcodeTable = "toy-v2";
constexpr std::uint64_t kRegisterCap = std::uint64_t{1} << 40;
constexpr unsigned kMaxOps = 64;

enum Op : std::uint8_t { kEmit0, kLit, kEmit1, kDup, kBegin, kEnd, kInc, kDbl, kLast };

// Bit source over a packed word, most significant bit first.
struct Reader {
  std::uint64_t word;
  unsigned length;
  unsigned pos = 0;

  bool exhausted() const { return pos >= length; }
  bool next() { return (word >> (length - 1 - pos++)) & 1U; }
  unsigned remaining() const { return length - pos; }
  std::uint64_t rest() const {
    const unsigned n = remaining();
    return n == 0 ? 0 : (n == 64 ? word : word & ((std::uint64_t{1} << n) - 1));
  }
};

// Decodes one instruction. Returns false if the source runs out mid-way.
// The code is unary-like: k ones then a zero selects the k-th instruction,
// and eight ones select the last.
bool decode_op(Reader& in, Op& op) {
  static constexpr Op kByOnes[] = {kEmit0, kLit, kEmit1, kDup, kBegin, kEnd, kInc, kDbl};
  for (unsigned ones = 0; ones < 8; ++ones) {
    if (in.exhausted()) return false;
    if (!in.next()) {
      op = kByOnes[ones];
      return true;
    }
  }
  op = kLast;
  return true;
}

enum class LitStatus { ok, exhausted, too_long };

// Elias gamma of (|x| + 1), then x.
LitStatus read_gamma_literal(Reader& in, unsigned mem, std::uint64_t& word, unsigned& len) {
  unsigned zeros = 0;
  for (;;) {
    if (in.exhausted()) return LitStatus::exhausted;
    if (in.next()) break;
    if (++zeros > 7) return LitStatus::too_long;
  }
  std::uint64_t v = 1;
  for (unsigned i = 0; i < zeros; ++i) {
    if (in.exhausted()) return LitStatus::exhausted;
    v = (v << 1) | (in.next() ? 1U : 0U);
  }
  if (v - 1 > mem) return LitStatus::too_long;
  len = static_cast<unsigned>(v - 1);
  word = 0;
  for (unsigned i = 0; i < len; ++i) {
    if (in.exhausted()) return LitStatus::exhausted;
    word = (word << 1) | (in.next() ? 1U : 0U);
  }
  return LitStatus::ok;
}

struct Frame {
  unsigned start;
  std::uint64_t remaining;
};

struct Code {
  std::array<Op, kMaxOps> ops{};
  unsigned count = 0;
  // Data following LIT in plain/conditional code.
  std::uint64_t lit_word = 0;
  unsigned lit_len = 0;
};

PackedRun halt_with(PackedRun r, std::uint64_t out, unsigned out_len, std::uint64_t steps) {
  r.outcome = Outcome::halted;
  r.output = out;
  r.output_length = out_len;
  r.steps = steps;
  return r;
}

PackedRun fault_with(PackedRun r, FaultKind kind, std::uint64_t steps) {
  r.outcome = Outcome::fault;
  r.fault = kind;
  r.steps = steps;
  return r;
}

PackedRun exceeded(PackedRun r, std::uint64_t steps) {
  r.outcome = Outcome::budget_exceeded;
  r.steps = steps;
  return r;
}

// Runs code. For the prefix variant `in` supplies further instructions and
// literal data on demand, and `code` grows as instructions are fetched.
PackedRun execute(const MachineConfig& cfg, Code& code, Reader* in, std::uint64_t cond, unsigned cond_len,
                  std::uint64_t budget) {
  PackedRun r;
  const bool on_demand = in != nullptr;
  const bool echo = cfg.variant == Variant::conditional;
  const unsigned mem = cfg.memory_limit;
  std::array<Frame, kMaxOps> frames{};
  unsigned depth = 0;
  std::uint64_t out = 0;
  unsigned out_len = 1;  // the tape starts as "0"
  std::uint64_t reg = 0;
  std::uint64_t steps = 0;
  unsigned pc = 0;

  for (;;) {
    Op op;
    if (pc == code.count) {
      if (on_demand) {
        if (code.count == kMaxOps) return fault_with(r, FaultKind::memory_exceeded, steps);
        if (!decode_op(*in, code.ops[code.count])) {
          r.consumed = in->pos;
          return fault_with(r, FaultKind::source_exhausted, steps);
        }
        ++code.count;
        op = code.ops[pc];
      } else if (depth > 0) {
        op = kEnd;
      } else {
        if (steps >= budget) return exceeded(r, steps);
        return halt_with(r, out, out_len, steps + 1);
      }
    } else {
      op = code.ops[pc];
    }
    if (steps >= budget) return exceeded(r, steps);
    ++steps;
    switch (op) {
      case kDup:
        if (out_len == 0) break;
        if (2 * out_len > mem) return fault_with(r, FaultKind::memory_exceeded, steps);
        out = (out << out_len) | out;
        out_len *= 2;
        break;
      case kLit: {
        std::uint64_t word = code.lit_word;
        unsigned len = code.lit_len;
        if (on_demand) {
          const LitStatus s = read_gamma_literal(*in, mem, word, len);
          if (s == LitStatus::exhausted) {
            r.consumed = in->pos;
            return fault_with(r, FaultKind::source_exhausted, steps);
          }
          if (s == LitStatus::too_long) return fault_with(r, FaultKind::memory_exceeded, steps);
          r.consumed = in->pos;
        }
        if (len > mem) return fault_with(r, FaultKind::memory_exceeded, steps);
        return halt_with(r, word, len, steps);
      }
      case kEmit0:
      case kEmit1:
        if (out_len + 1 > mem) return fault_with(r, FaultKind::memory_exceeded, steps);
        out = (out << 1) | (op == kEmit1 ? 1U : 0U);
        ++out_len;
        break;
      case kInc:
        reg = reg + 1 < kRegisterCap ? reg + 1 : kRegisterCap;
        break;
      case kDbl:
        reg = 2 * reg + 1 < kRegisterCap ? 2 * reg + 1 : kRegisterCap;
        break;
      case kBegin:
        frames[depth++] = Frame{pc + 1, reg};
        break;
      case kEnd:
        if (depth == 0) {
          pc = 0;
          continue;
        }
        if (frames[depth - 1].remaining > 0) {
          --frames[depth - 1].remaining;
          pc = frames[depth - 1].start;
          continue;
        }
        --depth;
        if (pc == code.count && !on_demand) continue;  // implicit END at end of code
        break;
      case kLast:
        if (!echo) {
          if (on_demand) r.consumed = in->pos;
          return halt_with(r, out, out_len, steps);
        }
        if (cond_len > mem) return fault_with(r, FaultKind::memory_exceeded, steps);
        out = cond;
        out_len = cond_len;
        break;
    }
    ++pc;
  }
}
std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFFU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("machine config: '" + std::string(key) + "' needs an unsigned integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::prefix: return "prefix";
    case Variant::conditional: return "conditional";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  if (text == "plain") return Variant::plain;
  if (text == "prefix") return Variant::prefix;
  if (text == "conditional") return Variant::conditional;
  throw UsageError("unknown machine variant '" + std::string(text) + "'");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::halted: return "halted";
    case Outcome::budget_exceeded: return "budget_exceeded";
    case Outcome::fault: return "fault";
  }
  return "?";
}

std::string_view to_string(FaultKind f) {
  switch (f) {
    case FaultKind::none: return "none";
    case FaultKind::illegal_decode: return "illegal_decode";
    case FaultKind::memory_exceeded: return "memory_exceeded";
    case FaultKind::source_exhausted: return "source_exhausted";
  }
  return "?";
}

MachineConfig MachineConfig::reference(Variant v) {
  MachineConfig c;
  c.variant = v;
  return c;
}

void MachineConfig::validate() const {
  if (opcode_table != kOpcodeTable) {
    throw UsageError("unknown opcode table '" + opcode_table + "' (supported: toy-v2)");
  }
  if (max_steps_hard < 1) throw UsageError("max_steps_hard must be >= 1");
  if (memory_limit < 1 || memory_limit > 64) throw UsageError("memory_limit must be in [1, 64]");
  if (max_program_length < 1 || max_program_length > 64) {
    throw UsageError("max_program_length must be in [1, 64]");
  }
}

std::string MachineConfig::to_text() const {
  std::ostringstream os;
  os << "variant = " << to_string(variant) << "\n"
     << "opcode_table = " << opcode_table << "\n"
     << "max_steps_hard = " << max_steps_hard << "\n"
     << "memory_limit = " << memory_limit << "\n"
     << "max_program_length = " << max_program_length << "\n";
  return os.str();
}

MachineConfig MachineConfig::parse(std::string_view text) {
  MachineConfig c;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("machine config: expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "variant") {
      c.variant = parse_variant(value);
    } else if (key == "opcode_table") {
      c.opcode_table = std::string(value);
    } else if (key == "max_steps_hard") {
      c.max_steps_hard = parse_u64(key, value);
    } else if (key == "memory_limit") {
      c.memory_limit = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "max_program_length") {
      c.max_program_length = static_cast<unsigned>(parse_u64(key, value));
    } else {
      throw UsageError("machine config: unknown key '" + std::string(key) + "'");
    }
  }
  c.validate();
  return c;
}

std::string MachineConfig::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex16(h);
}

PackedRun run_packed(const MachineConfig& cfg, std::uint64_t program, unsigned length,
                     std::uint64_t cond, unsigned cond_len, std::uint64_t budget) {
  Code code;
  Reader in{program, length};
  if (cfg.variant == Variant::prefix) {
    PackedRun r = execute(cfg, code, &in, cond, cond_len, budget);
    if (r.outcome != Outcome::halted && r.consumed == 0) r.consumed = in.pos;
    return r;
  }
  while (!in.exhausted()) {
    if (!decode_op(in, code.ops[code.count])) return fault_with(PackedRun{}, FaultKind::illegal_decode, 0);
    if (code.ops[code.count++] == kLit) {
      code.lit_len = in.remaining();
      code.lit_word = in.rest();
      break;
    }
  }
  return execute(cfg, code, nullptr, cond, cond_len, budget);
}
namespace {

RunResult unpack(const PackedRun& p, bool prefix) {
  RunResult r;
  r.outcome = p.outcome;
  r.fault = p.fault;
  r.steps = p.steps;
  if (p.outcome == Outcome::halted) {
    r.output = BitString::from_word(p.output, p.output_length);
    if (prefix) r.bits_consumed = p.consumed;
  }
  return r;
}

void check_call(const MachineConfig& cfg, Variant expected, const BitString& p, std::uint64_t budget) {
  cfg.validate();
  if (cfg.variant != expected) {
    throw UsageError("machine variant is " + std::string(to_string(cfg.variant)) + ", expected " +
                     std::string(to_string(expected)));
  }
  if (budget > cfg.max_steps_hard) {
    throw UsageError("budget " + std::to_string(budget) + " exceeds max_steps_hard " +
                     std::to_string(cfg.max_steps_hard));
  }
  if (p.size() > cfg.max_program_length) {
    throw UsageError("program of length " + std::to_string(p.size()) + " exceeds max_program_length " +
                     std::to_string(cfg.max_program_length));
  }
}

}  // namespace

RunResult run_plain(const MachineConfig& cfg, const Program& p, std::uint64_t budget) {
  check_call(cfg, Variant::plain, p, budget);
  return unpack(run_packed(cfg, p.word(), static_cast<unsigned>(p.size()), 0, 0, budget), false);
}

RunResult run_prefix(const MachineConfig& cfg, const BitString& source, std::uint64_t budget) {
  check_call(cfg, Variant::prefix, source, budget);
  return unpack(run_packed(cfg, source.word(), static_cast<unsigned>(source.size()), 0, 0, budget), true);
}

RunResult run_conditional(const MachineConfig& cfg, const Program& p, const BitString& condition,
                          std::uint64_t budget) {
  check_call(cfg, Variant::conditional, p, budget);
  if (condition.size() > 64) throw UsageError("condition longer than 64 bits");
  return unpack(run_packed(cfg, p.word(), static_cast<unsigned>(p.size()), condition.word(),
                           static_cast<unsigned>(condition.size()), budget),
                false);
}

RunResult run(const MachineConfig& cfg, const Program& p, const BitString& condition, std::uint64_t budget) {
  switch (cfg.variant) {
    case Variant::plain: return run_plain(cfg, p, budget);
    case Variant::prefix: return run_prefix(cfg, p, budget);
    case Variant::conditional: return run_conditional(cfg, p, condition, budget);
  }
  throw InternalError("unreachable variant");
}

std::uint64_t halting_fingerprint(const MachineConfig& cfg, unsigned max_len, std::uint64_t budget,
                                  const BitString& condition) {
  cfg.validate();
  if (max_len > cfg.max_program_length) throw UsageError("max_len exceeds max_program_length");
  if (budget > cfg.max_steps_hard) throw UsageError("budget exceeds max_steps_hard");
  const std::uint64_t cond = condition.word();
  const auto cond_len = static_cast<unsigned>(condition.size());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned len = 0; len <= max_len; ++len) {
    const std::uint64_t n = std::uint64_t{1} << len;
    for (std::uint64_t w = 0; w < n; ++w) {
      const PackedRun r = run_packed(cfg, w, len, cond, cond_len, budget);
      h = fnv1a(h, (std::uint64_t{len} << 56) | w);
      h = fnv1a(h, (static_cast<std::uint64_t>(r.outcome) << 8) | static_cast<std::uint64_t>(r.fault));
      if (r.outcome == Outcome::halted) {
        h = fnv1a(h, r.output);
        h = fnv1a(h, r.output_length);
        h = fnv1a(h, r.steps);
        h = fnv1a(h, r.consumed);
      }
    }
  }
  return h;
}

Program literal_program(Variant v, const BitString& x) {
  BitString p = BitString::parse("10");
  if (v == Variant::prefix) {
    const std::uint64_t len1 = x.size() + 1;
    const unsigned width = static_cast<unsigned>(std::bit_width(len1));
    p.append(BitString::zeros(width - 1));
    p.append(BitString::from_word(len1, width));
  }
  p.append(x);
  return p;
}

unsigned literal_overhead(Variant v, std::size_t length) {
  if (v != Variant::prefix) return 2;
  const auto width = static_cast<unsigned>(std::bit_width(std::uint64_t{length} + 1));
  return 2 + 2 * width - 1;
}

Program echo_program() { return BitString::parse("11111111"); }

}  // namespace kolmo
