#include "kolmo/complexity.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>
#include <thread>
#include <tuple>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

constexpr std::string_view kTableMagic = "kolmo-table v1";

struct Candidate {
  unsigned length;
  std::uint64_t steps;
  std::uint64_t program;  // length-lex index

  auto key() const { return std::tie(length, steps, program); }
};

// Strict partial order: a is no longer, no slower, and earlier in
// (length, steps, index) order. Keeping the undominated candidates makes the
// result independent of insertion order.
bool dominates(const Candidate& a, const Candidate& b) {
  return a.length <= b.length && a.steps <= b.steps && a.key() < b.key();
}

void insert(std::vector<Candidate>& front, const Candidate& c) {
  for (const auto& f : front) {
    if (dominates(f, c)) return;
  }
  std::erase_if(front, [&](const Candidate& f) { return dominates(c, f); });
  auto pos = std::lower_bound(front.begin(), front.end(), c,
                              [](const Candidate& a, const Candidate& b) { return a.key() < b.key(); });
  front.insert(pos, c);
}

using Fronts = std::vector<std::vector<Candidate>>;

void scan_range(const MachineConfig& cfg, std::uint64_t begin, std::uint64_t end, unsigned N,
                std::uint64_t cond, unsigned cond_len, std::uint64_t budget, Fronts& fronts) {
  const bool prefix = cfg.variant == Variant::prefix;
  for (std::uint64_t i = begin; i < end; ++i) {
    const auto len = static_cast<unsigned>(std::bit_width(i + 1) - 1);
    const std::uint64_t word = i + 1 - (std::uint64_t{1} << len);
    const PackedRun r = run_packed(cfg, word, len, cond, cond_len, budget);
    if (r.outcome != Outcome::halted || r.output_length > N) continue;
    if (prefix && r.consumed != len) continue;
    const std::uint64_t x = first_index_of_length(r.output_length) + r.output;
    insert(fronts[x], Candidate{len, r.steps, i});
  }
}

std::string show(const BitString& s) { return s.empty() ? "-" : s.str(); }

BitString read_bits(std::string_view tok) {
  if (tok == "-") return BitString();
  return BitString::parse(tok);
}

std::uint64_t read_u64(std::string_view tok, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw UsageError("table file: bad " + std::string(what) + " '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

void check_n(const ComplexityTable& table, unsigned n) {
  if (n > table.max_string_length()) {
    throw UsageError("n = " + std::to_string(n) + " exceeds the table's N = " +
                     std::to_string(table.max_string_length()));
  }
}

void check_scannable(const ComplexityTable& table) {
  if (table.variant() == Variant::prefix) {
    throw UsageError("halting scans need a plain or conditional table");
  }
}

PackedRun run_program(const ComplexityTable& table, const Program& p, std::uint64_t budget) {
  return run_packed(table.machine(), p.word(), static_cast<unsigned>(p.size()), table.condition().word(),
                    static_cast<unsigned>(table.condition().size()), budget);
}

}  // namespace

ComplexityTable ComplexityTable::build(const MachineConfig& machine, unsigned N, unsigned L,
                                       std::uint64_t budget, const BitString& condition,
                                       const BuildOptions& options) {
  machine.validate();
  if (N > machine.memory_limit || N > 24) throw UsageError("N must be <= min(memory_limit, 24)");
  if (L > machine.max_program_length || L > 40) {
    throw UsageError("L = " + std::to_string(L) + " exceeds max_program_length");
  }
  const unsigned need = N + literal_overhead(machine.variant, N);
  if (L < need) {
    throw UsageError("L = " + std::to_string(L) + " is below N + literal overhead = " + std::to_string(need));
  }
  if (budget > machine.max_steps_hard) throw UsageError("budget exceeds max_steps_hard");
  if (!condition.empty() && machine.variant != Variant::conditional) {
    throw UsageError("a condition is only meaningful for the conditional variant");
  }
  if (condition.size() > 64) throw UsageError("condition longer than 64 bits");
  const std::uint64_t programs = count_up_to(L);
  const double work = static_cast<double>(programs) * static_cast<double>(budget);
  if (work > options.work_ceiling) {
    std::ostringstream os;
    os << "infeasible budget: 2^(L+1) x T = " << work << " exceeds the work ceiling " << options.work_ceiling;
    throw DomainError("infeasible_budget", os.str());
  }

  const std::uint64_t strings = count_up_to(N);
  const std::uint64_t cond = condition.word();
  const auto cond_len = static_cast<unsigned>(condition.size());
  const unsigned workers = std::max(1U, options.workers);

  std::vector<Fronts> parts(workers, Fronts(strings));
  if (workers == 1) {
    scan_range(machine, 0, programs, N, cond, cond_len, budget, parts[0]);
  } else {
    std::vector<std::thread> threads;
    const std::uint64_t chunk = (programs + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t b = std::min(programs, w * chunk);
      const std::uint64_t e = std::min(programs, b + chunk);
      threads.emplace_back([&, b, e, w] { scan_range(machine, b, e, N, cond, cond_len, budget, parts[w]); });
    }
    for (auto& t : threads) t.join();
    for (unsigned w = 1; w < workers; ++w) {
      for (std::uint64_t x = 0; x < strings; ++x) {
        for (const auto& c : parts[w][x]) insert(parts[0][x], c);
      }
    }
  }

  ComplexityTable t;
  t.machine_ = machine;
  t.N_ = N;
  t.L_ = L;
  t.budget_ = budget;
  t.condition_ = condition;
  t.entries_.reserve(strings);
  for (std::uint64_t x = 0; x < strings; ++x) {
    TableEntry e;
    e.x = BitString::from_index(x);
    for (const auto& c : parts[0][x]) {
      e.frontier.push_back({c.length, c.steps, BitString::from_index(c.program)});
    }
    if (!e.frontier.empty()) {
      e.value = e.frontier.front().length;
      e.witness = e.frontier.front().program;
      e.stabilization_time = e.frontier.front().steps;
    }
    t.entries_.push_back(std::move(e));
  }
  return t;
}

const TableEntry& ComplexityTable::entry(const BitString& x) const {
  if (!covers(x)) {
    throw UsageError("string of length " + std::to_string(x.size()) + " is outside the table (N = " +
                     std::to_string(N_) + ")");
  }
  return entries_[x.index()];
}

std::string ComplexityTable::serialize() const {
  std::ostringstream os;
  os << kTableMagic << "\n"
     << "fingerprint " << machine_.fingerprint() << "\n"
     << "variant " << to_string(machine_.variant) << "\n"
     << "opcode_table " << machine_.opcode_table << "\n"
     << "max_steps_hard " << machine_.max_steps_hard << "\n"
     << "memory_limit " << machine_.memory_limit << "\n"
     << "max_program_length " << machine_.max_program_length << "\n"
     << "condition " << show(condition_) << "\n"
     << "N " << N_ << "\n"
     << "L " << L_ << "\n"
     << "budget " << budget_ << "\n"
     << "entries " << entries_.size() << "\n";
  for (const auto& e : entries_) {
    os << show(e.x) << ' ';
    if (e.value) {
      os << *e.value << ' ' << show(e.witness) << ' ' << e.stabilization_time << ' ';
    } else {
      os << "? - 0 ";
    }
    if (e.frontier.empty()) os << '-';
    for (std::size_t i = 0; i < e.frontier.size(); ++i) {
      const auto& f = e.frontier[i];
      if (i > 0) os << ',';
      os << f.length << ':' << f.steps << ':' << show(f.program);
    }
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

ComplexityTable ComplexityTable::deserialize(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  std::size_t at = 0;
  auto next = [&]() -> std::string_view {
    if (at >= lines.size()) throw UsageError("table file: unexpected end of input");
    return lines[at++];
  };
  auto field = [&](std::string_view key) -> std::string_view {
    const auto line = next();
    if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
      throw UsageError("table file: expected '" + std::string(key) + "', got '" + std::string(line) + "'");
    }
    return line.substr(key.size() + 1);
  };

  if (next() != kTableMagic) throw UsageError("table file: missing 'kolmo-table v1' header");
  const std::string fingerprint(field("fingerprint"));
  ComplexityTable t;
  t.machine_.variant = parse_variant(field("variant"));
  t.machine_.opcode_table = std::string(field("opcode_table"));
  t.machine_.max_steps_hard = read_u64(field("max_steps_hard"), "max_steps_hard");
  t.machine_.memory_limit = static_cast<unsigned>(read_u64(field("memory_limit"), "memory_limit"));
  t.machine_.max_program_length =
      static_cast<unsigned>(read_u64(field("max_program_length"), "max_program_length"));
  t.machine_.validate();
  if (t.machine_.fingerprint() != fingerprint) {
    throw DomainError("fingerprint_mismatch", "table file: machine fingerprint " + fingerprint +
                                                  " does not match its config (" + t.machine_.fingerprint() +
                                                  ")");
  }
  t.condition_ = read_bits(field("condition"));
  t.N_ = static_cast<unsigned>(read_u64(field("N"), "N"));
  t.L_ = static_cast<unsigned>(read_u64(field("L"), "L"));
  t.budget_ = read_u64(field("budget"), "budget");
  const std::uint64_t count = read_u64(field("entries"), "entries");
  if (t.N_ > 24 || count != count_up_to(t.N_)) throw UsageError("table file: entry count does not match N");
  t.entries_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto line = next();
    const auto tok = split(line, ' ');
    if (tok.size() != 5) throw UsageError("table file: malformed entry '" + std::string(line) + "'");
    TableEntry e;
    e.x = read_bits(tok[0]);
    if (e.x.index() != i) throw UsageError("table file: entries out of order at '" + std::string(line) + "'");
    if (tok[1] != "?") {
      e.value = static_cast<unsigned>(read_u64(tok[1], "value"));
      e.witness = read_bits(tok[2]);
      e.stabilization_time = read_u64(tok[3], "stabilization time");
    }
    if (tok[4] != "-") {
      for (auto point : split(tok[4], ',')) {
        const auto parts = split(point, ':');
        if (parts.size() != 3) throw UsageError("table file: malformed frontier point");
        e.frontier.push_back({static_cast<unsigned>(read_u64(parts[0], "length")), read_u64(parts[1], "steps"),
                              read_bits(parts[2])});
      }
    }
    const bool consistent =
        e.value ? (!e.frontier.empty() && e.frontier.front().length == *e.value &&
                   e.frontier.front().program == e.witness && e.frontier.front().steps == e.stabilization_time)
                : e.frontier.empty();
    if (!consistent) throw UsageError("table file: entry disagrees with its frontier: '" + std::string(line) + "'");
    t.entries_.push_back(std::move(e));
  }
  if (next() != "end") throw UsageError("table file: missing 'end' trailer");
  return t;
}

std::string ComplexityTable::to_csv() const {
  std::ostringstream os;
  os << "string,C,witness,stab_time\n";
  for (const auto& e : entries_) {
    os << e.x.str() << ',';
    if (e.value) os << *e.value << ',' << e.witness.str() << ',' << e.stabilization_time;
    else os << ",,";
    os << "\n";
  }
  return os.str();
}

std::optional<unsigned> time_bounded_c(const ComplexityTable& table, const BitString& x, std::uint64_t t) {
  if (t > table.budget()) throw UsageError("t exceeds the table budget");
  std::optional<unsigned> best;
  for (const auto& f : table.entry(x).frontier) {
    if (f.steps <= t && (!best || f.length < *best)) best = f.length;
  }
  return best;
}

std::uint64_t stabilization_bound(const ComplexityTable& table, unsigned n) {
  check_n(table, n);
  std::uint64_t b = 0;
  for (std::uint64_t i = 0; i < count_up_to(n); ++i) {
    b = std::max(b, table.entries()[i].stabilization_time);
  }
  return b;
}

BoundReport halting_bound_check(const ComplexityTable& table, unsigned n, unsigned margin) {
  check_n(table, n);
  check_scannable(table);
  BoundReport rep;
  rep.n = n;
  rep.margin = margin;
  rep.bound = stabilization_bound(table, n);
  std::optional<unsigned> shortest;
  for (const auto& p : enumerate_programs(n)) {
    const PackedRun r = run_program(table, p, table.budget());
    if (r.outcome != Outcome::halted || r.steps <= rep.bound) continue;
    const auto len = static_cast<unsigned>(p.size());
    if (!shortest) shortest = len;
    const BitString out = BitString::from_word(r.output, r.output_length);
    if (margin <= n && len <= n - margin) rep.violations.push_back({p, r.steps, out});
    if (table.covers(out)) {
      const auto v = table.value(out);
      const auto ct = time_bounded_c(table, out, r.steps);
      if (!v || *v > len || !ct || *ct > len) rep.consistent = false;
    }
  }
  rep.minimal_margin = shortest ? n - *shortest + 1 : 0;
  return rep;
}

BitString first_incompressible(const ComplexityTable& table, unsigned n) {
  check_n(table, n);
  const std::uint64_t begin = first_index_of_length(n);
  for (std::uint64_t i = begin; i < begin + (std::uint64_t{1} << n); ++i) {
    const auto& e = table.entries()[i];
    if (!e.value || *e.value >= n) return e.x;
  }
  throw InternalError("no incompressible string of length " + std::to_string(n) +
                      " in the table; its invariants are broken");
}

RnReport rn_report(const ComplexityTable& table, unsigned n) {
  RnReport rep;
  rep.n = n;
  rep.r = first_incompressible(table, n);
  for (std::uint64_t i = first_index_of_length(n); i < rep.r.index(); ++i) {
    std::optional<std::uint64_t> least;
    for (const auto& f : table.entries()[i].frontier) {
      if (f.length < n && (!least || f.steps < *least)) least = f.steps;
    }
    if (!least) throw InternalError("predecessor of r_n without a short witness");
    rep.predecessor_bound = std::max(rep.predecessor_bound, *least);
  }
  return rep;
}

HaltingAudit rn_halting_audit(const ComplexityTable& table, unsigned n, unsigned margin) {
  check_scannable(table);
  HaltingAudit audit;
  audit.n = n;
  audit.margin = margin;
  audit.bound = rn_report(table, n).predecessor_bound;
  std::optional<unsigned> shortest;
  for (const auto& p : enumerate_programs(n)) {
    const bool decided = run_program(table, p, audit.bound).outcome == Outcome::halted;
    const bool truth = run_program(table, p, table.budget()).outcome == Outcome::halted;
    const auto len = static_cast<unsigned>(p.size());
    const bool in_band = margin <= n && len <= n - margin;
    if (in_band) ++audit.scanned;
    if (decided == truth) continue;
    if (!shortest) shortest = len;
    if (in_band) audit.misdecided.push_back(p);
  }
  audit.minimal_margin = shortest ? n - *shortest + 1 : 0;
  return audit;
}

std::uint64_t count_compressible(const ComplexityTable& table, unsigned n, unsigned c) {
  check_n(table, n);
  if (c > n) throw UsageError("c must be <= n");
  std::uint64_t count = 0;
  const std::uint64_t begin = first_index_of_length(n);
  for (std::uint64_t i = begin; i < begin + (std::uint64_t{1} << n); ++i) {
    const auto& v = table.entries()[i].value;
    if (v && *v < n - c) ++count;
  }
  return count;
}

std::optional<unsigned> conditional_complexity(const ComplexityTable& table_cond, const BitString& x,
                                               const BitString& y) {
  if (table_cond.variant() != Variant::conditional) throw UsageError("not a conditional table");
  if (table_cond.condition() != y) {
    throw UsageError("table was built for condition '" + table_cond.condition().str() + "', not '" + y.str() +
                     "'");
  }
  return table_cond.value(x);
}

ComplexityTable prefix_table(const MachineConfig& machine, unsigned N, unsigned L, std::uint64_t budget,
                             const BuildOptions& options) {
  if (machine.variant != Variant::prefix) throw UsageError("prefix_table needs the prefix variant");
  return ComplexityTable::build(machine, N, L, budget, {}, options);
}

Rational kraft_sum(const ComplexityTable& table) {
  Rational sum = 0;
  for (const auto& e : table.entries()) {
    if (e.value) sum += pow2_neg(*e.value);
  }
  return sum;
}

int machine_constant(const ComplexityTable& table) {
  int c = 0;
  for (const auto& e : table.entries()) {
    if (!e.value) throw InternalError("table has an undefined value below N");
    c = std::max(c, static_cast<int>(*e.value) - static_cast<int>(e.x.size()));
  }
  return c;
}

namespace {

int max_gap(const ComplexityTable& a, const ComplexityTable& b) {
  const unsigned n = std::min(a.max_string_length(), b.max_string_length());
  int gap = 0;
  bool any = false;
  for (std::uint64_t i = 0; i < count_up_to(n); ++i) {
    const auto& va = a.entries()[i].value;
    const auto& vb = b.entries()[i].value;
    if (!va || !vb) continue;
    const int d = static_cast<int>(*va) - static_cast<int>(*vb);
    gap = any ? std::max(gap, d) : d;
    any = true;
  }
  return gap;
}

}  // namespace

int lift_constant(const ComplexityTable& plain, const ComplexityTable& conditional) {
  return max_gap(conditional, plain);
}

int prefix_gap(const ComplexityTable& plain, const ComplexityTable& prefix) { return max_gap(plain, prefix); }

}  // namespace kolmo
