#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kolmo/bits.hpp"
#include "kolmo/machine.hpp"
#include "kolmo/rational.hpp"

namespace kolmo {

// One Pareto-optimal (length, steps) pair among the programs printing a string.
struct FrontierPoint {
  unsigned length = 0;
  std::uint64_t steps = 0;
  Program program;
  friend bool operator==(const FrontierPoint&, const FrontierPoint&) = default;
};

struct TableEntry {
  BitString x;
  std::optional<unsigned> value;  // empty: no enumerated program prints x within the budget
  Program witness;
  std::uint64_t stabilization_time = 0;
  // Ascending length, strictly descending steps.
  std::vector<FrontierPoint> frontier;
  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct BuildOptions {
  unsigned workers = 1;
  // Upper bound on (number of programs) x (budget).
  double work_ceiling = 1e10;
};

// Exact complexity values for every string of length <= N, computed by running
// every program of length <= L for at most `budget` steps. For the prefix
// variant the programs are the bit sources consumed exactly by a halting run.
class ComplexityTable {
 public:
  static ComplexityTable build(const MachineConfig& machine, unsigned N, unsigned L, std::uint64_t budget,
                               const BitString& condition = {}, const BuildOptions& options = {});

  const MachineConfig& machine() const { return machine_; }
  Variant variant() const { return machine_.variant; }
  unsigned max_string_length() const { return N_; }
  unsigned max_program_length() const { return L_; }
  std::uint64_t budget() const { return budget_; }
  const BitString& condition() const { return condition_; }
  const std::vector<TableEntry>& entries() const { return entries_; }

  bool covers(const BitString& x) const { return x.size() <= N_; }
  // Throws UsageError when |x| > N.
  const TableEntry& entry(const BitString& x) const;
  std::optional<unsigned> value(const BitString& x) const { return entry(x).value; }

  // Line-based text; rebuilding with equal inputs yields identical bytes.
  std::string serialize() const;
  static ComplexityTable deserialize(std::string_view text);
  // Columns: string,C,witness,stab_time
  std::string to_csv() const;

  friend bool operator==(const ComplexityTable&, const ComplexityTable&) = default;

 private:
  MachineConfig machine_;
  unsigned N_ = 0;
  unsigned L_ = 0;
  std::uint64_t budget_ = 0;
  BitString condition_;
  std::vector<TableEntry> entries_;
};

// C^t(x): shortest enumerated program printing x within t steps.
std::optional<unsigned> time_bounded_c(const ComplexityTable& table, const BitString& x, std::uint64_t t);

// B(n): max stabilization time over strings of length <= n.
std::uint64_t stabilization_bound(const ComplexityTable& table, unsigned n);

struct Violation {
  Program program;
  std::uint64_t steps = 0;
  BitString output;
};

struct BoundReport {
  unsigned n = 0;
  std::uint64_t bound = 0;  // B(n)
  unsigned margin = 0;
  std::vector<Violation> violations;  // programs of length <= n - margin halting after B(n)
  unsigned minimal_margin = 0;        // least margin with no violations
  // Every late-halting program with an in-range output is consistent with
  // the table (it never undercuts C^t after B(n)).
  bool consistent = true;
};

BoundReport halting_bound_check(const ComplexityTable& table, unsigned n, unsigned margin);

struct RnReport {
  unsigned n = 0;
  BitString r;
  // Least t such that every length-n string before r has C^t < n.
  std::uint64_t predecessor_bound = 0;
};

BitString first_incompressible(const ComplexityTable& table, unsigned n);
RnReport rn_report(const ComplexityTable& table, unsigned n);

struct HaltingAudit {
  unsigned n = 0;
  unsigned margin = 0;
  std::uint64_t bound = 0;  // predecessor_bound of r_n
  std::uint64_t scanned = 0;
  std::vector<Program> misdecided;
  unsigned minimal_margin = 0;  // least margin with nothing misdecided
};

// Decides "halts within the budget" for every program of length <= n - margin
// by running it for predecessor_bound(r_n) steps, and compares with running
// it for the table budget.
HaltingAudit rn_halting_audit(const ComplexityTable& table, unsigned n, unsigned margin);

// |{x : |x| = n, C(x) < n - c}|.
std::uint64_t count_compressible(const ComplexityTable& table, unsigned n, unsigned c);

// C(x|y) from a table built for condition y.
std::optional<unsigned> conditional_complexity(const ComplexityTable& table_cond, const BitString& x,
                                               const BitString& y);

ComplexityTable prefix_table(const MachineConfig& machine, unsigned N, unsigned L, std::uint64_t budget,
                             const BuildOptions& options = {});

// Sum of 2^-value over defined entries.
Rational kraft_sum(const ComplexityTable& table);

// max over defined entries of value(x) - |x|.
int machine_constant(const ComplexityTable& table);

// max over x covered by both tables of C(x|y) - C(x).
int lift_constant(const ComplexityTable& plain, const ComplexityTable& conditional);

// max over x covered by both tables of C(x) - K(x).
int prefix_gap(const ComplexityTable& plain, const ComplexityTable& prefix);

}  // namespace kolmo
