#pragma once

// Drivers shared by the C API and the acceptance harness: strategy corpora,
// Monte-Carlo agreement and the sumcheck suite table.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/strategy.hpp"
#include "kolmo/sumcheck.hpp"

namespace kolmo {

// The strategy model: plain table N=6, L=14, T_inf=10^4.
const FinitizedModel& strategy_model();

// Case i is fuzz_tree(seed + i) with epsilon cycling 1/16, 1/8, 1/4.
std::vector<FuzzCase> fuzz_corpus(std::size_t count, std::uint64_t seed, const FinitizedModel& m);

struct CorpusRow {
  std::string label;
  Rational epsilon;
  Rational p;
  Rational false_probability;
  std::size_t nodes = 0;
  bool sufficient = false;      // p > epsilon
  bool extracted = false;       // derivation found and checked
  std::size_t derivation_steps = 0;
  std::string error;            // why extraction failed, if it did
};

CorpusRow audit_case(const FuzzCase& c, const FinitizedModel& m);

struct McRow {
  std::string label;
  Rational p;
  MonteCarloResult mc;
  double tolerance = 0;  // 3 sqrt(p(1-p)/trials)
  bool within = false;
};

McRow mc_case(const FuzzCase& c, const FinitizedModel& m, std::uint64_t trials, std::uint64_t seed);

// The first `count` corpus cases (same seeding as fuzz_corpus) with 0 < p < 1.
std::vector<FuzzCase> mixed_corpus(std::size_t count, std::uint64_t seed, const FinitizedModel& m);

struct SuiteRow {
  std::string qbf;
  bool truth = false;
  std::uint64_t prime = 0;
  std::size_t rounds = 0;
  unsigned degree_sum = 0;
  Rational bound;                     // degree sum / p
  std::optional<Rational> honest;     // true formulas: compiled tree probability
  std::optional<Rational> adversarial;  // false formulas: exact maximum
  std::size_t nodes = 0;              // compiled honest tree
  std::size_t depth = 0;
  std::optional<std::size_t> extracted_steps;
  bool extraction_checked = false;
};

// p = 0 picks the smallest valid prime.
SuiteRow sumcheck_row(const std::string& qbf, std::uint64_t p, unsigned degree_cap, bool measure_extraction);

}  // namespace kolmo
