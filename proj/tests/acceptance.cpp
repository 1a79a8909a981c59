// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kolmo.h"
#include "kolmo/complexity.hpp"
#include "kolmo/dnc.hpp"
#include "kolmo/experiments.hpp"

using namespace kolmo;

namespace {

std::map<std::string, std::string> goldens() {
  std::map<std::string, std::string> out;
  std::ifstream in(std::string(KOLMO_GOLDEN_DIR) + "/values.txt");
  std::string line;
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    if (sp != std::string::npos) out[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return out;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::function<Outcome()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  failures += !o.pass;
  std::printf("CRITERION %d: %s - %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
  std::fflush(stdout);
}

const ComplexityTable& table_l16() {
  static const ComplexityTable t =
      ComplexityTable::build(MachineConfig::reference(Variant::plain), 8, 16, 10000);
  return t;
}

const ComplexityTable& table_l14() {
  static const ComplexityTable t =
      ComplexityTable::build(MachineConfig::reference(Variant::plain), 6, 14, 10000);
  return t;
}

Outcome counting() {
  unsigned checked = 0, bad = 0;
  std::string first_bad;
  for (unsigned n = 0; n <= 8; ++n) {
    for (unsigned c = 0; c <= n; ++c) {
      const auto count = count_compressible(table_l16(), n, c);
      ++checked;
      if (count >= (std::uint64_t{1} << (n - c))) {
        if (!bad++) first_bad = "n=" + std::to_string(n) + " c=" + std::to_string(c);
      }
    }
  }
  return {bad == 0, std::to_string(checked) + " (n, c) pairs, count < 2^(n-c) in all but " + std::to_string(bad) +
                        (bad ? " (first " + first_bad + ")" : "") + "; L=16, T=10^4, zero tolerance"};
}

std::vector<FuzzCase>& corpus() {
  static std::vector<FuzzCase> c = fuzz_corpus(500, 0, strategy_model());
  return c;
}

Outcome soundness() {
  std::size_t ok = 0;
  Rational worst = 0;
  for (const auto& c : corpus()) {
    const auto f = false_statement_probability(c.tree, strategy_model());
    ok += f <= c.tree.epsilon();
    const Rational ratio = f / c.tree.epsilon();
    if (ratio > worst) worst = ratio;
  }
  return {ok == corpus().size(), std::to_string(ok) + "/" + std::to_string(corpus().size()) +
                                     " fuzzed trees with exact false-statement probability <= epsilon; max ratio " +
                                     to_string(worst)};
}

Outcome conservation() {
  auto cases = corpus();
  const auto hand = hand_built_trees(strategy_model());
  cases.insert(cases.end(), hand.begin(), hand.end());
  std::size_t sufficient = 0, extracted = 0;
  std::string first_bad;
  for (const auto& c : cases) {
    const auto row = audit_case(c, strategy_model());
    sufficient += row.sufficient;
    extracted += row.extracted;
    if (row.sufficient && !row.extracted && first_bad.empty()) first_bad = row.label + ": " + row.error;
  }
  const bool pass = hand.size() == 50 && extracted == sufficient && sufficient > 0;
  return {pass, std::to_string(cases.size()) + " trees (" + std::to_string(hand.size()) + " hand-built), " +
                    std::to_string(extracted) + "/" + std::to_string(sufficient) +
                    " with p > epsilon gave a checked derivation" + (first_bad.empty() ? "" : "; " + first_bad)};
}

Outcome monte_carlo_agreement() {
  const auto cases = mixed_corpus(100, 0, strategy_model());
  std::size_t within = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) within += mc_case(cases[i], strategy_model(), 10000, i).within;
  return {within >= 95, std::to_string(within) + "/100 trees with 0<p<1 have |p_hat - p| <= 3 sqrt(p(1-p)/10^4)"};
}

Outcome halting_bound(const std::map<std::string, std::string>& g) {
  const auto probe = halting_bound_check(table_l14(), 6, 0);
  const auto rep = halting_bound_check(table_l14(), 6, probe.minimal_margin);
  const std::string b = std::to_string(rep.bound), c = std::to_string(rep.minimal_margin);
  const bool golden_ok = g.count("B6_plain_L14_T10000") && g.at("B6_plain_L14_T10000") == b &&
                         g.count("cstar_halting_N6") && g.at("cstar_halting_N6") == c;
  return {rep.violations.empty() && golden_ok,
          "B(6)=" + b + " c*=" + c + ", " + std::to_string(rep.violations.size()) +
              " violations among programs of length <= " + std::to_string(6 - rep.minimal_margin) +
              (golden_ok ? ", goldens match" : ", golden mismatch")};
}

Outcome rn_and_halting(unsigned cstar) {
  unsigned bad_r = 0, misdecided = 0;
  std::uint64_t scanned = 0;
  std::string rs;
  for (unsigned n = 0; n <= 6; ++n) {
    const BitString r = first_incompressible(table_l14(), n);
    // Independent scan: first length-n string in lex order whose table value is >= n.
    std::optional<BitString> first;
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n) && !first; ++w) {
      const auto x = BitString::from_word(w, n);
      const auto v = table_l14().value(x);
      if (!v || *v >= n) first = x;
    }
    bad_r += !first || *first != r;
    rs += (n ? "," : "") + (r.size() ? r.str() : std::string("-"));
    if (n >= cstar) {
      const auto a = rn_halting_audit(table_l14(), n, cstar);
      scanned += a.scanned;
      misdecided += a.misdecided.size();
    }
  }
  return {bad_r == 0 && misdecided == 0,
          "r_0..r_6 = " + rs + " (" + std::to_string(bad_r) + " mismatches); " + std::to_string(scanned) +
              " program decisions, " + std::to_string(misdecided) + " wrong"};
}

Outcome sumcheck() {
  std::size_t t = 0, f = 0, honest = 0, sound = 0;
  for (const auto& s : sumcheck_suite()) {
    const auto row = sumcheck_row(s, 0, kDefaultDegreeCap, false);
    if (row.truth) {
      ++t;
      honest += row.honest && *row.honest == 1;
    } else {
      ++f;
      sound += row.adversarial && *row.adversarial <= row.bound;
    }
  }
  return {t >= 20 && f >= 20 && honest == t && sound == f,
          std::to_string(honest) + "/" + std::to_string(t) + " true QBFs accepted with probability exactly 1, " +
              std::to_string(sound) + "/" + std::to_string(f) +
              " false QBFs with exact max acceptance <= sum d_i/p, smallest valid primes"};
}

Outcome dnc(const std::map<std::string, std::string>& g) {
  const auto plain = MachineConfig::reference(Variant::plain);
  const auto cond = MachineConfig::reference(Variant::conditional);
  const auto c = measure_dnc_constant(plain, cond, 5, 8, 10000);
  if (!c) return {false, "no constant c <= 8 found"};
  unsigned verified = 0, equal = 0;
  for (unsigned n = 1; n <= 5; ++n) {
    const auto res = dnc_construct(exact_oracle(cond, *c, 10000), plain, cond, n, *c, 10000);
    const auto tb = dnc_construct(time_bounded_oracle(cond, *c, std::max<std::uint64_t>(res.stabilization_time, 1)),
                                  plain, cond, n, *c, 10000);
    verified += res.verified && res.diagonal;
    equal += tb.output == res.output;
  }
  const bool golden_ok = g.count("c_dnc") && g.at("c_dnc") == std::to_string(*c);
  return {verified == 5 && equal == 5 && golden_ok,
          "c=" + std::to_string(*c) + (golden_ok ? " (golden)" : " (golden mismatch)") + ", " +
              std::to_string(verified) + "/5 outputs with C >= n, " + std::to_string(equal) +
              "/5 C^t replacements identical"};
}

Outcome extraction_size() {
  std::vector<SuiteRow> rows;
  for (const auto& s : sumcheck_suite()) {
    auto row = sumcheck_row(s, 0, kDefaultDegreeCap, true);
    if (row.truth) rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SuiteRow& a, const SuiteRow& b) {
    return std::tie(a.depth, a.nodes) < std::tie(b.depth, b.nodes);
  });
  bool all_checked = true;
  std::printf("  depth  nodes  extracted_steps  qbf\n");
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_depth;  // depth -> (min, max) steps
  for (const auto& r : rows) {
    all_checked = all_checked && r.extraction_checked;
    const std::size_t steps = r.extracted_steps.value_or(0);
    std::printf("  %5zu  %5zu  %15zu  %s\n", r.depth, r.nodes, steps, r.qbf.c_str());
    auto [it, fresh] = by_depth.emplace(r.depth, std::make_pair(steps, steps));
    if (!fresh) it->second = {std::min(it->second.first, steps), std::max(it->second.second, steps)};
  }
  bool monotone = true;
  std::size_t prev_max = 0;
  for (const auto& [d, mm] : by_depth) {
    monotone = monotone && mm.first >= prev_max;
    prev_max = mm.second;
  }
  return {all_checked, "measurement only: " + std::to_string(rows.size()) +
                           " honest strategies, every extracted derivation checked; growth with depth is " +
                           (monotone ? "monotone" : "not monotone")};
}

std::string call(const std::function<int(char**)>& f) {
  char* s = nullptr;
  if (f(&s) != KL_OK) throw std::runtime_error(std::string("C API: ") + kl_last_error());
  std::string out(s);
  kl_free(s);
  return out;
}

Outcome determinism() {
  const auto cfg = MachineConfig::reference(Variant::plain);
  BuildOptions one, four;
  four.workers = 4;
  const bool tables = ComplexityTable::build(cfg, 8, 16, 10000, {}, one).serialize() ==
                      ComplexityTable::build(cfg, 8, 16, 10000, {}, four).serialize();
  kl_table* t = nullptr;
  kl_model* m = nullptr;
  if (kl_table_build(nullptr, "plain", 8, 16, 10000, "", 2, &t) != KL_OK) return {false, kl_last_error()};
  if (kl_model_reference(6, 14, 10000, &m) != KL_OK) return {false, kl_last_error()};
  const std::vector<std::pair<std::string, std::function<int(char**)>>> cmds = {
      {"table build", [&](char** o) { return kl_table_export(t, "json", o); }},
      {"count compressible", [&](char** o) { return kl_count_compressible(t, 8, -1, o); }},
      {"bound bn", [&](char** o) { return kl_bound_bn(t, 6, -1, o); }},
      {"string rn", [&](char** o) { return kl_string_rn(t, 6, o); }},
      {"dnc", [&](char** o) { return kl_dnc(3, 2, 8, 10000, o); }},
      {"strategy fuzz", [&](char** o) { return kl_strategy_corpus(m, 60, 3, 1, o); }},
      {"strategy mc", [&](char** o) { return kl_strategy_mc_corpus(m, 5, 3, 2000, o); }},
      {"axioms random", [&](char** o) { return kl_axioms_random(m, "6,6", "2,3", "1/2", 20, 9, o); }},
      {"experiment independence", [&](char** o) { return kl_experiment_independence(m, 2, 6, "1,2,3,4", 200, 4, o); }},
      {"sumcheck compile", [&](char** o) { return kl_sumcheck_compile("forall x. exists y. (x | y)", 0, 4, 5, o); }},
      {"sumcheck suite", [&](char** o) { return kl_sumcheck_suite(0, 4, 0, o); }},
  };
  std::size_t same = 0;
  std::string diff;
  for (const auto& [name, f] : cmds) {
    if (call(f) == call(f)) {
      ++same;
    } else if (diff.empty()) {
      diff = "; differs: " + name;
    }
  }
  kl_table_free(t);
  kl_model_free(m);
  return {tables && same == cmds.size(), std::to_string(same) + "/" + std::to_string(cmds.size()) +
                                             " reports byte-identical on re-run; table 1 vs 4 workers " +
                                             (tables ? "identical" : "DIFFERENT") + diff};
}

}  // namespace

int main() {
  const auto g = goldens();
  run(1, counting);
  run(2, soundness);
  run(3, conservation);
  run(4, monte_carlo_agreement);
  run(5, [&] { return halting_bound(g); });
  run(6, [&] {
    const auto probe = halting_bound_check(table_l14(), 6, 0);
    return rn_and_halting(probe.minimal_margin);
  });
  run(7, sumcheck);
  run(8, [&] { return dnc(g); });
  run(9, extraction_size);
  run(10, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
