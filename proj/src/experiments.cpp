#include "kolmo/experiments.hpp"

#include <cmath>

#include "kolmo/error.hpp"

namespace kolmo {

const FinitizedModel& strategy_model() {
  static const FinitizedModel m = FinitizedModel::reference(6, 14, 10000);
  return m;
}

std::vector<FuzzCase> fuzz_corpus(std::size_t count, std::uint64_t seed, const FinitizedModel& m) {
  const Rational eps[] = {Rational(1, 16), Rational(1, 8), Rational(1, 4)};
  std::vector<FuzzCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(fuzz_tree(seed + i, eps[(seed + i) % 3], m));
  }
  return out;
}

CorpusRow audit_case(const FuzzCase& c, const FinitizedModel& m) {
  CorpusRow r;
  r.label = c.label;
  r.epsilon = c.tree.epsilon();
  r.p = prove_probability(c.tree, c.target, Backend::syntactic, m).p;
  r.false_probability = false_statement_probability(c.tree, m);
  r.nodes = c.tree.node_count();
  r.sufficient = r.p > r.epsilon;
  if (!r.sufficient) return r;
  try {
    const auto ex = extract_deterministic(c.tree, c.target, m);
    if (!ex.derivation) {
      r.error = "no derivation";
      return r;
    }
    r.derivation_steps = ex.derivation->steps.size();
    const auto check = check_derivation(*ex.derivation, Theory{}, m);
    if (!check.ok) {
      r.error = "step " + std::to_string(check.bad_step) + ": " + check.reason;
    } else if (ex.derivation->conclusion() != c.target) {
      r.error = "derivation concludes " + ex.derivation->conclusion().str();
    } else {
      r.extracted = true;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

McRow mc_case(const FuzzCase& c, const FinitizedModel& m, std::uint64_t trials, std::uint64_t seed) {
  McRow r;
  r.label = c.label;
  r.p = prove_probability(c.tree, c.target, Backend::syntactic, m).p;
  r.mc = monte_carlo(c.tree, c.target, Backend::syntactic, m, trials, seed);
  const double p = r.p.convert_to<double>();
  r.tolerance = 3 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
  r.within = std::abs(r.mc.p_hat - p) <= r.tolerance + 1e-12;
  return r;
}

std::vector<FuzzCase> mixed_corpus(std::size_t count, std::uint64_t seed, const FinitizedModel& m) {
  const Rational eps[] = {Rational(1, 16), Rational(1, 8), Rational(1, 4)};
  std::vector<FuzzCase> out;
  for (std::uint64_t s = seed; out.size() < count; ++s) {
    if (s - seed > 100 * count + 1000) throw DomainError("work_ceiling", "too few fuzz trees with 0 < p < 1");
    auto c = fuzz_tree(s, eps[s % 3], m);
    const auto p = prove_probability(c.tree, c.target, Backend::syntactic, m).p;
    if (p > 0 && p < 1) out.push_back(std::move(c));
  }
  return out;
}

SuiteRow sumcheck_row(const std::string& qbf, std::uint64_t p, unsigned degree_cap, bool measure_extraction) {
  const Qbf q = Qbf::parse(qbf);
  SuiteRow r;
  r.qbf = q.str();
  r.truth = q.truth();
  r.prime = p ? p : smallest_valid_prime(q, degree_cap);
  auto a = std::make_shared<const Arithmetization>(q, r.prime, degree_cap);
  require_valid_field(*a);
  r.rounds = a->rounds();
  r.degree_sum = a->degree_sum();
  r.bound = a->soundness_bound();
  if (r.truth) {
    const auto c = compile_honest_strategy(a);
    r.honest = prove_probability(c.tree, c.target, Backend::syntactic, c.model).p;
    r.nodes = c.tree.node_count();
    r.depth = c.tree.depth();
    if (measure_extraction) {
      const auto ex = extract_deterministic(c.tree, c.target, c.model);
      if (ex.derivation) {
        r.extracted_steps = ex.derivation->steps.size();
        r.extraction_checked = check_derivation(*ex.derivation, Theory{}, c.model).ok &&
                               ex.derivation->conclusion() == c.target;
      }
    }
  } else {
    r.adversarial = max_adversarial_acceptance(a).value;
  }
  return r;
}

}  // namespace kolmo
