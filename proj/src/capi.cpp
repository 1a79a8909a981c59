#include <cstring>
#include <memory>
#include <random>
#include <sstream>

#include "json.hpp"
#include "kolmo.h"
#include "kolmo/complexity.hpp"
#include "kolmo/dnc.hpp"
#include "kolmo/error.hpp"
#include "kolmo/experiments.hpp"
#include "kolmo/strategy.hpp"
#include "kolmo/sumcheck.hpp"

using json = nlohmann::ordered_json;

struct kl_table {
  kolmo::ComplexityTable table;
};

struct kl_model {
  kolmo::FinitizedModel model;
  std::shared_ptr<const kolmo::Arithmetization> arith;
};

namespace {

constexpr const char* kSchema = "kolmo-report/1";

thread_local std::string last_error;
thread_local std::string last_kind;

template <class F>
int guard(F&& f) {
  last_error.clear();
  last_kind.clear();
  try {
    f();
    return KL_OK;
  } catch (const kolmo::UsageError& e) {
    last_error = e.what();
    last_kind = "usage";
    return KL_E_USAGE;
  } catch (const kolmo::DomainError& e) {
    last_error = e.what();
    last_kind = e.kind();
    return KL_E_DOMAIN;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    last_kind = "internal";
    return KL_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    last_kind = "internal";
    return KL_E_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class T>
T& need(T* p, const char* what) {
  if (!p) throw kolmo::UsageError(std::string(what) + " is null");
  return *p;
}

std::string str_arg(const char* s, const char* what) {
  if (!s) throw kolmo::UsageError(std::string(what) + " is null");
  return s;
}

void emit(char** out, const json& j) { need(out, "output pointer") = dup(j.dump(2) + "\n"); }

json report(const char* command) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  return j;
}

std::string r(const kolmo::Rational& q) { return kolmo::to_string(q); }

json opt(const std::optional<unsigned>& v) { return v ? json(*v) : json(nullptr); }

kolmo::MachineConfig machine_from(const char* text, const char* variant) {
  const auto v = kolmo::parse_variant(variant ? variant : "plain");
  auto cfg = text ? kolmo::MachineConfig::parse(text) : kolmo::MachineConfig::reference(v);
  if (text && variant && cfg.variant != v) throw kolmo::UsageError("machine config variant does not match --variant");
  cfg.validate();
  return cfg;
}

json machine_json(const kolmo::MachineConfig& m) {
  return {{"variant", std::string(kolmo::to_string(m.variant))}, {"opcode_table", m.opcode_table},
          {"fingerprint", m.fingerprint()}};
}

json table_header(const kolmo::ComplexityTable& t) {
  return {{"machine", machine_json(t.machine())},
          {"N", t.max_string_length()},
          {"L", t.max_program_length()},
          {"budget", t.budget()},
          {"condition", t.condition().str()}};
}

kolmo::Backend backend_from(const char* s) {
  const std::string b = s ? s : "syntactic";
  if (b == "syntactic") return kolmo::Backend::syntactic;
  if (b == "semantic") return kolmo::Backend::semantic;
  throw kolmo::UsageError("backend must be syntactic or semantic, got '" + b + "'");
}

std::vector<unsigned> number_list(const char* s, const char* what) {
  std::vector<unsigned> out;
  std::stringstream ss(str_arg(s, what));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 6) {
      throw kolmo::UsageError(std::string(what) + ": bad number '" + item + "'");
    }
    out.push_back(static_cast<unsigned>(std::stoul(item)));
  }
  if (out.empty()) throw kolmo::UsageError(std::string(what) + " is empty");
  return out;
}

json violations_json(const std::vector<kolmo::TreeViolation>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back({{"node", x.node}, {"message", x.message}});
  return a;
}

std::uint64_t prime_for(const kolmo::Qbf& q, std::uint64_t p, unsigned cap) {
  return p ? p : kolmo::smallest_valid_prime(q, cap);
}

json ops_json(const kolmo::Arithmetization& a) {
  json ops = json::array();
  for (const auto& op : a.ops()) {
    const char* kind = op.kind == kolmo::ArithOp::Kind::forall   ? "forall"
                       : op.kind == kolmo::ArithOp::Kind::exists ? "exists"
                                                                 : "linearize";
    ops.push_back({{"op", kind}, {"var", a.qbf().prefix[op.var].var}, {"degree", op.degree}});
  }
  return ops;
}

json suite_row_json(const kolmo::SuiteRow& s) {
  json j{{"qbf", s.qbf},
         {"truth", s.truth},
         {"p", s.prime},
         {"rounds", s.rounds},
         {"degree_sum", s.degree_sum},
         {"bound", r(s.bound)}};
  j["honest_acceptance"] = s.honest ? json(r(*s.honest)) : json(nullptr);
  j["max_adversarial_acceptance"] = s.adversarial ? json(r(*s.adversarial)) : json(nullptr);
  j["strategy_nodes"] = s.nodes;
  j["strategy_depth"] = s.depth;
  j["extracted_steps"] = s.extracted_steps ? json(*s.extracted_steps) : json(nullptr);
  j["extraction_checked"] = s.extraction_checked;
  return j;
}

}  // namespace

extern "C" {

const char* kl_version(void) { return "kolmo 1.0.0"; }
const char* kl_last_error(void) { return last_error.c_str(); }
const char* kl_last_error_kind(void) { return last_kind.c_str(); }
void kl_free(char* p) { std::free(p); }

// ---- tables ------------------------------------------------------------------

int kl_table_build(const char* machine_text, const char* variant, unsigned n, unsigned l, uint64_t budget,
                   const char* condition, unsigned workers, kl_table** out) {
  return guard([&] {
    auto& o = need(out, "output pointer");
    const auto cfg = machine_from(machine_text, variant);
    kolmo::BuildOptions opts;
    opts.workers = workers ? workers : 1;
    const auto cond = condition ? kolmo::BitString::parse(condition) : kolmo::BitString();
    auto t = cfg.variant == kolmo::Variant::prefix ? kolmo::prefix_table(cfg, n, l, budget, opts)
                                                   : kolmo::ComplexityTable::build(cfg, n, l, budget, cond, opts);
    o = new kl_table{std::move(t)};
  });
}

int kl_table_load(const char* text, kl_table** out) {
  return guard([&] {
    auto& o = need(out, "output pointer");
    o = new kl_table{kolmo::ComplexityTable::deserialize(str_arg(text, "table text"))};
  });
}

int kl_table_export(const kl_table* t, const char* format, char** out) {
  return guard([&] {
    const auto& table = need(t, "table").table;
    const std::string f = format ? format : "json";
    if (f == "text") {
      need(out, "output pointer") = dup(table.serialize());
    } else if (f == "csv") {
      need(out, "output pointer") = dup(table.to_csv());
    } else if (f == "json") {
      json j = report("table build");
      j["table"] = table_header(table);
      json rows = json::array();
      for (const auto& e : table.entries()) {
        rows.push_back({{"string", e.x.str()},
                        {"C", opt(e.value)},
                        {"witness", e.value ? json(e.witness.str()) : json(nullptr)},
                        {"stab_time", e.stabilization_time}});
      }
      j["rows"] = rows;
      emit(out, j);
    } else {
      throw kolmo::UsageError("format must be text, csv or json, got '" + f + "'");
    }
  });
}

int kl_machine_fingerprint(const char* machine_text, const char* variant, char** out) {
  return guard([&] { need(out, "output pointer") = dup(machine_from(machine_text, variant).fingerprint()); });
}

int kl_table_query(const kl_table* t, const char* x, char** out) {
  return guard([&] {
    const auto& table = need(t, "table").table;
    const auto& e = table.entry(kolmo::BitString::parse(str_arg(x, "string")));
    json j = report("table query");
    j["table"] = table_header(table);
    j["string"] = e.x.str();
    j["C"] = opt(e.value);
    j["witness"] = e.value ? json(e.witness.str()) : json(nullptr);
    j["stab_time"] = e.stabilization_time;
    json fr = json::array();
    for (const auto& f : e.frontier) fr.push_back({{"length", f.length}, {"steps", f.steps}, {"program", f.program.str()}});
    j["frontier"] = fr;
    emit(out, j);
  });
}

void kl_table_free(kl_table* t) { delete t; }

int kl_bound_bn(const kl_table* t, unsigned n, int margin, char** out) {
  return guard([&] {
    const auto& table = need(t, "table").table;
    auto rep = kolmo::halting_bound_check(table, n, margin < 0 ? 0 : static_cast<unsigned>(margin));
    if (margin < 0) rep = kolmo::halting_bound_check(table, n, rep.minimal_margin);
    json j = report("bound bn");
    j["table"] = table_header(table);
    j["n"] = rep.n;
    j["B"] = rep.bound;
    j["margin"] = rep.margin;
    j["minimal_margin"] = rep.minimal_margin;
    j["consistent"] = rep.consistent;
    json v = json::array();
    for (const auto& x : rep.violations) {
      v.push_back({{"program", x.program.str()}, {"steps", x.steps}, {"output", x.output.str()}});
    }
    j["violations"] = v;
    emit(out, j);
  });
}

int kl_bound_halt_check(const kl_table* t, unsigned n, int margin, char** out) {
  return guard([&] {
    const auto& table = need(t, "table").table;
    auto a = kolmo::rn_halting_audit(table, n, margin < 0 ? 0 : static_cast<unsigned>(margin));
    if (margin < 0) a = kolmo::rn_halting_audit(table, n, a.minimal_margin);
    json j = report("bound halt-check");
    j["table"] = table_header(table);
    j["n"] = a.n;
    j["margin"] = a.margin;
    j["minimal_margin"] = a.minimal_margin;
    j["time_bound"] = a.bound;
    j["scanned"] = a.scanned;
    json m = json::array();
    for (const auto& p : a.misdecided) m.push_back(p.str());
    j["misdecided"] = m;
    emit(out, j);
  });
}

int kl_string_rn(const kl_table* t, unsigned n, char** out) {
  return guard([&] {
    const auto& table = need(t, "table").table;
    const auto rep = kolmo::rn_report(table, n);
    json j = report("string rn");
    j["table"] = table_header(table);
    j["n"] = rep.n;
    j["r"] = rep.r.str();
    j["C"] = opt(table.value(rep.r));
    j["predecessor_bound"] = rep.predecessor_bound;
    emit(out, j);
  });
}

int kl_count_compressible(const kl_table* t, unsigned n, int c, char** out) {
  return guard([&] {
    const auto& table = need(t, "table").table;
    if (c > static_cast<int>(n)) throw kolmo::UsageError("--c must be at most --n");
    json j = report("count compressible");
    j["table"] = table_header(table);
    j["n"] = n;
    json rows = json::array();
    const unsigned lo = c < 0 ? 0 : static_cast<unsigned>(c);
    const unsigned hi = c < 0 ? n : static_cast<unsigned>(c);
    for (unsigned k = lo; k <= hi; ++k) {
      const auto count = kolmo::count_compressible(table, n, k);
      const std::uint64_t bound = std::uint64_t{1} << (n - k);
      rows.push_back({{"c", k}, {"count", count}, {"bound", bound}, {"below_bound", count < bound}});
    }
    j["rows"] = rows;
    emit(out, j);
  });
}

int kl_dnc(unsigned n, int c, unsigned max_c, uint64_t t_inf, char** out) {
  return guard([&] {
    const auto plain = kolmo::MachineConfig::reference(kolmo::Variant::plain);
    const auto cond = kolmo::MachineConfig::reference(kolmo::Variant::conditional);
    json j = report("dnc");
    unsigned cc;
    if (c < 0) {
      const auto m = kolmo::measure_dnc_constant(plain, cond, n, max_c, t_inf);
      if (!m) throw kolmo::DomainError("no_constant", "no c <= " + std::to_string(max_c) + " works up to n = " + std::to_string(n));
      cc = *m;
      j["measured_c"] = cc;
    } else {
      cc = static_cast<unsigned>(c);
    }
    const auto res = kolmo::dnc_construct(kolmo::exact_oracle(cond, cc, t_inf), plain, cond, n, cc, t_inf);
    const auto tb = kolmo::dnc_construct(kolmo::time_bounded_oracle(cond, cc, std::max<std::uint64_t>(res.stabilization_time, 1)),
                                         plain, cond, n, cc, t_inf);
    j["n"] = res.n;
    j["c"] = res.c;
    j["t_inf"] = t_inf;
    j["output"] = res.output.str();
    j["diagonal"] = res.diagonal;
    j["verified"] = res.verified;
    j["stabilization_time"] = res.stabilization_time;
    j["time_bounded_output"] = tb.output.str();
    j["time_bounded_equal"] = tb.output == res.output;
    json q = json::array();
    for (const auto& x : res.queries) {
      q.push_back({{"position", x.position},
                   {"program", x.program.str()},
                   {"answer", x.answer.str()},
                   {"needed_time", x.needed_time},
                   {"differs", x.differs}});
    }
    j["queries"] = q;
    emit(out, j);
  });
}

// ---- strategies -----------------------------------------------------------------

int kl_model_reference(unsigned n, unsigned l, uint64_t t_inf, kl_model** out) {
  return guard([&] {
    auto& o = need(out, "output pointer");
    o = new kl_model{kolmo::FinitizedModel::reference(n, l, t_inf), nullptr};
  });
}

int kl_model_sumcheck(const char* qbf, uint64_t p, unsigned degree_cap, kl_model** out) {
  return guard([&] {
    auto& o = need(out, "output pointer");
    const auto q = kolmo::Qbf::parse(str_arg(qbf, "qbf"));
    auto a = std::make_shared<const kolmo::Arithmetization>(q, prime_for(q, p, degree_cap), degree_cap);
    o = new kl_model{kolmo::protocol_model(a), a};
  });
}

void kl_model_free(kl_model* m) { delete m; }

int kl_strategy_validate(const kl_model* m, const char* tree, const char* backend, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto t = kolmo::StrategyTree::parse(str_arg(tree, "tree"));
    const auto v = kolmo::validate_tree(t, backend_from(backend), mm);
    json j = report("strategy validate");
    j["epsilon"] = r(t.epsilon());
    j["nodes"] = t.node_count();
    j["depth"] = t.depth();
    j["valid"] = v.empty();
    j["violations"] = violations_json(v);
    emit(out, j);
  });
}

int kl_strategy_eval(const kl_model* m, const char* tree, const char* target, const char* backend, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto t = kolmo::StrategyTree::parse(str_arg(tree, "tree"));
    const auto phi = kolmo::Statement::parse(str_arg(target, "target"));
    const auto e = kolmo::prove_probability(t, phi, backend_from(backend), mm);
    json j = report("strategy eval");
    j["target"] = phi.str();
    j["epsilon"] = r(t.epsilon());
    j["p"] = r(e.p);
    j["false_statement_probability"] = r(kolmo::false_statement_probability(t, mm));
    json leaves = json::object();
    for (const auto& [path, yes] : e.leaves) leaves[path] = yes;
    j["leaves"] = leaves;
    emit(out, j);
  });
}

int kl_strategy_mc(const kl_model* m, const char* tree, const char* target, const char* backend, uint64_t trials,
                   uint64_t seed, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto t = kolmo::StrategyTree::parse(str_arg(tree, "tree"));
    const auto phi = kolmo::Statement::parse(str_arg(target, "target"));
    const auto b = backend_from(backend);
    const auto exact = kolmo::prove_probability(t, phi, b, mm).p;
    const auto mc = kolmo::monte_carlo(t, phi, b, mm, trials, seed);
    const double p = exact.convert_to<double>();
    json j = report("strategy mc");
    j["target"] = phi.str();
    j["seed"] = seed;
    j["trials"] = mc.trials;
    j["successes"] = mc.successes;
    j["p_hat"] = mc.p_hat;
    j["p"] = r(exact);
    j["tolerance"] = 3 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
    emit(out, j);
  });
}

int kl_strategy_extract(const kl_model* m, const char* tree, const char* target, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto t = kolmo::StrategyTree::parse(str_arg(tree, "tree"));
    const auto phi = kolmo::Statement::parse(str_arg(target, "target"));
    const auto ex = kolmo::extract_deterministic(t, phi, mm);
    json j = report("strategy extract");
    j["target"] = phi.str();
    j["epsilon"] = r(t.epsilon());
    j["p"] = r(ex.p);
    j["sufficient"] = ex.sufficient;
    if (ex.derivation) {
      const auto check = kolmo::check_derivation(*ex.derivation, kolmo::Theory{}, mm);
      j["checked"] = check.ok;
      j["steps"] = ex.derivation->steps.size();
      j["derivation"] = ex.derivation->str();
    } else {
      j["checked"] = false;
      j["steps"] = nullptr;
      j["derivation"] = nullptr;
    }
    emit(out, j);
  });
}

int kl_strategy_fuzz(const kl_model* m, uint64_t seed, const char* epsilon, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto fc = kolmo::fuzz_tree(seed, kolmo::parse_rational(epsilon ? epsilon : "1/8"), mm);
    json j = report("strategy fuzz");
    j["seed"] = seed;
    j["label"] = fc.label;
    j["epsilon"] = r(fc.tree.epsilon());
    j["target"] = fc.target.str();
    j["nodes"] = fc.tree.node_count();
    j["tree"] = fc.tree.serialize();
    emit(out, j);
  });
}

int kl_strategy_corpus(const kl_model* m, uint64_t count, uint64_t seed, int include_hand, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    auto cases = kolmo::fuzz_corpus(count, seed, mm);
    if (include_hand) {
      for (auto& h : kolmo::hand_built_trees(mm)) cases.push_back(std::move(h));
    }
    json rows = json::array();
    std::size_t sound = 0, sufficient = 0, extracted = 0;
    for (const auto& c : cases) {
      const auto row = kolmo::audit_case(c, mm);
      sound += row.false_probability <= row.epsilon;
      sufficient += row.sufficient;
      extracted += row.extracted;
      rows.push_back({{"label", row.label},
                      {"epsilon", r(row.epsilon)},
                      {"p", r(row.p)},
                      {"false_statement_probability", r(row.false_probability)},
                      {"nodes", row.nodes},
                      {"sufficient", row.sufficient},
                      {"extracted", row.extracted},
                      {"derivation_steps", row.derivation_steps},
                      {"error", row.error}});
    }
    json j = report("strategy fuzz");
    j["seed"] = seed;
    j["cases"] = cases.size();
    j["sound"] = sound;
    j["sufficient"] = sufficient;
    j["extracted"] = extracted;
    j["rows"] = rows;
    emit(out, j);
  });
}

int kl_strategy_mc_corpus(const kl_model* m, uint64_t count, uint64_t seed, uint64_t trials, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto cases = kolmo::mixed_corpus(count, seed, mm);
    json rows = json::array();
    std::size_t within = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto row = kolmo::mc_case(cases[i], mm, trials, seed + i);
      within += row.within;
      rows.push_back({{"label", row.label},
                      {"p", r(row.p)},
                      {"successes", row.mc.successes},
                      {"p_hat", row.mc.p_hat},
                      {"tolerance", row.tolerance},
                      {"within", row.within}});
    }
    json j = report("strategy mc");
    j["seed"] = seed;
    j["trials"] = trials;
    j["cases"] = cases.size();
    j["within"] = within;
    j["rows"] = rows;
    emit(out, j);
  });
}

int kl_axioms_random(const kl_model* m, const char* ns, const char* cs, const char* epsilon, uint64_t samples,
                     uint64_t seed, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    const auto n = number_list(ns, "--n");
    const auto c = number_list(cs, "--c");
    const auto eps = kolmo::parse_rational(str_arg(epsilon, "--epsilon"));
    const auto tree = kolmo::build_random_axiom_strategy(n, c, eps, mm);
    json picks = json::array();
    std::uint64_t with_false = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      std::seed_seq sq{seed, i};
      std::mt19937_64 rng(sq);
      const kolmo::StrategyNode* node = &tree.root;
      json axioms = json::array();
      bool any_false = false;
      while (!node->children.empty()) {
        const std::size_t k = node->children.size() == 1 ? 0 : rng() % node->children.size();
        const auto& child = node->children[k];
        if (node->kind == kolmo::StrategyNode::Kind::probabilistic) {
          const auto elems = node->added.set.elements();
          const auto s = kolmo::instantiate(node->added.kids[0], elems[k]);
          const bool truth = kolmo::eval_statement(s, mm);
          any_false = any_false || !truth;
          axioms.push_back({{"statement", s.str()}, {"true", truth}});
        }
        node = &child;
      }
      with_false += any_false;
      picks.push_back(axioms);
    }
    json j = report("axioms random");
    j["seed"] = seed;
    j["epsilon"] = r(tree.epsilon());
    j["false_statement_probability"] = r(kolmo::false_statement_probability(tree, mm));
    j["samples"] = samples;
    j["samples_with_false"] = with_false;
    j["picks"] = picks;
    j["tree"] = tree.serialize();
    emit(out, j);
  });
}

int kl_experiment_independence(const kl_model* m, unsigned count, unsigned n, const char* cs, uint64_t trials,
                               uint64_t seed, char** out) {
  return guard([&] {
    const auto& mm = need(m, "model").model;
    json rows = json::array();
    for (unsigned c : number_list(cs, "--c")) {
      const auto rep = kolmo::independence_experiment(count, n, c, trials, seed, mm);
      rows.push_back({{"c", rep.c},
                      {"trials", rep.trials},
                      {"all_consistent", rep.all_consistent},
                      {"dependent", rep.dependent},
                      {"dependent_fraction", r(kolmo::Rational(rep.dependent, rep.trials))},
                      {"bound_2^-c", r(kolmo::pow2_neg(c))},
                      {"single_implication", rep.single_implication},
                      {"implication_into_disjunction", rep.implication_into_disjunction},
                      {"conjunction_into_implication", rep.conjunction_into_implication}});
    }
    json j = report("experiment independence");
    j["seed"] = seed;
    j["m"] = count;
    j["n"] = n;
    j["rows"] = rows;
    emit(out, j);
  });
}

// ---- sumcheck ---------------------------------------------------------------------

int kl_sumcheck_compile(const char* qbf, uint64_t p, unsigned degree_cap, uint64_t seed, char** out) {
  return guard([&] {
    const auto q = kolmo::Qbf::parse(str_arg(qbf, "qbf"));
    auto a = std::make_shared<const kolmo::Arithmetization>(q, prime_for(q, p, degree_cap), degree_cap);
    const auto c = kolmo::compile_honest_strategy(a);
    std::vector<std::uint64_t> challenges(a->rounds());
    std::seed_seq sq{seed};
    std::mt19937_64 rng(sq);
    for (auto& x : challenges) x = rng() % a->prime();
    const auto tr = kolmo::run_protocol(*a, kolmo::honest_prover(a), challenges);
    json rounds = json::array();
    for (const auto& rr : tr.rounds) {
      rounds.push_back({{"round", rr.op},
                        {"claim", rr.claim},
                        {"message", rr.message},
                        {"consistent", rr.consistent},
                        {"challenge", rr.challenge},
                        {"cost", r(rr.cost)}});
    }
    json j = report("sumcheck compile");
    j["qbf"] = q.str();
    j["p"] = a->prime();
    j["degree_cap"] = a->degree_cap();
    j["ops"] = ops_json(*a);
    j["epsilon"] = r(c.tree.epsilon());
    j["target"] = c.target.str();
    j["honest_acceptance"] = r(kolmo::prove_probability(c.tree, c.target, kolmo::Backend::syntactic, c.model).p);
    j["nodes"] = c.tree.node_count();
    j["depth"] = c.tree.depth();
    j["seed"] = seed;
    j["transcript"] = {{"p", tr.prime}, {"rounds", rounds}, {"final_check", tr.final_check},
                       {"accepted", tr.accepted}, {"total_cost", r(tr.total_cost)}};
    j["tree"] = c.tree.serialize();
    emit(out, j);
  });
}

int kl_sumcheck_accept(const char* qbf, uint64_t p, unsigned degree_cap, double work_ceiling, char** out) {
  return guard([&] {
    const auto q = kolmo::Qbf::parse(str_arg(qbf, "qbf"));
    auto a = std::make_shared<const kolmo::Arithmetization>(q, prime_for(q, p, degree_cap), degree_cap);
    const auto acc = kolmo::max_adversarial_acceptance(a, work_ceiling);
    json j = report("sumcheck accept");
    j["qbf"] = q.str();
    j["truth"] = q.truth();
    j["p"] = a->prime();
    j["ops"] = ops_json(*a);
    j["max_acceptance"] = r(acc.value);
    j["bound"] = r(acc.bound);
    j["within_bound"] = q.truth() || acc.value <= acc.bound;
    j["work"] = acc.work;
    emit(out, j);
  });
}

int kl_sumcheck_suite(uint64_t p, unsigned degree_cap, int measure_extraction, char** out) {
  return guard([&] {
    json rows = json::array();
    std::size_t t = 0, f = 0, honest_one = 0, within = 0;
    for (const auto& s : kolmo::sumcheck_suite()) {
      const auto row = kolmo::sumcheck_row(s, p, degree_cap, measure_extraction != 0);
      if (row.truth) {
        ++t;
        honest_one += row.honest && *row.honest == 1;
      } else {
        ++f;
        within += row.adversarial && *row.adversarial <= row.bound;
      }
      rows.push_back(suite_row_json(row));
    }
    json j = report("sumcheck suite");
    j["true_formulas"] = t;
    j["false_formulas"] = f;
    j["honest_exactly_one"] = honest_one;
    j["adversarial_within_bound"] = within;
    j["rows"] = rows;
    emit(out, j);
  });
}

}  // extern "C"
