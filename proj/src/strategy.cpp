#include "kolmo/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <unordered_map>

#include "kolmo/error.hpp"

namespace kolmo {

StrategyNode StrategyNode::leaf(Rational capital) {
  StrategyNode n;
  n.capital = std::move(capital);
  return n;
}

StrategyNode StrategyNode::det(Rational capital, Statement s, Derivation proof, StrategyNode child) {
  StrategyNode n;
  n.kind = Kind::deterministic;
  n.capital = std::move(capital);
  n.added = std::move(s);
  n.proof = std::move(proof);
  n.children.push_back(std::move(child));
  return n;
}

StrategyNode StrategyNode::prob(Rational capital, Statement frac, Derivation proof,
                                std::vector<StrategyNode> children) {
  StrategyNode n;
  n.kind = Kind::probabilistic;
  n.capital = std::move(capital);
  n.added = std::move(frac);
  n.proof = std::move(proof);
  n.children = std::move(children);
  return n;
}

namespace {

std::size_t count_nodes(const StrategyNode& n) {
  std::size_t k = 1;
  for (const auto& c : n.children) k += count_nodes(c);
  return k;
}

std::size_t node_depth(const StrategyNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, node_depth(c));
  return d + 1;
}

void write_node(const StrategyNode& n, unsigned indent, std::string& out) {
  out.append(indent, ' ');
  switch (n.kind) {
    case StrategyNode::Kind::leaf:
      out += "(leaf " + to_string(n.capital) + ")";
      return;
    case StrategyNode::Kind::deterministic:
      out += "(det ";
      break;
    case StrategyNode::Kind::probabilistic:
      out += "(prob ";
      break;
  }
  out += to_string(n.capital) + " " + n.added.str() + " " + n.proof.str();
  for (const auto& c : n.children) {
    out += "\n";
    write_node(c, indent + 2, out);
  }
  out += ")";
}

StrategyNode node_from(const Sexpr& e) {
  if (!e.is_list || e.items.size() < 2 || e.items[0].is_list || e.items[1].is_list) {
    throw UsageError("bad strategy node");
  }
  const std::string& kind = e.items[0].atom;
  const Rational cap = parse_rational(e.items[1].atom);
  if (kind == "leaf") {
    if (e.items.size() != 2) throw UsageError("leaf takes only a capital");
    return StrategyNode::leaf(cap);
  }
  if (kind != "det" && kind != "prob") throw UsageError("unknown node kind '" + kind + "'");
  if (e.items.size() < 4) throw UsageError(kind + " node needs a statement and a derivation");
  std::vector<StrategyNode> kids;
  for (std::size_t i = 4; i < e.items.size(); ++i) kids.push_back(node_from(e.items[i]));
  StrategyNode n;
  n.kind = kind == "det" ? StrategyNode::Kind::deterministic : StrategyNode::Kind::probabilistic;
  n.capital = cap;
  n.added = statement_from_sexpr(e.items[2]);
  n.proof = derivation_from_sexpr(e.items[3]);
  n.children = std::move(kids);
  return n;
}

std::string child_path(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

// Extras introduced along the way become hypotheses.
Derivation relativize(const Derivation& d) {
  Derivation out = d;
  for (auto& s : out.steps) {
    if (s.just == Justification::extra) s.just = Justification::hyp;
  }
  return out;
}

Step make_rule(Statement s, const char* name, std::vector<std::size_t> premises) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::rule;
  st.name = name;
  st.premises = std::move(premises);
  return st;
}

Step make_hyp(Statement s) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::hyp;
  return st;
}

Step make_extra(Statement s) {
  Step st;
  st.statement = std::move(s);
  st.just = Justification::extra;
  return st;
}

Step make_axiom(Statement s, const char* kind) {
  Step st;
  st.statement = std::move(s);
  st.name = kind;
  return st;
}

}  // namespace

std::size_t StrategyTree::node_count() const { return count_nodes(root); }
std::size_t StrategyTree::depth() const { return node_depth(root); }

std::string StrategyTree::serialize() const {
  std::string out = "(strategy v1\n";
  write_node(root, 2, out);
  out += ")\n";
  return out;
}

StrategyTree StrategyTree::parse(std::string_view text) {
  const Sexpr e = parse_sexpr(text);
  if (!e.is_list || e.items.size() != 3 || e.items[0].atom != "strategy") throw UsageError("expected (strategy v1 NODE)");
  if (e.items[1].atom != "v1") throw UsageError("unsupported strategy format '" + e.items[1].atom + "'");
  return StrategyTree{node_from(e.items[2])};
}

// ---- validation -----------------------------------------------------------

namespace {

// Empty when `added` follows from t, else the reason.
std::string check_added(const StrategyNode& n, const Theory& t, Backend backend, const FinitizedModel& m) {
  if (backend == Backend::semantic) {
    return semantic_entails(t, n.added, m) ? std::string() : "added statement is not entailed";
  }
  if (n.proof.steps.empty()) return "missing derivation";
  if (n.proof.conclusion() != n.added) return "derivation does not conclude the added statement";
  const auto r = check_derivation(n.proof, t, m);
  if (!r.ok) return "invalid derivation at step " + std::to_string(r.bad_step) + ": " + r.reason;
  return {};
}

void validate_node(const StrategyNode& n, const Theory& t, const std::string& path, Backend backend,
                   const FinitizedModel& m, std::vector<TreeViolation>& out) {
  auto bad = [&](std::string msg) { out.push_back({path, std::move(msg)}); };
  if (n.capital < 0) bad("negative capital");
  try {
    switch (n.kind) {
      case StrategyNode::Kind::leaf:
        if (!n.children.empty()) bad("leaf has children");
        return;
      case StrategyNode::Kind::deterministic: {
        if (n.children.size() != 1) {
          bad("deterministic node needs exactly one child");
          return;
        }
        if (auto why = check_added(n, t, backend, m); !why.empty()) bad(why);
        if (n.children[0].capital != n.capital) bad("capital changed at a deterministic step");
        validate_node(n.children[0], t.with(n.added), child_path(path, 0), backend, m, out);
        return;
      }
      case StrategyNode::Kind::probabilistic: {
        if (n.added.op != Op::frac) {
          bad("branching statement is not a frac statement");
          return;
        }
        if (auto why = check_added(n, t, backend, m); !why.empty()) bad(why);
        const Rational& tau = n.added.delta;
        if (tau > n.capital) bad("capital exceeded: tau " + to_string(tau) + " > " + to_string(n.capital));
        const auto elems = n.added.set.elements();
        if (n.children.size() != elems.size()) {
          bad("expected " + std::to_string(elems.size()) + " children, found " + std::to_string(n.children.size()));
          return;
        }
        for (std::size_t i = 0; i < elems.size(); ++i) {
          if (n.children[i].capital != n.capital - tau) {
            out.push_back({child_path(path, i), "child capital is not delta - tau"});
          }
          validate_node(n.children[i], t.with(instantiate(n.added.kids[0], elems[i])), child_path(path, i), backend,
                        m, out);
        }
        return;
      }
    }
  } catch (const DomainError& e) {
    bad(e.what());
  }
}

}  // namespace

std::vector<TreeViolation> validate_tree(const StrategyTree& tree, Backend backend, const FinitizedModel& m) {
  std::vector<TreeViolation> out;
  validate_node(tree.root, Theory(), "root", backend, m, out);
  return out;
}

// ---- evaluation -----------------------------------------------------------

bool leaf_yields(const Theory& t, const Statement& phi, Backend backend, const FinitizedModel& m) {
  if (backend == Backend::semantic) return semantic_entails(t, phi, m);
  return t.contains(phi) || certify_axiom(phi, m).has_value();
}

namespace {

Rational evaluate(const StrategyNode& n, const Theory& t, const std::string& path, const Statement& phi,
                  Backend backend, const FinitizedModel& m, std::map<std::string, bool>* leaves,
                  std::unordered_map<const StrategyNode*, Rational>* memo) {
  Rational p;
  switch (n.kind) {
    case StrategyNode::Kind::leaf: {
      const bool y = leaf_yields(t, phi, backend, m);
      if (leaves) (*leaves)[path] = y;
      p = y ? 1 : 0;
      break;
    }
    case StrategyNode::Kind::deterministic:
      p = evaluate(n.children.at(0), t.with(n.added), child_path(path, 0), phi, backend, m, leaves, memo);
      break;
    case StrategyNode::Kind::probabilistic: {
      const auto elems = n.added.set.elements();
      if (elems.size() != n.children.size()) throw UsageError("tree is not valid at " + path);
      Rational sum = 0;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        sum += evaluate(n.children[i], t.with(instantiate(n.added.kids[0], elems[i])), child_path(path, i), phi,
                        backend, m, leaves, memo);
      }
      p = sum / Rational(elems.size());
      break;
    }
  }
  if (memo) (*memo)[&n] = p;
  return p;
}

Rational false_measure(const StrategyNode& n, bool tainted, const FinitizedModel& m) {
  switch (n.kind) {
    case StrategyNode::Kind::leaf:
      return tainted ? 1 : 0;
    case StrategyNode::Kind::deterministic:
      return false_measure(n.children.at(0), tainted || !eval_statement(n.added, m), m);
    case StrategyNode::Kind::probabilistic: {
      const auto elems = n.added.set.elements();
      Rational sum = 0;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        sum += false_measure(n.children.at(i), tainted || !eval_statement(instantiate(n.added.kids[0], elems[i]), m),
                             m);
      }
      return sum / Rational(elems.size());
    }
  }
  throw InternalError("unhandled node kind");
}

}  // namespace

EvalResult prove_probability(const StrategyTree& tree, const Statement& phi, Backend backend,
                             const FinitizedModel& m) {
  EvalResult r;
  r.target = phi;
  r.p = evaluate(tree.root, Theory(), "root", phi, backend, m, &r.leaves, nullptr);
  return r;
}

Rational false_statement_probability(const StrategyTree& tree, const FinitizedModel& m) {
  return false_measure(tree.root, false, m);
}

MonteCarloResult monte_carlo(const StrategyTree& tree, const Statement& phi, Backend backend,
                             const FinitizedModel& m, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw UsageError("monte_carlo needs at least one trial");
  std::unordered_map<const StrategyNode*, bool> cache;
  MonteCarloResult r;
  r.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    const StrategyNode* n = &tree.root;
    std::vector<Statement> added;
    while (n->kind != StrategyNode::Kind::leaf) {
      if (n->kind == StrategyNode::Kind::deterministic) {
        added.push_back(n->added);
        n = &n->children.at(0);
      } else {
        const auto k = rng() % n->children.size();
        added.push_back(instantiate(n->added.kids[0], n->added.set.elements()[k]));
        n = &n->children[k];
      }
    }
    auto it = cache.find(n);
    if (it == cache.end()) {
      Theory t;
      for (const auto& s : added) t = t.with(s);
      it = cache.emplace(n, leaf_yields(t, phi, backend, m)).first;
    }
    if (it->second) ++r.successes;
  }
  r.p_hat = static_cast<double>(r.successes) / static_cast<double>(trials);
  return r;
}

// ---- extraction -----------------------------------------------------------

namespace {

struct Extractor {
  const Statement& phi;
  const FinitizedModel& m;
  std::unordered_map<const StrategyNode*, Rational> p;

  // Derivation of phi whose open hypotheses are extras of t. Only called on
  // nodes with p > capital.
  Derivation run(const StrategyNode& n, const Theory& t, const std::string& path) {
    Derivation d;
    switch (n.kind) {
      case StrategyNode::Kind::leaf:
        if (t.contains(phi)) {
          d.push(make_hyp(phi));
        } else if (auto ax = certify_axiom(phi, m)) {
          d.push(*ax);
        } else {
          throw InternalError("leaf " + path + " counted as yielding but does not");
        }
        return d;
      case StrategyNode::Kind::deterministic: {
        if (n.proof.steps.empty()) throw UsageError("extraction needs derivations on deterministic nodes at " + path);
        d = relativize(n.proof);
        const auto psi = d.steps.size() - 1;
        d.splice(run(n.children.at(0), t.with(n.added), child_path(path, 0)));
        const auto imp = d.push(make_rule(Statement::implies(n.added, phi), "imp_i", {d.steps.size() - 1}));
        d.push(make_rule(phi, "mp", {psi, imp}));
        return d;
      }
      case StrategyNode::Kind::probabilistic: {
        if (n.proof.steps.empty()) throw UsageError("extraction needs derivations on probabilistic nodes at " + path);
        d = relativize(n.proof);
        std::vector<std::size_t> premises{d.steps.size() - 1};
        const Rational& tau = n.added.delta;
        const auto elems = n.added.set.elements();
        std::uint64_t strong = 0;
        for (std::size_t i = 0; i < elems.size(); ++i) {
          const StrategyNode& c = n.children[i];
          if (!(p.at(&c) > c.capital)) continue;
          const Statement r = instantiate(n.added.kids[0], elems[i]);
          d.splice(run(c, t.with(r), child_path(path, i)));
          premises.push_back(d.push(make_rule(Statement::implies(r, phi), "imp_i", {d.steps.size() - 1})));
          ++strong;
        }
        if (!(Rational(strong) > tau * Rational(elems.size()))) {
          throw InternalError("node " + path + " has p > capital but only " + std::to_string(strong) +
                              " strong children");
        }
        d.push(make_rule(phi, "disj_from_frac", std::move(premises)));
        return d;
      }
    }
    throw InternalError("unhandled node kind");
  }
};

}  // namespace

Extraction extract_deterministic(const StrategyTree& tree, const Statement& phi, const FinitizedModel& m) {
  Extractor ex{phi, m, {}};
  Extraction out;
  out.p = evaluate(tree.root, Theory(), "root", phi, Backend::syntactic, m, nullptr, &ex.p);
  out.sufficient = out.p > tree.epsilon();
  if (out.sufficient) out.derivation = ex.run(tree.root, Theory(), "root");
  return out;
}

// ---- compression ----------------------------------------------------------

namespace {

CompressedNode compress_node(const StrategyNode& n, std::vector<Statement> pending) {
  switch (n.kind) {
    case StrategyNode::Kind::leaf:
      return CompressedNode{std::move(pending), {}};
    case StrategyNode::Kind::deterministic:
      pending.push_back(n.added);
      return compress_node(n.children.at(0), std::move(pending));
    case StrategyNode::Kind::probabilistic: {
      CompressedNode out{std::move(pending), {}};
      const auto elems = n.added.set.elements();
      for (std::size_t i = 0; i < elems.size(); ++i) {
        out.children.push_back(compress_node(n.children.at(i), {instantiate(n.added.kids[0], elems[i])}));
      }
      return out;
    }
  }
  throw InternalError("unhandled node kind");
}

Rational compressed_eval(const CompressedNode& n, Theory t, const Statement& phi, Backend backend,
                         const FinitizedModel& m) {
  for (const auto& s : n.added) t = t.with(s);
  if (n.children.empty()) return leaf_yields(t, phi, backend, m) ? 1 : 0;
  Rational sum = 0;
  for (const auto& c : n.children) sum += compressed_eval(c, t, phi, backend, m);
  return sum / Rational(n.children.size());
}

}  // namespace

CompressedNode compress(const StrategyTree& tree) { return compress_node(tree.root, {}); }

Rational compressed_probability(const CompressedNode& root, const Statement& phi, Backend backend,
                                const FinitizedModel& m) {
  return compressed_eval(root, Theory(), phi, backend, m);
}

// ---- fuzzer ---------------------------------------------------------------

namespace {

class Fuzzer {
 public:
  Fuzzer(std::uint64_t seed, const FinitizedModel& m, const FuzzOptions& o) : rng_(seed), m_(m), o_(o) {
    if (!m.plain || m.plain->max_string_length() < 4) throw UsageError("fuzzer needs a plain table with N >= 4");
    for (const auto& x : enumerate_programs(3)) small_.push_back(x);
  }

  FuzzCase run(const Rational& epsilon) {
    FuzzCase fc;
    fc.target = pick_target();
    phi_ = fc.target;
    fc.tree.root = grow(0, epsilon, Theory(), 0);
    return fc;
  }

 private:
  std::uint64_t pick(std::uint64_t n) { return rng_() % n; }

  unsigned c_of(const BitString& x) const { return *m_.plain->value(x); }

  Statement pick_target() {
    const auto x = BitString::from_index(1 + pick(30));  // length 1..4
    switch (pick(6)) {
      case 0: return Statement::halts(small_[pick(small_.size())], 1 + pick(8));
      case 1: return Statement::nonterm(small_[pick(small_.size())]);
      default: return Statement::cge(x, 1 + pick(c_of(x) + 2));
    }
  }

  SetDesc pick_set() {
    if (pick(2) == 0) {
      unsigned n = static_cast<unsigned>(pick(4));
      while ((1u << n) > o_.max_branch) --n;
      return SetDesc::of_length(n);
    }
    auto pool = small_;
    std::vector<std::string> items;
    const auto k = 1 + pick(std::min<std::uint64_t>(o_.max_branch, pool.size()));
    while (items.size() < k) {
      const auto i = pick(pool.size());
      items.push_back(pool[i].str());
      pool.erase(pool.begin() + static_cast<long>(i));
    }
    return SetDesc::of_list(std::move(items));
  }

  Statement pick_template() {
    auto with_hole = [](Statement s) {
      s.terms[0] = hole();
      return s;
    };
    const auto k = pick(6);
    const auto t = 1 + pick(8);
    switch (pick(7)) {
      case 0: return with_hole(Statement::cge(BitString(), k));
      case 1: return Statement::negation(with_hole(Statement::cge(BitString(), 1 + k)));
      case 2: return with_hole(Statement::halts(BitString(), t));
      case 3: return with_hole(Statement::nonterm(BitString()));
      case 4: return Statement::implies(with_hole(Statement::halts(BitString(), t)), phi_);
      case 5: return Statement::implies(Statement::negation(with_hole(Statement::cge(BitString(), 1 + k))), phi_);
      default:
        return Statement::disj(with_hole(Statement::cge(BitString(), k)), with_hole(Statement::halts(BitString(), t)));
    }
  }

  // Step that makes `s` available: extra if in t, else an axiom.
  std::optional<Step> available(const Statement& s, const Theory& t) {
    if (t.contains(s)) return make_extra(s);
    return certify_axiom(s, m_);
  }

  std::optional<std::pair<Statement, Derivation>> modus_ponens(const Theory& t, bool goal_only) {
    std::vector<std::size_t> order(t.extras.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng_);
    for (auto i : order) {
      const Statement& e = t.extras[i];
      if (e.op != Op::implies) continue;
      if (goal_only && e.kids[1] != phi_) continue;
      if (t.contains(e.kids[1])) continue;
      auto a = available(e.kids[0], t);
      if (!a) continue;
      Derivation d;
      d.push(*a);
      d.push(make_extra(e));
      d.push(make_rule(e.kids[1], "mp", {0, 1}));
      return std::make_pair(e.kids[1], d);
    }
    return std::nullopt;
  }

  std::optional<std::pair<Statement, Derivation>> derive(const Theory& t) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Derivation d;
      switch (pick(6)) {
        case 0:
          if (auto r = modus_ponens(t, false)) return r;
          break;
        case 1: {
          const auto x = small_[pick(small_.size())];
          Statement s = pick(2) ? Statement::halts(x, 1 + pick(8)) : Statement::negation(Statement::cge(x, 1 + pick(6)));
          if (auto ax = certify_axiom(s, m_)) {
            d.push(*ax);
            return std::make_pair(s, d);
          }
          break;
        }
        case 2:
          if (t.extras.size() >= 2) {
            const auto& a = t.extras[pick(t.extras.size())];
            const auto& b = t.extras[pick(t.extras.size())];
            d.push(make_extra(a));
            d.push(make_extra(b));
            auto s = Statement::conj(a, b);
            d.push(make_rule(s, "and_i", {0, 1}));
            return std::make_pair(s, d);
          }
          break;
        case 3:
          if (!t.extras.empty()) {
            const auto& a = t.extras[pick(t.extras.size())];
            auto s = Statement::disj(a, pick_target());
            d.push(make_extra(a));
            d.push(make_rule(s, "or_i", {0}));
            return std::make_pair(s, d);
          }
          break;
        case 4:
          for (const auto& e : t.extras) {
            if (e.op == Op::cge && e.number > 0) {
              auto s = e;
              s.number = pick(e.number);
              d.push(make_extra(e));
              d.push(make_rule(s, "weaken", {0}));
              return std::make_pair(s, d);
            }
          }
          break;
        default:
          for (const auto& e : t.extras) {
            if (e.op == Op::conj) {
              d.push(make_extra(e));
              d.push(make_rule(e.kids[pick(2)], "and_e", {0}));
              return std::make_pair(d.conclusion(), d);
            }
          }
          break;
      }
    }
    return std::nullopt;
  }

  StrategyNode det_then(const Rational& cap, const std::pair<Statement, Derivation>& step, unsigned depth,
                        const Theory& t, unsigned prob_on_path) {
    return StrategyNode::det(cap, step.first, step.second, grow(depth + 1, cap, t.with(step.first), prob_on_path));
  }

  StrategyNode grow(unsigned depth, const Rational& cap, const Theory& t, unsigned prob_on_path) {
    ++nodes_;
    const bool last = depth + 1 >= o_.max_depth || nodes_ + 2 >= o_.max_nodes;
    if (last) return StrategyNode::leaf(cap);
    const auto roll = pick(100);
    if (roll < 45 && prob_on_path < 3) {
      for (int attempt = 0; attempt < 20; ++attempt) {
        const auto set = pick_set();
        if (nodes_ + set.size() + 1 > o_.max_nodes) continue;
        const auto templ = pick_template();
        std::uint64_t bad = 0;
        const auto elems = set.elements();
        for (const auto& a : elems) bad += eval_statement(instantiate(templ, a), m_) ? 0 : 1;
        Rational tau(bad, set.size());
        if (tau > cap) continue;
        if (pick(3) == 0) tau += (cap - tau) * Rational(1 + pick(2), 2);
        const auto frac = Statement::frac(tau, set, templ);
        Derivation proof;
        proof.push(make_axiom(frac, "frac_count"));
        std::vector<StrategyNode> kids;
        for (const auto& a : elems) kids.push_back(grow(depth + 1, cap - tau, t.with(instantiate(templ, a)), prob_on_path + 1));
        return StrategyNode::prob(cap, frac, proof, std::move(kids));
      }
    }
    // Reach for the target when a guard is available.
    if (roll >= 80 || roll < 45) {
      if (auto g = modus_ponens(t, true); g && pick(10) < 8) return det_then(cap, *g, depth, t, prob_on_path);
      if (roll >= 80) return StrategyNode::leaf(cap);
    }
    if (auto s = derive(t)) return det_then(cap, *s, depth, t, prob_on_path);
    return StrategyNode::leaf(cap);
  }

  std::mt19937_64 rng_;
  const FinitizedModel& m_;
  FuzzOptions o_;
  std::vector<BitString> small_;
  Statement phi_;
  std::size_t nodes_ = 0;
};

}  // namespace

FuzzCase fuzz_tree(std::uint64_t seed, const Rational& epsilon, const FinitizedModel& m, const FuzzOptions& options) {
  if (epsilon < 0) throw UsageError("epsilon must be non-negative");
  if (options.max_depth < 1 || options.max_branch < 1) throw UsageError("fuzz limits must be positive");
  Fuzzer f(seed, m, options);
  auto fc = f.run(epsilon);
  fc.label = "fuzz seed " + std::to_string(seed) + " eps " + to_string(epsilon);
  return fc;
}

// ---- hand-built trees -----------------------------------------------------

namespace {

struct HandKit {
  const FinitizedModel& m;
  std::uint64_t t = 12;
  std::vector<BitString> halting, looping;
  Statement phi_true, phi_false, phi_upper;

  explicit HandKit(const FinitizedModel& model) : m(model) {
    for (const auto& p : enumerate_programs(6)) {
      (run_plain(m.machine, p, t).halted() ? halting : looping).push_back(p);
    }
    if (halting.size() < 8 || looping.size() < 8) throw InternalError("hand kit needs 8 halting and 8 looping programs");
    const auto x = BitString::parse("0110");
    const unsigned c = *m.plain->value(x);
    if (c == 0) throw InternalError("hand kit target has C = 0");
    phi_true = Statement::cge(x, c);
    phi_false = Statement::cge(x, c + 1);
    phi_upper = Statement::negation(Statement::cge(x, c + 1));
  }

  // Element list with s halting programs followed by size - s looping ones.
  SetDesc programs(unsigned s, unsigned size) const {
    std::vector<std::string> v;
    for (unsigned i = 0; i < s; ++i) v.push_back(halting[i].str());
    for (unsigned i = s; i < size; ++i) v.push_back(looping[i - s].str());
    return SetDesc::of_list(std::move(v));
  }

  Statement guard(const Statement& goal) const {
    Statement h = Statement::halts(BitString(), t);
    h.terms[0] = hole();
    return Statement::implies(h, goal);
  }

  static Derivation cert(const Statement& frac) {
    Derivation d;
    d.push(make_axiom(frac, "frac_count"));
    return d;
  }

  // Child for element a of a guard branch: derives goal when a halts.
  StrategyNode guard_child(const std::string& a, const Statement& goal, const Rational& cap) const {
    const auto p = BitString::parse(a);
    if (!run_plain(m.machine, p, t).halted()) return StrategyNode::leaf(cap);
    Derivation d;
    d.push(make_axiom(Statement::halts(p, t), "halting"));
    d.push(make_extra(Statement::implies(Statement::halts(p, t), goal)));
    d.push(make_rule(goal, "mp", {0, 1}));
    return StrategyNode::det(cap, goal, d, StrategyNode::leaf(cap));
  }

  StrategyNode guard_node(unsigned s, unsigned size, const Statement& goal, const Rational& cap, const Rational& tau,
                          const std::function<StrategyNode(const std::string&, const Rational&)>& other = {}) const {
    const auto set = programs(s, size);
    const auto frac = Statement::frac(tau, set, guard(goal));
    std::vector<StrategyNode> kids;
    for (const auto& a : set.items) {
      const bool halts = run_plain(m.machine, BitString::parse(a), t).halted();
      kids.push_back(halts || !other ? guard_child(a, goal, cap - tau) : other(a, cap - tau));
    }
    return StrategyNode::prob(cap, frac, cert(frac), std::move(kids));
  }

  // Strings of length <= 4: `bad` with C < k first, then good ones.
  SetDesc complexity_set(unsigned bad, unsigned k, unsigned size) const {
    std::vector<std::string> lo, hi;
    for (const auto& x : enumerate_programs(4)) {
      (*m.plain->value(x) < k ? lo : hi).push_back(x.str());
    }
    if (lo.size() < bad || hi.size() < size - bad) throw InternalError("complexity_set cannot be filled");
    std::vector<std::string> v(lo.begin(), lo.begin() + bad);
    v.insert(v.end(), hi.begin(), hi.begin() + (size - bad));
    return SetDesc::of_list(std::move(v));
  }
};

}  // namespace

std::vector<FuzzCase> hand_built_trees(const FinitizedModel& m) {
  if (!m.plain) throw UsageError("hand-built trees need a plain table");
  const HandKit kit(m);
  std::vector<FuzzCase> out;
  auto add = [&](std::string label, StrategyNode root, Statement target) {
    out.push_back(FuzzCase{StrategyTree{std::move(root)}, std::move(target), std::move(label)});
  };
  const Rational q(1, 4), e8(1, 8);

  // Strong-count sweep around tau |A| = 2.
  for (unsigned s = 0; s <= 8; ++s) {
    add("guard true s=" + std::to_string(s), kit.guard_node(s, 8, kit.phi_true, q, q), kit.phi_true);
  }
  // False target: p = s/8 = epsilon exactly, never sufficient.
  for (unsigned s = 0; s <= 8; ++s) {
    const Rational eps(s, 8);
    add("guard false s=" + std::to_string(s), kit.guard_node(s, 8, kit.phi_false, eps, eps), kit.phi_false);
  }
  // Two levels of (cge _ k) axioms; (j1, j2) false instances out of 8.
  const std::vector<std::pair<unsigned, unsigned>> sat{{1, 1}, {2, 0}, {0, 2}, {1, 0}, {2, 2}};
  for (const auto& [j1, j2] : sat) {
    const Rational t1(j1, 8), t2(j2, 8), eps = t1 + t2;
    Statement templ = Statement::cge(BitString(), 3);
    templ.terms[0] = hole();
    const auto s1 = kit.complexity_set(j1, 3, 8), s2 = kit.complexity_set(j2, 3, 8);
    const auto f1 = Statement::frac(t1, s1, templ), f2 = Statement::frac(t2, s2, templ);
    std::vector<StrategyNode> kids;
    for (std::size_t i = 0; i < 8; ++i) {
      std::vector<StrategyNode> leaves(8, StrategyNode::leaf(eps - t1 - t2));
      kids.push_back(StrategyNode::prob(eps - t1, f2, HandKit::cert(f2), std::move(leaves)));
    }
    add("saturated " + std::to_string(j1) + "," + std::to_string(j2),
        StrategyNode::prob(eps, f1, HandKit::cert(f1), std::move(kids)), kit.phi_true);
  }
  // tau = 0 chains over (cge _ 0), target certified at every leaf.
  for (unsigned d = 1; d <= 6; ++d) {
    Statement templ = Statement::cge(BitString(), 0);
    templ.terms[0] = hole();
    const auto f = Statement::frac(Rational(0), SetDesc::of_length(1), templ);
    std::function<StrategyNode(unsigned)> chain = [&](unsigned left) {
      if (left == 0) return StrategyNode::leaf(e8);
      return StrategyNode::prob(e8, f, HandKit::cert(f), {chain(left - 1), chain(left - 1)});
    };
    add("tau0 chain " + std::to_string(d), chain(d), Statement::cge(BitString(), 0));
  }
  // |A| = 1 branches chained k deep.
  for (unsigned k = 1; k <= 5; ++k) {
    const Rational eps(k, 16), step(1, 16);
    std::function<StrategyNode(unsigned, Rational)> chain = [&](unsigned left, Rational cap) {
      if (left == 1) return kit.guard_node(1, 1, kit.phi_true, cap, step);
      const auto set = kit.programs(1, 1);
      const auto frac = Statement::frac(step, set, kit.guard(kit.phi_true));
      return StrategyNode::prob(cap, frac, HandKit::cert(frac), {chain(left - 1, cap - step)});
    };
    add("singleton chain " + std::to_string(k), chain(k, eps), kit.phi_true);
  }
  // Deterministic chains of length L ending in an upper-bound axiom.
  for (unsigned L = 1; L <= 6; ++L) {
    std::vector<std::pair<Statement, Derivation>> steps;
    for (unsigned i = 0; i + 1 < L; ++i) {
      const auto h = Statement::halts(kit.halting[i], kit.t);
      Derivation d;
      d.push(make_axiom(h, "halting"));
      if (i % 2 == 1) {
        d.push(make_extra(steps.back().first));
        d.push(make_rule(Statement::conj(steps.back().first, h), "and_i", {1, 0}));
        steps.emplace_back(d.conclusion(), d);
      } else {
        steps.emplace_back(h, d);
      }
    }
    Derivation last;
    last.push(*certify_axiom(kit.phi_upper, m));
    steps.emplace_back(kit.phi_upper, last);
    StrategyNode node = StrategyNode::leaf(Rational(0));
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) node = StrategyNode::det(Rational(0), it->first, it->second, node);
    add("det chain " + std::to_string(L), node, kit.phi_upper);
  }
  // Nested guards: looping children branch again.
  const std::vector<std::pair<unsigned, unsigned>> nest{{0, 0}, {0, 3}, {1, 1}, {1, 2}, {1, 8}, {2, 0},
                                                       {2, 2}, {2, 3}, {3, 1}, {7, 7}};
  for (const auto& [s1, s2] : nest) {
    auto inner = [&, s2 = s2](const std::string&, const Rational& cap) {
      return kit.guard_node(s2, 8, kit.phi_true, cap, e8);
    };
    add("nested " + std::to_string(s1) + "," + std::to_string(s2), kit.guard_node(s1, 8, kit.phi_true, q, e8, inner),
        kit.phi_true);
  }
  return out;
}

// ---- random-axiom strategy ------------------------------------------------

StrategyTree build_random_axiom_strategy(const std::vector<unsigned>& n, const std::vector<unsigned>& c,
                                         const Rational& epsilon, const FinitizedModel& m) {
  if (n.size() != c.size()) throw UsageError("need one c per n");
  Rational spend = 0;
  double leaves = 1;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (c[i] > n[i]) throw UsageError("c_i must not exceed n_i");
    spend += pow2_neg(c[i]);
    leaves *= std::ldexp(1.0, static_cast<int>(n[i]));
  }
  if (!n.empty() && !(spend < epsilon)) {
    throw UsageError("sum of 2^-c_i is " + to_string(spend) + ", needs to be below epsilon " + to_string(epsilon));
  }
  if (leaves > 1e6) throw UsageError("random-axiom tree would have more than 10^6 leaves");

  std::vector<Statement> fracs;
  for (std::size_t i = 0; i < n.size(); ++i) {
    Statement templ = Statement::cge(BitString(), n[i] - c[i]);
    templ.terms[0] = hole();
    fracs.push_back(frac_forall_certify(pow2_neg(c[i]), SetDesc::of_length(n[i]), templ, m).step.statement);
  }
  std::function<StrategyNode(std::size_t, Rational)> level = [&](std::size_t i, Rational cap) {
    if (i == fracs.size()) return StrategyNode::leaf(cap);
    const Rational rest = cap - fracs[i].delta;
    std::vector<StrategyNode> kids;
    for (std::uint64_t k = 0; k < fracs[i].set.size(); ++k) kids.push_back(level(i + 1, rest));
    Derivation proof;
    proof.push(make_axiom(fracs[i], "frac_count"));
    return StrategyNode::prob(cap, fracs[i], proof, std::move(kids));
  };
  return StrategyTree{level(0, epsilon)};
}

// ---- independence ---------------------------------------------------------

namespace {

bool literal(unsigned pattern, unsigned i, bool sign) { return (((pattern >> i) & 1u) != 0) == sign; }

}  // namespace

IndependenceReport independence_experiment(unsigned count, unsigned n, unsigned c, std::uint64_t trials,
                                           std::uint64_t seed, const FinitizedModel& m) {
  if (count < 1 || count > 4) throw UsageError("independence experiment takes 1 <= m <= 4");
  if (c > n) throw UsageError("c must not exceed n");
  if (!m.plain || n > m.plain->max_string_length()) throw UsageError("n exceeds the model's plain table");
  const unsigned k = n - c;
  // Counting facts of the base theory for length n.
  std::vector<Statement> base;
  for (unsigned cc = 0; cc <= n; ++cc) {
    Statement templ = Statement::cge(BitString(), n - cc);
    templ.terms[0] = hole();
    base.push_back(Statement::frac(pow2_neg(cc), SetDesc::of_length(n), templ));
  }

  IndependenceReport rep{count, n, c, trials, 0, 0, 0, 0, 0};
  std::mt19937_64 rng(seed);
  const unsigned patterns = 1u << count;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::vector<BitString> xs;
    for (unsigned i = 0; i < count; ++i) xs.push_back(BitString::from_word(n == 0 ? 0 : rng() % (1ULL << n), n));
    std::vector<bool> consistent(patterns);
    for (unsigned pat = 0; pat < patterns; ++pat) {
      // Bit i set: (cge x_i k) asserted, else its negation. A negated
      // statement lowers C(x_i) to k - 1 in the variant model.
      FinitizedModel variant = m;
      bool possible = true;
      Theory t;
      for (const auto& b : base) t = t.with(b);
      for (unsigned i = 0; i < count; ++i) {
        const auto s = Statement::cge(xs[i], k);
        if ((pat >> i) & 1u) {
          t = t.with(s);
        } else {
          t = t.with(Statement::negation(s));
          const unsigned cur = *m.plain->value(xs[i]);
          if (cur >= k) {
            if (k == 0) possible = false;
            else variant.plain_override[xs[i]] = k - 1;
          }
        }
      }
      consistent[pat] = possible && !semantic_entails(t, Statement::falsity(), variant);
    }
    const bool all = std::all_of(consistent.begin(), consistent.end(), [](bool b) { return b; });
    if (all) ++rep.all_consistent;

    // A relation is provable when it holds on every consistent pattern.
    auto provable = [&](auto&& rel) {
      for (unsigned pat = 0; pat < patterns; ++pat) {
        if (consistent[pat] && !rel(pat)) return false;
      }
      return true;
    };
    bool single = false, into_disj = false, conj_into = false;
    for (unsigned i = 0; i < count; ++i) {
      for (unsigned j = 0; j < count; ++j) {
        if (i == j) continue;
        for (unsigned sg = 0; sg < 4; ++sg) {
          const bool si = sg & 1u, sj = sg & 2u;
          single = single || provable([&](unsigned p) { return !literal(p, i, si) || literal(p, j, sj); });
          for (unsigned l = 0; l < count; ++l) {
            if (l == i || l == j) continue;
            for (unsigned sl = 0; sl < 2; ++sl) {
              into_disj = into_disj || provable([&](unsigned p) {
                            return !literal(p, i, si) || literal(p, j, sj) || literal(p, l, sl);
                          });
              conj_into = conj_into || provable([&](unsigned p) {
                            return !(literal(p, i, si) && literal(p, j, sj)) || literal(p, l, sl);
                          });
            }
          }
        }
      }
    }
    rep.single_implication += single;
    rep.implication_into_disjunction += into_disj;
    rep.conjunction_into_implication += conj_into;
  }
  rep.dependent = rep.trials - rep.all_consistent;
  return rep;
}

}  // namespace kolmo
