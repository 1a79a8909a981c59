// kolmo: command-line front end over the C interface.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kolmo.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Failure {
  int code;
  std::string message;
};

void check(int rc) {
  if (rc == KL_OK) return;
  std::string msg = kl_last_error();
  const std::string kind = kl_last_error_kind();
  if (rc == KL_E_DOMAIN) msg = kind + ": " + msg;
  if (rc == KL_E_INTERNAL) msg = "internal error: " + msg;
  throw Failure{rc == KL_E_USAGE ? 2 : 1, msg};
}

std::string take(char* p) {
  std::string s(p);
  kl_free(p);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{2, "cannot read '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Temp file in the target directory, then rename: no partial output.
void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{2, "cannot write '" + path + "'"};
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Failure{1, "write failed for '" + path + "'"};
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Failure{1, "cannot rename onto '" + path + "'"};
  }
}

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.is_null() ? "" : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// Reports with a "rows" array become one CSV line per row; others become
// key,value lines of their scalar fields.
std::string to_csv(const std::string& text) {
  const json j = json::parse(text);
  std::string out;
  if (j.contains("rows") && j["rows"].is_array()) {
    const json& rows = j["rows"];
    if (rows.empty()) return "";
    bool first = true;
    for (const auto& [k, v] : rows[0].items()) {
      out += (first ? "" : ",") + csv_cell(k);
      first = false;
    }
    out += '\n';
    for (const auto& row : rows) {
      first = true;
      for (const auto& [k, v] : row.items()) {
        out += (first ? "" : ",") + csv_cell(v);
        first = false;
      }
      out += '\n';
    }
    return out;
  }
  out = "key,value\n";
  for (const auto& [k, v] : j.items()) {
    if (!v.is_structured()) out += csv_cell(k) + "," + csv_cell(v) + "\n";
  }
  return out;
}

struct Output {
  std::string format = "json";
  std::string path;

  void add(CLI::App* app) {
    app->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", path, "Write the report here instead of stdout");
  }

  void emit(const std::string& report) const {
    const std::string body = format == "csv" ? to_csv(report) : report;
    if (path.empty()) {
      std::cout << body;
    } else {
      write_atomic(path, body);
    }
  }
};

struct TableArgs {
  std::string load;
  std::string machine;
  std::string variant = "plain";
  std::optional<unsigned> N;
  unsigned L = 16;
  std::uint64_t budget = 10000;
  std::string condition;
  unsigned workers = 1;

  void add(CLI::App* app) {
    app->add_option("--table", load, "Load a table saved with 'table build --format text'");
    app->add_option("--machine", machine, "Machine config file (key = value lines)");
    app->add_option("--variant", variant, "plain, prefix or conditional")
        ->check(CLI::IsMember({"plain", "prefix", "conditional"}));
    app->add_option("--N", N, "Longest string in the table");
    app->add_option("--L", L, "Longest program enumerated");
    app->add_option("--budget", budget, "Step budget T_inf");
    app->add_option("--condition", condition, "Condition string (conditional variant)");
    app->add_option("--workers", workers, "Worker threads for the build")->check(CLI::Range(1u, 256u));
  }

  // Builds (or loads from KOLMO_CACHE_DIR) the table; N defaults to `n`.
  kl_table* get(std::optional<unsigned> n = std::nullopt) const {
    kl_table* t = nullptr;
    if (!load.empty()) {
      check(kl_table_load(read_file(load).c_str(), &t));
      return t;
    }
    const unsigned size = N ? *N : n ? *n : 6;
    const std::string mtext = machine.empty() ? std::string() : read_file(machine);
    const char* mptr = machine.empty() ? nullptr : mtext.c_str();
    std::string cache;
    if (const char* dir = std::getenv("KOLMO_CACHE_DIR"); dir && *dir) {
      char* fp = nullptr;
      check(kl_machine_fingerprint(mptr, variant.c_str(), &fp));
      cache = (fs::path(dir) / (take(fp) + "-N" + std::to_string(size) + "-L" + std::to_string(L) + "-t" +
                                std::to_string(budget) + "-c" + (condition.empty() ? "e" : condition) + ".table"))
                  .string();
      if (fs::exists(cache) && kl_table_load(read_file(cache).c_str(), &t) == KL_OK) return t;
    }
    check(kl_table_build(mptr, variant.c_str(), size, L, budget, condition.c_str(), workers, &t));
    if (!cache.empty()) {
      char* text = nullptr;
      if (kl_table_export(t, "text", &text) == KL_OK) {
        std::error_code ec;
        fs::create_directories(fs::path(cache).parent_path(), ec);
        try {
          write_atomic(cache, take(text));
        } catch (const Failure&) {
          // cache is best effort
        }
      }
    }
    return t;
  }
};

struct TableHandle {
  kl_table* t;
  ~TableHandle() { kl_table_free(t); }
};

struct ModelArgs {
  unsigned N = 6;
  unsigned L = 14;
  std::uint64_t t_inf = 10000;
  std::string qbf;
  std::uint64_t p = 0;
  unsigned cap = 4;

  void add(CLI::App* app) {
    app->add_option("--model-N", N, "Strategy model: longest string");
    app->add_option("--model-L", L, "Strategy model: longest program");
    app->add_option("--t-inf", t_inf, "Strategy model: step budget");
    app->add_option("--qbf", qbf, "Use the protocol model of this QBF instead");
    app->add_option("--p", p, "Field size for --qbf (default: smallest valid prime)");
    app->add_option("--degree-cap", cap, "Degree cap for --qbf");
  }

  kl_model* get() const {
    kl_model* m = nullptr;
    if (!qbf.empty()) {
      check(kl_model_sumcheck(qbf.c_str(), p, cap, &m));
    } else {
      check(kl_model_reference(N, L, t_inf, &m));
    }
    return m;
  }
};

struct ModelHandle {
  kl_model* m;
  ~ModelHandle() { kl_model_free(m); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kolmo: complexity tables, proof strategies and sumcheck compilation"};
  app.set_version_flag("--version", std::string(kl_version()));
  app.set_config("--config", "", "Config file of flag = value lines; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  Output out;
  std::function<std::string()> action;

  // table
  auto* table = app.add_subcommand("table", "Complexity tables")->require_subcommand(1);
  TableArgs tb;
  std::string tb_format = "json", tb_out;
  auto* build = table->add_subcommand("build", "Build (or load) a table and export it");
  tb.add(build);
  build->add_option("--format", tb_format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  build->add_option("--out", tb_out, "Output path");
  build->callback([&] {
    action = [&] {
      TableHandle h{tb.get()};
      char* s = nullptr;
      check(kl_table_export(h.t, tb_format.c_str(), &s));
      return take(s);
    };
  });

  TableArgs tq;
  std::string query_x;
  auto* query = table->add_subcommand("query", "Entry and (length, time) frontier of one string");
  tq.add(query);
  query->add_option("--x", query_x, "Bit string")->required();
  out.add(query);
  query->callback([&] {
    action = [&] {
      TableHandle h{tq.get(static_cast<unsigned>(query_x.size()))};
      char* s = nullptr;
      check(kl_table_query(h.t, query_x.c_str(), &s));
      return take(s);
    };
  });

  // bound
  auto* bound = app.add_subcommand("bound", "Stabilization and halting bounds")->require_subcommand(1);
  TableArgs tbn;
  unsigned bn_n = 6;
  int bn_margin = -1;
  auto* bn = bound->add_subcommand("bn", "B(n) and programs halting after it");
  tbn.add(bn);
  bn->add_option("--n", bn_n, "String length")->required();
  bn->add_option("--margin", bn_margin, "Scan programs of length <= n - margin (default: minimal margin)");
  out.add(bn);
  bn->callback([&] {
    action = [&] {
      TableHandle h{tbn.get(bn_n)};
      char* s = nullptr;
      check(kl_bound_bn(h.t, bn_n, bn_margin, &s));
      return take(s);
    };
  });
  auto* hc = bound->add_subcommand("halt-check", "Decide halting of short programs via r_n");
  TableArgs thc;
  thc.add(hc);
  hc->add_option("--n", bn_n, "String length")->required();
  hc->add_option("--margin", bn_margin, "Decide programs of length <= n - margin (default: minimal margin)");
  out.add(hc);
  hc->callback([&] {
    action = [&] {
      TableHandle h{thc.get(bn_n)};
      char* s = nullptr;
      check(kl_bound_halt_check(h.t, bn_n, bn_margin, &s));
      return take(s);
    };
  });

  // string rn
  auto* str = app.add_subcommand("string", "Distinguished strings")->require_subcommand(1);
  auto* rn = str->add_subcommand("rn", "First length-n string with C >= n");
  TableArgs trn;
  unsigned rn_n = 6;
  trn.add(rn);
  rn->add_option("--n", rn_n, "String length")->required();
  out.add(rn);
  rn->callback([&] {
    action = [&] {
      TableHandle h{trn.get(rn_n)};
      char* s = nullptr;
      check(kl_string_rn(h.t, rn_n, &s));
      return take(s);
    };
  });

  // count compressible
  auto* count = app.add_subcommand("count", "Counting")->require_subcommand(1);
  auto* cc = count->add_subcommand("compressible", "Number of length-n strings with C < n - c");
  TableArgs tcc;
  unsigned cc_n = 6;
  int cc_c = -1;
  tcc.add(cc);
  cc->add_option("--n", cc_n, "String length")->required();
  cc->add_option("--c", cc_c, "Margin (default: every c in 0..n)");
  out.add(cc);
  cc->callback([&] {
    action = [&] {
      TableHandle h{tcc.get(cc_n)};
      char* s = nullptr;
      check(kl_count_compressible(h.t, cc_n, cc_c, &s));
      return take(s);
    };
  });

  // dnc
  auto* dnc = app.add_subcommand("dnc", "String of complexity >= n from a conditional-complexity oracle");
  unsigned dnc_n = 5, dnc_max_c = 8;
  int dnc_c = -1;
  std::uint64_t dnc_t = 10000;
  dnc->add_option("--n", dnc_n, "Target complexity")->required();
  dnc->add_option("--c", dnc_c, "Oracle constant (default: measured)");
  dnc->add_option("--max-c", dnc_max_c, "Search limit when measuring c");
  dnc->add_option("--t-inf", dnc_t, "Step budget");
  out.add(dnc);
  dnc->callback([&] {
    action = [&] {
      char* s = nullptr;
      check(kl_dnc(dnc_n, dnc_c, dnc_max_c, dnc_t, &s));
      return take(s);
    };
  });

  // strategy
  auto* strategy = app.add_subcommand("strategy", "Proof strategies")->require_subcommand(1);
  ModelArgs sm;
  std::string tree_path, target, backend = "syntactic";
  std::uint64_t trials = 10000, seed = 0, count_n = 0;
  std::string epsilon = "1/8", tree_out;
  bool hand = false;
  auto tree_flags = [&](CLI::App* a, bool with_target) {
    sm.add(a);
    a->add_option("--tree", tree_path, "Strategy tree file")->required();
    if (with_target) a->add_option("--target", target, "Target statement")->required();
    a->add_option("--backend", backend, "syntactic or semantic")->check(CLI::IsMember({"syntactic", "semantic"}));
    out.add(a);
  };
  auto* sv = strategy->add_subcommand("validate", "Check a tree's capitals, certificates and derivations");
  tree_flags(sv, false);
  sv->callback([&] {
    action = [&] {
      ModelHandle m{sm.get()};
      char* s = nullptr;
      check(kl_strategy_validate(m.m, read_file(tree_path).c_str(), backend.c_str(), &s));
      return take(s);
    };
  });
  auto* se = strategy->add_subcommand("eval", "Exact probability of proving the target");
  tree_flags(se, true);
  se->callback([&] {
    action = [&] {
      ModelHandle m{sm.get()};
      char* s = nullptr;
      check(kl_strategy_eval(m.m, read_file(tree_path).c_str(), target.c_str(), backend.c_str(), &s));
      return take(s);
    };
  });
  auto* smc = strategy->add_subcommand("mc", "Monte-Carlo estimate (one tree, or a fuzz corpus with --count)");
  sm.add(smc);
  smc->add_option("--tree", tree_path, "Strategy tree file");
  smc->add_option("--target", target, "Target statement");
  smc->add_option("--backend", backend, "syntactic or semantic")->check(CLI::IsMember({"syntactic", "semantic"}));
  smc->add_option("--trials", trials, "Trials per tree");
  smc->add_option("--seed", seed, "Seed")->required();
  smc->add_option("--count", count_n, "Fuzz trees with 0 < p < 1 instead of --tree");
  out.add(smc);
  smc->callback([&] {
    action = [&] {
      ModelHandle m{sm.get()};
      char* s = nullptr;
      if (count_n > 0) {
        check(kl_strategy_mc_corpus(m.m, count_n, seed, trials, &s));
      } else {
        if (tree_path.empty() || target.empty()) throw Failure{2, "--tree and --target are required without --count"};
        check(kl_strategy_mc(m.m, read_file(tree_path).c_str(), target.c_str(), backend.c_str(), trials, seed, &s));
      }
      return take(s);
    };
  });
  auto* sx = strategy->add_subcommand("extract", "Randomness-free derivation when p > epsilon");
  tree_flags(sx, true);
  sx->callback([&] {
    action = [&] {
      ModelHandle m{sm.get()};
      char* s = nullptr;
      check(kl_strategy_extract(m.m, read_file(tree_path).c_str(), target.c_str(), &s));
      return take(s);
    };
  });
  auto* sf = strategy->add_subcommand("fuzz", "One fuzzed tree, or an audited corpus with --count");
  sm.add(sf);
  sf->add_option("--seed", seed, "Seed")->required();
  sf->add_option("--epsilon", epsilon, "Root capital of a single tree");
  sf->add_option("--count", count_n, "Audit this many trees (epsilon cycles 1/16, 1/8, 1/4)");
  sf->add_flag("--hand", hand, "Add the hand-built adversarial trees to the corpus");
  sf->add_option("--tree-out", tree_out, "Write the single tree's text here");
  out.add(sf);
  sf->callback([&] {
    action = [&] {
      ModelHandle m{sm.get()};
      char* s = nullptr;
      if (count_n > 0 || hand) {
        check(kl_strategy_corpus(m.m, count_n, seed, hand ? 1 : 0, &s));
        return take(s);
      }
      check(kl_strategy_fuzz(m.m, seed, epsilon.c_str(), &s));
      std::string rep = take(s);
      if (!tree_out.empty()) write_atomic(tree_out, json::parse(rep)["tree"].get<std::string>());
      return rep;
    };
  });

  // axioms random
  auto* axioms = app.add_subcommand("axioms", "Random-axiom strategies")->require_subcommand(1);
  auto* ar = axioms->add_subcommand("random", "Chain of random incompressibility axioms");
  ModelArgs am;
  std::string ax_n = "6", ax_c = "3", ax_eps = "1/4";
  std::uint64_t samples = 16;
  am.add(ar);
  ar->add_option("--n", ax_n, "Lengths, comma-separated, one per level");
  ar->add_option("--c", ax_c, "Margins, comma-separated, one per level");
  ar->add_option("--epsilon", ax_eps, "Root capital");
  ar->add_option("--samples", samples, "Random paths to sample");
  ar->add_option("--seed", seed, "Seed")->required();
  out.add(ar);
  ar->callback([&] {
    action = [&] {
      ModelHandle m{am.get()};
      char* s = nullptr;
      check(kl_axioms_random(m.m, ax_n.c_str(), ax_c.c_str(), ax_eps.c_str(), samples, seed, &s));
      return take(s);
    };
  });

  // experiment independence
  auto* exp = app.add_subcommand("experiment", "Experiments")->require_subcommand(1);
  auto* ind = exp->add_subcommand("independence", "Consistency of sign patterns of random axioms");
  ModelArgs im;
  unsigned ind_m = 2, ind_n = 6;
  std::string ind_c = "1,2,3,4";
  std::uint64_t ind_trials = 400;
  im.add(ind);
  ind->add_option("--m", ind_m, "Statements per trial");
  ind->add_option("--n", ind_n, "String length");
  ind->add_option("--c", ind_c, "Margins, comma-separated");
  ind->add_option("--trials", ind_trials, "Trials per margin");
  ind->add_option("--seed", seed, "Seed")->required();
  out.add(ind);
  ind->callback([&] {
    action = [&] {
      ModelHandle m{im.get()};
      char* s = nullptr;
      check(kl_experiment_independence(m.m, ind_m, ind_n, ind_c.c_str(), ind_trials, seed, &s));
      return take(s);
    };
  });

  // sumcheck
  auto* sc = app.add_subcommand("sumcheck", "QBF protocol compilation")->require_subcommand(1);
  std::string qbf;
  std::uint64_t p = 0;
  unsigned cap = 4;
  double ceiling = 4e9;
  bool no_extract = false;
  auto qbf_flags = [&](CLI::App* a, bool with_qbf) {
    if (with_qbf) a->add_option("--qbf", qbf, "Quantified Boolean formula")->required();
    a->add_option("--p", p, "Field size (default: smallest valid prime)");
    a->add_option("--degree-cap", cap, "Per-variable degree cap")->check(CLI::Range(2u, 64u));
    out.add(a);
  };
  auto* scc = sc->add_subcommand("compile", "Honest strategy tree and a sample transcript");
  qbf_flags(scc, true);
  scc->add_option("--seed", seed, "Seed for the sample challenges")->required();
  scc->add_option("--tree-out", tree_out, "Write the tree text here");
  scc->callback([&] {
    action = [&] {
      char* s = nullptr;
      check(kl_sumcheck_compile(qbf.c_str(), p, cap, seed, &s));
      std::string rep = take(s);
      if (!tree_out.empty()) write_atomic(tree_out, json::parse(rep)["tree"].get<std::string>());
      return rep;
    };
  });
  auto* sca = sc->add_subcommand("accept", "Exact maximum acceptance over all provers");
  qbf_flags(sca, true);
  sca->add_option("--work-ceiling", ceiling, "Refuse above this many field operations");
  sca->callback([&] {
    action = [&] {
      char* s = nullptr;
      check(kl_sumcheck_accept(qbf.c_str(), p, cap, ceiling, &s));
      return take(s);
    };
  });
  auto* scs = sc->add_subcommand("suite", "Fixed suite of true and false QBFs");
  qbf_flags(scs, false);
  scs->add_flag("--no-extract", no_extract, "Skip derivation-size measurement");
  scs->callback([&] {
    action = [&] {
      char* s = nullptr;
      check(kl_sumcheck_suite(p, cap, no_extract ? 0 : 1, &s));
      return take(s);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    const std::string report = action();
    // table build writes its own formats; everything else goes through Output.
    if (build->parsed()) {
      if (tb_out.empty()) {
        std::cout << report;
      } else {
        write_atomic(tb_out, report);
      }
    } else {
      out.emit(report);
    }
  } catch (const Failure& f) {
    std::cerr << "kolmo: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "kolmo: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
