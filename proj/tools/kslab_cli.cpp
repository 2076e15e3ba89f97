// kslab: command-line front door to the laboratory.
//
// Strings are given as 0/1 text; "e" (or an empty argument) is the empty
// string. CSV is the default output; --format json switches.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kslab/cache.h"
#include "kslab/entropy.h"
#include "kslab/halting.h"
#include "kslab/kolmo.h"
#include "kslab/laws.h"
#include "kslab/library.h"
#include "kslab/machine.h"

namespace {

using namespace kslab;
using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BitString bits(const std::string& text) {
  if (text.empty() || text == "e") return {};
  try {
    return BitString::parse(text);
  } catch (const std::invalid_argument&) {
    throw UsageError("not a bitstring: " + text);
  }
}

std::string show(const BitString& b) { return b.empty() ? "e" : b.str(); }

std::vector<BitString> bit_list(const std::string& text) {
  std::vector<BitString> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(bits(item));
  if (!text.empty() && text.back() == ',') out.push_back({});
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MachineSpec load_machine(const std::string& where) {
  if (where.rfind("lib:", 0) == 0) {
    try {
      return library_machine(where.substr(4)).spec;
    } catch (const std::out_of_range& e) {
      throw UsageError(e.what());
    }
  }
  return parse_machine(read_file(where));
}

std::string value_text(const ComplexityResult& r) {
  return r.found() ? std::to_string(*r.value) : std::string("nf");
}

std::string witness_text(const ComplexityResult& r) {
  return r.witness ? show(*r.witness) : std::string("-");
}

Json result_json(const ComplexityResult& r) {
  Json j;
  j["y"] = show(r.target);
  j["x"] = show(r.condition);
  j["s"] = r.s;
  j["cap"] = r.cap;
  j["value"] = r.found() ? Json(*r.value) : Json(nullptr);
  j["witness"] = r.witness ? Json(show(*r.witness)) : Json(nullptr);
  return j;
}

// ks through the persistent cache.
class CachedKs {
 public:
  CachedKs(bool use_cache, const std::string& dir, unsigned workers) : workers_(workers) {
    if (use_cache) cache_.emplace(dir.empty() ? ResultCache::default_dir() : std::filesystem::path(dir));
  }

  ComplexityResult get(const BitString& y, const BitString& x, std::size_t s, std::size_t cap) {
    const std::string& tag = interpreter_tag();
    if (cache_) {
      if (auto hit = cache_->get(tag, y, x, s, cap)) return *hit;
    }
    ComplexityResult r = oracle_.ks(y, x, s, cap);
    if (cache_) cache_->put(tag, r);
    return r;
  }

 private:
  unsigned workers_;
  std::optional<ResultCache> cache_;
  KsOracle oracle_{4096, workers_};
};

void emit(const std::string& text) { std::cout << text << std::flush; }

struct Common {
  std::string format = "csv";
  unsigned workers = 1;
  std::string cache_dir;
  bool no_cache = false;
};

void add_format(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_workers(CLI::App* app, Common& c) {
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 256u));
}

void add_cache(CLI::App* app, Common& c) {
  app->add_option("--cache", c.cache_dir, "cache directory (default $KSLAB_CACHE_DIR or .kslab-cache)");
  app->add_flag("--no-cache", c.no_cache, "do not read or write the cache");
}

Law make_law(const std::string& name, unsigned k, const std::string& i, const std::string& j,
             const std::string& ineq_text, const std::string& ineq_file) {
  if (name == "pair_swap") return Law::pair_swap();
  if (name == "chain_easy") return Law::chain_easy();
  if (name == "symmetry") return Law::symmetry();
  if (name == "basic") return Law::basic(k, parse_subset(i), parse_subset(j));
  if (name == "shannon") {
    if (ineq_text.empty() == ineq_file.empty()) {
      throw UsageError("shannon needs exactly one of --ineq and --inequality");
    }
    const LinearInequality ineq =
        parse_inequality(ineq_file.empty() ? ineq_text : read_file(ineq_file));
    return Law::shannon(ineq, is_shannon(ineq));
  }
  throw UsageError("unknown law " + name);
}

Json inequality_json(const LinearInequality& ineq) { return format_inequality(ineq); }

std::vector<std::string> rational_strings(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(format_rational(r));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kslab: space-bounded Kolmogorov complexity laboratory"};
  app.require_subcommand(1);
  Common common;
  std::function<void()> action;

  // ks
  auto* ks_cmd = app.add_subcommand("ks", "complexities")->require_subcommand(1);
  std::string y_text, x_text;
  std::size_t s = 0, cap = 14, n = 2;
  std::vector<std::size_t> s_grid;

  auto* compute = ks_cmd->add_subcommand("compute", "KS^s(y|x)");
  compute->add_option("--y", y_text, "target")->required();
  compute->add_option("--x", x_text, "condition");
  compute->add_option("--s", s, "space bound")->required();
  compute->add_option("--cap", cap, "program-length cap")->check(CLI::Range(0, 26));
  add_format(compute, common);
  add_workers(compute, common);
  add_cache(compute, common);
  compute->callback([&] {
    action = [&] {
      CachedKs source(!common.no_cache, common.cache_dir, common.workers);
      ComplexityResult r = source.get(bits(y_text), bits(x_text), s, cap);
      if (common.format == "json") {
        emit(result_json(r).dump(2) + "\n");
      } else {
        emit("y,x,s,cap,value,witness\n" + show(r.target) + "," + show(r.condition) + "," +
             std::to_string(r.s) + "," + std::to_string(r.cap) + "," + value_text(r) + "," +
             witness_text(r) + "\n");
      }
    };
  });

  auto* table = ks_cmd->add_subcommand("table", "KS^s(y|x) for every y of length <= n");
  table->add_option("--x", x_text, "condition");
  table->add_option("--n", n, "max target length")->check(CLI::Range(0, 8));
  table->add_option("--s-grid", s_grid, "space bounds")->required()->delimiter(',');
  table->add_option("--cap", cap, "program-length cap")->check(CLI::Range(0, 26));
  add_format(table, common);
  add_workers(table, common);
  add_cache(table, common);
  table->callback([&] {
    action = [&] {
      CachedKs source(!common.no_cache, common.cache_dir, common.workers);
      const BitString x = bits(x_text);
      Json rows = Json::array();
      if (common.format == "csv") emit("y,x,s,cap,value,witness\n");
      for (const auto& y : all_tuples(1, n)) {
        for (std::size_t sv : s_grid) {
          ComplexityResult r = source.get(y[0], x, sv, cap);
          if (common.format == "json") {
            rows.push_back(result_json(r));
          } else {
            emit(show(r.target) + "," + show(x) + "," + std::to_string(sv) + "," +
                 std::to_string(cap) + "," + value_text(r) + "," + witness_text(r) + "\n");
          }
        }
      }
      if (common.format == "json") emit(rows.dump(2) + "\n");
    };
  });

  std::vector<std::string> pair_args;
  auto* pair = ks_cmd->add_subcommand("pair-encode", "print encode_pair(x, y)");
  pair->add_option("strings", pair_args, "x y")->expected(2)->required();
  pair->callback([&] {
    action = [&] { emit(show(encode_pair(bits(pair_args[0]), bits(pair_args[1]))) + "\n"); };
  });

  // halt
  auto* halt_cmd = app.add_subcommand("halt", "termination in space s")->require_subcommand(1);
  std::string machine_path, p_text, decider = "backward";
  auto* decide = halt_cmd->add_subcommand("decide", "does M on (p, x) terminate within s");
  decide->add_option("--machine", machine_path, "machine file, or lib:<name>")->required();
  decide->add_option("--p", p_text, "program tape");
  decide->add_option("--x", x_text, "condition tape");
  decide->add_option("--s", s, "space bound")->required();
  decide->add_option("--decider", decider, "backward, forward, counter or all")
      ->check(CLI::IsMember({"backward", "forward", "counter", "all"}));
  decide->callback([&] {
    action = [&] {
      if (machine_path.rfind("lib:", 0) != 0 && !std::filesystem::exists(machine_path)) {
        throw UsageError("no such machine file: " + machine_path);
      }
      const MachineSpec m = load_machine(machine_path);
      const BitString p = bits(p_text), x = bits(x_text);
      std::vector<std::pair<std::string, HaltVerdict>> runs;
      if (decider == "backward" || decider == "all") {
        runs.emplace_back("backward", decide_backward(m, p, x, s));
      }
      if (decider == "forward" || decider == "all") {
        runs.emplace_back("forward", decide_forward(m, p, x, s));
      }
      if (decider == "counter" || decider == "all") {
        runs.emplace_back("counter", decide_counter(m, p, x, s));
      }
      for (const auto& [name, v] : runs) {
        if (v.terminates_within_s != runs[0].second.terminates_within_s) {
          throw std::domain_error("deciders disagree");
        }
      }
      std::string out = std::string("terminates: ") +
                        (runs[0].second.terminates_within_s ? "true" : "false") + "\n";
      for (const auto& [name, v] : runs) {
        out += name + ".configurations_visited: " +
               std::to_string(v.probe_stats.configurations_visited) + "\n";
        if (name == "backward") {
          out += name + ".peak_live_configurations: " +
                 std::to_string(v.probe_stats.peak_live_configurations) + "\n";
        }
      }
      emit(out);
    };
  });

  // law
  auto* law_cmd = app.add_subcommand("law", "inequality grids and proof devices")
                      ->require_subcommand(1);
  std::string law_name, subset_i = "{1}", subset_j = "{2}", ineq_text, ineq_file;
  unsigned k = 2;
  bool with_runtime = false;
  auto* verify = law_cmd->add_subcommand("verify", "minimal constant of a law over a grid");
  verify->add_option("law", law_name, "pair_swap, chain_easy, symmetry, basic or shannon")
      ->required();
  verify->add_option("--n", n, "max string length")->check(CLI::Range(0, 8));
  verify->add_option("--s-grid", s_grid, "space bounds")->required()->delimiter(',');
  verify->add_option("--cap", cap, "program-length cap")->check(CLI::Range(0, 26));
  verify->add_option("--k", k, "arity for basic")->check(CLI::Range(1, 4));
  verify->add_option("--i", subset_i, "I for basic, as {1,2}");
  verify->add_option("--j", subset_j, "J for basic");
  verify->add_option("--ineq", ineq_text, "inequality text for shannon");
  verify->add_option("--inequality", ineq_file, "inequality file for shannon")
      ->check(CLI::ExistingFile);
  verify->add_flag("--with-runtime", with_runtime, "include the runtime in JSON output");
  add_format(verify, common);
  add_workers(verify, common);
  verify->callback([&] {
    action = [&] {
      const Law law = make_law(law_name, k, subset_i, subset_j, ineq_text, ineq_file);
      LawGrid g;
      g.n = n;
      g.s_grid = s_grid;
      g.cap = cap;
      KsOracle oracle(4096, common.workers);
      LawReport r = verify_law(law, g, oracle, common.workers);
      emit(common.format == "json" ? r.to_json(with_runtime) : r.to_csv());
    };
  });

  std::string target_text;
  std::size_t m = 12, stage_cap = 1024;
  auto* staged = law_cmd->add_subcommand("staged", "ordinal of (x, y) in the staged enumeration");
  staged->add_option("--x", x_text, "first component");
  staged->add_option("--target", target_text, "second component")->required();
  staged->add_option("--m", m, "complexity threshold")->check(CLI::Range(0, 26));
  staged->add_option("--n", n, "max length of the second component")->check(CLI::Range(0, 8));
  staged->add_option("--stage-cap", stage_cap, "last stage tried");
  add_format(staged, common);
  staged->callback([&] {
    action = [&] {
      KsOracle oracle;
      StageOrdinal o =
          staged_enumeration(bits(x_text), m, n, bits(target_text), oracle, stage_cap);
      if (common.format == "json") {
        Json j;
        j["x"] = show(o.x);
        j["target"] = show(o.target);
        j["m"] = o.m;
        j["ordinal"] = o.ordinal;
        j["s_hit"] = o.s_hit;
        j["enumerated_through_hit"] = o.enumerated_through_hit;
        emit(j.dump(2) + "\n");
      } else {
        emit("x,target,m,ordinal,s_hit,enumerated_through_hit\n" + show(o.x) + "," +
             show(o.target) + "," + std::to_string(o.m) + "," + std::to_string(o.ordinal) + "," +
             std::to_string(o.s_hit) + "," + std::to_string(o.enumerated_through_hit) + "\n");
      }
    };
  });

  std::string xs_text;
  std::size_t u = 64;
  auto* typical = law_cmd->add_subcommand("typical-set", "tuples dominated by a base profile");
  typical->add_option("--xs", xs_text, "base tuple, comma separated")->required();
  typical->add_option("--u", u, "space bound of the base profile");
  typical->add_option("--n", n, "max component length")->check(CLI::Range(0, 8));
  typical->add_option("--cap", cap, "program-length cap")->check(CLI::Range(0, 26));
  typical->callback([&] {
    action = [&] {
      KsOracle oracle(8192);
      TypicalSet set = typical_set(bit_list(xs_text), u, n, cap, oracle);
      std::string out = set.gap_report();
      out += "members\n";
      for (const auto& t : set.members) {
        std::string row;
        for (std::size_t i = 0; i < t.size(); ++i) row += (i ? "," : "") + show(t[i]);
        out += row + "\n";
      }
      emit(out);
    };
  });

  std::string a_text, b_text;
  auto* mi = law_cmd->add_subcommand("mutual-info", "I^s(a:b) = KS^s(a) - KS^s(a|b)");
  mi->add_option("--a", a_text, "a")->required();
  mi->add_option("--b", b_text, "b")->required();
  mi->add_option("--s-grid", s_grid, "space bounds")->required()->delimiter(',');
  mi->add_option("--cap", cap, "program-length cap")->check(CLI::Range(0, 26));
  add_format(mi, common);
  mi->callback([&] {
    action = [&] {
      KsOracle oracle;
      auto profile = mutual_info_profile(bits(a_text), bits(b_text), s_grid, cap, oracle);
      if (common.format == "json") {
        Json rows = Json::array();
        for (const auto& p : profile) {
          rows.push_back({{"s", p.s}, {"value", p.value ? Json(*p.value) : Json(nullptr)}});
        }
        emit(rows.dump(2) + "\n");
      } else {
        emit("s,mutual_info\n");
        for (const auto& p : profile) {
          emit(std::to_string(p.s) + "," + (p.value ? std::to_string(*p.value) : "undefined") +
               "\n");
        }
      }
    };
  });

  // cone
  auto* cone_cmd = app.add_subcommand("cone", "Shannon cone")->require_subcommand(1);
  auto* check = cone_cmd->add_subcommand("check", "is an inequality a Shannon inequality");
  check->add_option("--ineq", ineq_text, "inequality text, e.g. \"k=2; {1}:1 {2}:1 {1,2}:-1\"");
  check->add_option("--inequality", ineq_file, "inequality file")->check(CLI::ExistingFile);
  std::string dist_file;
  check->add_option("--distribution", dist_file, "also evaluate on this distribution (CSV)")
      ->check(CLI::ExistingFile);
  add_format(check, common);
  check->callback([&] {
    action = [&] {
      if (ineq_text.empty() == ineq_file.empty()) {
        throw UsageError("need exactly one of --ineq and --inequality");
      }
      const LinearInequality ineq =
          parse_inequality(ineq_file.empty() ? ineq_text : read_file(ineq_file));
      const ConeDecision d = is_shannon(ineq);
      const bool ok = verify_certificate(ineq, d);
      const auto gens = elemental_inequalities(ineq.k);
      std::optional<double> on_dist;
      if (!dist_file.empty()) {
        const EntropyVector v = entropy_vector(parse_distribution(read_file(dist_file)));
        if (v.k != ineq.k) throw std::domain_error("distribution arity differs from k");
        on_dist = evaluate(ineq, v);
      }
      char value_buf[64] = "";
      if (on_dist) std::snprintf(value_buf, sizeof value_buf, "%.9f", *on_dist);
      if (common.format == "json") {
        Json j;
        j["inequality"] = format_inequality(ineq);
        if (on_dist) j["value_on_distribution"] = std::string(value_buf);
        j["decision"] = d.member() ? "member" : "non_member";
        j["certificate_verified"] = ok;
        if (d.member()) {
          Json w = Json::array();
          for (std::size_t g = 0; g < gens.size(); ++g) {
            if (d.weights[g] != 0) {
              w.push_back({{"elemental", format_inequality(gens[g])},
                           {"weight", format_rational(d.weights[g])}});
            }
          }
          j["weights"] = w;
        } else {
          j["cone_separating_certificate"] = rational_strings(d.witness);
        }
        emit(j.dump(2) + "\n");
      } else {
        std::string out = std::string("decision,") + (d.member() ? "member" : "non_member") +
                          "\ncertificate_verified," + (ok ? "true" : "false") + "\n";
        if (on_dist) out += std::string("value_on_distribution,") + value_buf + "\n";
        if (d.member()) {
          out += "elemental,weight\n";
          for (std::size_t g = 0; g < gens.size(); ++g) {
            if (d.weights[g] != 0) {
              out += "\"" + format_inequality(gens[g]) + "\"," + format_rational(d.weights[g]) +
                     "\n";
            }
          }
        } else {
          out += "subset,cone_separating_certificate\n";
          for (SubsetMask mask = 1; mask <= full_mask(ineq.k); ++mask) {
            out += "\"" + format_subset(mask) + "\"," + format_rational(d.witness[mask - 1]) +
                   "\n";
          }
        }
        emit(out);
      }
      if (!ok) throw std::domain_error("certificate failed to verify");
    };
  });

  auto* elemental = cone_cmd->add_subcommand("elemental", "list the elemental inequalities");
  elemental->add_option("--k", k, "arity")->required()->check(CLI::Range(1u, kMaxEntropyArity));
  add_format(elemental, common);
  elemental->callback([&] {
    action = [&] {
      const auto gens = elemental_inequalities(k);
      if (common.format == "json") {
        Json list = Json::array();
        for (const auto& g : gens) list.push_back(inequality_json(g));
        emit(list.dump(2) + "\n");
      } else {
        emit("index,inequality\n");
        for (std::size_t g = 0; g < gens.size(); ++g) {
          emit(std::to_string(g) + ",\"" + format_inequality(gens[g]) + "\"\n");
        }
      }
    };
  });

  // lemma
  auto* lemma_cmd = app.add_subcommand("lemma", "iteration lemma")->require_subcommand(1);
  double ls = 1, lc = 1, lk = 0;
  std::uint64_t ln = 1;
  std::vector<double> consts;
  auto* iterate = lemma_cmd->add_subcommand("iterate", "f^(n)(s) with f(s) = s + c log2 s + k");
  iterate->add_option("--s", ls, "start")->required()->check(CLI::PositiveNumber);
  iterate->add_option("--c", lc, "log coefficient")->check(CLI::NonNegativeNumber);
  iterate->add_option("--k", lk, "additive term")->check(CLI::NonNegativeNumber);
  iterate->add_option("--n", ln, "iterations")->required()->check(CLI::PositiveNumber);
  iterate->add_option("--bound", consts, "c1,c2: also print the lemma bound")
      ->expected(2)
      ->delimiter(',');
  iterate->callback([&] {
    action = [&] {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9f", iterate_f(ls, lc, lk, ln));
      std::string out = std::string("iterate_f: ") + buf + "\n";
      if (!consts.empty()) {
        std::snprintf(buf, sizeof buf, "%.9f",
                      lemma_bound(ls, lk, static_cast<double>(ln), consts[0], consts[1]));
        out += std::string("lemma_bound: ") + buf + "\n";
      }
      emit(out);
    };
  });

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "result cache")->require_subcommand(1);
  auto* stats = cache_cmd->add_subcommand("stats", "record count");
  stats->add_option("--cache", common.cache_dir, "cache directory");
  stats->callback([&] {
    action = [&] {
      ResultCache cache(common.cache_dir.empty() ? ResultCache::default_dir()
                                                 : std::filesystem::path(common.cache_dir));
      emit("file: " + cache.file().string() + "\nrecords: " + std::to_string(cache.size()) +
           "\ninterpreter: " + interpreter_tag() + "\n");
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }
  try {
    if (action) action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const MachineParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
