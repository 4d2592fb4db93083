#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "recurrify/analysis.hpp"
#include "recurrify/corpus.hpp"
#include "recurrify/errors.hpp"
#include "recurrify/extract.hpp"
#include "recurrify/rec_simplify.hpp"

using json = nlohmann::json;
using namespace recurrify;

namespace {

// Program files are paths, or corpus:<name> for the built-in programs.
Program load_program(const std::string &spec) {
  if (spec.rfind("corpus:", 0) == 0) return load_corpus(spec.substr(7));
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open " + spec);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
  if (const char *env = std::getenv("RECURRIFY_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return cli_seed;
}

struct SizeRange {
  std::uint64_t lo = 0, hi = 0;
};

SizeRange parse_range(const std::string &s) {
  auto dots = s.find("..");
  SizeRange r;
  if (dots == std::string::npos) {
    r.lo = r.hi = std::stoull(s);
  } else {
    r.lo = std::stoull(s.substr(0, dots));
    r.hi = std::stoull(s.substr(dots + 2));
  }
  if (r.hi < r.lo) throw CLI::ValidationError("sizes", "empty range " + s);
  return r;
}

json row_to_json(const AnalysisRow &row) {
  json j;
  j["size"] = row.size;
  if (row.size2) j["size2"] = *row.size2;
  if (row.semantic_cost.is_inf())
    j["semantic_cost"] = "inf";
  else
    j["semantic_cost"] = *row.semantic_cost.v;
  j["semantic_potential"] = row.potential_text;
  if (row.actual_max_cost) j["actual_max_cost"] = *row.actual_max_cost;
  j["widened"] = row.widened;
  j["violation"] = row.violation;
  return j;
}

void print_report(const CheckReport &rep, const std::string &label,
                  bool as_json) {
  if (as_json) {
    json j;
    j["check"] = label;
    j["checked"] = rep.checked;
    j["violations"] = rep.violations;
    j["messages"] = rep.messages;
    std::cout << j.dump() << "\n";
    return;
  }
  std::cout << label << ": " << rep.checked << " checks, " << rep.violations
            << " violations\n";
  for (const auto &m : rep.messages) std::cout << "  " << m << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"recurrify: cost recurrence extraction and evaluation"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "one JSON object per output line");

  // --- run ---
  auto *run = app.add_subcommand("run", "evaluate a program under the cost semantics");
  std::string run_file, run_main;
  std::uint64_t run_fuel = 1u << 22;
  run->add_option("file", run_file)->required();
  run->add_option("--main", run_main, "expression to evaluate (defaults to the file's main)");
  run->add_option("--fuel", run_fuel, "rule-application budget");

  // --- extract ---
  auto *extract = app.add_subcommand("extract", "print a definition's recurrence");
  std::string ex_file, ex_name;
  bool ex_simplify = false;
  extract->add_option("file", ex_file)->required();
  extract->add_option("name", ex_name)->required();
  extract->add_flag("--simplify", ex_simplify);

  // --- analyze ---
  auto *analyze = app.add_subcommand("analyze", "evaluate a recurrence over a size range");
  std::string an_file, an_name, an_sizes = "0..8", an_sizes2, an_mode = "cartesian";
  std::uint64_t an_fix_fuel = 256;
  bool an_cross = false;
  analyze->add_option("file", an_file)->required();
  analyze->add_option("name", an_name)->required();
  analyze->add_option("--sizes", an_sizes, "size range A..B");
  analyze->add_option("--sizes2", an_sizes2, "second size range for pair-of-lists arguments");
  analyze->add_option("--product-mode", an_mode)->check(CLI::IsMember({"cartesian", "powerset"}));
  analyze->add_option("--fix-fuel", an_fix_fuel, "fixpoint iteration budget");
  analyze->add_flag("--cross-check", an_cross, "compare against concrete evaluations");

  // --- check ---
  auto *check = app.add_subcommand("check", "run a verification suite");
  check->require_subcommand(1);
  auto *snd = check->add_subcommand("soundness");
  std::uint64_t snd_trials = 1000, snd_seed = 0, snd_fuel = 10000;
  snd->add_option("--trials", snd_trials);
  snd->add_option("--seed", snd_seed);
  snd->add_option("--fuel", snd_fuel);
  auto *adq = check->add_subcommand("adequacy");
  std::uint64_t adq_fuel = 1u << 22;
  adq->add_option("--fuel", adq_fuel);
  auto *axm = check->add_subcommand("model-axioms");
  std::uint64_t axm_trials = 500, axm_seed = 0;
  axm->add_option("--trials", axm_trials);
  axm->add_option("--seed", axm_seed);

  // --- corpus ---
  auto *corpus = app.add_subcommand("corpus", "list or print built-in programs");
  std::string corpus_show;
  corpus->add_option("show", corpus_show, "name to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      Program prog = load_program(run_file);
      SrcExprPtr target = prog.main;
      if (!run_main.empty()) target = parse_expr(run_main, prog.defs);
      if (!target) throw std::runtime_error("no main expression; pass --main");
      auto closed = resolve_defs(prog.defs, target);
      Outcome o = eval(closed, run_fuel);
      if (as_json) {
        json j;
        j["complete"] = o.complete;
        j["cost"] = o.cost;
        if (o.complete) j["value"] = show_expr(o.value);
        std::cout << j.dump() << "\n";
      } else if (o.complete) {
        std::cout << "value: " << show_expr(o.value) << "\n"
                  << "cost:  " << o.cost << "\n";
      } else {
        std::cout << "incomplete after fuel " << run_fuel << "; cost so far "
                  << o.cost << "\n";
      }
      return 0;
    }

    if (*extract) {
      Program prog = load_program(ex_file);
      const Def &def = find_def(prog, ex_name);
      TypeCtx ctx;
      for (const auto &d : prog.defs) {
        if (d.name == ex_name) break;
        ctx[d.name] = d.type;
      }
      auto rec = extract_expr(ctx, def.value);
      if (ex_simplify) rec = simplify(rec);
      std::cout << show_rec(rec) << "\n";
      return 0;
    }

    if (*analyze) {
      Program prog = load_program(an_file);
      ModelConfig cfg;
      cfg.product_mode = an_mode == "powerset" ? ProductMode::Powerset
                                               : ProductMode::Cartesian;
      cfg.fix_fuel = an_fix_fuel;
      Analyzer analyzer(prog, cfg);
      auto range = parse_range(an_sizes);
      bool pair_arg =
          arg_shape(find_def(prog, an_name).type) == ArgShape::PairOfLists;
      bool violated = false;
      auto emit = [&](AnalysisRow row) {
        violated = violated || row.violation;
        if (as_json) {
          std::cout << row_to_json(row).dump() << "\n";
          return;
        }
        std::cout << "n=" << row.size;
        if (row.size2) std::cout << " m=" << *row.size2;
        std::cout << "  cost=" << show_ninf(row.semantic_cost)
                  << "  potential=" << row.potential_text;
        if (row.actual_max_cost)
          std::cout << "  actual_max=" << *row.actual_max_cost;
        if (row.widened) std::cout << "  [widened]";
        if (row.violation) std::cout << "  [SOUNDNESS VIOLATION]";
        std::cout << "\n";
      };
      if (pair_arg) {
        auto range2 = an_sizes2.empty() ? range : parse_range(an_sizes2);
        for (std::uint64_t n = range.lo; n <= range.hi; ++n)
          for (std::uint64_t m = range2.lo; m <= range2.hi; ++m)
            emit(analyzer.analyze(an_name, n, m, an_cross));
      } else {
        for (std::uint64_t n = range.lo; n <= range.hi; ++n)
          emit(analyzer.analyze(an_name, n, std::nullopt, an_cross));
      }
      return violated ? 1 : 0;
    }

    if (*snd) {
      SoundnessOptions opts;
      opts.trials = snd_trials;
      opts.seed = effective_seed(snd_seed);
      opts.fuel = snd_fuel;
      auto rep = check_soundness(opts);
      print_report(rep, "soundness", as_json);
      return rep.ok() ? 0 : 1;
    }
    if (*adq) {
      AdequacyOptions opts;
      opts.fuel = adq_fuel;
      auto rep = check_adequacy(opts);
      print_report(rep, "adequacy", as_json);
      return rep.ok() ? 0 : 1;
    }
    if (*axm) {
      AxiomOptions opts;
      opts.trials = axm_trials;
      opts.seed = effective_seed(axm_seed);
      auto rep = check_model_axioms(opts);
      print_report(rep, "model-axioms", as_json);
      return rep.ok() ? 0 : 1;
    }

    if (*corpus) {
      if (corpus_show.empty()) {
        for (const auto &[name, text] : corpus_sources())
          std::cout << name << "\n";
      } else {
        std::cout << corpus_sources().at(corpus_show);
      }
      return 0;
    }
  } catch (const ParseError &e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
