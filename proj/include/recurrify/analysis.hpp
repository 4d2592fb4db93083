#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recurrify/extract.hpp"
#include "recurrify/semantics.hpp"
#include "recurrify/source_eval.hpp"
#include "recurrify/source_parser.hpp"

namespace recurrify {

// One row of an analyze table. size2 is used for two-list arguments
// (e.g. merge over (k, l)).
struct AnalysisRow {
  std::uint64_t size = 0;
  std::optional<std::uint64_t> size2;
  NInf semantic_cost;
  SemVal semantic_potential;
  std::string potential_text;
  std::optional<Cost> actual_max_cost;
  bool widened = false;
  bool violation = false;  // actual observed cost exceeded the semantic bound
};

enum class ArgShape { ListArg, PairOfLists, IntAndList };

// Shape of a definition's argument type; nullopt when unsupported.
std::optional<ArgShape> arg_shape(const SrcTypePtr &def_type);

// Denotes every definition's potential, in order, sharing one context so
// fixpoint memo tables persist across queries.
class Analyzer {
 public:
  Analyzer(Program program, const ModelConfig &cfg);

  AnalysisRow analyze(const Name &def, std::uint64_t n,
                      std::optional<std::uint64_t> n2 = std::nullopt,
                      bool cross_check = false, Fuel fuel = 1u << 22);

  const Program &program() const { return program_; }
  DenoteCtx &ctx() { return ctx_; }
  const SemEnv &env() const { return env_; }

 private:
  Program program_;
  DenoteCtx ctx_;
  SemEnv env_;
};

// Concrete worst-case / sampled inputs of a given size for cross-checking.
std::vector<SrcExprPtr> concrete_list_inputs(std::uint64_t n,
                                             std::uint64_t seed = 7);
std::vector<SrcExprPtr> concrete_pair_inputs(std::uint64_t k, std::uint64_t l,
                                             std::uint64_t seed = 7);

struct CheckReport {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> messages;
  bool ok() const { return violations == 0; }
};

// Soundness of one closed expression against its extracted recurrence in
// the given model; returns a violation description, empty when sound.
std::optional<std::string> soundness_violation(const SrcExprPtr &closed_expr,
                                               Fuel fuel,
                                               const ModelConfig &cfg);

struct SoundnessOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  Fuel fuel = 10000;
  std::size_t max_perm_len = 5;
};
CheckReport check_soundness(const SoundnessOptions &opts);

struct AdequacyOptions {
  Fuel fuel = 1u << 22;
  std::size_t max_size = 6;
};
CheckReport check_adequacy(const AdequacyOptions &opts);

struct AxiomOptions {
  std::uint64_t trials = 500;
  std::uint64_t seed = 0;
};
CheckReport check_model_axioms(const AxiomOptions &opts);

// All permutations of 1..n (n! of them; keep n small).
std::vector<std::vector<std::int64_t>> permutations(std::size_t n);

}  // namespace recurrify
