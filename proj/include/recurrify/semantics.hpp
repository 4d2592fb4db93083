#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "recurrify/rec_ast.hpp"
#include "recurrify/rec_typecheck.hpp"

namespace recurrify {

// ---------------------------------------------------------------------------
// Natural numbers with infinity.
// ---------------------------------------------------------------------------

struct NInf {
  std::optional<std::uint64_t> v;  // nullopt = infinity

  static NInf fin(std::uint64_t n) { return NInf{n}; }
  static NInf inf() { return NInf{std::nullopt}; }
  bool is_inf() const { return !v.has_value(); }
  bool operator==(const NInf &o) const { return v == o.v; }
};

NInf ninf_add(const NInf &a, const NInf &b);
NInf ninf_max(const NInf &a, const NInf &b);
bool ninf_leq(const NInf &a, const NInf &b);
std::string show_ninf(const NInf &n);

// csize lands in {bot} + N-infinity; bot sits below everything and is the
// additive unit.
struct CsizeVal {
  bool bot = false;
  NInf n = NInf::fin(0);

  static CsizeVal bottom() { return CsizeVal{true, NInf::fin(0)}; }
  static CsizeVal of(NInf x) { return CsizeVal{false, x}; }
};

CsizeVal csize_add(const CsizeVal &a, const CsizeVal &b);
CsizeVal csize_join(const CsizeVal &a, const CsizeVal &b);
NInf csucc(const CsizeVal &a);

// ---------------------------------------------------------------------------
// Model configuration
// ---------------------------------------------------------------------------

enum class ProductMode { Cartesian, Powerset };

struct ModelConfig {
  ProductMode product_mode = ProductMode::Cartesian;
  std::uint64_t fix_fuel = 256;
  bool memo_enabled = true;
};

// ---------------------------------------------------------------------------
// Semantic values
// ---------------------------------------------------------------------------

class SemVal;
struct DenoteCtx;
struct FuncNode;

struct SemNode;
using SemNodePtr = std::shared_ptr<const SemNode>;

class SemVal {
 public:
  SemVal() = default;
  explicit SemVal(SemNodePtr p) : p_(std::move(p)) {}
  const SemNode &node() const { return *p_; }
  const SemNodePtr &ptr() const { return p_; }
  bool valid() const { return p_ != nullptr; }

 private:
  SemNodePtr p_;
};

struct SemNode {
  struct NInfV {
    NInf v;
  };
  struct UnitPt {};
  struct IntTop {};
  struct TaggedSet {  // antichain of tagged generators, canonically sorted
    std::vector<std::pair<int, SemVal>> gens;
  };
  struct TupleV {
    SemVal fst, snd;
  };
  struct TupleSet {  // powerset-product mode
    std::vector<std::pair<SemVal, SemVal>> gens;
  };
  struct Func {
    std::shared_ptr<FuncNode> fn;
  };
  struct CmplxV {
    NInf cost;
    SemVal pot;
  };
  using Node =
      std::variant<NInfV, UnitPt, IntTop, TaggedSet, TupleV, TupleSet, Func,
                   CmplxV>;
  Node node;
  std::uint64_t hash = 0;  // structural hash, filled at construction
};

struct DenoteCtx {
  ModelConfig cfg;
  bool widened = false;
  // Per-session cache of subexpression types; valid because a given AST node
  // is always typed under the same context within one session.
  std::map<const RecExpr *, RecTypePtr> type_cache;
  // Symbolic unfolds keyed by type node and size (infinity as ~0).
  std::map<std::pair<const RecType *, std::uint64_t>, SemVal> unfold_cache;
};

// Total order on normalized representations (functions by identity);
// gives deterministic memo keys and canonical set ordering.
int sem_compare(const SemVal &a, const SemVal &b);

struct SemValLess {
  bool operator()(const SemVal &a, const SemVal &b) const {
    return sem_compare(a, b) < 0;
  }
};

struct SemValHash {
  std::size_t operator()(const SemVal &a) const { return a.node().hash; }
};

struct SemValEq {
  bool operator()(const SemVal &a, const SemVal &b) const {
    return sem_compare(a, b) == 0;
  }
};

struct FuncNode {
  std::function<SemVal(const SemVal &, DenoteCtx &)> fn;
  RecTypePtr dom;  // may be null; used to pick probe points
  std::uint64_t id;
  bool memo_enabled = true;
  mutable std::mutex mu;
  // arg -> (value, widened during its computation)
  mutable std::unordered_map<SemVal, std::pair<SemVal, bool>, SemValHash,
                             SemValEq>
      memo;
};

namespace sem {
SemVal ninf(NInf n);
SemVal fin(std::uint64_t n);
SemVal infty();
SemVal unit_pt();
SemVal int_top();
SemVal tagged_set(std::vector<std::pair<int, SemVal>> gens, DenoteCtx &ctx);
SemVal tuple(SemVal a, SemVal b);
SemVal tuple_set(std::vector<std::pair<SemVal, SemVal>> gens, DenoteCtx &ctx);
SemVal func(std::function<SemVal(const SemVal &, DenoteCtx &)> fn,
            RecTypePtr dom, bool memo_enabled = true);
SemVal cmplx(NInf cost, SemVal pot);
}  // namespace sem

bool sem_has_func(const SemVal &a);

bool sem_leq(const SemVal &a, const SemVal &b, DenoteCtx &ctx);
bool sem_equal(const SemVal &a, const SemVal &b, DenoteCtx &ctx);
SemVal sem_join(const SemVal &a, const SemVal &b, DenoteCtx &ctx);
SemVal apply_fn(const SemVal &f, const SemVal &a, DenoteCtx &ctx);

SemVal top_of(const RecTypePtr &t, DenoteCtx &ctx);
SemVal bottom_of(const RecTypePtr &t, DenoteCtx &ctx);

// Small sample sets per type, used as probe points when comparing functions.
std::vector<SemVal> enum_samples(const RecTypePtr &t, DenoteCtx &ctx,
                                 int depth = 2);

// csize over the functor body with hole alpha (Fig-style constructor count).
CsizeVal csize(const RecTypePtr &functor, const Name &alpha, const SemVal &a,
               DenoteCtx &ctx);

// Join of { a | succ(csize_F(a)) <= n }, computed symbolically.
SemVal unfold_symbolic(const RecTypePtr &mu_type, const NInf &n,
                       DenoteCtx &ctx);

// Demand-driven fixpoint of an information-order-monotone functional at
// type sigma: Kleene iteration from the information-order bottom (the
// size-order top), at most fix_fuel unrollings per query, memoized per
// argument. Answers are sound upper bounds at any fuel; ctx.widened is set
// when an answer could not be confirmed stable.
using Functional = std::function<SemVal(const SemVal &, DenoteCtx &)>;
SemVal fix_iterate(const Functional &functional, const RecTypePtr &sigma,
                   DenoteCtx &ctx);

// ---------------------------------------------------------------------------
// Term denotation
// ---------------------------------------------------------------------------

// Persistent environment: binding is O(1) and shares the tail, so closures
// capture environments cheaply.
class SemEnv {
 public:
  SemEnv() = default;

  SemEnv bind(const Name &n, SemVal v, RecTypePtr t) const {
    SemEnv out;
    out.head_ = std::make_shared<const Frame>(
        Frame{n, std::move(v), std::move(t), head_});
    return out;
  }

  const SemVal *lookup(const Name &n) const {
    for (const Frame *f = head_.get(); f; f = f->next.get())
      if (f->name == n) return &f->val;
    return nullptr;
  }

  const RecTypePtr *lookup_type(const Name &n) const {
    for (const Frame *f = head_.get(); f; f = f->next.get())
      if (f->name == n) return &f->type;
    return nullptr;
  }

  // Materializes the typing context (innermost bindings win).
  RecTypeCtx type_ctx() const {
    RecTypeCtx out;
    for (const Frame *f = head_.get(); f; f = f->next.get())
      out.emplace(f->name, f->type);
    return out;
  }

 private:
  struct Frame {
    Name name;
    SemVal val;
    RecTypePtr type;
    std::shared_ptr<const Frame> next;
  };
  std::shared_ptr<const Frame> head_;
};

SemVal denote(const RecExprPtr &e, const SemEnv &env, DenoteCtx &ctx);

std::string show_sem(const SemVal &v);

}  // namespace recurrify
