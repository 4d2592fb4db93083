#include "recurrify/semantics.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <sstream>

#include "recurrify/errors.hpp"

namespace recurrify {

// ---------------------------------------------------------------------------
// N-infinity and csize arithmetic
// ---------------------------------------------------------------------------

NInf ninf_add(const NInf &a, const NInf &b) {
  if (a.is_inf() || b.is_inf()) return NInf::inf();
  return NInf::fin(*a.v + *b.v);
}

NInf ninf_max(const NInf &a, const NInf &b) {
  if (a.is_inf() || b.is_inf()) return NInf::inf();
  return NInf::fin(std::max(*a.v, *b.v));
}

bool ninf_leq(const NInf &a, const NInf &b) {
  if (b.is_inf()) return true;
  if (a.is_inf()) return false;
  return *a.v <= *b.v;
}

std::string show_ninf(const NInf &n) {
  return n.is_inf() ? "inf" : std::to_string(*n.v);
}

CsizeVal csize_add(const CsizeVal &a, const CsizeVal &b) {
  if (a.bot && b.bot) return CsizeVal::bottom();
  if (a.bot) return b;
  if (b.bot) return a;
  return CsizeVal::of(ninf_add(a.n, b.n));
}

CsizeVal csize_join(const CsizeVal &a, const CsizeVal &b) {
  if (a.bot) return b;
  if (b.bot) return a;
  return CsizeVal::of(ninf_max(a.n, b.n));
}

NInf csucc(const CsizeVal &a) {
  if (a.bot) return NInf::fin(0);
  if (a.n.is_inf()) return NInf::inf();
  return NInf::fin(*a.n.v + 1);
}

// ---------------------------------------------------------------------------
// Value construction and normalization
// ---------------------------------------------------------------------------

namespace {

std::atomic<std::uint64_t> g_func_id{1};

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_node(const SemNode::Node &n) {
  std::uint64_t h = hash_mix(0, n.index());
  std::visit(
      overloaded{
          [&](const SemNode::NInfV &x) {
            h = hash_mix(h, x.v.is_inf() ? ~std::uint64_t{0} : *x.v.v);
          },
          [&](const SemNode::UnitPt &) {},
          [&](const SemNode::IntTop &) {},
          [&](const SemNode::TaggedSet &s) {
            for (const auto &[tag, g] : s.gens) {
              h = hash_mix(h, static_cast<std::uint64_t>(tag));
              h = hash_mix(h, g.node().hash);
            }
          },
          [&](const SemNode::TupleV &t) {
            h = hash_mix(h, t.fst.node().hash);
            h = hash_mix(h, t.snd.node().hash);
          },
          [&](const SemNode::TupleSet &s) {
            for (const auto &[a, b] : s.gens) {
              h = hash_mix(h, a.node().hash);
              h = hash_mix(h, b.node().hash);
            }
          },
          [&](const SemNode::Func &f) { h = hash_mix(h, f.fn->id); },
          [&](const SemNode::CmplxV &c) {
            h = hash_mix(h, c.cost.is_inf() ? ~std::uint64_t{0} : *c.cost.v);
            h = hash_mix(h, c.pot.node().hash);
          },
      },
      n);
  return h;
}

SemVal mk(SemNode::Node n) {
  auto node = std::make_shared<SemNode>(SemNode{std::move(n), 0});
  node->hash = hash_node(node->node);
  return SemVal(SemNodePtr(std::move(node)));
}

[[noreturn]] void domain_mismatch(const char *what) {
  throw DomainError(std::string("mismatched domains in ") + what);
}

}  // namespace

namespace sem {

SemVal ninf(NInf n) { return mk(SemNode::NInfV{n}); }
SemVal fin(std::uint64_t n) { return ninf(NInf::fin(n)); }
SemVal infty() { return ninf(NInf::inf()); }
SemVal unit_pt() { return mk(SemNode::UnitPt{}); }
SemVal int_top() { return mk(SemNode::IntTop{}); }

SemVal tuple(SemVal a, SemVal b) {
  return mk(SemNode::TupleV{std::move(a), std::move(b)});
}

SemVal func(std::function<SemVal(const SemVal &, DenoteCtx &)> fn,
            RecTypePtr dom, bool memo_enabled) {
  auto node = std::make_shared<FuncNode>();
  node->fn = std::move(fn);
  node->dom = std::move(dom);
  node->id = g_func_id.fetch_add(1);
  node->memo_enabled = memo_enabled;
  return mk(SemNode::Func{std::move(node)});
}

SemVal cmplx(NInf cost, SemVal pot) {
  return mk(SemNode::CmplxV{cost, std::move(pot)});
}

SemVal tagged_set(std::vector<std::pair<int, SemVal>> gens, DenoteCtx &ctx) {
  std::sort(gens.begin(), gens.end(), [](const auto &a, const auto &b) {
    if (a.first != b.first) return a.first < b.first;
    return sem_compare(a.second, b.second) < 0;
  });
  gens.erase(std::unique(gens.begin(), gens.end(),
                         [](const auto &a, const auto &b) {
                           return a.first == b.first &&
                                  sem_compare(a.second, b.second) == 0;
                         }),
             gens.end());
  // Keep only maximal generators.
  std::vector<std::pair<int, SemVal>> keep;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < gens.size() && !dominated; ++j) {
      if (i == j || gens[i].first != gens[j].first) continue;
      if (sem_compare(gens[i].second, gens[j].second) == 0) continue;
      if (sem_leq(gens[i].second, gens[j].second, ctx)) dominated = true;
    }
    if (!dominated) keep.push_back(gens[i]);
  }
  return mk(SemNode::TaggedSet{std::move(keep)});
}

SemVal tuple_set(std::vector<std::pair<SemVal, SemVal>> gens, DenoteCtx &ctx) {
  std::sort(gens.begin(), gens.end(), [](const auto &a, const auto &b) {
    int c = sem_compare(a.first, b.first);
    if (c != 0) return c < 0;
    return sem_compare(a.second, b.second) < 0;
  });
  gens.erase(std::unique(gens.begin(), gens.end(),
                         [](const auto &a, const auto &b) {
                           return sem_compare(a.first, b.first) == 0 &&
                                  sem_compare(a.second, b.second) == 0;
                         }),
             gens.end());
  std::vector<std::pair<SemVal, SemVal>> keep;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < gens.size() && !dominated; ++j) {
      if (i == j) continue;
      if (sem_compare(gens[i].first, gens[j].first) == 0 &&
          sem_compare(gens[i].second, gens[j].second) == 0)
        continue;
      if (sem_leq(gens[i].first, gens[j].first, ctx) &&
          sem_leq(gens[i].second, gens[j].second, ctx))
        dominated = true;
    }
    if (!dominated) keep.push_back(gens[i]);
  }
  return mk(SemNode::TupleSet{std::move(keep)});
}

}  // namespace sem

int sem_compare(const SemVal &a, const SemVal &b) {
  const auto &na = a.node();
  const auto &nb = b.node();
  if (na.node.index() != nb.node.index())
    return na.node.index() < nb.node.index() ? -1 : 1;
  return std::visit(
      overloaded{
          [&](const SemNode::NInfV &x) {
            const auto &y = std::get<SemNode::NInfV>(nb.node);
            if (x.v == y.v) return 0;
            if (x.v.is_inf()) return 1;
            if (y.v.is_inf()) return -1;
            return *x.v.v < *y.v.v ? -1 : 1;
          },
          [&](const SemNode::UnitPt &) { return 0; },
          [&](const SemNode::IntTop &) { return 0; },
          [&](const SemNode::TaggedSet &x) {
            const auto &y = std::get<SemNode::TaggedSet>(nb.node);
            if (x.gens.size() != y.gens.size())
              return x.gens.size() < y.gens.size() ? -1 : 1;
            for (std::size_t i = 0; i < x.gens.size(); ++i) {
              if (x.gens[i].first != y.gens[i].first)
                return x.gens[i].first < y.gens[i].first ? -1 : 1;
              int c = sem_compare(x.gens[i].second, y.gens[i].second);
              if (c != 0) return c;
            }
            return 0;
          },
          [&](const SemNode::TupleV &x) {
            const auto &y = std::get<SemNode::TupleV>(nb.node);
            int c = sem_compare(x.fst, y.fst);
            if (c != 0) return c;
            return sem_compare(x.snd, y.snd);
          },
          [&](const SemNode::TupleSet &x) {
            const auto &y = std::get<SemNode::TupleSet>(nb.node);
            if (x.gens.size() != y.gens.size())
              return x.gens.size() < y.gens.size() ? -1 : 1;
            for (std::size_t i = 0; i < x.gens.size(); ++i) {
              int c = sem_compare(x.gens[i].first, y.gens[i].first);
              if (c != 0) return c;
              c = sem_compare(x.gens[i].second, y.gens[i].second);
              if (c != 0) return c;
            }
            return 0;
          },
          [&](const SemNode::Func &x) {
            const auto &y = std::get<SemNode::Func>(nb.node);
            if (x.fn->id == y.fn->id) return 0;
            return x.fn->id < y.fn->id ? -1 : 1;
          },
          [&](const SemNode::CmplxV &x) {
            const auto &y = std::get<SemNode::CmplxV>(nb.node);
            if (!(x.cost == y.cost)) {
              if (x.cost.is_inf()) return 1;
              if (y.cost.is_inf()) return -1;
              return *x.cost.v < *y.cost.v ? -1 : 1;
            }
            return sem_compare(x.pot, y.pot);
          },
      },
      na.node);
}

bool sem_has_func(const SemVal &a) {
  return std::visit(
      overloaded{
          [&](const SemNode::Func &) { return true; },
          [&](const SemNode::TaggedSet &s) {
            for (const auto &[t, v] : s.gens)
              if (sem_has_func(v)) return true;
            return false;
          },
          [&](const SemNode::TupleV &t) {
            return sem_has_func(t.fst) || sem_has_func(t.snd);
          },
          [&](const SemNode::TupleSet &s) {
            for (const auto &[x, y] : s.gens)
              if (sem_has_func(x) || sem_has_func(y)) return true;
            return false;
          },
          [&](const SemNode::CmplxV &c) { return sem_has_func(c.pot); },
          [&](const auto &) { return false; },
      },
      a.node().node);
}

// ---------------------------------------------------------------------------
// Order, join, application
// ---------------------------------------------------------------------------

namespace {

std::vector<SemVal> func_probes(const SemNode::Func &f, const SemNode::Func &g,
                                DenoteCtx &ctx) {
  std::vector<SemVal> probes;
  auto collect = [&](const SemNode::Func &h) {
    std::lock_guard<std::mutex> lk(h.fn->mu);
    for (const auto &entry : h.fn->memo) probes.push_back(entry.first);
  };
  collect(f);
  collect(g);
  RecTypePtr dom = f.fn->dom ? f.fn->dom : g.fn->dom;
  if (dom) {
    for (auto &s : enum_samples(dom, ctx)) probes.push_back(std::move(s));
  }
  std::sort(probes.begin(), probes.end(), SemValLess{});
  probes.erase(std::unique(probes.begin(), probes.end(),
                           [](const SemVal &a, const SemVal &b) {
                             return sem_compare(a, b) == 0;
                           }),
               probes.end());
  return probes;
}

}  // namespace

bool sem_leq(const SemVal &a, const SemVal &b, DenoteCtx &ctx) {
  const auto &na = a.node();
  const auto &nb = b.node();
  if (na.node.index() != nb.node.index()) domain_mismatch("leq");
  return std::visit(
      overloaded{
          [&](const SemNode::NInfV &x) {
            return ninf_leq(x.v, std::get<SemNode::NInfV>(nb.node).v);
          },
          [&](const SemNode::UnitPt &) { return true; },
          [&](const SemNode::IntTop &) { return true; },
          [&](const SemNode::TaggedSet &x) {
            const auto &y = std::get<SemNode::TaggedSet>(nb.node);
            for (const auto &[tag, v] : x.gens) {
              bool found = false;
              for (const auto &[tag2, w] : y.gens) {
                if (tag == tag2 && sem_leq(v, w, ctx)) {
                  found = true;
                  break;
                }
              }
              if (!found) return false;
            }
            return true;
          },
          [&](const SemNode::TupleV &x) {
            const auto &y = std::get<SemNode::TupleV>(nb.node);
            return sem_leq(x.fst, y.fst, ctx) && sem_leq(x.snd, y.snd, ctx);
          },
          [&](const SemNode::TupleSet &x) {
            const auto &y = std::get<SemNode::TupleSet>(nb.node);
            for (const auto &[v0, v1] : x.gens) {
              bool found = false;
              for (const auto &[w0, w1] : y.gens) {
                if (sem_leq(v0, w0, ctx) && sem_leq(v1, w1, ctx)) {
                  found = true;
                  break;
                }
              }
              if (!found) return false;
            }
            return true;
          },
          [&](const SemNode::Func &x) {
            const auto &y = std::get<SemNode::Func>(nb.node);
            if (x.fn->id == y.fn->id) return true;
            // Pointwise comparison on a probe set: the arguments queried so
            // far plus samples of the domain. Approximate by construction.
            for (const auto &p : func_probes(x, y, ctx)) {
              if (!sem_leq(apply_fn(a, p, ctx), apply_fn(b, p, ctx), ctx))
                return false;
            }
            return true;
          },
          [&](const SemNode::CmplxV &x) {
            const auto &y = std::get<SemNode::CmplxV>(nb.node);
            return ninf_leq(x.cost, y.cost) && sem_leq(x.pot, y.pot, ctx);
          },
      },
      na.node);
}

bool sem_equal(const SemVal &a, const SemVal &b, DenoteCtx &ctx) {
  if (!sem_has_func(a) && !sem_has_func(b)) {
    if (a.node().hash != b.node().hash) return false;
    return sem_compare(a, b) == 0;
  }
  return sem_leq(a, b, ctx) && sem_leq(b, a, ctx);
}

SemVal sem_join(const SemVal &a, const SemVal &b, DenoteCtx &ctx) {
  const auto &na = a.node();
  const auto &nb = b.node();
  if (na.node.index() != nb.node.index()) domain_mismatch("join");
  return std::visit(
      overloaded{
          [&](const SemNode::NInfV &x) {
            return sem::ninf(ninf_max(x.v, std::get<SemNode::NInfV>(nb.node).v));
          },
          [&](const SemNode::UnitPt &) { return sem::unit_pt(); },
          [&](const SemNode::IntTop &) { return sem::int_top(); },
          [&](const SemNode::TaggedSet &x) {
            auto gens = x.gens;
            const auto &y = std::get<SemNode::TaggedSet>(nb.node);
            gens.insert(gens.end(), y.gens.begin(), y.gens.end());
            return sem::tagged_set(std::move(gens), ctx);
          },
          [&](const SemNode::TupleV &x) {
            const auto &y = std::get<SemNode::TupleV>(nb.node);
            return sem::tuple(sem_join(x.fst, y.fst, ctx),
                              sem_join(x.snd, y.snd, ctx));
          },
          [&](const SemNode::TupleSet &x) {
            auto gens = x.gens;
            const auto &y = std::get<SemNode::TupleSet>(nb.node);
            gens.insert(gens.end(), y.gens.begin(), y.gens.end());
            return sem::tuple_set(std::move(gens), ctx);
          },
          [&](const SemNode::Func &x) {
            const auto &y = std::get<SemNode::Func>(nb.node);
            SemVal fa = a, fb = b;
            RecTypePtr dom = x.fn->dom ? x.fn->dom : y.fn->dom;
            return sem::func(
                [fa, fb](const SemVal &arg, DenoteCtx &c2) {
                  return sem_join(apply_fn(fa, arg, c2),
                                  apply_fn(fb, arg, c2), c2);
                },
                dom);
          },
          [&](const SemNode::CmplxV &x) {
            const auto &y = std::get<SemNode::CmplxV>(nb.node);
            return sem::cmplx(ninf_max(x.cost, y.cost),
                              sem_join(x.pot, y.pot, ctx));
          },
      },
      na.node);
}

SemVal apply_fn(const SemVal &f, const SemVal &a, DenoteCtx &ctx) {
  const auto *fx = std::get_if<SemNode::Func>(&f.node().node);
  if (!fx) domain_mismatch("application");
  FuncNode &node = *fx->fn;
  if (node.memo_enabled) {
    std::lock_guard<std::mutex> lk(node.mu);
    auto it = node.memo.find(a);
    if (it != node.memo.end()) {
      ctx.widened = ctx.widened || it->second.second;
      return it->second.first;
    }
  }
  bool saved = ctx.widened;
  ctx.widened = false;
  SemVal out = node.fn(a, ctx);
  bool w = ctx.widened;
  ctx.widened = saved || w;
  if (node.memo_enabled) {
    std::lock_guard<std::mutex> lk(node.mu);
    node.memo.emplace(a, std::make_pair(out, w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Top, bottom, samples
// ---------------------------------------------------------------------------

SemVal top_of(const RecTypePtr &t, DenoteCtx &ctx) {
  return std::visit(
      overloaded{
          [&](const RecType::Var &v) -> SemVal {
            throw DomainError("top of open type variable " + v.name);
          },
          [&](const RecType::CostC &) -> SemVal { return sem::infty(); },
          [&](const RecType::Unit &) -> SemVal { return sem::unit_pt(); },
          [&](const RecType::Int &) -> SemVal { return sem::int_top(); },
          [&](const RecType::Sum &s) -> SemVal {
            return sem::tagged_set(
                {{0, top_of(s.left, ctx)}, {1, top_of(s.right, ctx)}}, ctx);
          },
          [&](const RecType::Prod &p) -> SemVal {
            auto l = top_of(p.left, ctx);
            auto r = top_of(p.right, ctx);
            if (ctx.cfg.product_mode == ProductMode::Powerset)
              return sem::tuple_set({{l, r}}, ctx);
            return sem::tuple(l, r);
          },
          [&](const RecType::Arrow &ar) -> SemVal {
            SemVal t2 = top_of(ar.cod, ctx);
            return sem::func(
                [t2](const SemVal &, DenoteCtx &) { return t2; }, ar.dom,
                /*memo=*/false);
          },
          [&](const RecType::Rec &) -> SemVal { return sem::infty(); },
          [&](const RecType::Cmplx &c) -> SemVal {
            return sem::cmplx(NInf::inf(), top_of(c.inner, ctx));
          },
      },
      t->node);
}

SemVal bottom_of(const RecTypePtr &t, DenoteCtx &ctx) {
  return std::visit(
      overloaded{
          [&](const RecType::Var &v) -> SemVal {
            throw DomainError("bottom of open type variable " + v.name);
          },
          [&](const RecType::CostC &) -> SemVal { return sem::fin(0); },
          [&](const RecType::Unit &) -> SemVal { return sem::unit_pt(); },
          [&](const RecType::Int &) -> SemVal { return sem::int_top(); },
          [&](const RecType::Sum &) -> SemVal {
            return sem::tagged_set({}, ctx);
          },
          [&](const RecType::Prod &p) -> SemVal {
            if (ctx.cfg.product_mode == ProductMode::Powerset)
              return sem::tuple_set({}, ctx);
            return sem::tuple(bottom_of(p.left, ctx), bottom_of(p.right, ctx));
          },
          [&](const RecType::Arrow &ar) -> SemVal {
            SemVal b = bottom_of(ar.cod, ctx);
            return sem::func([b](const SemVal &, DenoteCtx &) { return b; },
                             ar.dom, /*memo=*/false);
          },
          [&](const RecType::Rec &) -> SemVal { return sem::fin(0); },
          [&](const RecType::Cmplx &c) -> SemVal {
            return sem::cmplx(NInf::fin(0), bottom_of(c.inner, ctx));
          },
      },
      t->node);
}

std::vector<SemVal> enum_samples(const RecTypePtr &t, DenoteCtx &ctx,
                                 int depth) {
  if (depth <= 0) return {top_of(t, ctx)};
  return std::visit(
      overloaded{
          [&](const RecType::CostC &) -> std::vector<SemVal> {
            return {sem::fin(0), sem::fin(1), sem::fin(2), sem::infty()};
          },
          [&](const RecType::Rec &) -> std::vector<SemVal> {
            return {sem::fin(0), sem::fin(1), sem::fin(2), sem::infty()};
          },
          [&](const RecType::Unit &) -> std::vector<SemVal> {
            return {sem::unit_pt()};
          },
          [&](const RecType::Int &) -> std::vector<SemVal> {
            return {sem::int_top()};
          },
          [&](const RecType::Sum &s) -> std::vector<SemVal> {
            auto ls = enum_samples(s.left, ctx, depth - 1);
            auto rs = enum_samples(s.right, ctx, depth - 1);
            std::vector<SemVal> out;
            out.push_back(sem::tagged_set({}, ctx));
            for (std::size_t i = 0; i < ls.size() && i < 2; ++i)
              out.push_back(sem::tagged_set({{0, ls[i]}}, ctx));
            for (std::size_t i = 0; i < rs.size() && i < 2; ++i)
              out.push_back(sem::tagged_set({{1, rs[i]}}, ctx));
            out.push_back(sem::tagged_set({{0, ls[0]}, {1, rs[0]}}, ctx));
            return out;
          },
          [&](const RecType::Prod &p) -> std::vector<SemVal> {
            auto ls = enum_samples(p.left, ctx, depth - 1);
            auto rs = enum_samples(p.right, ctx, depth - 1);
            std::vector<SemVal> out;
            for (std::size_t i = 0; i < ls.size() && i < 3; ++i)
              for (std::size_t j = 0; j < rs.size() && j < 3; ++j) {
                if (ctx.cfg.product_mode == ProductMode::Powerset)
                  out.push_back(sem::tuple_set({{ls[i], rs[j]}}, ctx));
                else
                  out.push_back(sem::tuple(ls[i], rs[j]));
              }
            if (ctx.cfg.product_mode == ProductMode::Powerset)
              out.push_back(sem::tuple_set({}, ctx));
            return out;
          },
          [&](const RecType::Arrow &) -> std::vector<SemVal> {
            return {bottom_of(t, ctx), top_of(t, ctx)};
          },
          [&](const RecType::Cmplx &c) -> std::vector<SemVal> {
            auto ps = enum_samples(c.inner, ctx, depth - 1);
            std::vector<SemVal> out;
            for (std::size_t i = 0; i < ps.size() && i < 2; ++i) {
              out.push_back(sem::cmplx(NInf::fin(0), ps[i]));
              out.push_back(sem::cmplx(NInf::inf(), ps[i]));
            }
            return out;
          },
          [&](const RecType::Var &) -> std::vector<SemVal> {
            return {sem::fin(0), sem::infty()};
          },
      },
      t->node);
}

// ---------------------------------------------------------------------------
// csize and symbolic unfold
// ---------------------------------------------------------------------------

CsizeVal csize(const RecTypePtr &functor, const Name &alpha, const SemVal &a,
               DenoteCtx &ctx) {
  if (const auto *v = std::get_if<RecType::Var>(&functor->node)) {
    if (v->name == alpha) {
      const auto *n = std::get_if<SemNode::NInfV>(&a.node().node);
      if (!n) domain_mismatch("csize at the recursion variable");
      return CsizeVal::of(n->v);
    }
  }
  if (!rec_free_type_vars(functor).count(alpha)) return CsizeVal::bottom();
  return std::visit(
      overloaded{
          [&](const RecType::Sum &s) -> CsizeVal {
            const auto *ts = std::get_if<SemNode::TaggedSet>(&a.node().node);
            if (!ts) domain_mismatch("csize over a sum");
            CsizeVal acc = CsizeVal::bottom();
            for (const auto &[tag, v] : ts->gens)
              acc = csize_join(acc,
                               csize(tag == 0 ? s.left : s.right, alpha, v, ctx));
            return acc;
          },
          [&](const RecType::Prod &p) -> CsizeVal {
            if (ctx.cfg.product_mode == ProductMode::Powerset) {
              const auto *ts = std::get_if<SemNode::TupleSet>(&a.node().node);
              if (!ts) domain_mismatch("csize over a powerset product");
              CsizeVal acc = CsizeVal::bottom();
              for (const auto &[x, y] : ts->gens)
                acc = csize_join(acc, csize_add(csize(p.left, alpha, x, ctx),
                                                csize(p.right, alpha, y, ctx)));
              return acc;
            }
            const auto *tv = std::get_if<SemNode::TupleV>(&a.node().node);
            if (!tv) domain_mismatch("csize over a product");
            return csize_add(csize(p.left, alpha, tv->fst, ctx),
                             csize(p.right, alpha, tv->snd, ctx));
          },
          [&](const auto &) -> CsizeVal {
            throw UnsupportedFunctor("csize over a non-polynomial shape: " +
                                     show_rec_type(functor));
          },
      },
      functor->node);
}

namespace {

std::size_t alpha_occurrences(const RecTypePtr &t, const Name &alpha) {
  return std::visit(
      overloaded{
          [&](const RecType::Var &v) -> std::size_t {
            return v.name == alpha ? 1 : 0;
          },
          [&](const RecType::Sum &s) -> std::size_t {
            return alpha_occurrences(s.left, alpha) +
                   alpha_occurrences(s.right, alpha);
          },
          [&](const RecType::Prod &p) -> std::size_t {
            return alpha_occurrences(p.left, alpha) +
                   alpha_occurrences(p.right, alpha);
          },
          [&](const RecType::Rec &r) -> std::size_t {
            return r.var == alpha ? 0 : alpha_occurrences(r.body, alpha);
          },
          [&](const auto &) -> std::size_t { return 0; },
      },
      t->node);
}

void guard_functor(const RecTypePtr &t, const Name &alpha) {
  std::visit(overloaded{
                 [&](const RecType::Var &) {},
                 [&](const RecType::Sum &s) {
                   guard_functor(s.left, alpha);
                   guard_functor(s.right, alpha);
                 },
                 [&](const RecType::Prod &p) {
                   if (alpha_occurrences(t, alpha) > 2)
                     throw UnsupportedFunctor(
                         "more than two recursion-variable occurrences in a "
                         "product: " +
                         show_rec_type(t));
                   guard_functor(p.left, alpha);
                   guard_functor(p.right, alpha);
                 },
                 [&](const auto &) {
                   if (rec_free_type_vars(t).count(alpha))
                     throw UnsupportedFunctor("non-polynomial functor: " +
                                              show_rec_type(t));
                 },
             },
             t->node);
}

struct Budget {
  bool bot_only = false;
  NInf limit = NInf::inf();  // csize must be bot or <= limit

  static Budget bot() { return Budget{true, NInf::fin(0)}; }
  static Budget at_most(NInf n) { return Budget{false, n}; }
};

std::vector<SemVal> normalize_antichain(std::vector<SemVal> vals,
                                        DenoteCtx &ctx) {
  std::sort(vals.begin(), vals.end(), SemValLess{});
  vals.erase(std::unique(vals.begin(), vals.end(),
                         [](const SemVal &a, const SemVal &b) {
                           return sem_compare(a, b) == 0;
                         }),
             vals.end());
  std::vector<SemVal> keep;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < vals.size() && !dominated; ++j) {
      if (i == j || sem_compare(vals[i], vals[j]) == 0) continue;
      if (sem_leq(vals[i], vals[j], ctx)) dominated = true;
    }
    if (!dominated) keep.push_back(vals[i]);
  }
  return keep;
}

// Maximal elements of { a in [[F]] : csize_F(a) fits the budget }.
std::vector<SemVal> max_elems(const RecTypePtr &F, const Name &alpha,
                              const Budget &budget, DenoteCtx &ctx) {
  if (!rec_free_type_vars(F).count(alpha)) return {top_of(F, ctx)};
  if (const auto *v = std::get_if<RecType::Var>(&F->node)) {
    (void)v;
    if (budget.bot_only) return {};
    return {sem::ninf(budget.limit)};
  }
  if (const auto *s = std::get_if<RecType::Sum>(&F->node)) {
    std::vector<std::pair<int, SemVal>> gens;
    for (auto &m : max_elems(s->left, alpha, budget, ctx))
      gens.emplace_back(0, std::move(m));
    for (auto &m : max_elems(s->right, alpha, budget, ctx))
      gens.emplace_back(1, std::move(m));
    return {sem::tagged_set(std::move(gens), ctx)};
  }
  if (const auto *p = std::get_if<RecType::Prod>(&F->node)) {
    std::vector<std::pair<SemVal, SemVal>> combos;
    auto add = [&](const Budget &b0, const Budget &b1) {
      auto ms0 = max_elems(p->left, alpha, b0, ctx);
      auto ms1 = max_elems(p->right, alpha, b1, ctx);
      for (const auto &m0 : ms0)
        for (const auto &m1 : ms1) combos.emplace_back(m0, m1);
    };
    bool left_rec = rec_free_type_vars(p->left).count(alpha) > 0;
    bool right_rec = rec_free_type_vars(p->right).count(alpha) > 0;
    if (budget.bot_only) {
      add(Budget::bot(), Budget::bot());
    } else if (!left_rec || !right_rec || budget.limit.is_inf()) {
      // A factor without the recursion variable always has csize bot, so
      // the whole budget goes to the other side; no split is needed.
      add(budget, budget);
    } else {
      for (std::uint64_t k = 0; k <= *budget.limit.v; ++k)
        add(Budget::at_most(NInf::fin(k)),
            Budget::at_most(NInf::fin(*budget.limit.v - k)));
    }
    if (ctx.cfg.product_mode == ProductMode::Powerset)
      return {sem::tuple_set(std::move(combos), ctx)};
    std::vector<SemVal> vals;
    vals.reserve(combos.size());
    for (auto &[a, b] : combos) vals.push_back(sem::tuple(a, b));
    return normalize_antichain(std::move(vals), ctx);
  }
  throw UnsupportedFunctor("unfold over a non-polynomial functor: " +
                           show_rec_type(F));
}

}  // namespace

SemVal unfold_symbolic(const RecTypePtr &mu_type, const NInf &n,
                       DenoteCtx &ctx) {
  const auto *r = std::get_if<RecType::Rec>(&mu_type->node);
  if (!r) throw DomainError("unfold of a non-mu type");
  auto key = std::make_pair(mu_type.get(),
                            n.is_inf() ? ~std::uint64_t{0} : *n.v);
  if (auto it = ctx.unfold_cache.find(key); it != ctx.unfold_cache.end())
    return it->second;
  guard_functor(r->body, r->var);
  Budget budget = Budget::bot();
  if (n.is_inf()) {
    budget = Budget::at_most(NInf::inf());
  } else if (*n.v > 0) {
    budget = Budget::at_most(NInf::fin(*n.v - 1));
  }
  auto ms = max_elems(r->body, r->var, budget, ctx);
  SemVal acc;
  if (ms.empty()) {
    acc = bottom_of(rec_subst_type(r->body, mu_type, r->var), ctx);
  } else {
    acc = ms[0];
    for (std::size_t i = 1; i < ms.size(); ++i)
      acc = sem_join(acc, ms[i], ctx);
  }
  ctx.unfold_cache.emplace(key, acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Denotation
// ---------------------------------------------------------------------------

namespace {

RecTypePtr type_of(const RecExprPtr &e, const SemEnv &env, DenoteCtx &ctx) {
  auto it = ctx.type_cache.find(e.get());
  if (it != ctx.type_cache.end()) return it->second;
  auto t = typecheck_rec(env.type_ctx(), e);
  ctx.type_cache.emplace(e.get(), t);
  return t;
}

SemNode::CmplxV as_cmplx(const SemVal &v, const char *what) {
  const auto *c = std::get_if<SemNode::CmplxV>(&v.node().node);
  if (!c) domain_mismatch(what);
  return *c;
}

NInf as_ninf(const SemVal &v, const char *what) {
  const auto *n = std::get_if<SemNode::NInfV>(&v.node().node);
  if (!n) domain_mismatch(what);
  return n->v;
}

// True when the value mentions infinity anywhere (or is a function, which
// we treat conservatively). Used to tell a genuine finite stabilization from
// a transient plateau at the information-order bottom.
bool contains_inf(const SemVal &v) {
  return std::visit(
      overloaded{
          [&](const SemNode::NInfV &x) { return x.v.is_inf(); },
          [&](const SemNode::TaggedSet &s) {
            for (const auto &[t, g] : s.gens)
              if (contains_inf(g)) return true;
            return false;
          },
          [&](const SemNode::TupleV &t) {
            return contains_inf(t.fst) || contains_inf(t.snd);
          },
          [&](const SemNode::TupleSet &s) {
            for (const auto &[x, y] : s.gens)
              if (contains_inf(x) || contains_inf(y)) return true;
            return false;
          },
          [&](const SemNode::Func &) { return true; },
          [&](const SemNode::CmplxV &c) {
            return c.cost.is_inf() || contains_inf(c.pot);
          },
          [&](const auto &) { return false; },
      },
      v.node().node);
}

// Kleene chain for a fixpoint at arrow type, iterated on demand per query.
struct ChainState {
  std::function<SemVal(const SemVal &, DenoteCtx &)> functional;
  std::vector<SemVal> iterates;  // iterates[0] is the information-order bottom
  std::uint64_t fuel = 0;
  std::mutex mu;

  SemVal iterate(std::size_t k, DenoteCtx &ctx) {
    std::lock_guard<std::mutex> lk(mu);
    while (iterates.size() <= k)
      iterates.push_back(functional(iterates.back(), ctx));
    return iterates[k];
  }
};

}  // namespace

SemVal fix_iterate(const Functional &functional, const RecTypePtr &sigma,
                   DenoteCtx &ctx) {
  const auto *ar = std::get_if<RecType::Arrow>(&sigma->node);
  if (!ar) {
    // First-order fixpoint: iterate the value directly.
    SemVal x = top_of(sigma, ctx);
    for (std::uint64_t k = 0; k < ctx.cfg.fix_fuel; ++k) {
      SemVal x2 = functional(x, ctx);
      bool same = sem_equal(x2, x, ctx);
      if (same && !contains_inf(x2)) return x2;
      if (k + 1 == ctx.cfg.fix_fuel && !same) ctx.widened = true;
      x = x2;
    }
    return x;
  }
  auto state = std::make_shared<ChainState>();
  state->functional = functional;
  state->fuel = ctx.cfg.fix_fuel;
  state->iterates.push_back(top_of(sigma, ctx));
  return sem::func(
      [state](const SemVal &a, DenoteCtx &c2) -> SemVal {
        // Iterates only get better (smaller in the size order), so any of
        // them is a sound answer. Exit early only on a finite plateau; a
        // plateau that still mentions infinity may just not have unrolled
        // deeply enough yet.
        SemVal prev = apply_fn(state->iterate(0, c2), a, c2);
        for (std::uint64_t k = 1; k <= state->fuel; ++k) {
          SemVal cur = apply_fn(state->iterate(k, c2), a, c2);
          bool same = sem_equal(cur, prev, c2);
          if (same && !contains_inf(cur)) return cur;
          if (k == state->fuel && !same) c2.widened = true;
          prev = cur;
        }
        return prev;
      },
      ar->dom, ctx.cfg.memo_enabled);
}

SemVal denote(const RecExprPtr &e, const SemEnv &env, DenoteCtx &ctx) {
  return std::visit(
      overloaded{
          [&](const RecExpr::Var &v) -> SemVal {
            const SemVal *found = env.lookup(v.name);
            if (!found) throw DomainError("unbound variable " + v.name);
            return *found;
          },
          [&](const RecExpr::Zero &) -> SemVal { return sem::fin(0); },
          [&](const RecExpr::One &) -> SemVal { return sem::fin(1); },
          [&](const RecExpr::Plus &p) -> SemVal {
            auto a = as_ninf(denote(p.lhs, env, ctx), "plus");
            auto b = as_ninf(denote(p.rhs, env, ctx), "plus");
            return sem::ninf(ninf_add(a, b));
          },
          [&](const RecExpr::UnitVal &) -> SemVal { return sem::unit_pt(); },
          [&](const RecExpr::IntLit &) -> SemVal { return sem::int_top(); },
          [&](const RecExpr::Inj &i) -> SemVal {
            return sem::tagged_set({{i.tag, denote(i.arg, env, ctx)}}, ctx);
          },
          [&](const RecExpr::Case &c) -> SemVal {
            auto scr = denote(c.scrutinee, env, ctx);
            const auto *ts = std::get_if<SemNode::TaggedSet>(&scr.node().node);
            if (!ts) domain_mismatch("case scrutinee");
            auto scr_ty = type_of(c.scrutinee, env, ctx);
            const auto *sum = std::get_if<RecType::Sum>(&scr_ty->node);
            if (!sum) throw DomainError("case scrutinee type is not a sum");
            SemVal acc;
            for (const auto &[tag, v] : ts->gens) {
              SemEnv inner =
                  tag == 0 ? env.bind(c.bind0, v, sum->left)
                           : env.bind(c.bind1, v, sum->right);
              SemVal r = denote(tag == 0 ? c.branch0 : c.branch1, inner, ctx);
              acc = acc.valid() ? sem_join(acc, r, ctx) : r;
            }
            if (!acc.valid()) return bottom_of(type_of(e, env, ctx), ctx);
            return acc;
          },
          [&](const RecExpr::Pair &p) -> SemVal {
            auto a = denote(p.fst, env, ctx);
            auto b = denote(p.snd, env, ctx);
            if (ctx.cfg.product_mode == ProductMode::Powerset)
              return sem::tuple_set({{a, b}}, ctx);
            return sem::tuple(a, b);
          },
          [&](const RecExpr::LetPair &l) -> SemVal {
            auto pv = denote(l.pair, env, ctx);
            auto pr_ty = type_of(l.pair, env, ctx);
            const auto *pr = std::get_if<RecType::Prod>(&pr_ty->node);
            if (!pr) throw DomainError("let-pair over a non-product type");
            if (ctx.cfg.product_mode == ProductMode::Powerset) {
              const auto *ts = std::get_if<SemNode::TupleSet>(&pv.node().node);
              if (!ts) domain_mismatch("let-pair scrutinee");
              SemVal acc;
              for (const auto &[a, b] : ts->gens) {
                SemEnv inner =
                    env.bind(l.x0, a, pr->left).bind(l.x1, b, pr->right);
                SemVal r = denote(l.body, inner, ctx);
                acc = acc.valid() ? sem_join(acc, r, ctx) : r;
              }
              if (!acc.valid()) return bottom_of(type_of(e, env, ctx), ctx);
              return acc;
            }
            const auto *tv = std::get_if<SemNode::TupleV>(&pv.node().node);
            if (!tv) domain_mismatch("let-pair scrutinee");
            SemEnv inner =
                env.bind(l.x0, tv->fst, pr->left).bind(l.x1, tv->snd, pr->right);
            return denote(l.body, inner, ctx);
          },
          [&](const RecExpr::Lam &l) -> SemVal {
            if (!l.param_type)
              throw DomainError("lambda without a parameter type");
            SemEnv captured = env;
            RecExprPtr self = e;
            return sem::func(
                [captured, self](const SemVal &a, DenoteCtx &c2) {
                  const auto &lam = std::get<RecExpr::Lam>(self->node);
                  return denote(lam.body,
                                captured.bind(lam.param, a, lam.param_type),
                                c2);
                },
                l.param_type, ctx.cfg.memo_enabled);
          },
          [&](const RecExpr::App &a) -> SemVal {
            auto f = denote(a.fn, env, ctx);
            auto arg = denote(a.arg, env, ctx);
            return apply_fn(f, arg, ctx);
          },
          [&](const RecExpr::Fix &f) -> SemVal {
            if (!f.type) throw DomainError("fix without a type annotation");
            SemEnv captured = env;
            RecExprPtr self = e;
            Functional functional = [captured, self](const SemVal &prev,
                                                     DenoteCtx &c2) -> SemVal {
              const auto &fx = std::get<RecExpr::Fix>(self->node);
              return denote(fx.body, captured.bind(fx.name, prev, fx.type),
                            c2);
            };
            return fix_iterate(functional, f.type, ctx);
          },
          [&](const RecExpr::Fold &f) -> SemVal {
            const auto *r = std::get_if<RecType::Rec>(&f.rec_type->node);
            if (!r) throw DomainError("fold annotation is not a mu type");
            auto a = denote(f.arg, env, ctx);
            return sem::ninf(csucc(csize(r->body, r->var, a, ctx)));
          },
          [&](const RecExpr::Unfold &u) -> SemVal {
            auto n = as_ninf(denote(u.arg, env, ctx), "unfold");
            return unfold_symbolic(u.rec_type, n, ctx);
          },
          [&](const RecExpr::Val &v) -> SemVal {
            return sem::cmplx(NInf::fin(0), denote(v.arg, env, ctx));
          },
          [&](const RecExpr::Bind &b) -> SemVal {
            NInf total = NInf::fin(0);
            SemEnv inner = env;
            for (std::size_t i = 0; i < b.names.size(); ++i) {
              auto src = denote(b.sources[i], env, ctx);
              const auto c = as_cmplx(src, "bind source");
              total = ninf_add(total, c.cost);
              auto src_ty = type_of(b.sources[i], env, ctx);
              const auto *cm = std::get_if<RecType::Cmplx>(&src_ty->node);
              if (!cm) throw DomainError("bind source is not a complexity");
              inner = inner.bind(b.names[i], c.pot, cm->inner);
            }
            const auto body = as_cmplx(denote(b.body, inner, ctx), "bind body");
            return sem::cmplx(ninf_add(total, body.cost), body.pot);
          },
          [&](const RecExpr::Incr &i) -> SemVal {
            const auto c = as_cmplx(denote(i.arg, env, ctx), "incr");
            return sem::cmplx(ninf_add(c.cost, NInf::fin(1)), c.pot);
          },
          [&](const RecExpr::CostProj &c) -> SemVal {
            return sem::ninf(as_cmplx(denote(c.arg, env, ctx), "cost").cost);
          },
          [&](const RecExpr::PotProj &p) -> SemVal {
            return as_cmplx(denote(p.arg, env, ctx), "pot").pot;
          },
          [&](const RecExpr::WithCost &w) -> SemVal {
            auto c = as_ninf(denote(w.cost, env, ctx), "withcost");
            return sem::cmplx(c, denote(w.pot, env, ctx));
          },
          [&](const RecExpr::PlusC &p) -> SemVal {
            auto c = as_ninf(denote(p.cost, env, ctx), "plusc");
            const auto inner = as_cmplx(denote(p.cmplx, env, ctx), "plusc");
            return sem::cmplx(ninf_add(c, inner.cost), inner.pot);
          },
          [&](const RecExpr::Leq &l) -> SemVal {
            denote(l.lhs, env, ctx);
            denote(l.rhs, env, ctx);
            return sem::tagged_set(
                {{0, sem::unit_pt()}, {1, sem::unit_pt()}}, ctx);
          },
      },
      e->node);
}

std::string show_sem(const SemVal &v) {
  std::ostringstream os;
  std::visit(
      overloaded{
          [&](const SemNode::NInfV &x) { os << show_ninf(x.v); },
          [&](const SemNode::UnitPt &) { os << "*"; },
          [&](const SemNode::IntTop &) { os << "T"; },
          [&](const SemNode::TaggedSet &s) {
            os << "{";
            bool first = true;
            for (const auto &[tag, g] : s.gens) {
              if (!first) os << ", ";
              first = false;
              os << "in" << tag << " " << show_sem(g);
            }
            os << "}";
          },
          [&](const SemNode::TupleV &t) {
            os << "(" << show_sem(t.fst) << ", " << show_sem(t.snd) << ")";
          },
          [&](const SemNode::TupleSet &s) {
            os << "{";
            bool first = true;
            for (const auto &[a, b] : s.gens) {
              if (!first) os << ", ";
              first = false;
              os << "(" << show_sem(a) << ", " << show_sem(b) << ")";
            }
            os << "}";
          },
          [&](const SemNode::Func &f) { os << "<fun#" << f.fn->id << ">"; },
          [&](const SemNode::CmplxV &c) {
            os << "(cost " << show_ninf(c.cost) << ", " << show_sem(c.pot)
               << ")";
          },
      },
      v.node().node);
  return os.str();
}

}  // namespace recurrify
