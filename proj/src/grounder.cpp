#include "gaifman/grounder.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace gaifman {

PartiallyGrounded partial_ground(const Clause& clause, const std::vector<EntityId>& tuple,
                                 const KnowledgeBase& kb) {
  if (static_cast<int>(tuple.size()) != clause.head_arity())
    throw std::invalid_argument("tuple arity does not match clause head");
  PartiallyGrounded pg;
  pg.clause = clause;
  pg.binding.assign(clause.num_vars(), -1);
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const Term& h = clause.head.args[i];
    if (!h.is_var()) throw std::invalid_argument("clause head arguments must be variables");
    if (!type_compatible(kb.entity_type(tuple[i]), clause.var_types[h.var])) {
      pg.groundable = false;
    }
    pg.binding[h.var] = tuple[i];
  }
  for (int v = 0; v < clause.num_vars(); ++v)
    if (pg.binding[v] < 0) pg.free_vars.push_back(v);
  return pg;
}

namespace {

struct Slot {
  bool is_var = false;
  EntityId entity = 0;
  int var = -1;
};

struct CompiledLit {
  PredicateId pred = 0;
  std::vector<Slot> slots;  // in fact argument order
};

// Compiles body literals against the KB; false when some literal can never
// match (unknown predicate or constant).
bool compile_body(const PartiallyGrounded& pg, const KnowledgeBase& kb,
                  std::vector<CompiledLit>& out) {
  for (const Literal& lit : pg.clause.body) {
    auto pid = kb.predicate_id(lit.predicate);
    if (!pid) return false;
    CompiledLit cl;
    cl.pred = *pid;
    cl.slots.resize(lit.args.size());
    for (std::size_t j = 0; j < lit.args.size(); ++j) {
      std::size_t pos = lit.inverse ? lit.args.size() - 1 - j : j;
      const Term& t = lit.args[j];
      Slot& s = cl.slots[pos];
      if (t.is_var()) {
        if (pg.binding[t.var] >= 0) {
          s.entity = static_cast<EntityId>(pg.binding[t.var]);
        } else {
          s.is_var = true;
          s.var = t.var;
        }
      } else {
        auto e = kb.entity_id(t.symbol);
        if (!e) return false;
        s.entity = *e;
      }
    }
    out.push_back(std::move(cl));
  }
  return true;
}

// Backtracking enumeration; visit() gets the full assignment and returns
// false to stop early. `members` restricts entities bound to free variables.
class Enumerator {
 public:
  Enumerator(const std::vector<CompiledLit>& lits, const KnowledgeBase& kb,
             std::vector<std::int64_t>& assign, const NeighborhoodSample* members)
      : lits_(lits), kb_(kb), assign_(assign), members_(members), resolved_(lits.size(), false) {}

  template <typename Visit>
  bool run(Visit&& visit) {
    return step(0, visit);
  }

 private:
  const std::vector<CompiledLit>& lits_;
  const KnowledgeBase& kb_;
  std::vector<std::int64_t>& assign_;
  const NeighborhoodSample* members_;
  std::vector<char> resolved_;

  // Candidate facts for a literal under current bindings: the shortest
  // posting list over its bound slots, or all facts of the predicate.
  const std::vector<std::uint32_t>& candidates(const CompiledLit& cl, std::size_t& est) const {
    const std::vector<std::uint32_t>* best = &kb_.facts_of(cl.pred);
    est = best->size();
    for (std::size_t pos = 0; pos < cl.slots.size(); ++pos) {
      const Slot& s = cl.slots[pos];
      std::int64_t bound = -1;
      if (!s.is_var)
        bound = s.entity;
      else if (assign_[s.var] >= 0)
        bound = assign_[s.var];
      if (bound < 0) continue;
      const auto& posting =
          kb_.facts_of(cl.pred, static_cast<int>(pos), static_cast<EntityId>(bound));
      if (posting.size() < est) {
        est = posting.size();
        best = &posting;
      }
    }
    return *best;
  }

  template <typename Visit>
  bool step(std::size_t depth, Visit&& visit) {
    if (depth == lits_.size()) return visit();

    // Most-constrained unresolved literal first.
    std::size_t pick = lits_.size(), best_est = SIZE_MAX;
    const std::vector<std::uint32_t>* pick_cands = nullptr;
    for (std::size_t i = 0; i < lits_.size(); ++i) {
      if (resolved_[i]) continue;
      std::size_t est;
      const auto& c = candidates(lits_[i], est);
      if (est < best_est) {
        best_est = est;
        pick = i;
        pick_cands = &c;
      }
    }
    const CompiledLit& cl = lits_[pick];
    resolved_[pick] = true;
    bool keep_going = true;
    std::vector<int> bound_here;
    for (std::uint32_t fidx : *pick_cands) {
      const GroundAtom& fact = kb_.facts()[fidx];
      bound_here.clear();
      bool ok = true;
      for (std::size_t pos = 0; pos < cl.slots.size() && ok; ++pos) {
        const Slot& s = cl.slots[pos];
        EntityId e = fact.args[pos];
        if (!s.is_var) {
          ok = (s.entity == e);
        } else if (assign_[s.var] >= 0) {
          ok = (assign_[s.var] == static_cast<std::int64_t>(e));
        } else {
          if (members_ && !members_->contains(e)) {
            ok = false;
          } else {
            assign_[s.var] = e;
            bound_here.push_back(s.var);
          }
        }
      }
      if (ok) keep_going = step(depth + 1, visit);
      for (int v : bound_here) assign_[v] = -1;
      if (!keep_going) break;
    }
    resolved_[pick] = false;
    return keep_going;
  }
};

template <typename Visit>
void enumerate_groundings(const PartiallyGrounded& pg, const KnowledgeBase& kb,
                          const NeighborhoodSample* members, Visit&& visit) {
  if (!pg.groundable) return;
  std::vector<CompiledLit> lits;
  if (!compile_body(pg, kb, lits)) return;
  std::vector<std::int64_t> assign = pg.binding;
  Enumerator en(lits, kb, assign, members);
  en.run([&]() { return visit(assign); });
}

}  // namespace

std::vector<Substitution> satisfying_groundings(const PartiallyGrounded& pg,
                                                const KnowledgeBase& kb) {
  std::vector<Substitution> out;
  enumerate_groundings(pg, kb, nullptr, [&](const std::vector<std::int64_t>& assign) {
    Substitution s;
    for (int v : pg.free_vars) s.emplace_back(v, static_cast<EntityId>(assign[v]));
    out.push_back(std::move(s));
    return true;
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool has_grounding(const PartiallyGrounded& pg, const KnowledgeBase& kb) {
  bool found = false;
  enumerate_groundings(pg, kb, nullptr, [&](const std::vector<std::int64_t>&) {
    found = true;
    return false;
  });
  return found;
}

std::int64_t count_in_neighborhood(const PartiallyGrounded& pg, const KnowledgeBase& kb,
                                   const NeighborhoodSample& nb) {
  // The membership filter prunes free-variable bindings during search, so
  // distinct substitutions are counted exactly once.
  std::int64_t n = 0;
  enumerate_groundings(pg, kb, &nb, [&](const std::vector<std::int64_t>&) {
    ++n;
    return true;
  });
  return n;
}

namespace {

std::uint64_t tuple_seed(const KnowledgeBase& kb, const std::vector<EntityId>& tuple,
                         std::uint64_t base) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (EntityId e : tuple) {
    h = fnv1a64(kb.entity_symbol(e).data(), kb.entity_symbol(e).size(), h);
    h = fnv1a64("\x1f", 1, h);
  }
  return mix_seed(base, h);
}

}  // namespace

std::vector<EmbeddingRow> embed_tuples(const KnowledgeBase& kb, const std::vector<Clause>& features,
                                       const std::vector<LabeledTuple>& pos,
                                       const std::vector<LabeledTuple>& neg, int r, int k, int w,
                                       std::uint64_t seed, int threads) {
  if (features.empty()) throw std::invalid_argument("embed_tuples: empty feature set");
  if (r < 1 || k < 1 || w < 1) throw std::invalid_argument("embed_tuples: r, k, w must be >= 1");

  GaifmanGraph g = GaifmanGraph::build(kb, /*exclude_target=*/true);

  auto by_symbols = [&](const LabeledTuple& a, const LabeledTuple& b) {
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const auto& sa = kb.entity_symbol(a.args[i]);
      const auto& sb = kb.entity_symbol(b.args[i]);
      if (sa != sb) return sa < sb;
    }
    return false;
  };
  std::vector<LabeledTuple> order(pos.begin(), pos.end());
  std::sort(order.begin(), order.end(), by_symbols);
  std::vector<LabeledTuple> sorted_neg(neg.begin(), neg.end());
  std::sort(sorted_neg.begin(), sorted_neg.end(), by_symbols);
  order.insert(order.end(), sorted_neg.begin(), sorted_neg.end());

  std::vector<EmbeddingRow> rows(order.size() * static_cast<std::size_t>(w));

  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      const LabeledTuple& tup = order[t];
      auto nbs = generate_neighborhoods(g, tup.args, r, k, w, tuple_seed(kb, tup.args, seed));
      std::vector<PartiallyGrounded> pgs;
      pgs.reserve(features.size());
      for (const Clause& c : features) pgs.push_back(partial_ground(c, tup.args, kb));
      for (int i = 0; i < w; ++i) {
        EmbeddingRow& row = rows[t * w + i];
        row.tuple = tup.args;
        row.neighborhood_index = i;
        row.positive = tup.positive;
        row.counts.resize(features.size());
        for (std::size_t f = 0; f < features.size(); ++f)
          row.counts[f] = count_in_neighborhood(pgs[f], kb, nbs[i]);
      }
    }
  };

  if (threads <= 1 || order.size() < 2) {
    work(0, order.size());
  } else {
    std::size_t n = order.size();
    std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < nt; ++c) {
      std::size_t lo = c * n / nt, hi = (c + 1) * n / nt;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string embedding_csv(const KnowledgeBase& kb, const std::vector<EmbeddingRow>& rows,
                          std::size_t num_features) {
  std::ostringstream os;
  os << "tuple,neighborhood,label";
  for (std::size_t f = 1; f <= num_features; ++f) os << ",f" << f;
  os << "\n";
  for (const EmbeddingRow& row : rows) {
    for (std::size_t i = 0; i < row.tuple.size(); ++i) {
      if (i) os << '|';
      os << kb.entity_symbol(row.tuple[i]);
    }
    os << ',' << row.neighborhood_index << ',' << (row.positive ? 1 : 0);
    for (std::int64_t c : row.counts) os << ',' << c;
    os << "\n";
  }
  return os.str();
}

std::string embedding_jsonl(const KnowledgeBase& kb, const std::vector<EmbeddingRow>& rows) {
  std::ostringstream os;
  for (const EmbeddingRow& row : rows) {
    nlohmann::json j;
    std::vector<std::string> syms;
    for (EntityId e : row.tuple) syms.push_back(kb.entity_symbol(e));
    j["tuple"] = syms;
    j["neighborhood"] = row.neighborhood_index;
    j["label"] = row.positive ? 1 : 0;
    j["counts"] = row.counts;
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace gaifman
