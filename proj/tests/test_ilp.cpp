#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "gaifman/ilp.hpp"
#include "support/synthetic.hpp"

using namespace gaifman;

namespace {

struct Planted {
  testsup::PlantedKb raw = testsup::make_planted_kb(20, 12, 6, 40, 5);
  KnowledgeBase kb = parse_facts(raw.facts_text);
  std::vector<LabeledTuple> pos = positive_tuples(kb);
  std::vector<LabeledTuple> neg = generate_negatives(kb, 1.0, 17);
};

}  // namespace

TEST_CASE("covers: the enzyme bridge covers the dotted pair") {
  auto kb = parse_facts(testsup::small_ddi_facts());
  Clause c = parse_clause("Interacts(d0,d1) :- EnzymeInhib(d0,t0), _EnzymeInhib(t0,d1).", kb);
  auto pos = positive_tuples(kb);
  REQUIRE(pos.size() == 1);
  CHECK(covers(c, pos[0], kb));
  // Reversed tuple also works here because both drugs inhibit the enzyme.
  CHECK(covers(c, {{pos[0].args[1], pos[0].args[0]}, false}, kb));
}

TEST_CASE("covers: empty body covers everything") {
  auto kb = parse_facts(testsup::small_ddi_facts());
  Clause c = make_head_clause(kb, RuleSource::ilp);
  for (const auto& t : positive_tuples(kb)) CHECK(covers(c, t, kb));
  for (const auto& t : generate_negatives(kb, 3.0, 1)) CHECK(covers(c, t, kb));
}

TEST_CASE("covers: predicate without facts covers nothing") {
  auto kb = parse_facts(
      "@schema Ghost(drug, drug)\n@schema Interacts(drug, drug)\n@target Interacts\n"
      "Interacts(a, b).\nOther(a, b).\n");
  Clause c = parse_clause("Interacts(d0,d1) :- Ghost(d0,d1).", kb);
  for (const auto& t : positive_tuples(kb)) CHECK_FALSE(covers(c, t, kb));
}

TEST_CASE("planted rule is recovered and separates perfectly") {
  Planted p;
  IlpOptions opt;
  auto rules = learn_clauses(p.kb, p.pos, p.neg, opt);
  REQUIRE(!rules.empty());
  ClauseScore s = score_clause(rules[0], p.pos, p.neg, p.kb);
  CHECK(s.pos_covered == static_cast<int>(p.pos.size()));
  CHECK(s.neg_covered == 0);
  // The planted conjunction, in either literal order.
  std::set<std::string> preds;
  for (const Literal& l : rules[0].body) preds.insert(l.predicate);
  CHECK(preds == std::set<std::string>{"EnzymeSubstr", "EnzymeInhib"});
  CHECK(rules[0].body.size() == 2);
}

TEST_CASE("every rule covers a pool positive and the pool shrinks") {
  Planted p;
  IlpOptions opt;
  opt.max_rules = 4;
  auto rules = learn_clauses(p.kb, p.pos, p.neg, opt);
  std::vector<LabeledTuple> remaining = p.pos;
  for (const Clause& c : rules) {
    std::vector<LabeledTuple> still;
    int covered = 0;
    for (const auto& t : remaining)
      covers(c, t, p.kb) ? ++covered : (still.push_back(t), 0);
    CHECK(covered >= 1);
    CHECK(still.size() < remaining.size());
    remaining = std::move(still);
  }
}

TEST_CASE("scores recount exactly via covers") {
  Planted p;
  auto rules = learn_clauses(p.kb, p.pos, p.neg, {});
  for (const Clause& c : rules) {
    ClauseScore s = score_clause(c, p.pos, p.neg, p.kb);
    int pos_recount = 0, neg_recount = 0;
    for (const auto& t : p.pos) pos_recount += covers(c, t, p.kb);
    for (const auto& t : p.neg) neg_recount += covers(c, t, p.kb);
    CHECK(s.pos_covered == pos_recount);
    CHECK(s.neg_covered == neg_recount);
    CHECK(s.score() == pos_recount - neg_recount);
  }
}

TEST_CASE("max_rules caps the output") {
  Planted p;
  IlpOptions opt;
  opt.max_rules = 1;
  CHECK(learn_clauses(p.kb, p.pos, p.neg, opt).size() <= 1);
  opt.max_rules = 0;
  CHECK_THROWS_AS(learn_clauses(p.kb, p.pos, p.neg, opt), std::invalid_argument);
}

TEST_CASE("empty positive pool learns nothing") {
  Planted p;
  CHECK(learn_clauses(p.kb, {}, p.neg, {}).empty());
}

TEST_CASE("learning is deterministic") {
  Planted p;
  IlpOptions opt;
  opt.max_rules = 3;
  auto r1 = learn_clauses(p.kb, p.pos, p.neg, opt);
  auto r2 = learn_clauses(p.kb, p.pos, p.neg, opt);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].serialize() == r2[i].serialize());
}

TEST_CASE("min_score stops unhelpful rounds") {
  // With a sky-high min_score nothing qualifies.
  Planted p;
  IlpOptions opt;
  opt.min_score = 1000000;
  CHECK(learn_clauses(p.kb, p.pos, p.neg, opt).empty());
}

TEST_CASE("returned clauses always bind both query variables") {
  Planted p;
  IlpOptions opt;
  opt.max_rules = 5;
  for (const Clause& c : learn_clauses(p.kb, p.pos, p.neg, opt)) {
    CHECK(c.head_vars_in_body());
    CHECK(c.body.size() <= std::size_t(opt.max_len));
  }
}
