#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "reqprio/model.hpp"

using namespace reqprio;

namespace {

PairSet pairs_of(const ConstraintGraph& g) {
  PairSet out;
  for (const auto& e : g.edges()) out.emplace(e.before, e.after);
  return out;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("priority graph has one edge per cross-level pair") {
  auto p = fixtures::worked_example();
  auto prio = build_prio_graph(p.requirements);
  CHECK(prio.name() == "Prio");
  const PairSet expected{{"R2", "R1"}, {"R2", "R3"}, {"R2", "R4"}, {"R2", "R5"}, {"R1", "R4"},
                         {"R1", "R5"}, {"R3", "R4"}, {"R3", "R5"}, {"R4", "R5"}};
  CHECK(pairs_of(prio) == expected);
  for (const auto& e : prio.edges()) CHECK(e.weight == Weight::soft(1));
}

TEST_CASE("equal levels produce no priority edge") {
  std::vector<Requirement> reqs{{"A", "", 1}, {"B", "", 1}, {"C", "", 1}};
  CHECK(build_prio_graph(reqs).empty());
}

TEST_CASE("dependency graph points from prerequisite to dependent") {
  auto p = fixtures::worked_example();
  auto dep = build_dep_graph(p.requirements, p.dependencies);
  CHECK(dep.name() == "Dep");
  const PairSet expected{{"R1", "R5"}, {"R4", "R2"}, {"R2", "R3"}, {"R4", "R3"}};
  CHECK(pairs_of(dep) == expected);
}

TEST_CASE("dependency on an unknown id is rejected") {
  auto p = fixtures::worked_example();
  p.dependencies.push_back({"R9", "R1"});
  CHECK_THROWS_AS(build_dep_graph(p.requirements, p.dependencies), ValidationError);
}

TEST_CASE("graph edges keep the larger weight on duplicates") {
  ConstraintGraph g("G");
  g.add_edge("A", "B", Weight::soft(1));
  g.add_edge("A", "B", Weight::soft(3));
  g.add_edge("A", "B", Weight::soft(2));
  REQUIRE(g.size() == 1);
  CHECK(g.find("A", "B")->weight == Weight::soft(3));
  g.add_edge("A", "B", Weight::hard());
  CHECK(g.find("A", "B")->weight.is_hard());
  CHECK(g.remove_edge("A", "B"));
  CHECK_FALSE(g.remove_edge("A", "B"));
  CHECK_THROWS_AS(g.add_edge("A", "A"), ValidationError);
}

TEST_CASE("weights order hard above any soft value") {
  CHECK(Weight::hard() > Weight::soft(1000));
  CHECK(Weight::soft(Rational(1, 2)) < Weight::soft(1));
  CHECK_THROWS(Weight::soft(0));
  CHECK_THROWS(Weight::soft(-1));
  CHECK(Weight::hard().to_string() == "HARD");
}

TEST_CASE("transitive closure") {
  ConstraintGraph g("G");
  g.add_edge("A", "B");
  g.add_edge("B", "C");
  g.add_edge("C", "D");
  auto closure = transitive_closure(g);
  CHECK(closure.size() == 6);
  CHECK(closure.count({"A", "D"}) == 1);
  CHECK(closure.count({"D", "A"}) == 0);

  SUBCASE("is idempotent") {
    ConstraintGraph h("H");
    for (const auto& [a, b] : closure) h.add_edge(a, b);
    CHECK(transitive_closure(h) == closure);
  }
  SUBCASE("marks members of a cycle with self-pairs") {
    g.add_edge("D", "B");
    auto cyc = transitive_closure(g);
    CHECK(cyc.count({"B", "B"}) == 1);
    CHECK(cyc.count({"A", "A"}) == 0);
  }
}

TEST_CASE("ranking positions are one-based") {
  auto r = fixtures::ranking({"R2", "R1", "R3"});
  CHECK(r.position("R2") == 1);
  CHECK(r.position("R3") == 3);
  CHECK(r.precedes("R1", "R3"));
  CHECK(r.to_string() == "<R2, R1, R3>");
  CHECK_THROWS_AS(r.position("R9"), std::out_of_range);
  CHECK_THROWS_AS(fixtures::ranking({"R1", "R1"}), ValidationError);
  std::vector<std::string> ids{"R1", "R2", "R3"};
  CHECK(r.covers(ids));
  ids.push_back("R4");
  CHECK_FALSE(r.covers(ids));
}

TEST_CASE("project validation reports every issue with a location") {
  Project p = fixtures::worked_example();
  CHECK(p.validate().empty());
  p.requirements.push_back({"R1", "dup", 1});
  p.requirements.push_back({"", "blank", 1});
  p.dependencies.push_back({"R3", "R3"});
  p.dependencies.push_back({"R3", "R42"});
  auto issues = p.validate();
  CHECK(issues.size() >= 4);
  for (const auto& i : issues) CHECK_FALSE(i.location.empty());
  CHECK_THROWS_AS(p.ensure_valid(), ValidationError);
}

TEST_CASE("gold standard must cover the requirements") {
  Project p = fixtures::worked_example();
  p.gold_standard = fixtures::ranking({"R2", "R1"});
  CHECK_FALSE(p.validate().empty());
}

TEST_CASE("empty project is invalid") {
  Project p;
  CHECK_FALSE(p.validate().empty());
}

TEST_CASE("canonical ids and source graphs") {
  auto p = fixtures::worked_example();
  std::swap(p.requirements[0], p.requirements[4]);
  CHECK(p.canonical_ids() == std::vector<std::string>{"R1", "R2", "R3", "R4", "R5"});
  ConstraintGraph extra("Cost");
  extra.add_edge("R5", "R4", Weight::soft(Rational(1, 2)));
  p.extra_graphs.push_back(extra);
  auto graphs = p.source_graphs();
  REQUIRE(graphs.size() == 3);
  CHECK(graphs[0].name() == "Prio");
  CHECK(graphs[1].name() == "Dep");
  CHECK(graphs[2].name() == "Cost");
  CHECK(p.find("R3")->title == "Notify staff on a handheld device");
  CHECK(p.find("R9") == nullptr);
}

}
