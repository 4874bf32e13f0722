#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "reqprio/elicitation.hpp"

using namespace reqprio;

namespace {

Session solved_example(std::size_t budget = 100) {
  SessionOptions opts;
  opts.max_eli_pair = budget;
  Session s(fixtures::worked_example(), opts);
  s.step();
  return s;
}

std::vector<IdPair> pending_pairs(const Session& s) {
  std::vector<IdPair> out;
  for (const auto& q : s.pending_queries()) out.push_back(q.pair);
  return out;
}

}  // namespace

TEST_SUITE("elicitation") {

TEST_CASE("pairs are stored in canonical order") {
  IdPair p("R3", "R1");
  CHECK(p.first() == "R1");
  CHECK(p.second() == "R3");
  CHECK(p == IdPair("R1", "R3"));
  CHECK(p.to_string() == "{R1, R3}");
  CHECK_THROWS_AS(IdPair("R1", "R1"), ValidationError);
}

TEST_CASE("pairs in disagreement among the tied optima") {
  const auto s1 = fixtures::ranking({"R2", "R1", "R4", "R3", "R5"});
  const auto s2 = fixtures::ranking({"R2", "R3", "R1", "R4", "R5"});
  const auto s3 = fixtures::ranking({"R2", "R1", "R3", "R4", "R5"});
  CHECK(pairs_in_disagreement(s1, s2) == std::set<IdPair>{{"R1", "R3"}, {"R3", "R4"}});
  CHECK(pairs_in_disagreement(s1, s3) == std::set<IdPair>{{"R3", "R4"}});
  CHECK(pairs_in_disagreement(s2, s3) == std::set<IdPair>{{"R1", "R3"}});
  CHECK(pairs_in_disagreement(s1, s1).empty());
  CHECK_THROWS_AS(pairs_in_disagreement(s1, fixtures::ranking({"R1"})), ValidationError);
}

TEST_CASE("verdict and status names round-trip") {
  for (auto v : {Verdict::kFirstPrecedes, Verdict::kSecondPrecedes, Verdict::kUndecided}) {
    CHECK(parse_verdict(to_string(v)) == v);
  }
  CHECK(to_string(Verdict::kFirstPrecedes) == "FIRST_PRECEDES");
  CHECK_FALSE(parse_verdict("first").has_value());
  for (auto st : {SessionStatus::kActive, SessionStatus::kConverged, SessionStatus::kBudgetExhausted,
                  SessionStatus::kPlateau}) {
    CHECK(parse_session_status(to_string(st)) == st);
  }
  CHECK(to_string(SessionStatus::kBudgetExhausted) == "BUDGET_EXHAUSTED");
}

TEST_CASE("responses name the preferred requirement") {
  auto r = AnalystResponse::prefer("R3", "R1");
  CHECK(r.pair == IdPair("R1", "R3"));
  CHECK(r.verdict == Verdict::kSecondPrecedes);
  CHECK(r.preferred() == "R3");
  CHECK_FALSE(AnalystResponse::undecided("R1", "R3").preferred().has_value());
}

TEST_CASE("first solve of the worked example asks about two pairs") {
  auto s = solved_example();
  CHECK(s.status() == SessionStatus::kActive);
  CHECK(s.state().iteration == 1);
  REQUIRE(s.last_result());
  CHECK(s.last_result()->cost == Rational(2));
  CHECK(s.last_result()->solutions.size() == 3);
  REQUIRE(s.pending_queries().size() == 2);
  CHECK(s.pending_queries()[0] == ComparisonQuery{IdPair("R1", "R3"), 2});
  CHECK(s.pending_queries()[1] == ComparisonQuery{IdPair("R3", "R4"), 2});
}

TEST_CASE("answers that break the tie converge") {
  auto s = solved_example();
  std::vector<AnalystResponse> answers{AnalystResponse::prefer("R1", "R3"),
                                       AnalystResponse::prefer("R3", "R4")};
  s.submit_responses(answers);
  CHECK(s.eli_pair() == 2);
  CHECK(s.pending_queries().empty());
  CHECK(s.eli_graph().find("R1", "R3"));
  CHECK(s.eli_graph().find("R3", "R4"));
  s.step();
  CHECK(s.status() == SessionStatus::kConverged);
  CHECK(s.final_ranking() == fixtures::ranking({"R2", "R1", "R3", "R4", "R5"}));
  CHECK(s.last_result()->cost == Rational(2));
  CHECK(s.state().history.size() == 2);
  CHECK(s.state().history[0].iteration == 1);
}

TEST_CASE("a different answer sequence selects a different optimum") {
  auto s = solved_example();
  std::vector<AnalystResponse> answers{AnalystResponse::prefer("R1", "R3"),
                                       AnalystResponse::prefer("R4", "R3")};
  s.submit_responses(answers);
  s.step();
  CHECK(s.status() == SessionStatus::kConverged);
  CHECK(s.final_ranking() == fixtures::ranking({"R2", "R1", "R4", "R3", "R5"}));
}

TEST_CASE("undecided answers spend budget and end on a plateau") {
  auto s = solved_example();
  const auto before = s.last_result()->solutions;
  std::vector<AnalystResponse> answers{AnalystResponse::undecided("R1", "R3"),
                                       AnalystResponse::undecided("R3", "R4")};
  s.submit_responses(answers);
  CHECK(s.eli_pair() == 2);
  CHECK(s.eli_graph().empty());
  s.step();
  CHECK(s.status() == SessionStatus::kPlateau);
  CHECK(s.eli_pair() < s.max_eli_pair());
  CHECK(s.last_result()->solutions == before);
  CHECK(s.final_ranking() == before.front());
}

TEST_CASE("a zero budget stops after the first solve") {
  auto s = solved_example(0);
  CHECK(s.status() == SessionStatus::kBudgetExhausted);
  CHECK(s.pending_queries().empty());
  CHECK(s.final_ranking() == fixtures::ranking({"R2", "R1", "R3", "R4", "R5"}));
}

TEST_CASE("queries are truncated to the remaining budget") {
  auto s = solved_example(1);
  REQUIRE(s.pending_queries().size() == 1);
  CHECK(s.pending_queries()[0].pair == IdPair("R1", "R3"));
  // R1 first still leaves two optima, but the budget is spent.
  std::vector<AnalystResponse> answers{AnalystResponse::prefer("R1", "R3")};
  s.submit_responses(answers);
  s.step();
  CHECK(s.last_result()->solutions.size() == 2);
  CHECK(s.status() == SessionStatus::kBudgetExhausted);
  CHECK(s.eli_pair() == 1);
}

TEST_CASE("partial batches keep the rest pending") {
  auto s = solved_example();
  std::vector<AnalystResponse> first{AnalystResponse::prefer("R4", "R3")};
  s.submit_responses(first);
  CHECK(pending_pairs(s) == std::vector<IdPair>{IdPair("R1", "R3")});
  CHECK_THROWS_AS(s.step(), StateError);
  std::vector<AnalystResponse> rest{AnalystResponse::prefer("R1", "R3")};
  s.submit_responses(rest);
  s.step();
  CHECK(s.status() == SessionStatus::kConverged);
}

TEST_CASE("invalid submissions leave the session untouched") {
  auto s = solved_example();
  const auto before = s.state();
  SUBCASE("pair not pending") {
    std::vector<AnalystResponse> bad{AnalystResponse::prefer("R1", "R3"), AnalystResponse::prefer("R2", "R5")};
    CHECK_THROWS_AS(s.submit_responses(bad), StateError);
  }
  SUBCASE("pair answered twice") {
    std::vector<AnalystResponse> bad{AnalystResponse::prefer("R1", "R3"), AnalystResponse::prefer("R3", "R1")};
    CHECK_THROWS_AS(s.submit_responses(bad), StateError);
  }
  CHECK(s.state() == before);
}

TEST_CASE("terminal sessions reject further work") {
  auto s = solved_example(0);
  std::vector<AnalystResponse> none;
  CHECK_THROWS_AS(s.submit_responses(none), StateError);
  CHECK_THROWS_AS(s.step(), StateError);
}

TEST_CASE("final ranking needs a solve and then tracks the lexicographic first optimum") {
  Session fresh(fixtures::worked_example());
  CHECK_THROWS_AS(fresh.final_ranking(), StateError);
  fresh.step();
  CHECK(fresh.final_ranking() == fixtures::ranking({"R2", "R1", "R3", "R4", "R5"}));
}

TEST_CASE("answers against the tie re-solve with the new Eli edges") {
  auto s = solved_example();
  std::vector<AnalystResponse> answers{AnalystResponse::prefer("R4", "R3"),
                                       AnalystResponse::prefer("R3", "R1")};
  s.submit_responses(answers);
  CHECK(s.eli_graph().find("R4", "R3"));
  CHECK(s.eli_graph().find("R3", "R1"));
  s.step();
  const auto truth = oracle::brute_force(s.solver_instance());
  CHECK(s.last_result()->cost == truth.cost);
  CHECK(s.last_result()->solutions == truth.solutions);
  CHECK(s.last_result()->cost > Rational(2));
}

TEST_CASE("identical answer sequences give identical states") {
  auto a = solved_example();
  auto b = solved_example();
  std::vector<AnalystResponse> answers{AnalystResponse::prefer("R3", "R1"),
                                       AnalystResponse::undecided("R3", "R4")};
  a.submit_responses(answers);
  b.submit_responses(answers);
  a.step();
  b.step();
  CHECK(a.state() == b.state());
}

TEST_CASE("a truncated solution set is flagged") {
  Project p;
  for (int i = 1; i <= 6; ++i) p.requirements.push_back({"R" + std::to_string(i), "", 1});
  SessionOptions opts;
  opts.solve.solution_cap = 5;
  Session s(p, opts);
  s.step();
  CHECK_FALSE(s.last_result()->exhausted);
  CHECK_FALSE(s.state().warnings.empty());
  CHECK(s.status() == SessionStatus::kActive);
}

TEST_CASE("restoring a snapshot checks invariants") {
  auto s = solved_example();
  Session copy(s.state());
  CHECK(copy.state() == s.state());
  auto broken = s.state();
  broken.eli_pair = 1000;
  CHECK_THROWS_AS(Session{broken}, StateError);
  broken = s.state();
  broken.pending_queries.push_back({IdPair("R1", "R9"), 1});
  CHECK_THROWS_AS(Session{broken}, StateError);
}

TEST_CASE("constraint graphs include Eli once it has edges") {
  auto s = solved_example();
  std::vector<AnalystResponse> answers{AnalystResponse::prefer("R3", "R1")};
  s.submit_responses(answers);
  auto graphs = s.constraint_graphs();
  REQUIRE(graphs.size() == 3);
  CHECK(graphs.back().name() == "Eli");
  CHECK(s.solver_instance().soft_edges.size() == 14);
}

}
