#include "reqprio/elicitation.hpp"

#include <algorithm>
#include <map>

namespace reqprio {

IdPair::IdPair(std::string a, std::string b) {
  if (a == b) throw ValidationError("", "a pair needs two distinct requirements, got '" + a + "' twice");
  if (b < a) std::swap(a, b);
  first_ = std::move(a);
  second_ = std::move(b);
}

std::set<IdPair> pairs_in_disagreement(const Ranking& a, const Ranking& b) {
  if (!b.covers(a.order())) throw ValidationError("", "rankings cover different requirements");
  std::set<IdPair> out;
  const auto& order = a.order();
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (b.precedes(order[j], order[i])) out.emplace(order[i], order[j]);
    }
  }
  return out;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kFirstPrecedes: return "FIRST_PRECEDES";
    case Verdict::kSecondPrecedes: return "SECOND_PRECEDES";
    case Verdict::kUndecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (auto v : {Verdict::kFirstPrecedes, Verdict::kSecondPrecedes, Verdict::kUndecided}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

AnalystResponse AnalystResponse::prefer(const std::string& winner, const std::string& loser) {
  IdPair pair(winner, loser);
  Verdict v = pair.first() == winner ? Verdict::kFirstPrecedes : Verdict::kSecondPrecedes;
  return {std::move(pair), v};
}

AnalystResponse AnalystResponse::undecided(const std::string& a, const std::string& b) {
  return {IdPair(a, b), Verdict::kUndecided};
}

std::optional<std::string> AnalystResponse::preferred() const {
  switch (verdict) {
    case Verdict::kFirstPrecedes: return pair.first();
    case Verdict::kSecondPrecedes: return pair.second();
    case Verdict::kUndecided: break;
  }
  return std::nullopt;
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::kActive: return "ACTIVE";
    case SessionStatus::kConverged: return "CONVERGED";
    case SessionStatus::kBudgetExhausted: return "BUDGET_EXHAUSTED";
    case SessionStatus::kPlateau: return "PLATEAU";
  }
  return "ACTIVE";
}

std::optional<SessionStatus> parse_session_status(std::string_view text) {
  for (auto s : {SessionStatus::kActive, SessionStatus::kConverged,
                 SessionStatus::kBudgetExhausted, SessionStatus::kPlateau}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

// --- Session --------------------------------------------------------------

Session::Session(Project project, SessionOptions options) {
  project.ensure_valid();
  state_.project = std::move(project);
  state_.options = options;
}

Session::Session(State state) : state_(std::move(state)) {
  state_.project.ensure_valid();
  check_invariants();
}

void Session::check_invariants() const {
  const auto& s = state_;
  if (s.eli_pair > s.options.max_eli_pair) {
    throw StateError("elicited pairs exceed the budget");
  }
  if (s.status != SessionStatus::kActive && !s.pending_queries.empty()) {
    throw StateError("a terminal session cannot have pending queries");
  }
  if (s.status != SessionStatus::kActive && !s.last_result) {
    throw StateError("a terminal session must carry a solver result");
  }
  for (const auto& h : s.history) {
    if (!s.asked_pairs.count(h.response.pair)) {
      throw StateError("history pair " + h.response.pair.to_string() + " is not marked asked");
    }
  }
  for (const auto& q : s.pending_queries) {
    if (!s.project.find(q.pair.first()) || !s.project.find(q.pair.second())) {
      throw StateError("pending pair " + q.pair.to_string() + " names an unknown requirement");
    }
  }
  if (s.eli_graph.name() != "Eli") throw StateError("elicitation graph must be named Eli");
  for (const auto& e : s.eli_graph.edges()) {
    if (!s.project.find(e.before) || !s.project.find(e.after)) {
      throw StateError("Eli edge names an unknown requirement");
    }
  }
}

std::vector<ConstraintGraph> Session::constraint_graphs() const {
  auto graphs = state_.project.source_graphs();
  graphs.push_back(state_.eli_graph);
  return graphs;
}

SolverInstance Session::solver_instance() const {
  auto graphs = constraint_graphs();
  return SolverInstance::from_graphs(state_.project.canonical_ids(), graphs);
}

const std::vector<ComparisonQuery>& Session::next_queries() {
  if (state_.status != SessionStatus::kActive) {
    throw StateError("session is " + std::string(to_string(state_.status)));
  }
  if (!state_.last_result || state_.last_result->solutions.size() < 2) {
    throw StateError("next_queries needs a solve with at least two solutions");
  }
  const auto& solutions = state_.last_result->solutions;
  const auto ids = state_.project.canonical_ids();
  const std::size_t m = solutions.size();

  // A pair is disputed by k * (m - k) solution pairs when k solutions order it
  // one way and the remaining m - k the other way.
  std::vector<ComparisonQuery> queries;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      std::size_t forward = 0;
      for (const auto& s : solutions) forward += s.precedes(ids[i], ids[j]) ? 1 : 0;
      std::size_t frequency = forward * (m - forward);
      if (frequency == 0) continue;
      IdPair pair(ids[i], ids[j]);
      if (state_.asked_pairs.count(pair)) continue;
      queries.push_back({std::move(pair), frequency});
    }
  }
  std::stable_sort(queries.begin(), queries.end(), [](const auto& a, const auto& b) {
    return a.frequency > b.frequency;
  });
  const std::size_t remaining = state_.options.max_eli_pair - state_.eli_pair;
  if (queries.size() > remaining) queries.resize(remaining);

  state_.pending_queries = std::move(queries);
  if (state_.pending_queries.empty()) state_.status = SessionStatus::kPlateau;
  return state_.pending_queries;
}

void Session::submit_responses(std::span<const AnalystResponse> responses) {
  if (state_.status != SessionStatus::kActive) {
    throw StateError("session is " + std::string(to_string(state_.status)));
  }
  std::map<IdPair, const ComparisonQuery*> pending;
  for (const auto& q : state_.pending_queries) pending.emplace(q.pair, &q);
  std::set<IdPair> answered;
  for (const auto& r : responses) {
    if (!pending.count(r.pair)) {
      throw StateError("pair " + r.pair.to_string() + " is not pending");
    }
    if (!answered.insert(r.pair).second) {
      throw StateError("pair " + r.pair.to_string() + " answered twice");
    }
  }

  State next = state_;
  for (const auto& r : responses) {
    if (auto winner = r.preferred()) {
      const std::string& loser = *winner == r.pair.first() ? r.pair.second() : r.pair.first();
      next.eli_graph.remove_edge(loser, *winner);
      next.eli_graph.add_edge(*winner, loser);
    }
    next.asked_pairs.insert(r.pair);
    next.history.push_back({*pending.at(r.pair), r, next.iteration});
  }
  next.eli_pair += responses.size();
  std::erase_if(next.pending_queries,
                [&](const ComparisonQuery& q) { return answered.count(q.pair) != 0; });
  state_ = std::move(next);
}

void Session::step() {
  if (state_.status != SessionStatus::kActive) {
    throw StateError("session is " + std::string(to_string(state_.status)));
  }
  if (!state_.pending_queries.empty()) {
    throw StateError(std::to_string(state_.pending_queries.size()) + " queries await answers");
  }
  SolverResult result = solve(solver_instance(), state_.options.solve);
  ++state_.iteration;
  if (!result.exhausted) {
    state_.warnings.push_back("iteration " + std::to_string(state_.iteration) +
                              ": optimal set truncated to " +
                              std::to_string(result.solutions.size()) + " solutions" +
                              (result.optimal ? "" : " (time budget hit before optimality)"));
  }
  state_.last_result = std::move(result);
  if (state_.last_result->solutions.size() == 1) {
    state_.status = SessionStatus::kConverged;
  } else if (state_.eli_pair >= state_.options.max_eli_pair) {
    state_.status = SessionStatus::kBudgetExhausted;
  } else {
    next_queries();
  }
}

Ranking Session::final_ranking() const {
  if (!state_.last_result) throw StateError("session has not been solved yet");
  return state_.last_result->solutions.front();
}

}  // namespace reqprio
