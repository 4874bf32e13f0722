#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reqprio/model.hpp"
#include "reqprio/solver.hpp"

namespace reqprio {

/// Unordered pair of distinct requirement ids, stored in canonical order.
class IdPair {
 public:
  IdPair() = default;
  /// Throws ValidationError if a == b.
  IdPair(std::string a, std::string b);

  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }
  bool contains(const std::string& id) const { return id == first_ || id == second_; }
  std::string to_string() const { return "{" + first_ + ", " + second_ + "}"; }

  friend bool operator==(const IdPair&, const IdPair&) = default;
  friend auto operator<=>(const IdPair&, const IdPair&) = default;

 private:
  std::string first_;
  std::string second_;
};

/// Pairs ordered one way in `a` and the other way in `b`.
/// Throws ValidationError when the rankings cover different ids.
std::set<IdPair> pairs_in_disagreement(const Ranking& a, const Ranking& b);

struct ComparisonQuery {
  IdPair pair;
  /// Number of solution pairs in the last result that disagree on `pair`.
  std::size_t frequency = 0;

  friend bool operator==(const ComparisonQuery&, const ComparisonQuery&) = default;
};

/// Verdicts are relative to the canonical order of the pair.
enum class Verdict { kFirstPrecedes, kSecondPrecedes, kUndecided };

std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view text);

struct AnalystResponse {
  IdPair pair;
  Verdict verdict = Verdict::kUndecided;

  /// "`winner` should come before `loser`".
  static AnalystResponse prefer(const std::string& winner, const std::string& loser);
  static AnalystResponse undecided(const std::string& a, const std::string& b);
  /// The preferred id, if decided.
  std::optional<std::string> preferred() const;

  friend bool operator==(const AnalystResponse&, const AnalystResponse&) = default;
};

enum class SessionStatus { kActive, kConverged, kBudgetExhausted, kPlateau };

std::string_view to_string(SessionStatus status);
std::optional<SessionStatus> parse_session_status(std::string_view text);

struct HistoryEntry {
  ComparisonQuery query;
  AnalystResponse response;
  /// Number of solves performed when the query was answered.
  std::size_t iteration = 0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct SessionOptions {
  std::size_t max_eli_pair = 100;
  SolveOptions solve;

  friend bool operator==(const SessionOptions&, const SessionOptions&) = default;
};

/// Interactive prioritization loop: solve, collect analyst verdicts on the
/// pairs the tied optima disagree on, fold them into the Eli graph, re-solve.
///
/// Typical use:
///   Session s(project, options);
///   s.step();
///   while (s.status() == SessionStatus::kActive) {
///     s.submit_responses(ask(s.pending_queries()));
///     s.step();
///   }
///   Ranking r = s.final_ranking();
///
/// Not thread-safe; callers serialize mutations.
class Session {
 public:
  /// Complete mutable state, exposed for snapshots.
  struct State {
    Project project;
    SessionOptions options;
    ConstraintGraph eli_graph{"Eli"};
    std::size_t eli_pair = 0;
    std::set<IdPair> asked_pairs;
    std::vector<ComparisonQuery> pending_queries;
    std::optional<SolverResult> last_result;
    SessionStatus status = SessionStatus::kActive;
    std::vector<HistoryEntry> history;
    std::size_t iteration = 0;
    std::vector<std::string> warnings;

    friend bool operator==(const State&, const State&) = default;
  };

  /// Throws ValidationError for an invalid project.
  Session(Project project, SessionOptions options = {});
  /// Restores a snapshot; validates the project and state invariants.
  explicit Session(State state);

  const State& state() const noexcept { return state_; }
  SessionStatus status() const noexcept { return state_.status; }
  const std::vector<ComparisonQuery>& pending_queries() const noexcept {
    return state_.pending_queries;
  }
  std::size_t eli_pair() const noexcept { return state_.eli_pair; }
  std::size_t max_eli_pair() const noexcept { return state_.options.max_eli_pair; }
  const ConstraintGraph& eli_graph() const noexcept { return state_.eli_graph; }
  const std::optional<SolverResult>& last_result() const noexcept { return state_.last_result; }
  const Project& project() const noexcept { return state_.project; }

  /// Prio, Dep, extras and Eli, as fed to the solver.
  std::vector<ConstraintGraph> constraint_graphs() const;
  SolverInstance solver_instance() const;

  /// Computes the next batch from the last result and stores it as pending.
  /// An empty batch moves the session to PLATEAU.
  /// Throws StateError unless ACTIVE with at least two solutions.
  const std::vector<ComparisonQuery>& next_queries();

  /// Applies verdicts for pending pairs. Answered pairs leave the pending set;
  /// unanswered ones stay. Every presented pair consumes budget. On any error
  /// the session is left unchanged.
  void submit_responses(std::span<const AnalystResponse> responses);

  /// Re-solves and advances the status. Throws StateError if not ACTIVE or
  /// answers are outstanding; InfeasibleError on cyclic hard constraints.
  void step();

  /// First optimal solution of the last solve (the lexicographic tie-break).
  /// Throws StateError before the first solve.
  Ranking final_ranking() const;

 private:
  void check_invariants() const;

  State state_;
};

}  // namespace reqprio
