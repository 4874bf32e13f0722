#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reqprio/model.hpp"
#include "reqprio/rational.hpp"

namespace reqprio {

/// Flattened weighted linear-ordering problem.
///
/// Soft edges may repeat an ordered pair (one per source graph); each copy is
/// costed separately. Hard edges gate feasibility and are never costed.
struct SolverInstance {
  struct SoftEdge {
    std::string before;
    std::string after;
    Rational weight;
  };

  /// Canonical (lexicographic) id order.
  std::vector<std::string> requirement_ids;
  std::vector<SoftEdge> soft_edges;
  std::vector<OrderedPair> hard_edges;

  /// Sorts `ids`, then splits every graph edge into soft or hard.
  static SolverInstance from_graphs(std::vector<std::string> ids,
                                    std::span<const ConstraintGraph> graphs);
};

struct SolveOptions {
  /// Maximum number of optimal rankings to return.
  std::size_t solution_cap = 50;
  /// Worker threads for subtree exploration; results do not depend on it.
  unsigned threads = 1;
  /// Wall-clock limit. When hit, the best ranking found so far is returned
  /// with `optimal == false` (or the partial optimal set with `exhausted == false`).
  std::optional<std::chrono::milliseconds> time_budget;

  friend bool operator==(const SolveOptions&, const SolveOptions&) = default;
};

struct SolverResult {
  /// Sum of violated soft weights of every solution.
  Rational cost;
  /// Distinct, sorted lexicographically by id sequence.
  std::vector<Ranking> solutions;
  /// True iff `solutions` holds every optimal ranking.
  bool exhausted = true;
  /// False only when the time budget expired before optimality was proven.
  bool optimal = true;

  friend bool operator==(const SolverResult&, const SolverResult&) = default;
};

/// Sum of the weights of soft edges (b, a) with b placed after a.
/// Throws ValidationError if `ranking` does not cover the instance ids.
Rational violation_cost(const Ranking& ranking, const SolverInstance& instance);

/// A cycle among the hard edges, if any.
std::optional<std::vector<std::string>> find_hard_cycle(const SolverInstance& instance);

/// Minimum total violated soft weight over all hard-feasible rankings,
/// together with the lexicographically smallest `solution_cap` optimal rankings.
///
/// Throws InfeasibleError on cyclic hard edges, ValidationError on malformed
/// instances (unknown ids, more than 64 requirements, non-positive weights).
SolverResult solve(const SolverInstance& instance, const SolveOptions& options = {});

}  // namespace reqprio
