#pragma once

#include <cstddef>
#include <span>

#include "reqprio/model.hpp"

namespace reqprio {

/// Pairs ordered one way in `reference` and the other way in `ranking`
/// (the Kendall inversion count for two total orders).
std::size_t disagreement(const Ranking& reference, const Ranking& ranking);

/// Pairs in the transitive closure of `graph` (self-pairs excluded) that
/// `ranking` reverses.
std::size_t disagreement(const ConstraintGraph& graph, const Ranking& ranking);

/// Sum of the per-graph disagreements: a pair present in several graphs
/// counts once per graph, mirroring how the solver costs duplicate edges.
std::size_t disagreement(std::span<const ConstraintGraph> graphs, const Ranking& ranking);

/// Like the multi-graph form, but over the union of the closures so shared
/// pairs count once.
std::size_t disagreement_union(std::span<const ConstraintGraph> graphs, const Ranking& ranking);

/// Mean absolute displacement of each requirement between the two rankings.
double average_distance(const Ranking& ranking, const Ranking& gold);

}  // namespace reqprio
