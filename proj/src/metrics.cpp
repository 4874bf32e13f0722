#include "reqprio/metrics.hpp"

#include <cstdlib>

namespace reqprio {
namespace {

void require_same_universe(const Ranking& a, const Ranking& b) {
  if (!b.covers(a.order())) throw ValidationError("", "rankings cover different requirements");
}

std::size_t count_reversed(const PairSet& pairs, const Ranking& ranking) {
  std::size_t count = 0;
  for (const auto& [x, y] : pairs) {
    if (x == y) continue;
    if (!ranking.contains(x) || !ranking.contains(y)) {
      throw ValidationError("", "pair (" + x + ", " + y + ") is outside the ranking");
    }
    if (ranking.precedes(y, x)) ++count;
  }
  return count;
}

}  // namespace

std::size_t disagreement(const Ranking& reference, const Ranking& ranking) {
  require_same_universe(reference, ranking);
  const auto& order = reference.order();
  std::size_t count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (ranking.precedes(order[j], order[i])) ++count;
    }
  }
  return count;
}

std::size_t disagreement(const ConstraintGraph& graph, const Ranking& ranking) {
  return count_reversed(transitive_closure(graph), ranking);
}

std::size_t disagreement(std::span<const ConstraintGraph> graphs, const Ranking& ranking) {
  std::size_t total = 0;
  for (const auto& g : graphs) total += disagreement(g, ranking);
  return total;
}

std::size_t disagreement_union(std::span<const ConstraintGraph> graphs, const Ranking& ranking) {
  PairSet all;
  for (const auto& g : graphs) all.merge(transitive_closure(g));
  return count_reversed(all, ranking);
}

double average_distance(const Ranking& ranking, const Ranking& gold) {
  require_same_universe(ranking, gold);
  if (ranking.size() == 0) throw ValidationError("", "average distance of empty rankings");
  std::size_t total = 0;
  for (const auto& id : ranking.order()) {
    auto p = static_cast<long>(ranking.position(id));
    auto q = static_cast<long>(gold.position(id));
    total += static_cast<std::size_t>(std::labs(p - q));
  }
  return static_cast<double>(total) / static_cast<double>(ranking.size());
}

}  // namespace reqprio
