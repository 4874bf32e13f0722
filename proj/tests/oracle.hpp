#pragma once

// Exhaustive reference implementations used to check the solver and the
// metrics. Deliberately naive: they share nothing with the library code.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "reqprio/solver.hpp"

namespace oracle {

struct Result {
  reqprio::Rational cost;
  std::vector<reqprio::Ranking> solutions;  // lexicographic
  std::size_t feasible = 0;
};

inline reqprio::Rational cost_of(const std::vector<std::string>& order,
                                 const reqprio::SolverInstance& instance) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  reqprio::Rational total;
  for (const auto& e : instance.soft_edges) {
    if (pos.at(e.before) > pos.at(e.after)) total += e.weight;
  }
  return total;
}

inline bool feasible(const std::vector<std::string>& order, const reqprio::SolverInstance& instance) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [before, after] : instance.hard_edges) {
    if (pos.at(before) > pos.at(after)) return false;
  }
  return true;
}

/// Walks all N! permutations in lexicographic order.
inline Result brute_force(const reqprio::SolverInstance& instance) {
  std::vector<std::string> order = instance.requirement_ids;
  std::sort(order.begin(), order.end());
  Result out;
  bool any = false;
  do {
    if (!feasible(order, instance)) continue;
    ++out.feasible;
    auto c = cost_of(order, instance);
    if (!any || c < out.cost) {
      any = true;
      out.cost = c;
      out.solutions.clear();
    }
    if (c == out.cost) out.solutions.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

/// Number of pairs the two orders disagree on, by direct pair enumeration.
inline std::size_t inversions(const reqprio::Ranking& a, const reqprio::Ranking& b) {
  std::size_t count = 0;
  const auto& ids = a.order();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (b.position(ids[i]) > b.position(ids[j])) ++count;
    }
  }
  return count;
}

struct InstanceShape {
  std::size_t min_n = 2;
  std::size_t max_n = 8;
  double min_density = 0.1;
  double max_density = 0.4;
  int max_weight = 3;
  bool fractional = false;
  bool hard = false;
};

/// Random instance: each ordered pair gets a soft edge with probability
/// `density`. Hard edges, if requested, follow a hidden permutation so the
/// instance stays feasible.
inline reqprio::SolverInstance random_instance(std::mt19937_64& rng, const InstanceShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> pick_n(shape.min_n, shape.max_n);
  std::uniform_real_distribution<double> pick_density(shape.min_density, shape.max_density);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_weight(1, shape.max_weight);
  const std::size_t n = pick_n(rng);
  const double density = pick_density(rng);

  reqprio::SolverInstance inst;
  for (std::size_t i = 0; i < n; ++i) inst.requirement_ids.push_back("R" + std::to_string(i + 1));
  std::sort(inst.requirement_ids.begin(), inst.requirement_ids.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || unit(rng) >= density) continue;
      reqprio::Rational w = pick_weight(rng);
      if (shape.fractional && unit(rng) < 0.3) w = reqprio::Rational(pick_weight(rng), 2);
      inst.soft_edges.push_back({inst.requirement_ids[i], inst.requirement_ids[j], w});
    }
  }
  if (shape.hard) {
    auto hidden = inst.requirement_ids;
    std::shuffle(hidden.begin(), hidden.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (unit(rng) < density / 2) inst.hard_edges.emplace_back(hidden[i], hidden[j]);
      }
    }
  }
  return inst;
}

}  // namespace oracle
