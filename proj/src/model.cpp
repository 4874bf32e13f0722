#include "reqprio/model.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace reqprio {

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error([&] {
        std::string what = "validation failed";
        for (const auto& issue : issues) {
          what += "; ";
          if (!issue.location.empty()) what += issue.location + ": ";
          what += issue.message;
        }
        return what;
      }()),
      issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string location, std::string message)
    : ValidationError(std::vector<Issue>{{std::move(location), std::move(message)}}) {}

InfeasibleError::InfeasibleError(std::vector<std::string> cycle)
    : Error([&] {
        std::string what = "hard constraints are cyclic:";
        for (const auto& id : cycle) what += " " + id + " ->";
        if (!cycle.empty()) what += " " + cycle.front();
        return what;
      }()),
      cycle_(std::move(cycle)) {}

// --- Weight ---------------------------------------------------------------

Weight Weight::hard() noexcept {
  Weight w;
  w.hard_ = true;
  return w;
}

Weight Weight::soft(Rational value) {
  if (value <= Rational(0)) throw std::invalid_argument("soft weight must be positive");
  Weight w;
  w.value_ = value;
  return w;
}

std::string Weight::to_string() const { return hard_ ? "HARD" : value_.to_string(); }

std::strong_ordering Weight::operator<=>(const Weight& other) const {
  if (hard_ || other.hard_) return hard_ <=> other.hard_;
  return value_ <=> other.value_;
}

// --- ConstraintGraph ------------------------------------------------------

void ConstraintGraph::add_edge(const std::string& before, const std::string& after,
                               Weight weight) {
  if (before == after) {
    throw ValidationError("", "self-loop on '" + before + "' in graph '" + name_ + "'");
  }
  for (auto& edge : edges_) {
    if (edge.before == before && edge.after == after) {
      edge.weight = std::max(edge.weight, weight);
      return;
    }
  }
  edges_.push_back({before, after, weight});
}

bool ConstraintGraph::remove_edge(const std::string& before, const std::string& after) {
  auto it = std::find_if(edges_.begin(), edges_.end(), [&](const PrecedenceEdge& e) {
    return e.before == before && e.after == after;
  });
  if (it == edges_.end()) return false;
  edges_.erase(it);
  return true;
}

const PrecedenceEdge* ConstraintGraph::find(const std::string& before,
                                            const std::string& after) const {
  for (const auto& edge : edges_) {
    if (edge.before == before && edge.after == after) return &edge;
  }
  return nullptr;
}

// --- Ranking --------------------------------------------------------------

Ranking::Ranking(std::vector<std::string> order) : order_(std::move(order)) {
  index_.reserve(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i].empty()) throw ValidationError("", "ranking contains an empty id");
    if (!index_.emplace(order_[i], i).second) {
      throw ValidationError("", "ranking lists '" + order_[i] + "' more than once");
    }
  }
}

std::size_t Ranking::position(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("'" + id + "' is not in the ranking");
  return it->second + 1;
}

bool Ranking::covers(std::span<const std::string> ids) const {
  if (ids.size() != order_.size()) return false;
  return std::all_of(ids.begin(), ids.end(), [&](const std::string& id) { return contains(id); });
}

std::string Ranking::to_string() const {
  std::string out = "<";
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (i) out += ", ";
    out += order_[i];
  }
  return out + ">";
}

// --- Project --------------------------------------------------------------

std::vector<Issue> Project::validate() const {
  std::vector<Issue> issues;
  std::unordered_set<std::string> ids;
  if (requirements.empty()) issues.push_back({"/requirements", "no requirements"});
  for (std::size_t i = 0; i < requirements.size(); ++i) {
    const auto& r = requirements[i];
    const std::string at = "/requirements/" + std::to_string(i);
    if (r.id.empty()) issues.push_back({at + "/id", "empty id"});
    else if (!ids.insert(r.id).second) issues.push_back({at + "/id", "duplicate id '" + r.id + "'"});
    if (r.priority_level < 1) issues.push_back({at + "/priority", "priority must be >= 1"});
  }
  auto check_ref = [&](const std::string& id, const std::string& at) {
    if (!ids.count(id)) issues.push_back({at, "unknown requirement '" + id + "'"});
  };
  for (std::size_t i = 0; i < dependencies.size(); ++i) {
    const auto& d = dependencies[i];
    const std::string at = "/dependencies/" + std::to_string(i);
    check_ref(d.requirement, at + "/requirement");
    check_ref(d.depends_on, at + "/depends_on");
    if (d.requirement == d.depends_on) {
      issues.push_back({at, "'" + d.requirement + "' depends on itself"});
    }
  }
  if (gold_standard) {
    std::vector<std::string> id_list(ids.begin(), ids.end());
    for (std::size_t i = 0; i < gold_standard->size(); ++i) {
      check_ref(gold_standard->order()[i], "/gold_standard/" + std::to_string(i));
    }
    if (!gold_standard->covers(id_list)) {
      issues.push_back({"/gold_standard", "gold standard is not a permutation of the requirements"});
    }
  }
  std::unordered_set<std::string> graph_names{"Prio", "Dep", "Eli"};
  for (std::size_t g = 0; g < extra_graphs.size(); ++g) {
    const auto& graph = extra_graphs[g];
    const std::string at = "/extra_graphs/" + std::to_string(g);
    if (graph.name().empty()) issues.push_back({at + "/name", "empty graph name"});
    else if (!graph_names.insert(graph.name()).second) {
      issues.push_back({at + "/name", "graph name '" + graph.name() + "' already used"});
    }
    for (std::size_t e = 0; e < graph.edges().size(); ++e) {
      const auto& edge = graph.edges()[e];
      const std::string edge_at = at + "/edges/" + std::to_string(e);
      check_ref(edge.before, edge_at + "/before");
      check_ref(edge.after, edge_at + "/after");
    }
  }
  return issues;
}

void Project::ensure_valid() const {
  if (auto issues = validate(); !issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<std::string> Project::canonical_ids() const {
  std::vector<std::string> ids;
  ids.reserve(requirements.size());
  for (const auto& r : requirements) ids.push_back(r.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

const Requirement* Project::find(const std::string& id) const {
  for (const auto& r : requirements) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::vector<ConstraintGraph> Project::source_graphs() const {
  std::vector<ConstraintGraph> graphs;
  graphs.push_back(build_prio_graph(requirements));
  graphs.push_back(build_dep_graph(requirements, dependencies));
  graphs.insert(graphs.end(), extra_graphs.begin(), extra_graphs.end());
  return graphs;
}

// --- graph construction ---------------------------------------------------

ConstraintGraph build_prio_graph(std::span<const Requirement> requirements) {
  if (requirements.empty()) throw ValidationError("/requirements", "no requirements");
  std::unordered_set<std::string> seen;
  for (const auto& r : requirements) {
    if (!seen.insert(r.id).second) throw ValidationError("", "duplicate id '" + r.id + "'");
    if (r.priority_level < 1) throw ValidationError("", "priority of '" + r.id + "' must be >= 1");
  }
  // Group by level, lower level first; within a level keep input order.
  std::map<int, std::vector<const Requirement*>> layers;
  for (const auto& r : requirements) layers[r.priority_level].push_back(&r);

  ConstraintGraph graph("Prio");
  for (auto hi = layers.begin(); hi != layers.end(); ++hi) {
    for (auto lo = std::next(hi); lo != layers.end(); ++lo) {
      for (const auto* a : hi->second) {
        for (const auto* b : lo->second) graph.add_edge(a->id, b->id);
      }
    }
  }
  return graph;
}

ConstraintGraph build_dep_graph(std::span<const Requirement> requirements,
                                std::span<const Dependency> dependencies) {
  std::unordered_set<std::string> ids;
  for (const auto& r : requirements) ids.insert(r.id);
  ConstraintGraph graph("Dep");
  for (std::size_t i = 0; i < dependencies.size(); ++i) {
    const auto& d = dependencies[i];
    const std::string at = "/dependencies/" + std::to_string(i);
    if (!ids.count(d.requirement)) {
      throw ValidationError(at + "/requirement", "unknown requirement '" + d.requirement + "'");
    }
    if (!ids.count(d.depends_on)) {
      throw ValidationError(at + "/depends_on", "unknown requirement '" + d.depends_on + "'");
    }
    if (d.requirement == d.depends_on) {
      throw ValidationError(at, "'" + d.requirement + "' depends on itself");
    }
    graph.add_edge(d.depends_on, d.requirement);
  }
  return graph;
}

PairSet transitive_closure(const ConstraintGraph& graph) {
  std::map<std::string, std::vector<std::string>> successors;
  for (const auto& e : graph.edges()) successors[e.before].push_back(e.after);

  PairSet closure;
  for (const auto& [source, direct] : successors) {
    std::vector<std::string> stack(direct.begin(), direct.end());
    std::unordered_set<std::string> reached;
    while (!stack.empty()) {
      std::string node = std::move(stack.back());
      stack.pop_back();
      if (!reached.insert(node).second) continue;
      closure.emplace(source, node);
      if (auto it = successors.find(node); it != successors.end()) {
        stack.insert(stack.end(), it->second.begin(), it->second.end());
      }
    }
  }
  return closure;
}

}  // namespace reqprio
