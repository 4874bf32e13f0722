#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reqprio/errors.hpp"
#include "reqprio/rational.hpp"

namespace reqprio {

/// An atomic prioritizable item. priority_level 1 is the highest end-user
/// priority; only the relative order of levels matters.
struct Requirement {
  std::string id;
  std::string title;
  int priority_level = 1;

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

/// `requirement` can only be implemented after `depends_on`.
struct Dependency {
  std::string requirement;
  std::string depends_on;

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

/// Edge weight: a positive exact value (soft, retractable) or HARD.
class Weight {
 public:
  Weight() = default;
  static Weight hard() noexcept;
  /// Throws std::invalid_argument unless value > 0.
  static Weight soft(Rational value);

  bool is_hard() const noexcept { return hard_; }
  /// Meaningful for soft weights only.
  const Rational& value() const noexcept { return value_; }
  std::string to_string() const;

  friend bool operator==(const Weight&, const Weight&) = default;
  /// HARD compares above every soft weight.
  std::strong_ordering operator<=>(const Weight& other) const;

 private:
  bool hard_ = false;
  Rational value_{1};
};

/// `before` must occupy an earlier position than `after`.
struct PrecedenceEdge {
  std::string before;
  std::string after;
  Weight weight;

  friend bool operator==(const PrecedenceEdge&, const PrecedenceEdge&) = default;
};

/// Ordered (before, after) pair of requirement ids.
using OrderedPair = std::pair<std::string, std::string>;
using PairSet = std::set<OrderedPair>;

/// A named set of precedence edges with at most one edge per ordered pair.
class ConstraintGraph {
 public:
  ConstraintGraph() = default;
  explicit ConstraintGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  const std::vector<PrecedenceEdge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  /// Adds (before, after). A duplicate keeps the larger weight.
  /// Throws ValidationError on a self-loop.
  void add_edge(const std::string& before, const std::string& after,
                Weight weight = Weight{});
  /// Returns true if an edge was removed.
  bool remove_edge(const std::string& before, const std::string& after);
  const PrecedenceEdge* find(const std::string& before, const std::string& after) const;

  friend bool operator==(const ConstraintGraph&, const ConstraintGraph&) = default;

 private:
  std::string name_;
  std::vector<PrecedenceEdge> edges_;
};

/// A total order over all requirements of a project.
class Ranking {
 public:
  Ranking() = default;
  /// Throws ValidationError on duplicate or empty ids.
  explicit Ranking(std::vector<std::string> order);

  const std::vector<std::string>& order() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }
  /// 1-based position; throws std::out_of_range for unknown ids.
  std::size_t position(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  bool precedes(const std::string& a, const std::string& b) const {
    return position(a) < position(b);
  }
  /// True if the ranking is a permutation of `ids`.
  bool covers(std::span<const std::string> ids) const;
  /// "<R2, R1, R3>"
  std::string to_string() const;

  friend bool operator==(const Ranking& a, const Ranking& b) { return a.order_ == b.order_; }
  friend auto operator<=>(const Ranking& a, const Ranking& b) { return a.order_ <=> b.order_; }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Everything known about a prioritization problem before elicitation.
struct Project {
  std::vector<Requirement> requirements;
  std::vector<Dependency> dependencies;
  std::optional<Ranking> gold_standard;
  std::vector<ConstraintGraph> extra_graphs;

  /// All findings; empty when the project is valid.
  std::vector<Issue> validate() const;
  /// Throws ValidationError listing every finding.
  void ensure_valid() const;

  /// Requirement ids in canonical (lexicographic) order.
  std::vector<std::string> canonical_ids() const;
  const Requirement* find(const std::string& id) const;

  /// Prio, Dep, then every extra graph.
  std::vector<ConstraintGraph> source_graphs() const;

  friend bool operator==(const Project&, const Project&) = default;
};

/// One weight-1 edge for every pair of requirements on different priority
/// levels, from the higher-priority (lower level) to the lower-priority one.
ConstraintGraph build_prio_graph(std::span<const Requirement> requirements);

/// One weight-1 edge (depends_on -> requirement) per distinct dependency.
ConstraintGraph build_dep_graph(std::span<const Requirement> requirements,
                                std::span<const Dependency> dependencies);

/// All (x, y) connected by a directed path of length >= 1. On cycles this
/// includes self-pairs (x, x); consumers ignore them.
PairSet transitive_closure(const ConstraintGraph& graph);

}  // namespace reqprio
