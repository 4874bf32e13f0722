#include "reqprio/solver.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace reqprio {
namespace {

using Mask = std::uint64_t;
using Clock = std::chrono::steady_clock;
constexpr std::size_t kMaxRequirements = 64;
constexpr std::size_t kMaxMemoEntries = std::size_t{1} << 20;
constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max();

struct MaskHash {
  std::size_t operator()(Mask m) const noexcept {
    m += 0x9e3779b97f4a7c15ULL;
    m = (m ^ (m >> 30)) * 0xbf58476d1ce4e5b9ULL;
    m = (m ^ (m >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(m ^ (m >> 31));
  }
};

using Memo = std::unordered_map<Mask, std::int64_t, MaskHash>;

// Integer-scaled form of an instance. Indices follow canonical id order.
struct Problem {
  int n = 0;
  std::int64_t scale = 1;
  // weight[a * n + b]: total soft weight of edges a -> b, paid when b precedes a.
  std::vector<std::int64_t> weight;
  // Cheapest admissible cost for the pair {a, b}; symmetric.
  std::vector<std::int64_t> pair_bound;
  // Transitive hard predecessors of each requirement.
  std::vector<Mask> hard_pred;

  std::int64_t w(int a, int b) const { return weight[static_cast<std::size_t>(a * n + b)]; }
  std::int64_t lb(int a, int b) const { return pair_bound[static_cast<std::size_t>(a * n + b)]; }
};

Mask bit(int i) { return Mask{1} << i; }

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("solver weight overflow");
  return out;
}

std::unordered_map<std::string, int> index_ids(const SolverInstance& instance) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < instance.requirement_ids.size(); ++i) {
    if (!index.emplace(instance.requirement_ids[i], static_cast<int>(i)).second) {
      throw ValidationError("", "duplicate requirement id '" + instance.requirement_ids[i] + "'");
    }
  }
  return index;
}

int lookup(const std::unordered_map<std::string, int>& index, const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) throw ValidationError("", "unknown requirement '" + id + "'");
  return it->second;
}

Problem build_problem(const SolverInstance& instance) {
  const std::size_t n = instance.requirement_ids.size();
  if (n == 0) throw ValidationError("", "instance has no requirements");
  if (n > kMaxRequirements) {
    throw ValidationError("", "the exact solver supports at most 64 requirements");
  }
  if (!std::is_sorted(instance.requirement_ids.begin(), instance.requirement_ids.end())) {
    throw ValidationError("", "requirement ids must be in canonical order");
  }
  auto index = index_ids(instance);

  Problem p;
  p.n = static_cast<int>(n);
  for (const auto& e : instance.soft_edges) {
    if (e.weight <= Rational(0)) throw ValidationError("", "soft weights must be positive");
    std::int64_t g = std::gcd(p.scale, e.weight.den());
    std::int64_t next = 0;
    if (__builtin_mul_overflow(p.scale / g, e.weight.den(), &next)) {
      throw std::overflow_error("solver weight overflow");
    }
    p.scale = next;
  }
  p.weight.assign(n * n, 0);
  for (const auto& e : instance.soft_edges) {
    int a = lookup(index, e.before);
    int b = lookup(index, e.after);
    if (a == b) throw ValidationError("", "self-loop on '" + e.before + "'");
    std::int64_t scaled = 0;
    if (__builtin_mul_overflow(e.weight.num(), p.scale / e.weight.den(), &scaled)) {
      throw std::overflow_error("solver weight overflow");
    }
    auto& slot = p.weight[static_cast<std::size_t>(a * p.n + b)];
    slot = checked_add(slot, scaled);
  }

  p.hard_pred.assign(n, 0);
  for (const auto& [before, after] : instance.hard_edges) {
    int a = lookup(index, before);
    int b = lookup(index, after);
    if (a == b) throw ValidationError("", "self-loop on '" + before + "'");
    p.hard_pred[static_cast<std::size_t>(b)] |= bit(a);
  }
  // Transitive closure on predecessor masks.
  for (int k = 0; k < p.n; ++k) {
    for (int i = 0; i < p.n; ++i) {
      if (p.hard_pred[static_cast<std::size_t>(i)] & bit(k)) {
        p.hard_pred[static_cast<std::size_t>(i)] |= p.hard_pred[static_cast<std::size_t>(k)];
      }
    }
  }

  p.pair_bound.assign(n * n, 0);
  for (int a = 0; a < p.n; ++a) {
    for (int b = 0; b < p.n; ++b) {
      if (a == b) continue;
      std::int64_t value = std::min(p.w(a, b), p.w(b, a));
      if (p.hard_pred[static_cast<std::size_t>(b)] & bit(a)) value = p.w(b, a);
      if (p.hard_pred[static_cast<std::size_t>(a)] & bit(b)) value = p.w(a, b);
      p.pair_bound[static_cast<std::size_t>(a * p.n + b)] = value;
    }
  }
  return p;
}

// Search node: the unplaced set plus per-requirement aggregates over it.
struct Node {
  Mask remaining = 0;
  std::int64_t cost = 0;         // violations committed by the prefix
  std::int64_t pair_bound = 0;   // sum of pair bounds inside `remaining`
  std::vector<std::int64_t> incoming;  // incoming[x] = sum_{y in remaining} w(y, x)
  std::vector<std::int64_t> bound_of;  // bound_of[x] = sum_{y in remaining} lb(x, y)
};

Node root_node(const Problem& p) {
  Node node;
  node.remaining = p.n == 64 ? ~Mask{0} : bit(p.n) - 1;
  node.incoming.assign(static_cast<std::size_t>(p.n), 0);
  node.bound_of.assign(static_cast<std::size_t>(p.n), 0);
  for (int x = 0; x < p.n; ++x) {
    for (int y = 0; y < p.n; ++y) {
      node.incoming[static_cast<std::size_t>(x)] += p.w(y, x);
      node.bound_of[static_cast<std::size_t>(x)] += p.lb(x, y);
    }
  }
  for (int x = 0; x < p.n; ++x) node.pair_bound += node.bound_of[static_cast<std::size_t>(x)];
  node.pair_bound /= 2;
  return node;
}

bool placeable(const Problem& p, const Node& node, int x) {
  return (p.hard_pred[static_cast<std::size_t>(x)] & node.remaining) == 0;
}

// Lower bound on total cost after placing x next.
std::int64_t child_bound(const Node& node, int x) {
  return node.cost + node.incoming[static_cast<std::size_t>(x)] + node.pair_bound -
         node.bound_of[static_cast<std::size_t>(x)];
}

void place(const Problem& p, const Node& parent, int x, Node& child) {
  const auto ux = static_cast<std::size_t>(x);
  child.remaining = parent.remaining & ~bit(x);
  child.cost = parent.cost + parent.incoming[ux];
  child.pair_bound = parent.pair_bound - parent.bound_of[ux];
  child.incoming = parent.incoming;
  child.bound_of = parent.bound_of;
  for (Mask rest = child.remaining; rest; rest &= rest - 1) {
    int y = std::countr_zero(rest);
    child.incoming[static_cast<std::size_t>(y)] -= p.w(x, y);
    child.bound_of[static_cast<std::size_t>(y)] -= p.lb(y, x);
  }
}

class Deadline {
 public:
  explicit Deadline(std::optional<std::chrono::milliseconds> budget) {
    if (budget) end_ = Clock::now() + *budget;
  }
  // Polls the clock every 256 calls.
  bool expired() {
    if (!end_) return false;
    if (expired_.load(std::memory_order_relaxed)) return true;
    if ((++ticks_ & 0xff) != 0) return false;
    if (Clock::now() >= *end_) expired_.store(true, std::memory_order_relaxed);
    return expired_.load(std::memory_order_relaxed);
  }
  bool hit() const { return expired_.load(std::memory_order_relaxed); }

 private:
  std::optional<Clock::time_point> end_;
  std::atomic<bool> expired_{false};
  thread_local static inline std::uint32_t ticks_ = 0;
};

// Shared best-known solution for the optimization pass.
struct Incumbent {
  std::atomic<std::int64_t> cost{kInfinity};
  std::mutex mutex;
  std::vector<int> order;

  void offer(std::int64_t value, const std::vector<int>& candidate) {
    std::lock_guard lock(mutex);
    if (value < cost.load() || (value == cost.load() && candidate < order)) {
      cost.store(value);
      order = candidate;
    }
  }
};

// Pass 1: depth-first branch and bound for the optimal cost. `best_seen`
// records the cheapest prefix cost that reached each unplaced set; a later
// arrival that is no cheaper cannot improve the incumbent.
class Optimizer {
 public:
  Optimizer(const Problem& p, Incumbent& incumbent, Deadline& deadline)
      : p_(p), incumbent_(incumbent), deadline_(deadline),
        stack_(static_cast<std::size_t>(p.n) + 1) {
    prefix_.reserve(static_cast<std::size_t>(p.n));
  }

  void explore_from_root_child(const Node& root, int x) {
    place(p_, root, x, stack_[1]);
    prefix_.assign(1, x);
    descend(1);
  }

 private:
  void descend(std::size_t depth) {
    const Node& node = stack_[depth];
    if (node.remaining == 0) {
      if (node.cost < incumbent_.cost.load()) incumbent_.offer(node.cost, prefix_);
      return;
    }
    if (deadline_.expired()) return;
    if (!seen(node)) return;

    std::vector<std::pair<std::int64_t, int>> children;
    for (Mask rest = node.remaining; rest; rest &= rest - 1) {
      int x = std::countr_zero(rest);
      if (!placeable(p_, node, x)) continue;
      std::int64_t b = child_bound(node, x);
      if (b < incumbent_.cost.load()) children.emplace_back(b, x);
    }
    std::sort(children.begin(), children.end());
    for (auto [b, x] : children) {
      if (b >= incumbent_.cost.load() || deadline_.hit()) break;
      place(p_, node, x, stack_[depth + 1]);
      prefix_.push_back(x);
      descend(depth + 1);
      prefix_.pop_back();
    }
  }

  bool seen(const Node& node) {
    auto it = best_seen_.find(node.remaining);
    if (it != best_seen_.end()) {
      if (it->second <= node.cost) return false;
      it->second = node.cost;
    } else if (best_seen_.size() < kMaxMemoEntries) {
      best_seen_.emplace(node.remaining, node.cost);
    }
    return true;
  }

  const Problem& p_;
  Incumbent& incumbent_;
  Deadline& deadline_;
  std::vector<Node> stack_;
  std::vector<int> prefix_;
  Memo best_seen_;
};

// Pass 2: enumerate rankings of exactly `target` cost in lexicographic order.
// `fails_from` holds, per unplaced set, the smallest prefix cost from which no
// optimal completion exists (a proven threshold).
class Enumerator {
 public:
  Enumerator(const Problem& p, std::int64_t target, Deadline& deadline)
      : p_(p), target_(target), deadline_(deadline),
        stack_(static_cast<std::size_t>(p.n) + 1) {
    prefix_.reserve(static_cast<std::size_t>(p.n));
  }

  // Appends up to `limit` solutions whose first element is x.
  void enumerate_root_child(const Node& root, int x, std::size_t limit,
                            std::vector<std::vector<int>>& out) {
    if (child_bound(root, x) > target_) return;
    out_ = &out;
    limit_ = limit;
    place(p_, root, x, stack_[1]);
    prefix_.assign(1, x);
    descend(1);
  }

  bool full() const { return out_ && out_->size() >= limit_; }

 private:
  bool descend(std::size_t depth) {
    const Node& node = stack_[depth];
    if (node.remaining == 0) {
      out_->push_back(prefix_);
      return true;
    }
    if (deadline_.expired()) return false;
    const Mask remaining = node.remaining;
    const std::int64_t cost = node.cost;
    auto memo = fails_from_.find(remaining);
    const bool memoized = memo != fails_from_.end();
    if (memoized && cost >= memo->second) return false;

    bool found = false;
    for (Mask rest = node.remaining; rest; rest &= rest - 1) {
      int x = std::countr_zero(rest);
      if (!placeable(p_, node, x) || child_bound(node, x) > target_) continue;
      place(p_, node, x, stack_[depth + 1]);
      prefix_.push_back(x);
      found |= descend(depth + 1);
      prefix_.pop_back();
      if (full() || deadline_.hit()) return found;
    }
    // Any solution found fixes the exact completion cost from here.
    std::int64_t proven = found ? cost + 1 : cost;
    if (memoized) {
      auto& slot = fails_from_[remaining];
      slot = std::min(slot, proven);
    } else if (fails_from_.size() < kMaxMemoEntries) {
      fails_from_.emplace(remaining, proven);
    }
    return found;
  }

  const Problem& p_;
  std::int64_t target_;
  Deadline& deadline_;
  std::vector<Node> stack_;
  std::vector<int> prefix_;
  std::vector<std::vector<int>>* out_ = nullptr;
  std::size_t limit_ = 0;
  Memo fails_from_;
};

// Greedy construction for an initial upper bound.
std::pair<std::int64_t, std::vector<int>> greedy(const Problem& p, const Node& root) {
  Node node = root;
  Node next;
  std::vector<int> order;
  while (node.remaining) {
    int pick = -1;
    std::int64_t best = kInfinity;
    for (Mask rest = node.remaining; rest; rest &= rest - 1) {
      int x = std::countr_zero(rest);
      if (!placeable(p, node, x)) continue;
      std::int64_t b = child_bound(node, x);
      if (b < best) {
        best = b;
        pick = x;
      }
    }
    place(p, node, pick, next);
    std::swap(node, next);
    order.push_back(pick);
  }
  return {node.cost, order};
}

template <typename Fn>
void run_workers(unsigned threads, std::size_t jobs, Fn&& work) {
  std::atomic<std::size_t> next{0};
  auto loop = [&](unsigned worker) {
    for (std::size_t job = next++; job < jobs; job = next++) work(worker, job);
  };
  if (threads <= 1 || jobs <= 1) {
    loop(0);
    return;
  }
  std::vector<std::thread> pool;
  unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(loop, t);
  for (auto& th : pool) th.join();
}

Ranking to_ranking(const SolverInstance& instance, const std::vector<int>& order) {
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (int i : order) ids.push_back(instance.requirement_ids[static_cast<std::size_t>(i)]);
  return Ranking(std::move(ids));
}

}  // namespace

SolverInstance SolverInstance::from_graphs(std::vector<std::string> ids,
                                           std::span<const ConstraintGraph> graphs) {
  SolverInstance instance;
  std::sort(ids.begin(), ids.end());
  instance.requirement_ids = std::move(ids);
  for (const auto& graph : graphs) {
    for (const auto& e : graph.edges()) {
      if (e.weight.is_hard()) instance.hard_edges.emplace_back(e.before, e.after);
      else instance.soft_edges.push_back({e.before, e.after, e.weight.value()});
    }
  }
  return instance;
}

Rational violation_cost(const Ranking& ranking, const SolverInstance& instance) {
  if (!ranking.covers(instance.requirement_ids)) {
    throw ValidationError("", "ranking does not cover the instance requirements");
  }
  Rational cost;
  for (const auto& e : instance.soft_edges) {
    if (ranking.position(e.before) > ranking.position(e.after)) cost += e.weight;
  }
  return cost;
}

std::optional<std::vector<std::string>> find_hard_cycle(const SolverInstance& instance) {
  auto index = index_ids(instance);
  const std::size_t n = instance.requirement_ids.size();
  std::vector<std::vector<int>> succ(n);
  for (const auto& [before, after] : instance.hard_edges) {
    succ[static_cast<std::size_t>(lookup(index, before))].push_back(lookup(index, after));
  }
  for (auto& list : succ) std::sort(list.begin(), list.end());

  enum class Mark { kNew, kActive, kDone };
  std::vector<Mark> mark(n, Mark::kNew);
  std::vector<int> path;
  std::vector<std::string> cycle;
  // Iterative DFS keeping (node, next-successor-index) frames.
  for (std::size_t start = 0; start < n && cycle.empty(); ++start) {
    if (mark[start] != Mark::kNew) continue;
    std::vector<std::pair<int, std::size_t>> frames{{static_cast<int>(start), 0}};
    mark[start] = Mark::kActive;
    path.assign(1, static_cast<int>(start));
    while (!frames.empty() && cycle.empty()) {
      auto& [node, next] = frames.back();
      const auto& out = succ[static_cast<std::size_t>(node)];
      if (next == out.size()) {
        mark[static_cast<std::size_t>(node)] = Mark::kDone;
        frames.pop_back();
        path.pop_back();
        continue;
      }
      int target = out[next++];
      auto& target_mark = mark[static_cast<std::size_t>(target)];
      if (target_mark == Mark::kActive) {
        auto from = std::find(path.begin(), path.end(), target);
        for (auto it = from; it != path.end(); ++it) {
          cycle.push_back(instance.requirement_ids[static_cast<std::size_t>(*it)]);
        }
      } else if (target_mark == Mark::kNew) {
        target_mark = Mark::kActive;
        frames.emplace_back(target, 0);
        path.push_back(target);
      }
    }
  }
  if (cycle.empty()) return std::nullopt;
  return cycle;
}

SolverResult solve(const SolverInstance& instance, const SolveOptions& options) {
  if (options.solution_cap == 0) throw std::invalid_argument("solution_cap must be positive");
  Problem p = build_problem(instance);
  if (auto cycle = find_hard_cycle(instance)) throw InfeasibleError(std::move(*cycle));

  Deadline deadline(options.time_budget);
  const Node root = root_node(p);
  std::vector<int> roots;
  for (int x = 0; x < p.n; ++x) {
    if (placeable(p, root, x)) roots.push_back(x);
  }

  Incumbent incumbent;
  auto [greedy_cost, greedy_order] = greedy(p, root);
  incumbent.offer(greedy_cost, greedy_order);

  // Pass 1: most promising first branches first.
  std::vector<int> by_bound = roots;
  std::stable_sort(by_bound.begin(), by_bound.end(), [&](int a, int b) {
    return child_bound(root, a) < child_bound(root, b);
  });
  {
    const unsigned workers = std::max(1u, options.threads);
    std::vector<std::unique_ptr<Optimizer>> optimizers;
    for (unsigned t = 0; t < workers; ++t) {
      optimizers.push_back(std::make_unique<Optimizer>(p, incumbent, deadline));
    }
    run_workers(workers, by_bound.size(), [&](unsigned worker, std::size_t job) {
      int x = by_bound[job];
      if (child_bound(root, x) < incumbent.cost.load() && !deadline.hit()) {
        optimizers[worker]->explore_from_root_child(root, x);
      }
    });
  }

  SolverResult result;
  const std::int64_t optimum = incumbent.cost.load();
  result.cost = Rational(optimum, p.scale);
  if (deadline.hit()) {
    result.optimal = false;
    result.exhausted = false;
    result.solutions.push_back(to_ranking(instance, incumbent.order));
    return result;
  }

  // Pass 2: one more than the cap tells whether the set was truncated.
  const std::size_t limit = options.solution_cap + 1;
  std::vector<std::vector<int>> found;
  if (options.threads <= 1) {
    Enumerator enumerator(p, optimum, deadline);
    for (int x : roots) {
      enumerator.enumerate_root_child(root, x, limit, found);
      if (found.size() >= limit || deadline.hit()) break;
    }
  } else {
    std::vector<std::vector<std::vector<int>>> per_root(roots.size());
    std::vector<std::unique_ptr<Enumerator>> enumerators;
    for (unsigned t = 0; t < options.threads; ++t) {
      enumerators.push_back(std::make_unique<Enumerator>(p, optimum, deadline));
    }
    run_workers(options.threads, roots.size(), [&](unsigned worker, std::size_t job) {
      enumerators[worker]->enumerate_root_child(root, roots[job], limit, per_root[job]);
    });
    for (auto& chunk : per_root) {
      for (auto& order : chunk) {
        if (found.size() < limit) found.push_back(std::move(order));
      }
    }
  }

  result.exhausted = found.size() <= options.solution_cap && !deadline.hit();
  if (found.size() > options.solution_cap) found.resize(options.solution_cap);
  if (found.empty()) found.push_back(incumbent.order);
  for (const auto& order : found) result.solutions.push_back(to_ranking(instance, order));
  return result;
}

}  // namespace reqprio
