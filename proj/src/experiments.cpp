#include "reqprio/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <limits>
#include <chrono>
#include <map>
#include <ostream>
#include <random>
#include <thread>

#include "reqprio/analyst.hpp"
#include "reqprio/metrics.hpp"
#include "reqprio/solver.hpp"

namespace reqprio {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Unbiased draw from [0, bound).
std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

std::string shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("synthetic", "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

RunRecord run_one(const Project& project, const ExperimentConfig& config, std::size_t budget,
                  double error_rate, std::size_t repetition) {
  RunRecord rec;
  rec.budget = budget;
  rec.error_rate = error_rate;
  rec.repetition = repetition;
  rec.seed = derive_seed(config.base_seed, budget, error_rate, repetition);

  const auto start = std::chrono::steady_clock::now();
  SessionOptions options;
  options.max_eli_pair = budget;
  options.solve.solution_cap = config.solution_cap;
  Session session(project, options);
  SimulatedAnalyst analyst(*project.gold_standard, error_rate, rec.seed);
  session.step();
  while (session.status() == SessionStatus::kActive) {
    std::vector<AnalystResponse> responses;
    for (const auto& q : session.pending_queries()) responses.push_back(analyst.answer(q));
    session.submit_responses(responses);
    session.step();
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;

  const Ranking ranking = session.final_ranking();
  rec.elicited_pairs = session.eli_pair();
  rec.final_cost = session.last_result()->cost;
  rec.disagreement_gs = disagreement(*project.gold_standard, ranking);
  rec.avg_distance_gs = average_distance(ranking, *project.gold_standard);
  rec.status = session.status();
  if (config.record_wall_time) {
    rec.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }
  return rec;
}

}  // namespace

void SyntheticDatasetSpec::validate() const {
  std::vector<Issue> issues;
  if (n_requirements == 0) issues.push_back({"n", "need at least one requirement"});
  if (n_requirements > 64) issues.push_back({"n", "at most 64 requirements"});
  if (n_priority_levels == 0 || n_priority_levels > n_requirements) {
    issues.push_back({"levels", "levels must lie in [1, n]"});
  }
  if (!(dependency_density >= 0.0 && dependency_density <= 1.0)) {
    issues.push_back({"density", "density must lie in [0, 1]"});
  }
  if (!(priority_noise >= 0.0 && priority_noise <= 1.0)) {
    issues.push_back({"noise", "noise must lie in [0, 1]"});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

SyntheticDatasetSpec parse_synthetic_spec(std::string_view text) {
  SyntheticDatasetSpec spec;
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("synthetic", "expected key=value, got '" + std::string(item) + "'");
    }
    auto key = item.substr(0, eq);
    auto value = item.substr(eq + 1);
    if (key == "n") spec.n_requirements = parse_number<std::size_t>(key, value);
    else if (key == "levels") spec.n_priority_levels = parse_number<std::size_t>(key, value);
    else if (key == "density") spec.dependency_density = parse_number<double>(key, value);
    else if (key == "seed") spec.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "noise") spec.priority_noise = parse_number<double>(key, value);
    else throw ValidationError("synthetic", "unknown key '" + std::string(key) + "'");
  }
  spec.validate();
  return spec;
}

Project SyntheticDataset::to_project() const {
  Project project;
  project.requirements = requirements;
  project.dependencies = dependencies;
  project.gold_standard = gold;
  return project;
}

SyntheticDataset generate_dataset(const SyntheticDatasetSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n_requirements;
  const auto levels = static_cast<int>(spec.n_priority_levels);

  std::vector<std::string> order;
  for (std::size_t i = 1; i <= n; ++i) order.push_back("R" + std::to_string(i));
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[below(rng, i + 1)]);

  SyntheticDataset data;
  data.requirements.resize(n);
  for (std::size_t i = 1; i <= n; ++i) data.requirements[i - 1].id = "R" + std::to_string(i);
  for (std::size_t pos = 0; pos < n; ++pos) {
    int level = static_cast<int>(pos * spec.n_priority_levels / n) + 1;
    if (unit(rng) < spec.priority_noise) level += (rng() & 1) ? 1 : -1;
    level = std::clamp(level, 1, levels);
    // "R<k>" lives at index k - 1.
    auto& req = data.requirements[std::stoul(order[pos].substr(1)) - 1];
    req.priority_level = level;
    req.title = "Synthetic requirement " + req.id;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(rng) < spec.dependency_density) data.dependencies.push_back({order[j], order[i]});
    }
  }
  data.gold = Ranking(std::move(order));
  return data;
}

void ExperimentConfig::validate() const {
  std::vector<Issue> issues;
  if (budgets.empty()) issues.push_back({"budgets", "no budgets"});
  if (error_rates.empty()) issues.push_back({"error_rates", "no error rates"});
  for (double e : error_rates) {
    if (!(e >= 0.0 && e <= 1.0)) issues.push_back({"error_rates", "error rate " + shortest(e) + " outside [0, 1]"});
  }
  if (repetitions == 0) issues.push_back({"repetitions", "need at least one repetition"});
  if (solution_cap == 0) issues.push_back({"solution_cap", "solution cap must be positive"});
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t budget, double error_rate,
                          std::size_t repetition) {
  std::uint64_t h = mix(budget);
  h = mix(h ^ std::bit_cast<std::uint64_t>(error_rate));
  h = mix(h ^ repetition);
  return base_seed ^ h;
}

std::vector<RunRecord> run_experiment(const Project& project, const ExperimentConfig& config) {
  config.validate();
  project.ensure_valid();
  if (!project.gold_standard) throw ValidationError("/gold_standard", "experiments need a gold standard");
  {
    auto graphs = project.source_graphs();
    auto instance = SolverInstance::from_graphs(project.canonical_ids(), graphs);
    if (auto cycle = find_hard_cycle(instance)) throw InfeasibleError(std::move(*cycle));
  }

  struct Job {
    std::size_t budget;
    double error_rate;
    std::size_t repetition;
  };
  std::vector<Job> jobs;
  for (auto budget : config.budgets) {
    for (auto error : config.error_rates) {
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) jobs.push_back({budget, error, rep});
    }
  }

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      records[i] = run_one(project, config, jobs[i].budget, jobs[i].error_rate, jobs[i].repetition);
      records[i].run_id = i;
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(jobs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.run_id << ',' << r.budget << ',' << shortest(r.error_rate) << ',' << r.repetition << ','
        << r.seed << ',' << r.elicited_pairs << ',' << r.final_cost.to_string() << ','
        << r.disagreement_gs << ',' << shortest(r.avg_distance_gs) << ',' << to_string(r.status) << ','
        << r.wall_time_ms << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

std::vector<GroupSummary> summarize(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::size_t, double>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) groups[{r.budget, r.error_rate}].push_back(&r);
  std::vector<GroupSummary> out;
  for (const auto& [key, runs] : groups) {
    std::vector<double> dis;
    std::vector<double> dist;
    std::vector<double> eli;
    for (const auto* r : runs) {
      dis.push_back(static_cast<double>(r->disagreement_gs));
      dist.push_back(r->avg_distance_gs);
      eli.push_back(static_cast<double>(r->elicited_pairs));
    }
    out.push_back({key.first, key.second, runs.size(), median(dis), median(dist), median(eli)});
  }
  return out;
}

}  // namespace reqprio
