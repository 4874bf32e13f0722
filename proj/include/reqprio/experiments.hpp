#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reqprio/elicitation.hpp"
#include "reqprio/model.hpp"

namespace reqprio {

struct SyntheticDatasetSpec {
  std::size_t n_requirements = 25;
  std::size_t n_priority_levels = 5;
  double dependency_density = 0.1;
  std::uint64_t seed = 1;
  /// Probability that a requirement's level is shifted one step away from
  /// the level its gold position suggests.
  double priority_noise = 0.25;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

/// "n=25,levels=5,density=0.1,seed=7,noise=0.25"; omitted keys keep defaults.
SyntheticDatasetSpec parse_synthetic_spec(std::string_view text);

struct SyntheticDataset {
  std::vector<Requirement> requirements;
  std::vector<Dependency> dependencies;
  Ranking gold;

  Project to_project() const;
};

/// Deterministic in `spec`: a uniformly random gold ranking, priority levels
/// from gold position (plus noise), and dependencies sampled forward along the
/// gold order with probability `dependency_density` per pair.
SyntheticDataset generate_dataset(const SyntheticDatasetSpec& spec);

struct ExperimentConfig {
  std::vector<std::size_t> budgets{0, 25, 50, 100};
  std::vector<double> error_rates{0.0, 0.05, 0.10, 0.20};
  std::size_t repetitions = 20;
  std::uint64_t base_seed = 0;
  std::size_t solution_cap = 50;
  /// Runs executed concurrently; output order does not depend on it.
  unsigned workers = 1;
  /// Measure wall time per run. Off by default so that identical configs
  /// produce identical CSV bytes.
  bool record_wall_time = false;

  void validate() const;
};

struct RunRecord {
  std::size_t run_id = 0;
  std::size_t budget = 0;
  double error_rate = 0.0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::size_t elicited_pairs = 0;
  Rational final_cost;
  std::size_t disagreement_gs = 0;
  double avg_distance_gs = 0.0;
  SessionStatus status = SessionStatus::kActive;
  std::int64_t wall_time_ms = 0;
};

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t budget, double error_rate,
                          std::size_t repetition);

/// One elicitation run per (budget, error rate, repetition), each driven by a
/// SimulatedAnalyst on the project's gold standard. Records are ordered by
/// budget, then error rate, then repetition.
///
/// Throws ValidationError if the project has no gold standard, InfeasibleError
/// if its hard constraints are cyclic.
std::vector<RunRecord> run_experiment(const Project& project, const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader =
    "run_id,budget,error_rate,repetition,seed,elicited_pairs,final_cost,disagreement_gs,"
    "avg_distance_gs,status,wall_time_ms";

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Median over the records matching (budget, error_rate).
struct GroupSummary {
  std::size_t budget = 0;
  double error_rate = 0.0;
  std::size_t runs = 0;
  double median_disagreement = 0.0;
  double median_avg_distance = 0.0;
  double median_elicited = 0.0;
};

std::vector<GroupSummary> summarize(const std::vector<RunRecord>& records);

double median(std::vector<double> values);

}  // namespace reqprio
