#include <doctest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "reqprio/experiments.hpp"

using namespace reqprio;

namespace {

std::string csv_of(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.budgets = {0, 10};
  c.error_rates = {0.0, 0.2};
  c.repetitions = 3;
  c.base_seed = 5;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("synthetic dataset options parse from key=value lists") {
  auto s = parse_synthetic_spec("n=12,levels=3,density=0.2,seed=9");
  CHECK(s.n_requirements == 12);
  CHECK(s.n_priority_levels == 3);
  CHECK(s.dependency_density == 0.2);
  CHECK(s.seed == 9);
  CHECK(parse_synthetic_spec("").n_requirements == 25);
  CHECK_THROWS_AS(parse_synthetic_spec("n=abc"), ValidationError);
  CHECK_THROWS_AS(parse_synthetic_spec("size=3"), ValidationError);
  CHECK_THROWS_AS(parse_synthetic_spec("n=70"), ValidationError);
  CHECK_THROWS_AS(parse_synthetic_spec("n=5,levels=6"), ValidationError);
  CHECK_THROWS_AS(parse_synthetic_spec("density=1.5"), ValidationError);
}

TEST_CASE("generated datasets are valid, deterministic and consistent with gold") {
  SyntheticDatasetSpec spec;
  auto a = generate_dataset(spec);
  auto b = generate_dataset(spec);
  CHECK(a.requirements == b.requirements);
  CHECK(a.dependencies == b.dependencies);
  CHECK(a.gold == b.gold);
  auto project = a.to_project();
  CHECK(project.validate().empty());
  CHECK(a.requirements.size() == 25);
  for (const auto& d : a.dependencies) CHECK(a.gold.precedes(d.depends_on, d.requirement));
  std::set<int> levels;
  for (const auto& r : a.requirements) levels.insert(r.priority_level);
  CHECK(*levels.begin() >= 1);
  CHECK(*levels.rbegin() <= 5);

  spec.seed = 2;
  CHECK_FALSE(generate_dataset(spec).gold == a.gold);
}

TEST_CASE("seeds differ across cells and repetitions") {
  std::set<std::uint64_t> seeds;
  for (std::size_t b : {0, 25, 50})
    for (double e : {0.0, 0.1})
      for (std::size_t r = 0; r < 10; ++r) seeds.insert(derive_seed(0, b, e, r));
  CHECK(seeds.size() == 60);
  CHECK(derive_seed(1, 0, 0.0, 0) != derive_seed(0, 0, 0.0, 0));
}

TEST_CASE("records are ordered and respect the budget") {
  auto project = generate_dataset(parse_synthetic_spec("n=10,seed=3")).to_project();
  auto records = run_experiment(project, small_config());
  REQUIRE(records.size() == 12);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].run_id == i);
    CHECK(records[i].elicited_pairs <= records[i].budget);
    CHECK(records[i].status != SessionStatus::kActive);
    CHECK(records[i].wall_time_ms == 0);
  }
  CHECK(records[0].budget == 0);
  CHECK(records[3].error_rate == 0.2);
  CHECK(records[6].budget == 10);
  CHECK(records[7].repetition == 1);
}

TEST_CASE("csv output is byte-identical across runs and worker counts") {
  auto project = generate_dataset(parse_synthetic_spec("n=10,seed=3")).to_project();
  auto config = small_config();
  const auto first = csv_of(run_experiment(project, config));
  CHECK(first == csv_of(run_experiment(project, config)));
  config.workers = 3;
  CHECK(first == csv_of(run_experiment(project, config)));
  CHECK(first.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
}

TEST_CASE("worked example with an error-free analyst recovers the gold standard") {
  ExperimentConfig c;
  c.budgets = {100};
  c.error_rates = {0.0};
  c.repetitions = 2;
  auto records = run_experiment(fixtures::worked_example(), c);
  for (const auto& r : records) {
    CHECK(r.status == SessionStatus::kConverged);
    CHECK(r.disagreement_gs == 0);
    CHECK(r.elicited_pairs == 2);
  }
}

TEST_CASE("experiments need a gold standard and a sane config") {
  auto p = fixtures::worked_example();
  p.gold_standard.reset();
  CHECK_THROWS_AS(run_experiment(p, small_config()), ValidationError);
  auto c = small_config();
  c.error_rates = {1.5};
  CHECK_THROWS_AS(run_experiment(fixtures::worked_example(), c), ValidationError);
  c = small_config();
  c.repetitions = 0;
  CHECK_THROWS_AS(run_experiment(fixtures::worked_example(), c), ValidationError);
}

TEST_CASE("hard cycles make an experiment infeasible") {
  auto p = fixtures::worked_example();
  ConstraintGraph g("Law");
  g.add_edge("R1", "R2", Weight::hard());
  g.add_edge("R2", "R1", Weight::hard());
  p.extra_graphs.push_back(g);
  CHECK_THROWS_AS(run_experiment(p, small_config()), InfeasibleError);
}

TEST_CASE("median and summaries") {
  CHECK(median({}) == 0.0);
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  auto project = generate_dataset(parse_synthetic_spec("n=10,seed=3")).to_project();
  auto groups = summarize(run_experiment(project, small_config()));
  REQUIRE(groups.size() == 4);
  CHECK(groups[0].budget == 0);
  CHECK(groups[0].runs == 3);
  CHECK(groups[0].median_elicited == 0.0);
}

}
