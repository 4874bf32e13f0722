// reqprio: requirements prioritization from the command line.
//
//   reqprio check <project>
//   reqprio rank <project> [--cap N]
//   reqprio elicit <project> [--budget N] [--resume <session>] [--save <session>]
//   reqprio simulate [<project>] [--synthetic n=25,...] [--budgets 0,25] [--errors 0,0.1]
//                    [--reps N] [--seed S] [--out runs.csv]
//   reqprio serve [--addr host:port] [--data dir]
//
// Exit codes: 0 success, 1 validation, 2 infeasible, 3 runtime.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#include <CLI11.hpp>

#include "reqprio/elicitation.hpp"
#include "reqprio/experiments.hpp"
#include "reqprio/io.hpp"
#include "reqprio/metrics.hpp"
#include "reqprio/service.hpp"
#include "reqprio/solver.hpp"

namespace {

using namespace reqprio;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitRuntime = 3;

bool use_color() { return std::getenv("NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO); }

std::string bold(const std::string& text) {
  return use_color() ? "\033[1m" + text + "\033[0m" : text;
}

void print_issues(const ValidationError& e) {
  for (const auto& issue : e.issues()) {
    std::cerr << "  " << (issue.location.empty() ? "-" : issue.location) << ": " << issue.message << "\n";
  }
}

void print_ranking(const Project& project, const Ranking& ranking) {
  std::cout << "ranking: " << ranking.to_string() << "\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& id = ranking.order()[i];
    const auto* r = project.find(id);
    std::cout << "  " << (i + 1) << ". " << bold(id);
    if (r && !r->title.empty()) std::cout << "  " << r->title;
    std::cout << "\n";
  }
}

void print_gold_metrics(const Project& project, const Ranking& ranking) {
  if (!project.gold_standard) return;
  std::cout << "disagreement_gs: " << disagreement(*project.gold_standard, ranking) << "\n"
            << "avg_distance_gs: " << average_distance(ranking, *project.gold_standard) << "\n";
}

void print_outcome(const Session& session) {
  const auto& result = *session.last_result();
  const Ranking ranking = session.final_ranking();
  std::cout << "status: " << to_string(session.status()) << "\n"
            << "cost: " << result.cost.to_string() << "\n"
            << "optima: " << result.solutions.size() << (result.exhausted ? " (complete)" : " (truncated)")
            << "\n"
            << "elicited: " << session.eli_pair() << "/" << session.max_eli_pair() << "\n";
  print_gold_metrics(session.project(), ranking);
  print_ranking(session.project(), ranking);
}

int cmd_check(const std::string& path) {
  Project project = load_project_file(path);
  auto graphs = project.source_graphs();
  auto instance = SolverInstance::from_graphs(project.canonical_ids(), graphs);
  if (auto cycle = find_hard_cycle(instance)) throw InfeasibleError(*cycle);
  std::cout << "ok: " << project.requirements.size() << " requirements, "
            << project.dependencies.size() << " dependencies, " << instance.soft_edges.size()
            << " soft and " << instance.hard_edges.size() << " hard constraints"
            << (project.gold_standard ? ", gold standard present" : "") << "\n";
  return kExitOk;
}

int cmd_rank(const std::string& path, std::size_t cap) {
  SessionOptions options;
  options.max_eli_pair = 0;
  options.solve.solution_cap = cap;
  Session session(load_project_file(path), options);
  session.step();
  print_outcome(session);
  return kExitOk;
}

std::string default_session_path(const std::string& project_path) {
  std::filesystem::path p(project_path);
  p.replace_extension(".session");
  return p.string();
}

int cmd_elicit(const std::optional<std::string>& project_path, std::size_t budget, std::size_t cap,
               const std::optional<std::string>& resume, std::optional<std::string> save) {
  std::optional<Session> session;
  if (resume) {
    session.emplace(load_session_file(*resume));
    if (!save) save = *resume;
  } else {
    if (!project_path) throw ValidationError("", "elicit needs a project file or --resume");
    SessionOptions options;
    options.max_eli_pair = budget;
    options.solve.solution_cap = cap;
    session.emplace(load_project_file(*project_path), options);
    if (!save) save = default_session_path(*project_path);
  }
  Session& s = *session;
  const Project& project = s.project();

  if (s.status() == SessionStatus::kActive && s.pending_queries().empty()) s.step();
  while (s.status() == SessionStatus::kActive) {
    std::vector<AnalystResponse> answers;
    bool quit = false;
    const auto queries = s.pending_queries();
    for (std::size_t i = 0; i < queries.size() && !quit; ++i) {
      const auto& pair = queries[i].pair;
      std::cout << "\n[budget " << s.eli_pair() + answers.size() << "/" << s.max_eli_pair() << " | "
                << s.last_result()->solutions.size() << (s.last_result()->exhausted ? "" : "+")
                << " tied optima | question " << (i + 1) << "/" << queries.size() << "]\n"
                << "Which should come first?\n"
                << "  1) " << bold(pair.first()) << "  " << project.find(pair.first())->title << "\n"
                << "  2) " << bold(pair.second()) << "  " << project.find(pair.second())->title << "\n";
      for (;;) {
        std::cout << "(1/2/u/q) > " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) {
          quit = true;
          break;
        }
        if (line == "1") answers.push_back({pair, Verdict::kFirstPrecedes});
        else if (line == "2") answers.push_back({pair, Verdict::kSecondPrecedes});
        else if (line == "u") answers.push_back({pair, Verdict::kUndecided});
        else if (line == "q") quit = true;
        else continue;
        break;
      }
    }
    s.submit_responses(answers);
    if (quit) {
      save_session_file(*save, s);
      std::cout << "\nsaved session to " << *save << "\n";
      return kExitOk;
    }
    s.step();
  }
  std::cout << "\n";
  print_outcome(s);
  if (save) save_session_file(*save, s);
  return kExitOk;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    T value{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ValidationError(what, "cannot parse '" + item + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw ValidationError(what, "empty list");
  return out;
}

struct SimulateArgs {
  std::optional<std::string> project;
  std::optional<std::string> synthetic;
  std::string budgets = "0,25,50,100";
  std::string errors = "0,0.05,0.1,0.2";
  std::size_t reps = 20;
  std::uint64_t seed = 0;
  std::size_t cap = 50;
  unsigned workers = 1;
  bool timing = false;
  std::optional<std::string> out;
};

int cmd_simulate(const SimulateArgs& args) {
  Project project;
  if (args.synthetic) {
    if (args.project) throw ValidationError("", "give either a project or --synthetic, not both");
    project = generate_dataset(parse_synthetic_spec(*args.synthetic)).to_project();
  } else if (args.project) {
    project = load_project_file(*args.project);
  } else {
    throw ValidationError("", "simulate needs a project file or --synthetic");
  }
  ExperimentConfig config;
  config.budgets = parse_list<std::size_t>(args.budgets, "--budgets");
  config.error_rates = parse_list<double>(args.errors, "--errors");
  config.repetitions = args.reps;
  config.base_seed = args.seed;
  config.solution_cap = args.cap;
  config.workers = args.workers;
  config.record_wall_time = args.timing;
  auto records = run_experiment(project, config);

  if (args.out) {
    std::ostringstream csv;
    write_csv(csv, records);
    write_file_atomic(*args.out, csv.str());
  } else {
    write_csv(std::cout, records);
  }
  std::cerr << "budget  error  runs  median_dis  median_ad  median_elicited\n";
  for (const auto& g : summarize(records)) {
    std::cerr << g.budget << "\t" << g.error_rate << "\t" << g.runs << "\t" << g.median_disagreement
              << "\t" << g.median_avg_distance << "\t" << g.median_elicited << "\n";
  }
  return kExitOk;
}

int cmd_serve(std::string addr, const std::optional<std::string>& data) {
  if (addr.empty()) {
    const char* env = std::getenv("REQPRIO_ADDR");
    addr = env ? env : "127.0.0.1:8080";
  }
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ValidationError("--addr", "expected host:port");
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));
  ServiceConfig config;
  if (data) config.data_dir = *data;
  Service service(config);
  std::cerr << "reqprio: listening on " << host << ":" << port << "\n";
  if (!service.listen(host, port)) {
    std::cerr << "reqprio: cannot listen on " << addr << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive requirements prioritization"};
  app.require_subcommand(1);

  std::string project_path;
  std::optional<std::string> optional_project;
  std::size_t cap = 50;
  std::size_t budget = 100;
  std::optional<std::string> resume;
  std::optional<std::string> save;
  SimulateArgs sim;
  std::string addr;
  std::optional<std::string> data_dir;

  auto* check = app.add_subcommand("check", "Validate a project file");
  check->add_option("project", project_path, "Project file")->required();

  auto* rank = app.add_subcommand("rank", "Non-interactive ranking (no elicitation)");
  rank->add_option("project", project_path, "Project file")->required();
  rank->add_option("--cap", cap, "Maximum optimal rankings to enumerate")->check(CLI::PositiveNumber);

  auto* elicit = app.add_subcommand("elicit", "Interactive elicitation in the terminal");
  elicit->add_option("project", optional_project, "Project file");
  elicit->add_option("--budget", budget, "Maximum number of pairs to elicit");
  elicit->add_option("--cap", cap, "Maximum optimal rankings to enumerate")->check(CLI::PositiveNumber);
  elicit->add_option("--resume", resume, "Resume a saved .session file");
  elicit->add_option("--save", save, "Where to save the session (default: <project>.session)");

  auto* simulate = app.add_subcommand("simulate", "Run the simulated-analyst experiment grid");
  simulate->add_option("project", sim.project, "Project file with a gold standard");
  simulate->add_option("--synthetic", sim.synthetic, "Synthetic dataset, e.g. n=25,levels=5,density=0.1,seed=1");
  simulate->add_option("--budgets", sim.budgets, "Comma-separated elicitation budgets");
  simulate->add_option("--errors", sim.errors, "Comma-separated analyst error rates");
  simulate->add_option("--reps", sim.reps, "Repetitions per cell")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--cap", sim.cap, "Solution cap per solve")->check(CLI::PositiveNumber);
  simulate->add_option("--workers", sim.workers, "Concurrent runs")->check(CLI::PositiveNumber);
  simulate->add_flag("--timing", sim.timing, "Record wall time per run (makes output non-reproducible)");
  simulate->add_option("--out", sim.out, "CSV output file (default: stdout)");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--addr", addr, "host:port (default: $REQPRIO_ADDR or 127.0.0.1:8080)");
  serve->add_option("--data", data_dir, "Directory for persisted sessions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*check) return cmd_check(project_path);
    if (*rank) return cmd_rank(project_path, cap);
    if (*elicit) return cmd_elicit(optional_project, budget, cap, resume, save);
    if (*simulate) return cmd_simulate(sim);
    if (*serve) return cmd_serve(addr, data_dir);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input:\n";
    print_issues(e);
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const UnsupportedVersionError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
