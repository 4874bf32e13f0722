#include "reqprio/io.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace reqprio {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Collects schema findings with their JSON-pointer locations.
class Reader {
 public:
  std::vector<Issue> issues;

  void fail(const std::string& at, std::string message) {
    issues.push_back({at.empty() ? "/" : at, std::move(message)});
  }

  // True if `node` is an object whose keys all appear in `allowed` and which
  // has every key in `required`.
  bool object(const json& node, const std::string& at, std::initializer_list<const char*> required,
              std::initializer_list<const char*> optional = {}) {
    if (!node.is_object()) {
      fail(at, "expected an object");
      return false;
    }
    bool ok = true;
    for (const char* key : required) {
      if (!node.contains(key)) {
        fail(at + "/" + key, "missing field");
        ok = false;
      }
    }
    for (const auto& [key, value] : node.items()) {
      bool known = false;
      for (const char* k : required) known = known || key == k;
      for (const char* k : optional) known = known || key == k;
      if (!known) {
        fail(at + "/" + key, "unknown field");
        ok = false;
      }
    }
    return ok;
  }

  std::string string(const json& node, const std::string& at) {
    if (!node.is_string()) {
      fail(at, "expected a string");
      return {};
    }
    return node.get<std::string>();
  }

  std::optional<std::int64_t> integer(const json& node, const std::string& at) {
    if (!node.is_number_integer()) {
      fail(at, "expected an integer");
      return std::nullopt;
    }
    return node.get<std::int64_t>();
  }

  bool boolean(const json& node, const std::string& at) {
    if (!node.is_boolean()) {
      fail(at, "expected true or false");
      return false;
    }
    return node.get<bool>();
  }

  const json* array(const json& node, const std::string& at) {
    if (!node.is_array()) {
      fail(at, "expected an array");
      return nullptr;
    }
    return &node;
  }

  std::optional<Rational> rational(const json& node, const std::string& at) {
    std::optional<Rational> value;
    if (node.is_number_integer()) value = Rational(node.get<std::int64_t>());
    else if (node.is_number_float()) value = Rational::from_double(node.get<double>());
    else if (node.is_string()) value = Rational::parse(node.get<std::string>());
    if (!value) fail(at, "expected a number or a \"p/q\" fraction");
    return value;
  }

  std::vector<std::string> id_list(const json& node, const std::string& at) {
    std::vector<std::string> ids;
    if (!array(node, at)) return ids;
    for (std::size_t i = 0; i < node.size(); ++i) {
      ids.push_back(string(node[i], at + "/" + std::to_string(i)));
    }
    return ids;
  }

  std::optional<IdPair> pair(const json& node, const std::string& at) {
    auto ids = id_list(node, at);
    if (ids.size() != 2 || ids[0] == ids[1]) {
      fail(at, "expected two distinct ids");
      return std::nullopt;
    }
    return IdPair(ids[0], ids[1]);
  }

  void throw_if_failed() {
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

void check_version(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version")) return;  // reported by the schema pass
  const auto& v = doc["schema_version"];
  if (v.is_number_integer() && v.get<std::int64_t>() != kSchemaVersion) {
    throw UnsupportedVersionError("unsupported schema_version " + v.dump() + " (this build reads " +
                                  std::to_string(kSchemaVersion) + ")");
  }
}

Project read_project(Reader& r, const json& doc, const std::string& at, bool versioned) {
  Project project;
  if (versioned) {
    if (!r.object(doc, at, {"schema_version", "requirements"},
                  {"dependencies", "gold_standard", "extra_graphs"})) {
      if (!doc.is_object()) return project;
    }
    if (doc.contains("schema_version")) r.integer(doc["schema_version"], at + "/schema_version");
  } else if (!r.object(doc, at, {"requirements"}, {"dependencies", "gold_standard", "extra_graphs"})) {
    if (!doc.is_object()) return project;
  }

  if (doc.contains("requirements") && r.array(doc["requirements"], at + "/requirements")) {
    const auto& list = doc["requirements"];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string item = at + "/requirements/" + std::to_string(i);
      if (!r.object(list[i], item, {"id", "priority"}, {"title"}) && !list[i].is_object()) continue;
      Requirement req;
      if (list[i].contains("id")) req.id = r.string(list[i]["id"], item + "/id");
      if (list[i].contains("title")) req.title = r.string(list[i]["title"], item + "/title");
      if (list[i].contains("priority")) {
        auto level = r.integer(list[i]["priority"], item + "/priority");
        if (level && (*level < 1 || *level > std::numeric_limits<int>::max())) {
          r.fail(item + "/priority", "priority must be a positive integer");
        } else if (level) {
          req.priority_level = static_cast<int>(*level);
        }
      }
      project.requirements.push_back(std::move(req));
    }
  }

  if (doc.contains("dependencies") && r.array(doc["dependencies"], at + "/dependencies")) {
    const auto& list = doc["dependencies"];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string item = at + "/dependencies/" + std::to_string(i);
      if (!r.object(list[i], item, {"requirement", "depends_on"}) && !list[i].is_object()) continue;
      Dependency dep;
      if (list[i].contains("requirement")) dep.requirement = r.string(list[i]["requirement"], item + "/requirement");
      if (list[i].contains("depends_on")) dep.depends_on = r.string(list[i]["depends_on"], item + "/depends_on");
      project.dependencies.push_back(std::move(dep));
    }
  }

  if (doc.contains("gold_standard")) {
    auto ids = r.id_list(doc["gold_standard"], at + "/gold_standard");
    try {
      project.gold_standard = Ranking(std::move(ids));
    } catch (const ValidationError& e) {
      r.fail(at + "/gold_standard", e.issues().front().message);
    }
  }

  if (doc.contains("extra_graphs") && r.array(doc["extra_graphs"], at + "/extra_graphs")) {
    const auto& list = doc["extra_graphs"];
    for (std::size_t g = 0; g < list.size(); ++g) {
      const std::string item = at + "/extra_graphs/" + std::to_string(g);
      if (!r.object(list[g], item, {"name", "edges"}, {"hard"}) && !list[g].is_object()) continue;
      ConstraintGraph graph(list[g].contains("name") ? r.string(list[g]["name"], item + "/name") : "");
      const bool hard = list[g].contains("hard") && r.boolean(list[g]["hard"], item + "/hard");
      if (list[g].contains("edges") && r.array(list[g]["edges"], item + "/edges")) {
        const auto& edges = list[g]["edges"];
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const std::string edge_at = item + "/edges/" + std::to_string(e);
          if (!r.object(edges[e], edge_at, {"before", "after"}, {"weight"}) && !edges[e].is_object()) continue;
          std::string before = edges[e].contains("before") ? r.string(edges[e]["before"], edge_at + "/before") : "";
          std::string after = edges[e].contains("after") ? r.string(edges[e]["after"], edge_at + "/after") : "";
          Weight weight = hard ? Weight::hard() : Weight{};
          if (edges[e].contains("weight")) {
            if (hard) {
              r.fail(edge_at + "/weight", "edges of a hard graph take no weight");
            } else if (auto value = r.rational(edges[e]["weight"], edge_at + "/weight")) {
              if (*value <= Rational(0)) r.fail(edge_at + "/weight", "weight must be positive");
              else weight = Weight::soft(*value);
            }
          }
          if (before == after) {
            r.fail(edge_at, "self-loop on '" + before + "'");
            continue;
          }
          if (graph.find(before, after)) {
            r.fail(edge_at, "duplicate edge (" + before + ", " + after + ")");
            continue;
          }
          graph.add_edge(before, after, weight);
        }
      }
      project.extra_graphs.push_back(std::move(graph));
    }
  }
  return project;
}

void validate_into(Reader& r, const Project& project, const std::string& at) {
  for (auto& issue : project.validate()) r.fail(at + issue.location, issue.message);
}

ordered_json pair_to_json(const IdPair& pair) { return ordered_json::array({pair.first(), pair.second()}); }

ordered_json ranking_to_json(const Ranking& ranking) { return ordered_json(ranking.order()); }

}  // namespace

ordered_json rational_to_json(const Rational& value) {
  if (value.is_integer()) return value.num();
  return value.to_string();
}

Project project_from_json(const json& doc) {
  check_version(doc);
  Reader r;
  Project project = read_project(r, doc, "", true);
  r.throw_if_failed();
  validate_into(r, project, "");
  r.throw_if_failed();
  return project;
}

Project load_project(std::string_view text) { return project_from_json(parse_json(text)); }

ordered_json project_to_json(const Project& project) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["requirements"] = ordered_json::array();
  for (const auto& r : project.requirements) {
    doc["requirements"].push_back({{"id", r.id}, {"title", r.title}, {"priority", r.priority_level}});
  }
  doc["dependencies"] = ordered_json::array();
  for (const auto& d : project.dependencies) {
    doc["dependencies"].push_back({{"requirement", d.requirement}, {"depends_on", d.depends_on}});
  }
  if (project.gold_standard) doc["gold_standard"] = ranking_to_json(*project.gold_standard);
  if (!project.extra_graphs.empty()) {
    doc["extra_graphs"] = ordered_json::array();
    for (const auto& g : project.extra_graphs) {
      // A graph is written as hard only when every edge is hard.
      bool hard = !g.empty();
      for (const auto& e : g.edges()) hard = hard && e.weight.is_hard();
      ordered_json graph{{"name", g.name()}};
      if (hard) graph["hard"] = true;
      graph["edges"] = ordered_json::array();
      for (const auto& e : g.edges()) {
        if (!hard && e.weight.is_hard()) {
          throw ValidationError("/extra_graphs", "graph '" + g.name() + "' mixes hard and soft edges");
        }
        ordered_json edge{{"before", e.before}, {"after", e.after}};
        if (!hard) edge["weight"] = rational_to_json(e.weight.value());
        graph["edges"].push_back(std::move(edge));
      }
      doc["extra_graphs"].push_back(std::move(graph));
    }
  }
  return doc;
}

std::string dump_project(const Project& project) { return project_to_json(project).dump(2) + "\n"; }

// --- sessions -------------------------------------------------------------

std::string dump_session(const Session& session) {
  const auto& s = session.state();
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  ordered_json project = project_to_json(s.project);
  project.erase("schema_version");
  doc["project"] = std::move(project);
  ordered_json options{{"max_eli_pair", s.options.max_eli_pair},
                       {"solution_cap", s.options.solve.solution_cap},
                       {"threads", s.options.solve.threads}};
  options["time_budget_ms"] = s.options.solve.time_budget
                                  ? ordered_json(s.options.solve.time_budget->count())
                                  : ordered_json(nullptr);
  doc["options"] = std::move(options);
  doc["status"] = std::string(to_string(s.status));
  doc["iteration"] = s.iteration;
  doc["eli_pair"] = s.eli_pair;
  doc["eli_graph"] = ordered_json::array();
  for (const auto& e : s.eli_graph.edges()) {
    doc["eli_graph"].push_back({{"before", e.before}, {"after", e.after},
                                {"weight", rational_to_json(e.weight.value())}});
  }
  doc["asked_pairs"] = ordered_json::array();
  for (const auto& p : s.asked_pairs) doc["asked_pairs"].push_back(pair_to_json(p));
  doc["pending_queries"] = ordered_json::array();
  for (const auto& q : s.pending_queries) {
    doc["pending_queries"].push_back({{"pair", pair_to_json(q.pair)}, {"frequency", q.frequency}});
  }
  if (s.last_result) {
    ordered_json result{{"cost", rational_to_json(s.last_result->cost)},
                        {"exhausted", s.last_result->exhausted},
                        {"optimal", s.last_result->optimal}};
    result["solutions"] = ordered_json::array();
    for (const auto& sol : s.last_result->solutions) result["solutions"].push_back(ranking_to_json(sol));
    doc["last_result"] = std::move(result);
  } else {
    doc["last_result"] = nullptr;
  }
  doc["history"] = ordered_json::array();
  for (const auto& h : s.history) {
    doc["history"].push_back({{"pair", pair_to_json(h.query.pair)},
                              {"frequency", h.query.frequency},
                              {"verdict", std::string(to_string(h.response.verdict))},
                              {"iteration", h.iteration}});
  }
  doc["warnings"] = s.warnings;
  return doc.dump(2) + "\n";
}

Session load_session(std::string_view text) {
  const json doc = parse_json(text);
  check_version(doc);
  Reader r;
  if (!r.object(doc, "", {"schema_version", "project", "options", "status", "iteration", "eli_pair",
                          "eli_graph", "asked_pairs", "pending_queries", "last_result", "history",
                          "warnings"})) {
    r.throw_if_failed();
  }
  r.integer(doc["schema_version"], "/schema_version");

  Session::State s;
  s.project = read_project(r, doc["project"], "/project", false);

  const auto& options = doc["options"];
  if (r.object(options, "/options", {"max_eli_pair", "solution_cap", "threads", "time_budget_ms"})) {
    if (auto v = r.integer(options["max_eli_pair"], "/options/max_eli_pair"); v && *v >= 0) {
      s.options.max_eli_pair = static_cast<std::size_t>(*v);
    }
    if (auto v = r.integer(options["solution_cap"], "/options/solution_cap"); v && *v > 0) {
      s.options.solve.solution_cap = static_cast<std::size_t>(*v);
    } else {
      r.fail("/options/solution_cap", "must be a positive integer");
    }
    if (auto v = r.integer(options["threads"], "/options/threads"); v && *v > 0) {
      s.options.solve.threads = static_cast<unsigned>(*v);
    }
    if (!options["time_budget_ms"].is_null()) {
      if (auto v = r.integer(options["time_budget_ms"], "/options/time_budget_ms"); v && *v > 0) {
        s.options.solve.time_budget = std::chrono::milliseconds(*v);
      }
    }
  }

  auto status = parse_session_status(r.string(doc["status"], "/status"));
  if (!status) r.fail("/status", "unknown status");
  else s.status = *status;
  if (auto v = r.integer(doc["iteration"], "/iteration"); v && *v >= 0) s.iteration = static_cast<std::size_t>(*v);
  if (auto v = r.integer(doc["eli_pair"], "/eli_pair"); v && *v >= 0) s.eli_pair = static_cast<std::size_t>(*v);

  if (r.array(doc["eli_graph"], "/eli_graph")) {
    for (std::size_t i = 0; i < doc["eli_graph"].size(); ++i) {
      const auto& e = doc["eli_graph"][i];
      const std::string at = "/eli_graph/" + std::to_string(i);
      if (!r.object(e, at, {"before", "after", "weight"})) continue;
      auto before = r.string(e["before"], at + "/before");
      auto after = r.string(e["after"], at + "/after");
      auto weight = r.rational(e["weight"], at + "/weight");
      if (before == after || !weight || *weight <= Rational(0)) {
        r.fail(at, "invalid edge");
        continue;
      }
      s.eli_graph.add_edge(before, after, Weight::soft(*weight));
    }
  }
  if (r.array(doc["asked_pairs"], "/asked_pairs")) {
    for (std::size_t i = 0; i < doc["asked_pairs"].size(); ++i) {
      if (auto p = r.pair(doc["asked_pairs"][i], "/asked_pairs/" + std::to_string(i))) s.asked_pairs.insert(*p);
    }
  }
  if (r.array(doc["pending_queries"], "/pending_queries")) {
    for (std::size_t i = 0; i < doc["pending_queries"].size(); ++i) {
      const auto& q = doc["pending_queries"][i];
      const std::string at = "/pending_queries/" + std::to_string(i);
      if (!r.object(q, at, {"pair", "frequency"})) continue;
      auto p = r.pair(q["pair"], at + "/pair");
      auto f = r.integer(q["frequency"], at + "/frequency");
      if (p && f && *f > 0) s.pending_queries.push_back({*p, static_cast<std::size_t>(*f)});
    }
  }
  if (!doc["last_result"].is_null()) {
    const auto& res = doc["last_result"];
    if (r.object(res, "/last_result", {"cost", "exhausted", "optimal", "solutions"})) {
      SolverResult result;
      if (auto c = r.rational(res["cost"], "/last_result/cost")) result.cost = *c;
      result.exhausted = r.boolean(res["exhausted"], "/last_result/exhausted");
      result.optimal = r.boolean(res["optimal"], "/last_result/optimal");
      if (r.array(res["solutions"], "/last_result/solutions")) {
        for (std::size_t i = 0; i < res["solutions"].size(); ++i) {
          const std::string at = "/last_result/solutions/" + std::to_string(i);
          try {
            result.solutions.emplace_back(r.id_list(res["solutions"][i], at));
          } catch (const ValidationError& e) {
            r.fail(at, e.issues().front().message);
          }
        }
      }
      if (result.solutions.empty()) r.fail("/last_result/solutions", "expected at least one solution");
      s.last_result = std::move(result);
    }
  }
  if (r.array(doc["history"], "/history")) {
    for (std::size_t i = 0; i < doc["history"].size(); ++i) {
      const auto& h = doc["history"][i];
      const std::string at = "/history/" + std::to_string(i);
      if (!r.object(h, at, {"pair", "frequency", "verdict", "iteration"})) continue;
      auto p = r.pair(h["pair"], at + "/pair");
      auto f = r.integer(h["frequency"], at + "/frequency");
      auto v = parse_verdict(r.string(h["verdict"], at + "/verdict"));
      auto it = r.integer(h["iteration"], at + "/iteration");
      if (!v) r.fail(at + "/verdict", "unknown verdict");
      if (p && f && v && it && *f >= 0 && *it >= 0) {
        s.history.push_back({{*p, static_cast<std::size_t>(*f)}, {*p, *v}, static_cast<std::size_t>(*it)});
      }
    }
  }
  for (const auto& w : r.id_list(doc["warnings"], "/warnings")) s.warnings.push_back(w);

  r.throw_if_failed();
  validate_into(r, s.project, "/project");
  if (s.last_result) {
    const auto ids = s.project.canonical_ids();
    for (const auto& sol : s.last_result->solutions) {
      if (!sol.covers(ids)) r.fail("/last_result/solutions", "solution does not cover the requirements");
    }
  }
  r.throw_if_failed();
  return Session(std::move(s));
}

// --- files ----------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot replace " + path.string() + ": " + ec.message());
  }
}

Project load_project_file(const std::filesystem::path& path) { return load_project(read_file(path)); }

Session load_session_file(const std::filesystem::path& path) { return load_session(read_file(path)); }

void save_session_file(const std::filesystem::path& path, const Session& session) {
  write_file_atomic(path, dump_session(session));
}

}  // namespace reqprio
