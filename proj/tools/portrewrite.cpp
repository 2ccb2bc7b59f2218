// Command-line front end: validate, analyze, match, step, run, export, gen
// and rules. Documents are read from files or stdin and written to stdout
// unless --out is given.
//
// Exit codes: 0 success, 1 parse or validation error, 2 the result is not a
// graph, 3 conflict freedom or the symmetry condition does not hold.

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <functional>
#include <iostream>
#include <iterator>

#include "portrewrite/examples.hpp"
#include "portrewrite/io.hpp"

using namespace portrewrite;
namespace ex = portrewrite::examples;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNotGraph = 2;
constexpr int kPrecondition = 3;

struct Options {
  std::string rules;
  std::string graph = "-";
  std::string out;
  std::string report;
  std::string mode = "auto";
  std::string format = "json";
  std::string snapshot_dir;
  std::string generator;
  std::string fill = "0";
  std::size_t steps = 1;
  int rows = 1;
  int cols = 1;
  bool allow_unchecked = false;
  bool until_fixpoint = false;
  bool strict_attrs = false;
  bool torus = false;
  bool timings = false;
  bool no_collapse = false;
  bool list = false;
};

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  return io::read_file(path);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    io::write_file(path, content);
}

// A rule file holds either {"rules": [...]} or a single rule.
std::vector<EsrRule> load_rules(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--rules is required");
  auto j = io::parse_text(io::read_file(path));
  if (j.is_object() && j.contains("rules")) return io::rules_from_json(j);
  return {io::rule_from_json(j)};
}

Pregraph load_pregraph(const std::string& path) { return io::graph_from_json(io::parse_text(read_input(path))); }

GraphWitness load_graph(const std::string& path) {
  auto g = load_pregraph(path);
  auto check = validate_graph(g);
  if (!check.ok())
    throw io::ParseError("$", "input is not a graph: " + io::violations_to_json(check.violations).dump());
  return *check.witness;
}

Mode parse_mode(const std::string& s) { return s == "full" ? Mode::Full : Mode::Auto; }

// Symmetry is always checked since auto mode needs it and full mode uses it
// to collapse automorphic matches. Conflict freedom is skipped on request.
RuleSystem prepare(std::vector<EsrRule> rules, const Options& o) {
  RuleSystem rs(std::move(rules));
  rs.verify_symmetry();
  if (!o.allow_unchecked) rs.verify_conflict_freedom();
  return rs;
}

std::vector<AttrValue> parse_fill(const std::string& text) {
  std::vector<AttrValue> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    double v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty()) throw std::invalid_argument("empty value in --fill");
    if (ec == std::errc() && ptr == item.data() + item.size())
      out.push_back(AttrValue::number(v));
    else
      out.push_back(AttrValue::tag(item));
    start = end + 1;
  }
  return out;
}

int cmd_validate(const Options& o) {
  if (o.rules.empty() && o.graph.empty()) throw std::invalid_argument("give --rules, --graph or both");
  Json out = Json::object();
  bool ok = true;
  if (!o.rules.empty()) {
    Json report = Json::object();
    for (const auto& r : load_rules(o.rules)) {
      Json vs = Json::array();
      for (const auto& v : validate_rule(r)) vs.push_back({{"constraint", v.constraint}, {"message", v.message}});
      ok = ok && vs.empty();
      report[r.name] = vs;
    }
    out["rules"] = report;
  }
  if (!o.graph.empty()) {
    auto check = validate_graph(load_pregraph(o.graph));
    ok = ok && check.ok();
    out["graph"] = {{"is_graph", check.ok()}, {"violations", io::violations_to_json(check.violations)}};
  }
  write_output(o.out, io::emit(out));
  return ok ? kOk : kInvalid;
}

int cmd_analyze(const Options& o) {
  auto rules = load_rules(o.rules);
  RuleSystem rs(rules);
  rs.verify_symmetry();
  rs.verify_conflict_freedom();
  const auto& cf = *rs.conflict_freedom();
  Json out = Json::object();
  for (const auto& r : rules) {
    std::set<std::string> partners;
    for (const auto& [a, b] : cf.incompatible) {
      if (a == r.name) partners.insert(b);
      if (b == r.name) partners.insert(a);
    }
    const auto& sym = *rs.symmetry(r.name);
    out[r.name] = {{"symmetry", sym.holds},
                   {"parallel_safe", rs.parallel_safe(r.name)},
                   {"conflicts_with", Json(std::vector<std::string>(partners.begin(), partners.end()))},
                   {"automorphisms", sym.lhs.size()}};
  }
  write_output(o.out, io::emit(out));
  return kOk;
}

int cmd_match(const Options& o) {
  auto g = load_graph(o.graph);
  std::vector<Match> ms;
  MatchOptions mo;
  mo.strict_attrs = o.strict_attrs;
  if (o.mode == "auto") {
    RuleSystem rs(load_rules(o.rules));
    rs.verify_symmetry();
    AutoMatchOptions ao;
    ao.match = mo;
    ms = auto_match_set(rs, g, ao);
  } else {
    for (const auto& r : load_rules(o.rules)) {
      auto more = enumerate_matches(r, g, mo);
      ms.insert(ms.end(), more.begin(), more.end());
    }
    std::sort(ms.begin(), ms.end(), match_less);
  }
  assign_tags(ms, next_step_index(g.graph()));
  write_output(o.out, io::emit(io::matches_to_json(ms)));
  return kOk;
}

void report_graph_state(bool is_graph, const std::vector<GraphViolation>& vs) {
  if (!is_graph) std::cerr << "result is not a graph: " << io::violations_to_json(vs).dump() << "\n";
}

int cmd_step(const Options& o) {
  auto rs = prepare(load_rules(o.rules), o);
  auto g = load_graph(o.graph);
  StepResult s;
  if (parse_mode(o.mode) == Mode::Full) {
    FullStepOptions fo;
    fo.step.allow_unverified = o.allow_unchecked;
    fo.match.strict_attrs = o.strict_attrs;
    fo.collapse = !o.no_collapse;
    s = full_parallel_step(rs, g, fo);
  } else {
    AutoStepOptions ao;
    ao.step.allow_unverified = o.allow_unchecked;
    ao.match.match.strict_attrs = o.strict_attrs;
    s = auto_parallel_step(rs, g, ao);
  }
  write_output(o.out, io::emit(io::graph_to_json(s.result)));
  if (!o.report.empty()) io::write_file(o.report, io::emit(io::step_to_json(s)));
  report_graph_state(s.is_graph, s.violations);
  return s.is_graph ? kOk : kNotGraph;
}

int cmd_run(const Options& o) {
  auto rs = prepare(load_rules(o.rules), o);
  auto g = load_graph(o.graph);
  RunOptions ro;
  ro.mode = parse_mode(o.mode);
  ro.max_steps = o.steps;
  ro.stop_on_fixpoint = o.until_fixpoint;
  ro.collapse = !o.no_collapse;
  ro.match.strict_attrs = o.strict_attrs;
  ro.step.allow_unverified = o.allow_unchecked;
  auto report = run(rs, g, ro);
  write_output(o.out, io::emit(io::graph_to_json(report.final_graph())));
  if (!o.report.empty())
    io::write_file(o.report, io::emit(io::report_to_json(report, {.timings = o.timings, .intermediate = true})));
  if (!o.snapshot_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(o.snapshot_dir);
    auto snapshot = [&](std::size_t k, const Pregraph& h) {
      char name[32];
      std::snprintf(name, sizeof name, "step-%04zu.json", k);
      io::write_file((fs::path(o.snapshot_dir) / name).string(), io::emit(io::graph_to_json(h)));
    };
    snapshot(0, report.initial);
    for (std::size_t k = 0; k < report.steps.size(); ++k) snapshot(k + 1, report.steps[k].result);
  }
  std::cerr << "steps: " << report.steps.size() << ", stop: " << to_string(report.stop);
  if (report.fixpoint_step) std::cerr << ", fixpoint reached at step " << *report.fixpoint_step;
  std::cerr << "\n";
  if (o.timings)
    for (std::size_t k = 0; k < report.timings.size(); ++k)
      std::cerr << "step " << k + 1 << ": " << report.timings[k].count() * 1000.0 << " ms\n";
  if (report.stop == StopReason::NonGraph) {
    report_graph_state(false, report.steps.back().violations);
    return kNotGraph;
  }
  return kOk;
}

int cmd_export(const Options& o) {
  auto g = load_pregraph(o.graph);
  std::string text;
  if (o.format == "dot")
    text = io::export_dot(g);
  else if (o.format == "svg")
    text = io::export_svg(g);
  else
    text = io::emit(io::graph_to_json(g));
  write_output(o.out, text);
  return kOk;
}

int cmd_gen(const Options& o) {
  Pregraph g;
  if (o.generator == "grid") {
    if (o.rows < 1 || o.cols < 1) throw std::invalid_argument("--rows and --cols must be at least 1");
    ex::GridOptions go;
    go.rows = o.rows;
    go.cols = o.cols;
    go.fill = parse_fill(o.fill);
    go.torus = o.torus;
    g = ex::moore_grid(go).graph();
  } else if (auto named = ex::graph(o.generator)) {
    g = *named;
  } else {
    throw std::invalid_argument("unknown generator '" + o.generator + "'");
  }
  write_output(o.out, io::emit(io::graph_to_json(g)));
  return kOk;
}

int cmd_rules(const Options& o) {
  if (o.list || o.generator.empty()) {
    std::string names;
    for (const auto& n : ex::rule_set_names()) names += n + "\n";
    write_output(o.out, names);
    return kOk;
  }
  auto set = ex::rule_set(o.generator);
  if (!set) throw std::invalid_argument("unknown rule set '" + o.generator + "'");
  write_output(o.out, io::emit(io::rules_to_json(*set)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel port graph rewriting"};
  app.require_subcommand(1);
  Options o;
  std::function<int(const Options&)> command;

  auto rules_opt = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--rules", o.rules, "rule document");
    if (required) opt->required();
  };
  auto graph_opt = [&](CLI::App* c) { c->add_option("--graph", o.graph, "graph document, - for stdin"); };
  auto out_opt = [&](CLI::App* c) { c->add_option("--out", o.out, "output file instead of stdout"); };
  auto mode_opt = [&](CLI::App* c, std::vector<std::string> modes) {
    c->add_option("--mode", o.mode, "matching mode")->check(CLI::IsMember(modes));
  };

  auto* validate = app.add_subcommand("validate", "check rules and a graph");
  rules_opt(validate, false);
  validate->add_option("--graph", o.graph, "graph document, - for stdin");
  out_opt(validate);
  validate->callback([&] { command = cmd_validate; });
  validate->preparse_callback([&](std::size_t) { o.graph.clear(); });

  auto* analyze = app.add_subcommand("analyze", "static analyses of a rule set");
  rules_opt(analyze, true);
  out_opt(analyze);
  analyze->callback([&] { command = cmd_analyze; });

  auto* match = app.add_subcommand("match", "list matches");
  rules_opt(match, true);
  graph_opt(match);
  out_opt(match);
  mode_opt(match, {"all", "auto"});
  match->add_flag("--strict-attrs", o.strict_attrs, "distinct variables take distinct values");
  match->preparse_callback([&](std::size_t) { o.mode = "all"; });
  match->callback([&] { command = cmd_match; });

  auto* step = app.add_subcommand("step", "one parallel rewriting step");
  auto* run_cmd = app.add_subcommand("run", "repeated parallel steps");
  for (auto* c : {step, run_cmd}) {
    rules_opt(c, true);
    graph_opt(c);
    out_opt(c);
    mode_opt(c, {"full", "auto"});
    c->add_option("--report", o.report, "write the step report here");
    c->add_flag("--allow-unchecked", o.allow_unchecked, "skip the conflict freedom requirement");
    c->add_flag("--strict-attrs", o.strict_attrs, "distinct variables take distinct values");
    c->add_flag("--no-collapse", o.no_collapse, "full mode: use every automorphic match");
  }
  step->callback([&] { command = cmd_step; });
  run_cmd->add_option("-n,--steps", o.steps, "step budget")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--until-fixpoint", o.until_fixpoint, "stop when a step leaves the graph unchanged");
  run_cmd->add_option("--snapshot-dir", o.snapshot_dir, "write every intermediate graph here");
  run_cmd->add_flag("--timings", o.timings, "report step timings");
  run_cmd->callback([&] { command = cmd_run; });

  auto* exp = app.add_subcommand("export", "render a graph");
  graph_opt(exp);
  out_opt(exp);
  exp->add_option("--format", o.format, "output format")->check(CLI::IsMember({"dot", "svg", "json"}));
  exp->callback([&] { command = cmd_export; });

  auto* gen = app.add_subcommand("gen", "built-in graphs");
  std::vector<std::string> generators{"grid"};
  for (const auto& n : ex::graph_names()) generators.push_back(n);
  gen->add_option("name", o.generator, "koch, grid, mesh, triangle-s, ...")
      ->required()
      ->check(CLI::IsMember(generators));
  gen->add_option("--rows", o.rows, "grid rows");
  gen->add_option("--cols", o.cols, "grid columns");
  gen->add_option("--fill", o.fill, "comma-separated cell values, e.g. 0,1");
  gen->add_flag("--torus", o.torus, "wrap grid links around the borders");
  out_opt(gen);
  gen->callback([&] { command = cmd_gen; });

  auto* rules = app.add_subcommand("rules", "built-in rule sets");
  rules->add_option("name", o.generator, "rule set name")->check(CLI::IsMember(ex::rule_set_names()));
  rules->add_flag("--list", o.list, "list the rule set names");
  out_opt(rules);
  rules->callback([&] { command = cmd_rules; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    return command(o);
  } catch (const ConflictFreedomUnverified& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const RulesNotConflictFree& e) {
    std::cerr << "error: " << e.what() << " (use --allow-unchecked to override)\n";
    return kPrecondition;
  } catch (const SymmetryConditionFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const SymmetryConditionUnchecked& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const InvalidRule& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.constraint << ": " << v.message << "\n";
    return kInvalid;
  } catch (const io::MissingCoordinates& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
}
