#pragma once

// JSON documents for graphs, rules, matches and step reports, plus DOT and
// SVG export.
//
// Values: a number, a string (tag) or [x, y]. Terms use the same shapes for
// constants; operators are arrays headed by their name, e.g. ["var", "x"],
// ["add", t1, t2], ["scale", "1/3", t], ["sqrt", 3].

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "portrewrite/engine.hpp"

namespace portrewrite::io {

using Json = nlohmann::json;

// Parse or shape error. `path` locates the offending value, e.g.
// "$.lhs.nodes[2].part"; syntax errors carry the byte offset instead.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class MissingCoordinates : public std::runtime_error {
 public:
  explicit MissingCoordinates(const Id& node)
      : std::runtime_error("node '" + node + "' does not carry exactly one vector attribute"), node_(node) {}
  const Id& node() const { return node_; }

 private:
  Id node_;
};

Json parse_text(const std::string& text);
// Two-space indentation, sorted keys, trailing newline.
std::string emit(const Json& j);

Json value_to_json(const AttrValue& v);
AttrValue value_from_json(const Json& j, const std::string& path = "$");
Json term_to_json(const AttrTerm& t);
AttrTerm term_from_json(const Json& j, const std::string& path = "$");

Json graph_to_json(const Pregraph& g);
Pregraph graph_from_json(const Json& j, const std::string& path = "$");

Json rule_to_json(const EsrRule& r);
EsrRule rule_from_json(const Json& j, const std::string& path = "$");
// {"rules": [...]}
Json rules_to_json(const std::vector<EsrRule>& rules);
std::vector<EsrRule> rules_from_json(const Json& j, const std::string& path = "$");

Json match_to_json(const Match& m);
// Resolves the rule by name among `rules`.
Match match_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path = "$");
Json matches_to_json(const std::vector<Match>& ms);
std::vector<Match> matches_from_json(const Json& j, const std::vector<EsrRule>& rules,
                                     const std::string& path = "$");

Json quotient_map_to_json(const QuotientMap& q);
// Classes absent from the document are the singletons of `result`.
QuotientMap quotient_map_from_json(const Json& j, const Pregraph& result, const std::string& path = "$");

// [{"port", "kind", "offending"}]
Json violations_to_json(const std::vector<GraphViolation>& vs);

Json step_to_json(const StepResult& s);
StepResult step_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path = "$");

struct ReportOptions {
  bool timings = false;
  bool intermediate = true;
};

Json report_to_json(const RunReport& r, ReportOptions options = {});
RunReport report_from_json(const Json& j, const std::vector<EsrRule>& rules, const std::string& path = "$");

// Ports on exactly one node become fields of that node's record; other ports
// are drawn as points joined to their nodes by dashed edges.
std::string export_dot(const Pregraph& g);
// One segment per link between two ports that each sit on exactly one node.
std::string export_svg(const Pregraph& g);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace portrewrite::io
