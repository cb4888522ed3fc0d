#include "dkg/prompting.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dkg {

std::string_view condition_name(Condition c) {
  return c == Condition::WithNorms ? "with-norms" : "without-norms";
}

std::optional<Condition> condition_from_name(std::string_view s) {
  if (s == "with-norms" || s == "with" || s == "norms") return Condition::WithNorms;
  if (s == "without-norms" || s == "without") return Condition::WithoutNorms;
  return std::nullopt;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PromptError("cannot read template file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace

TemplateSet TemplateSet::load(const std::string& dir) {
  TemplateSet t;
  t.background = slurp(dir + "/component1_background.txt");
  t.key_points = slurp(dir + "/component1_key_points.txt");
  t.norms = slurp(dir + "/component2_norms.txt");
  t.request_with = slurp(dir + "/component3_with_norms.txt");
  t.request_without = slurp(dir + "/component3_without_norms.txt");
  t.fewshot_header_with = slurp(dir + "/component4_header_with_norms.txt");
  t.fewshot_header_without = slurp(dir + "/component4_header_without_norms.txt");
  return t;
}

std::vector<Exemplar> load_exemplars(const std::string& path,
                                     const std::set<std::string>& known_grids) {
  std::ifstream in(path);
  if (!in) throw PromptError("BadExemplarFile: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw PromptError(std::string("BadExemplarFile: ") + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw PromptError("BadExemplarFile: expected a non-empty array: " + path);

  std::vector<Exemplar> out;
  bool any_norm = false, all_norm = true;
  for (const auto& item : doc) {
    Exemplar e;
    e.grid_id = item.at("grid_id").get<std::string>();
    e.instruction = item.at("instruction").get<std::string>();
    e.response_text = item.at("response").get<std::string>();
    if (item.contains("norm")) {
      e.norm_text = item.at("norm").get<std::string>();
      any_norm = true;
    } else {
      all_norm = false;
    }
    if (e.response_text.empty())
      throw PromptError("BadExemplarFile: empty response for '" + e.instruction + "'");
    if (!known_grids.count(e.grid_id))
      throw PromptError("BadExemplarFile: unknown grid_id '" + e.grid_id + "'");
    out.push_back(std::move(e));
  }
  if (any_norm && !all_norm)
    throw PromptError("BadExemplarFile: mixed norm/no-norm exemplars: " + path);
  return out;
}

PromptDocument build_prompt(const Grid& g, const std::string& instruction,
                            const PromptConfig& cfg, const std::vector<Exemplar>& exemplars,
                            const TemplateSet& templates) {
  bool with = cfg.condition == Condition::WithNorms;
  for (const auto& e : exemplars) {
    if (with != e.norm_text.has_value())
      throw PromptError("ExemplarConditionMismatch for instruction '" + e.instruction + "'");
  }

  PromptDocument doc;
  doc.condition = cfg.condition;
  doc.grid_id = g.id();
  doc.instruction = instruction;

  std::string c1 = templates.background;
  c1 += "\n\nThe Current Grid Layout for the Keys, Doors, and, Gems:\n";
  c1 += g.render_matrix_block();
  c1 += "\n\nBelow are the locations of all objects on the grid, displayed as "
        "(row, column) coordinates, along with their total count:\n";
  c1 += g.describe();
  c1 += "\n\n" + templates.key_points;
  doc.components.push_back(std::move(c1));

  if (with) doc.components.push_back(templates.norms);

  std::string c3 = with ? templates.request_with : templates.request_without;
  doc.components.push_back(replace_all(std::move(c3), "{{INSTRUCTION}}", instruction));

  std::string c4 = with ? templates.fewshot_header_with : templates.fewshot_header_without;
  c4 += "\n'''\n";
  for (const auto& e : exemplars) {
    c4 += "Instruction: " + e.instruction + "\n";
    if (with) c4 += "Norm: " + *e.norm_text + "\n";
    c4 += "Response: " + e.response_text + "\n\n";
  }
  c4 += "'''";
  doc.components.push_back(std::move(c4));

  for (size_t i = 0; i < doc.components.size(); ++i) {
    if (i) doc.full_text += "\n\n";
    doc.full_text += doc.components[i];
  }
  return doc;
}

}  // namespace dkg
