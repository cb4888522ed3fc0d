#include "dkg/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace dkg {

namespace fs = std::filesystem;

namespace {

Position pos_from_json(const nlohmann::json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

nlohmann::json pos_to_json(Position p) { return {p.row, p.col}; }

Color color_from_json(const nlohmann::json& j) {
  auto c = color_from_word(j.get<std::string>());
  if (!c) throw CorpusError("unsupported color in corpus file: " + j.get<std::string>());
  return *c;
}

ObjectKind kind_from_word(const std::string& w) {
  if (w == "key") return ObjectKind::Key;
  if (w == "door") return ObjectKind::Door;
  if (w == "gem") return ObjectKind::Gem;
  return ObjectKind::None;
}

std::string kind_to_word(ObjectKind k) {
  switch (k) {
    case ObjectKind::Key: return "key";
    case ObjectKind::Door: return "door";
    case ObjectKind::Gem: return "gem";
    default: return "none";
  }
}

}  // namespace

Plan plan_from_json(const nlohmann::json& j) {
  Plan plan;
  plan.total_steps = j.at("total_steps").get<int>();
  for (const auto& aj : j.at("actions")) {
    AgentAction a{};
    std::string act = aj.at("act").get<std::string>();
    if (act == "move") {
      a.kind = AgentAction::Kind::MoveAlong;
      for (const auto& pj : aj.at("path")) a.path.cells.push_back(pos_from_json(pj));
    } else if (act == "pickup") {
      a.kind = AgentAction::Kind::PickUp;
      a.pos = pos_from_json(aj.at("pos"));
    } else if (act == "pass") {
      a.kind = AgentAction::Kind::PassKeys;
      for (const auto& cj : aj.at("colors")) a.colors.push_back(color_from_json(cj));
    } else if (act == "unlock") {
      a.kind = AgentAction::Kind::Unlock;
      a.pos = pos_from_json(aj.at("pos"));
    } else {
      throw CorpusError("unknown plan action: " + act);
    }
    plan.actions.push_back(std::move(a));
  }
  return plan;
}

nlohmann::json plan_to_json(const Plan& plan) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : plan.actions) {
    nlohmann::json aj;
    switch (a.kind) {
      case AgentAction::Kind::MoveAlong: {
        aj["act"] = "move";
        nlohmann::json path = nlohmann::json::array();
        for (Position p : a.path.cells) path.push_back(pos_to_json(p));
        aj["path"] = std::move(path);
        break;
      }
      case AgentAction::Kind::PickUp:
        aj["act"] = "pickup";
        aj["pos"] = pos_to_json(a.pos);
        break;
      case AgentAction::Kind::PassKeys: {
        aj["act"] = "pass";
        nlohmann::json colors = nlohmann::json::array();
        for (Color c : a.colors) colors.push_back(std::string(color_name(c)));
        aj["colors"] = std::move(colors);
        break;
      }
      case AgentAction::Kind::Unlock:
        aj["act"] = "unlock";
        aj["pos"] = pos_to_json(a.pos);
        break;
    }
    actions.push_back(std::move(aj));
  }
  return {{"total_steps", plan.total_steps}, {"actions", std::move(actions)}};
}

ClarificationOption option_from_json(const nlohmann::json& j) {
  ClarificationOption o;
  o.description = j.at("text").get<std::string>();
  o.kind = kind_from_word(j.value("kind", "none"));
  if (j.contains("color")) o.color = j.at("color").get<std::string>();
  if (j.contains("positions"))
    for (const auto& pj : j.at("positions")) o.positions.push_back(pos_from_json(pj));
  return o;
}

nlohmann::json option_to_json(const ClarificationOption& o) {
  nlohmann::json j;
  j["text"] = o.description;
  j["kind"] = kind_to_word(o.kind);
  if (o.color) j["color"] = *o.color;
  nlohmann::json ps = nlohmann::json::array();
  for (Position p : o.positions) ps.push_back(pos_to_json(p));
  j["positions"] = std::move(ps);
  return j;
}

Corpus Corpus::load(const std::string& dir, Validation level) {
  Corpus corpus;
  corpus.dir_ = dir;

  fs::path grids_dir = fs::path(dir) / "grids";
  if (!fs::is_directory(grids_dir)) throw CorpusError("missing grids directory: " + grids_dir.string());
  std::vector<fs::path> grid_files;
  for (const auto& e : fs::directory_iterator(grids_dir))
    if (e.path().extension() == ".txt") grid_files.push_back(e.path());
  std::sort(grid_files.begin(), grid_files.end());
  for (const auto& path : grid_files) {
    Grid g = Grid::load_file(path.string());
    std::string id = g.id().empty() ? path.stem().string() : g.id();
    if (corpus.grids_.count(id)) throw CorpusError("duplicate grid id: " + id);
    try {
      g.validate();
    } catch (const GridError& e) {
      throw CorpusError("CorpusInvariantViolation grid " + id + ": " + e.what());
    }
    corpus.grids_.emplace(id, std::move(g));
  }

  std::ifstream in(fs::path(dir) / "instructions.json");
  if (!in) throw CorpusError("missing instructions.json in " + dir);
  nlohmann::json doc;
  in >> doc;
  for (const auto& ej : doc.at("entries")) {
    CorpusEntry entry;
    entry.instruction_id = ej.at("id").get<std::string>();
    entry.grid_id = ej.at("grid").get<std::string>();
    entry.text = ej.at("text").get<std::string>();
    entry.instruction_type = ej.at("type").get<std::string>();
    if (ej.contains("gold")) {
      const auto& gj = ej.at("gold");
      auto label = norm_label_from_text(gj.at("label").get<std::string>());
      if (!label)
        throw CorpusError("CorpusInvariantViolation " + entry.instruction_id +
                          ": unknown gold label");
      entry.gold.gold_label = *label;
      if (gj.contains("gem")) entry.gold.gold_gem = pos_from_json(gj.at("gem"));
      if (gj.contains("plan")) entry.gold.gold_plan = plan_from_json(gj.at("plan"));
      if (gj.contains("options"))
        for (const auto& oj : gj.at("options"))
          entry.gold.gold_options.push_back(option_from_json(oj));
    } else if (level == Validation::Strict) {
      throw CorpusError("CorpusInvariantViolation " + entry.instruction_id + ": missing gold");
    }
    corpus.entries_.push_back(std::move(entry));
  }

  // Structural checks needed by both levels.
  for (const auto& entry : corpus.entries_) {
    if (!corpus.grids_.count(entry.grid_id))
      throw CorpusError("CorpusInvariantViolation " + entry.instruction_id + ": unknown grid " +
                        entry.grid_id);
    if (!label_for_instruction_type(entry.instruction_type))
      throw CorpusError("CorpusInvariantViolation " + entry.instruction_id +
                        ": unknown instruction type " + entry.instruction_type);
  }
  if (level == Validation::Structural) return corpus;

  if (corpus.grids_.size() != 25)
    throw CorpusError("CorpusInvariantViolation: expected 25 grids, found " +
                      std::to_string(corpus.grids_.size()));
  if (corpus.entries_.size() != 55)
    throw CorpusError("CorpusInvariantViolation: expected 55 entries, found " +
                      std::to_string(corpus.entries_.size()));
  const std::map<std::string, int> expected = {
      {"Clear", 20}, {"Incomplete", 5}, {"Invalid", 11}, {"Irrelevant", 6}, {"Ambiguous", 13}};
  if (corpus.type_counts() != expected)
    throw CorpusError("CorpusInvariantViolation: instruction type distribution mismatch");

  for (const auto& entry : corpus.entries_) {
    const Grid& g = corpus.grids_.at(entry.grid_id);
    if (*label_for_instruction_type(entry.instruction_type) != entry.gold.gold_label)
      throw CorpusError("CorpusInvariantViolation " + entry.instruction_id +
                        ": type/label mapping mismatch");
    auto [label, ev] = classify(g, parse_instruction(entry.text));
    if (label != entry.gold.gold_label)
      throw CorpusError("CorpusInvariantViolation " + entry.instruction_id + ": gold label " +
                        std::string(norm_label_name(entry.gold.gold_label)) +
                        " but classify() says " + std::string(norm_label_name(label)));
    if (entry.gold.gold_plan) {
      SimResult sim = simulate(g, *entry.gold.gold_plan);
      if (!sim.ok)
        throw CorpusError("CorpusInvariantViolation " + entry.instruction_id +
                          ": gold plan invalid: " + sim.reason);
    }
    for (const auto& o : entry.gold.gold_options) {
      for (Position p : o.positions) {
        if (!g.in_bounds(p))
          throw CorpusError("CorpusInvariantViolation " + entry.instruction_id +
                            ": option position out of bounds " + coord(p));
        CellKind k = g.at(p).kind;
        if (k != CellKind::Key && k != CellKind::Door && k != CellKind::Gem)
          throw CorpusError("CorpusInvariantViolation " + entry.instruction_id +
                            ": option references non-object cell " + coord(p));
      }
    }
  }
  return corpus;
}

const Grid& Corpus::grid(const std::string& id) const {
  auto it = grids_.find(id);
  if (it == grids_.end()) throw CorpusError("unknown grid id: " + id);
  return it->second;
}

std::set<std::string> Corpus::grid_ids() const {
  std::set<std::string> out;
  for (const auto& [id, g] : grids_) out.insert(id);
  return out;
}

std::map<std::string, int> Corpus::type_counts() const {
  std::map<std::string, int> out;
  for (const auto& e : entries_) out[e.instruction_type] += 1;
  return out;
}

}  // namespace dkg
