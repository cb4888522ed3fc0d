#include "dkg/norms.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace dkg {

std::string_view norm_label_name(NormLabel l) {
  switch (l) {
    case NormLabel::NoViolation: return "No Violation";
    case NormLabel::QuantityViolation: return "Quantity Violation";
    case NormLabel::QualityViolation: return "Quality Violation";
    case NormLabel::RelationViolation: return "Relation Violation";
    case NormLabel::MannerViolation: return "Manner Violation";
  }
  return "?";
}

std::optional<NormLabel> norm_label_from_text(std::string_view s) {
  auto has = [&](std::string_view needle) {
    auto it = std::search(s.begin(), s.end(), needle.begin(), needle.end(),
                          [](char a, char b) { return std::tolower(a) == std::tolower(b); });
    return it != s.end();
  };
  if (has("no violation")) return NormLabel::NoViolation;
  if (has("quantity")) return NormLabel::QuantityViolation;
  if (has("quality")) return NormLabel::QualityViolation;
  if (has("relation") || has("relevance")) return NormLabel::RelationViolation;
  if (has("manner")) return NormLabel::MannerViolation;
  return std::nullopt;
}

std::optional<NormLabel> label_for_instruction_type(std::string_view type) {
  if (type == "Clear") return NormLabel::NoViolation;
  if (type == "Incomplete") return NormLabel::QuantityViolation;
  if (type == "Invalid") return NormLabel::QualityViolation;
  if (type == "Irrelevant") return NormLabel::RelationViolation;
  if (type == "Ambiguous") return NormLabel::MannerViolation;
  return std::nullopt;
}

std::string_view instruction_type_for_label(NormLabel l) {
  switch (l) {
    case NormLabel::NoViolation: return "Clear";
    case NormLabel::QuantityViolation: return "Incomplete";
    case NormLabel::QualityViolation: return "Invalid";
    case NormLabel::RelationViolation: return "Irrelevant";
    case NormLabel::MannerViolation: return "Ambiguous";
  }
  return "?";
}

namespace {

std::string kind_word(ObjectKind k) {
  switch (k) {
    case ObjectKind::Key: return "key";
    case ObjectKind::Door: return "door";
    case ObjectKind::Gem: return "gem";
    case ObjectKind::None: return "object";
  }
  return "object";
}

CellKind cell_kind_of(ObjectKind k) {
  return k == ObjectKind::Door ? CellKind::Door : CellKind::Key;
}

struct GemInfo {
  Position gem;
  GemAnalysis analysis;
};

std::vector<GemInfo> reachable_gems(const Grid& g) {
  std::vector<GemInfo> out;
  for (Position gem : g.locate(CellKind::Gem)) {
    GemAnalysis a = analyze_gem(g, g.human(), gem);
    if (a.human_cost) out.push_back({gem, std::move(a)});
  }
  return out;
}

int required_of(const KeyMultiset& ks, Color c) {
  auto it = ks.find(c);
  return it == ks.end() ? 0 : it->second;
}

}  // namespace

std::pair<NormLabel, Evidence> classify(const Grid& g, const SemanticInstruction& s) {
  if (g.count(CellKind::Gem) == 0) throw NormError("NoGemOnGrid");
  Evidence ev;

  // (1) Relation: out-of-domain instructions.
  if (s.action == ActionKind::OutOfDomain) {
    ev.rule = "relation";
    ev.detail = "The instruction is unrelated to collecting keys, unlocking doors, or gems.";
    return {NormLabel::RelationViolation, ev};
  }

  // (2) Quality: the referenced object must exist on the grid.
  std::optional<Color> color;
  if (s.color) {
    color = color_from_word(*s.color);
    bool exists = false;
    if (s.object_kind != ObjectKind::Gem && color)
      exists = g.count(cell_kind_of(s.object_kind), *color) > 0;
    // Gems carry no color, so a color-qualified gem never exists.
    if (!exists) {
      ev.rule = "quality";
      ev.detail = "There is no " + *s.color + " " + kind_word(s.object_kind) + " on the grid.";
      return {NormLabel::QualityViolation, ev};
    }
  } else if (g.count(cell_kind_of(s.object_kind)) == 0 && s.object_kind != ObjectKind::Gem) {
    ev.rule = "quality";
    ev.detail = "There is no " + kind_word(s.object_kind) + " on the grid.";
    return {NormLabel::QualityViolation, ev};
  }

  // (3) Goal-gem inference.
  auto gems = reachable_gems(g);
  std::vector<GemInfo> candidates;
  for (const auto& gi : gems) {
    if (s.object_kind == ObjectKind::Gem) candidates.push_back(gi);
    else if (color && required_of(gi.analysis.required_keys, *color) > 0) candidates.push_back(gi);
    else if (!color && total_keys(gi.analysis.required_keys) > 0) candidates.push_back(gi);
  }
  if (candidates.empty()) {
    ev.rule = "relation";
    ev.detail = "The instruction does not contribute to reaching any gem on the grid.";
    return {NormLabel::RelationViolation, ev};
  }
  int min_cost = *candidates[0].analysis.human_cost;
  for (const auto& gi : candidates) min_cost = std::min(min_cost, *gi.analysis.human_cost);
  std::vector<GemInfo> tied;
  for (const auto& gi : candidates)
    if (*gi.analysis.human_cost == min_cost) tied.push_back(gi);
  for (const auto& gi : tied) ev.candidate_gems.push_back(gi.gem);

  // (4) Manner: ambiguity about which gem is meant.
  if (tied.size() >= 2) {
    ev.rule = "manner";
    std::string coords;
    for (size_t i = 0; i < tied.size(); ++i)
      coords += (i ? " and " : "") + coord(tied[i].gem);
    ev.detail = "The gems at " + coords + " are equally close to the human, so it is unclear which gem is meant.";
    return {NormLabel::MannerViolation, ev};
  }
  // Door instructions: equal-cost door referents leading to different gems.
  if (s.object_kind == ObjectKind::Door && color) {
    std::map<Position, std::pair<int, Position>> door_goal;  // door -> (cost, gem)
    for (Position dp : g.locate(CellKind::Door, *color)) {
      for (const auto& gi : candidates) {
        const auto& bd = gi.analysis.blocking_doors;
        if (std::find(bd.begin(), bd.end(), dp) == bd.end()) continue;
        int cost = *gi.analysis.human_cost;
        auto it = door_goal.find(dp);
        if (it == door_goal.end() || cost < it->second.first) door_goal[dp] = {cost, gi.gem};
      }
    }
    if (door_goal.size() >= 2) {
      int best = door_goal.begin()->second.first;
      for (auto& [d, cg] : door_goal) best = std::min(best, cg.first);
      std::set<Position> goals;
      int at_best = 0;
      for (auto& [d, cg] : door_goal)
        if (cg.first == best) {
          ++at_best;
          goals.insert(cg.second);
        }
      if (at_best >= 2 && goals.size() >= 2) {
        ev.rule = "manner";
        ev.detail = "Multiple " + std::string(color_name(*color)) +
                    " doors lead to different gems at equal cost, so the referent is ambiguous.";
        return {NormLabel::MannerViolation, ev};
      }
    }
  }

  // (5) Quantity: the unique goal gem's key requirement vs. what was asked.
  const GemInfo& goal = tied[0];
  ev.inferred_gem = goal.gem;
  ev.required_keys = goal.analysis.required_keys;
  const KeyMultiset& required = goal.analysis.required_keys;

  auto quantity = [&](const std::string& why) {
    ev.rule = "quantity";
    ev.detail = "The gem at " + coord(goal.gem) + " requires " + format_keys(required) + ". " + why;
    return std::pair{NormLabel::QuantityViolation, ev};
  };

  for (const auto& [c, n] : required) {
    if (n == 0) continue;
    if (!color || c != *color)
      return quantity("The instruction does not mention the " + std::string(color_name(c)) + " key.");
  }
  if (color) {
    int need = required_of(required, *color);
    switch (s.count.kind) {
      case CountSpec::Kind::Specified:
        if (s.count.n < need)
          return quantity("It asks for " + std::to_string(s.count.n) + " but " +
                          std::to_string(need) + " are needed.");
        break;
      case CountSpec::Kind::Singular:
        if (need > 1)
          return quantity("It asks for one but " + std::to_string(need) + " are needed.");
        break;
      case CountSpec::Kind::Plural:
        if (need > 1)
          return quantity("It does not say how many; " + std::to_string(need) + " are needed.");
        break;
    }
  }

  ev.rule = "none";
  ev.detail = "The instruction is clear, truthful, relevant, and unambiguous. The gem at " +
              coord(goal.gem) + " requires " + format_keys(required) + ".";
  return {NormLabel::NoViolation, ev};
}

namespace {

std::string number_word_for(int n) {
  static const char* words[] = {"zero", "one", "two", "three", "four", "five",
                                "six",  "seven", "eight", "nine", "ten"};
  if (n >= 0 && n <= 10) return words[n];
  return std::to_string(n);
}

std::string inventory_sentence(const Grid& g) {
  std::vector<std::string> items;
  int first_count = 0;
  auto add = [&](int n, const std::string& singular, const std::string& plural) {
    if (n == 0) return;
    if (items.empty()) first_count = n;
    items.push_back(number_word_for(n) + " " + (n == 1 ? singular : plural));
  };
  for (Color c : kAllColors) {
    std::string name(color_name(c));
    add(g.count(CellKind::Key, c), name + " key", name + " keys");
  }
  for (Color c : kAllColors) {
    std::string name(color_name(c));
    add(g.count(CellKind::Door, c), name + " door", name + " doors");
  }
  if (items.empty()) return "There are no keys or doors on the grid.";
  std::string list;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) list += (i + 1 == items.size()) ? (items.size() > 2 ? ", and " : " and ") : ", ";
    list += items[i];
  }
  std::string verb = (items.size() == 1 && first_count == 1) ? "is" : "are";
  return "There " + verb + " " + list + " on the grid.";
}

std::string option_verb(const ClarificationOption& o) {
  switch (o.kind) {
    case ObjectKind::Door: return "unlock";
    case ObjectKind::Gem: return "go for";
    default: return "collect";
  }
}

std::string question_sentence(const std::vector<ClarificationOption>& options) {
  std::string q = "Do you want me to " + option_verb(options.front()) + " ";
  for (size_t i = 0; i < options.size(); ++i) {
    if (i) q += (i + 1 == options.size()) ? ", or " : ", ";
    q += options[i].description;
  }
  return q + "?";
}

std::vector<ClarificationOption> key_color_options(const Grid& g) {
  std::vector<ClarificationOption> options;
  for (Color c : kAllColors) {
    auto positions = g.locate(CellKind::Key, c);
    if (positions.empty()) continue;
    ClarificationOption o;
    o.description = "the " + std::string(color_name(c)) + " key";
    o.kind = ObjectKind::Key;
    o.color = std::string(color_name(c));
    o.positions = positions;
    options.push_back(std::move(o));
  }
  if (options.size() >= 2) {
    ClarificationOption both;
    both.description = options.size() == 2 ? "both of them" : "all of them";
    both.kind = ObjectKind::Key;
    for (const auto& o : options)
      both.positions.insert(both.positions.end(), o.positions.begin(), o.positions.end());
    options.push_back(std::move(both));
  }
  if (options.size() < 2) {
    for (Position gem : g.locate(CellKind::Gem)) {
      ClarificationOption o;
      o.description = "the gem at " + coord(gem);
      o.kind = ObjectKind::Gem;
      o.positions = {gem};
      options.push_back(std::move(o));
    }
  }
  return options;
}

std::vector<ClarificationOption> instance_options(const Grid& g, ObjectKind kind, Color c) {
  std::vector<ClarificationOption> options;
  for (Position p : g.locate(cell_kind_of(kind), c)) {
    ClarificationOption o;
    o.description = "the " + std::string(color_name(c)) + " " + kind_word(kind) + " at " + coord(p);
    o.kind = kind;
    o.color = std::string(color_name(c));
    o.positions = {p};
    options.push_back(std::move(o));
  }
  if (options.size() >= 2) {
    ClarificationOption all;
    all.description = options.size() == 2 ? "both of them" : "all of them";
    all.kind = kind;
    all.color = std::string(color_name(c));
    for (Position p : g.locate(cell_kind_of(kind), c)) all.positions.push_back(p);
    options.push_back(std::move(all));
  }
  return options;
}

std::vector<ClarificationOption> gem_options(const std::vector<Position>& gems) {
  std::vector<ClarificationOption> options;
  for (Position gem : gems) {
    ClarificationOption o;
    o.description = "the gem at " + coord(gem);
    o.kind = ObjectKind::Gem;
    o.positions = {gem};
    options.push_back(std::move(o));
  }
  return options;
}

}  // namespace

OracleResponse infer_response(const Grid& g, const SemanticInstruction& s, NormLabel label) {
  auto [lab, ev] = classify(g, s);
  OracleResponse r;
  r.label = label;
  r.rationale = ev;
  r.inferred_gem = ev.inferred_gem;

  switch (label) {
    case NormLabel::NoViolation:
    case NormLabel::QuantityViolation: {
      PlanResult pr = agent_fetch_plan(g, ev.required_keys);
      if (auto* plan = std::get_if<Plan>(&pr)) {
        r.plan = std::move(*plan);
      } else {
        // Blocked delivery: ask the human how to proceed instead of planning.
        for (Position dp : g.locate(CellKind::Door)) {
          ClarificationOption o;
          o.kind = ObjectKind::Door;
          o.color = std::string(color_name(g.at(dp).color));
          o.description = "the " + *o.color + " door at " + coord(dp);
          o.positions = {dp};
          r.options.push_back(std::move(o));
        }
        if (r.options.size() < 2) {
          auto extra = key_color_options(g);
          r.options.insert(r.options.end(), extra.begin(), extra.end());
        }
        r.rationale.detail += " I cannot deliver the keys: my path to you is blocked.";
      }
      break;
    }
    case NormLabel::QualityViolation:
    case NormLabel::RelationViolation:
      r.options = key_color_options(g);
      break;
    case NormLabel::MannerViolation: {
      if (s.object_kind != ObjectKind::Gem && s.color) {
        if (auto c = color_from_word(*s.color)) {
          auto instances = g.locate(cell_kind_of(s.object_kind), *c);
          if (instances.size() >= 2) {
            r.options = instance_options(g, s.object_kind, *c);
            break;
          }
        }
      }
      r.options = gem_options(ev.candidate_gems);
      break;
    }
  }
  r.inventory_text = inventory_sentence(g);
  r.nl_text = render_nl(r);
  return r;
}

std::string render_nl(const OracleResponse& r) {
  // Plan responses: inventory, inference, action.
  if (r.plan) {
    std::ostringstream out;
    if (!r.inventory_text.empty()) out << r.inventory_text << " ";
    out << r.rationale.detail;
    const Plan& plan = *r.plan;
    std::vector<std::string> pickups;
    bool passes = false;
    for (const auto& a : plan.actions) {
      if (a.kind == AgentAction::Kind::PickUp) pickups.push_back(coord(a.pos));
      if (a.kind == AgentAction::Kind::PassKeys) passes = true;
    }
    if (pickups.empty()) {
      out << " The gem is directly reachable, so no keys are needed.";
    } else {
      out << " I will collect the key" << (pickups.size() > 1 ? "s" : "") << " at ";
      for (size_t i = 0; i < pickups.size(); ++i) {
        if (i) out << (i + 1 == pickups.size() ? " and " : ", ");
        out << pickups[i];
      }
      if (passes) out << ", then pass " << (pickups.size() > 1 ? "them" : "it")
                      << " to you to unlock the door" << (pickups.size() > 1 ? "s" : "");
      out << ".";
    }
    return out.str();
  }
  // Clarification responses: statement then the option question.
  std::ostringstream out;
  if (!r.inventory_text.empty() && r.label == NormLabel::MannerViolation)
    out << r.inventory_text << " ";
  out << r.rationale.detail;
  if (!r.options.empty()) out << " " << question_sentence(r.options);
  return out.str();
}

OracleResponse respond(const Grid& g, const std::string& instruction_text) {
  SemanticInstruction s = parse_instruction(instruction_text);
  auto [label, ev] = classify(g, s);
  return infer_response(g, s, label);
}

}  // namespace dkg
