#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dkg/grid.hpp"
#include "dkg/instruction.hpp"
#include "dkg/planner.hpp"

namespace dkg {

enum class NormLabel {
  NoViolation,
  QuantityViolation,
  QualityViolation,
  RelationViolation,
  MannerViolation,
};

std::string_view norm_label_name(NormLabel l);  // "No Violation", "Quantity Violation", ...
// Accepts both "Relation Violation" and "Relevance Violation".
std::optional<NormLabel> norm_label_from_text(std::string_view s);
// Table-1 mapping: Clear, Incomplete, Invalid, Irrelevant, Ambiguous.
std::optional<NormLabel> label_for_instruction_type(std::string_view type);
std::string_view instruction_type_for_label(NormLabel l);

struct ClarificationOption {
  std::string description;  // e.g. "the yellow key at (0, 4)"
  ObjectKind kind = ObjectKind::None;
  std::optional<std::string> color;
  std::vector<Position> positions;
};

struct Evidence {
  std::string rule;    // which check fired
  std::string detail;  // human-readable trace
  std::optional<Position> inferred_gem;
  std::vector<Position> candidate_gems;  // tied candidates for Manner
  KeyMultiset required_keys;
};

struct OracleResponse {
  NormLabel label = NormLabel::NoViolation;
  std::optional<Position> inferred_gem;
  std::optional<Plan> plan;
  std::vector<ClarificationOption> options;
  std::string inventory_text;  // "There are ... on the grid."
  std::string nl_text;
  Evidence rationale;
};

class NormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered decision procedure: Relation -> Quality -> goal-gem inference ->
// Manner -> Quantity -> NoViolation. Exactly one label; deterministic.
// Throws NormError when the grid has no gem.
std::pair<NormLabel, Evidence> classify(const Grid& g, const SemanticInstruction& s);

OracleResponse infer_response(const Grid& g, const SemanticInstruction& s, NormLabel label);

std::string render_nl(const OracleResponse& r);

// parse + classify + infer + render in one call.
OracleResponse respond(const Grid& g, const std::string& instruction_text);

}  // namespace dkg
