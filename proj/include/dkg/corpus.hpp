#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dkg/norms.hpp"
#include "json.hpp"

namespace dkg {

struct GoldAnnotation {
  NormLabel gold_label = NormLabel::NoViolation;
  std::optional<Position> gold_gem;
  std::optional<Plan> gold_plan;
  std::vector<ClarificationOption> gold_options;
};

struct CorpusEntry {
  std::string instruction_id;
  std::string grid_id;
  std::string text;
  std::string instruction_type;  // Clear | Incomplete | Invalid | Irrelevant | Ambiguous
  GoldAnnotation gold;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Directory layout: grids/*.txt, instructions.json, exemplars/*.json,
// templates/*.txt. Strict loading verifies every bundled-corpus invariant:
// entry count and type distribution, gold plans simulate, gold options
// reference on-grid objects, and every gold label matches classify().
class Corpus {
 public:
  enum class Validation { Strict, Structural };

  static Corpus load(const std::string& dir, Validation level = Validation::Strict);

  const std::string& dir() const { return dir_; }
  const Grid& grid(const std::string& id) const;
  bool has_grid(const std::string& id) const { return grids_.count(id) > 0; }
  std::set<std::string> grid_ids() const;
  const std::vector<CorpusEntry>& entries() const { return entries_; }
  std::map<std::string, int> type_counts() const;

 private:
  std::string dir_;
  std::map<std::string, Grid> grids_;
  std::vector<CorpusEntry> entries_;
};

// (De)serialization helpers shared by the corpus file and run records.
Plan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const Plan& plan);
ClarificationOption option_from_json(const nlohmann::json& j);
nlohmann::json option_to_json(const ClarificationOption& o);

}  // namespace dkg
