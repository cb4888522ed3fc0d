#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dkg/grid.hpp"

namespace dkg {

enum class Condition { WithNorms, WithoutNorms };

std::string_view condition_name(Condition c);  // "with-norms" / "without-norms"
std::optional<Condition> condition_from_name(std::string_view s);

struct Exemplar {
  std::string grid_id;
  std::string instruction;
  std::optional<std::string> norm_text;  // present iff the with-norms set
  std::string response_text;
};

struct PromptConfig {
  Condition condition = Condition::WithNorms;
  int max_tokens = 512;
  double temperature = 0.2;
};

struct PromptDocument {
  std::vector<std::string> components;  // general CoT, [norms], request, exemplars
  std::string full_text;
  Condition condition = Condition::WithNorms;
  std::string grid_id;
  std::string instruction;
};

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Prompt text lives in external template files, one file per component.
struct TemplateSet {
  std::string background;          // component 1: background + cognitive framing
  std::string key_points;          // component 1: key rules block
  std::string norms;               // component 2 (with-norms only)
  std::string request_with;        // component 3, with norms
  std::string request_without;     // component 3, without norms
  std::string fewshot_header_with; // component 4 headers
  std::string fewshot_header_without;

  static TemplateSet load(const std::string& dir);
};

// Reads a JSON exemplar file: [{grid_id, instruction, norm?, response}, ...].
// Every grid_id must resolve against known_grids; norm fields must be
// uniformly present or absent. Throws PromptError ("BadExemplarFile").
std::vector<Exemplar> load_exemplars(const std::string& path,
                                     const std::set<std::string>& known_grids);

// Deterministic four-component prompt. The instruction appears verbatim
// inside triple backticks; the norms component and all "Norm:" fields are
// present iff the condition is WithNorms.
PromptDocument build_prompt(const Grid& g, const std::string& instruction,
                            const PromptConfig& cfg, const std::vector<Exemplar>& exemplars,
                            const TemplateSet& templates);

}  // namespace dkg
