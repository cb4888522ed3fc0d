#pragma once

#include <optional>
#include <string>

namespace dkg {

enum class ActionKind { Fetch, Unlock, Pass, OutOfDomain };
enum class ObjectKind { Key, Door, Gem, None };

struct CountSpec {
  enum class Kind { Specified, Singular, Plural };
  Kind kind = Kind::Singular;
  int n = 1;  // Specified only

  static CountSpec specified(int n) { return {Kind::Specified, n}; }
  static CountSpec singular() { return {Kind::Singular, 1}; }
  static CountSpec plural() { return {Kind::Plural, 1}; }
  bool operator==(const CountSpec& o) const {
    return kind == o.kind && (kind != Kind::Specified || n == o.n);
  }
};

struct SemanticInstruction {
  ActionKind action = ActionKind::OutOfDomain;
  ObjectKind object_kind = ObjectKind::None;
  std::optional<std::string> color;  // open vocabulary
  CountSpec count;
  std::string raw;
};

// Total and deterministic; case- and punctuation-insensitive. Unknown
// verbs or missing grid-object nouns yield OutOfDomain.
SemanticInstruction parse_instruction(const std::string& text);

}  // namespace dkg
