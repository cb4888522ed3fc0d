#include "dkg/instruction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <vector>

namespace dkg {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

std::optional<ActionKind> verb_action(const std::string& w) {
  static const std::set<std::string> fetch = {"get", "grab", "collect", "fetch", "find"};
  static const std::set<std::string> pass = {"pass", "give", "hand", "bring"};
  static const std::set<std::string> unlock = {"unlock", "open"};
  if (fetch.count(w)) return ActionKind::Fetch;
  if (pass.count(w)) return ActionKind::Pass;
  if (unlock.count(w)) return ActionKind::Unlock;
  return std::nullopt;
}

std::optional<int> number_word(const std::string& w) {
  static const std::array<std::string, 10> words = {"one", "two",   "three", "four", "five",
                                                    "six", "seven", "eight", "nine", "ten"};
  for (size_t i = 0; i < words.size(); ++i)
    if (w == words[i]) return static_cast<int>(i) + 1;
  if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return std::stoi(w);
  return std::nullopt;
}

bool is_stopword(const std::string& w) {
  static const std::set<std::string> stop = {
      "the", "a",    "an",  "me",   "my",   "your", "that",   "this", "those", "these",
      "some", "any", "all", "both", "of",   "to",   "for",    "please", "you", "can",
      "could", "would", "will", "up"};
  return stop.count(w) > 0;
}

}  // namespace

SemanticInstruction parse_instruction(const std::string& text) {
  SemanticInstruction out;
  out.raw = text;
  auto tokens = tokenize(text);

  std::optional<ActionKind> action;
  for (size_t i = 0; i < tokens.size() && !action; ++i) {
    if (tokens[i] == "pick" && i + 1 < tokens.size() && tokens[i + 1] == "up") {
      action = ActionKind::Fetch;
      break;
    }
    action = verb_action(tokens[i]);
  }

  std::optional<size_t> noun_at;
  ObjectKind kind = ObjectKind::None;
  bool plural = false;
  for (size_t i = 0; i < tokens.size() && !noun_at; ++i) {
    const std::string& w = tokens[i];
    if (w == "key" || w == "keys") kind = ObjectKind::Key;
    else if (w == "door" || w == "doors") kind = ObjectKind::Door;
    else if (w == "gem" || w == "gems") kind = ObjectKind::Gem;
    else continue;
    noun_at = i;
    plural = w.back() == 's';
  }

  if (!action || !noun_at) return out;  // OutOfDomain

  out.action = *action;
  out.object_kind = kind;

  std::optional<int> n;
  for (size_t i = 0; i < *noun_at; ++i)
    if (auto v = number_word(tokens[i])) n = v;
  if (n && *n >= 1) out.count = CountSpec::specified(*n);
  else if (plural) out.count = CountSpec::plural();
  else out.count = CountSpec::singular();

  if (*noun_at > 0) {
    const std::string& prev = tokens[*noun_at - 1];
    if (!is_stopword(prev) && !number_word(prev) && !verb_action(prev) && prev != "pick")
      out.color = prev;
  }
  return out;
}

}  // namespace dkg
