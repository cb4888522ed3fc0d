#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dkg/norms.hpp"
#include "dkg/prompting.hpp"

namespace dkg {

class AgentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParsedAgentReply {
  std::optional<NormLabel> norm_label;  // WithNorms replies only
  std::string response_text;
  std::vector<Position> coords;               // every "(r, c)" pattern
  std::vector<std::string> colors_mentioned;  // unique, in order of appearance
  std::vector<std::string> options;           // phrases of the final question
  bool parse_ok = false;
};

// Never throws; parse_ok is false when the reply schema is absent.
ParsedAgentReply parse_reply(const std::string& text, Condition condition);

// Stable digest of the full prompt text (FNV-1a 64, hex).
std::string prompt_digest(const std::string& text);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const PromptDocument& prompt, const PromptConfig& cfg) = 0;
  virtual std::string name() const = 0;
};

// Offline backend that routes through the norm oracle and renders its
// response in the standard reply schema. Fully deterministic.
class OracleBackend : public Backend {
 public:
  using GridResolver = std::function<const Grid&(const std::string& grid_id)>;
  explicit OracleBackend(GridResolver resolver) : resolver_(std::move(resolver)) {}
  std::string complete(const PromptDocument& prompt, const PromptConfig& cfg) override;
  std::string name() const override { return "oracle"; }

 private:
  GridResolver resolver_;
};

// Replays canned replies keyed by prompt digest.
class ScriptedBackend : public Backend {
 public:
  ScriptedBackend() = default;
  static ScriptedBackend load(const std::string& path);
  void save(const std::string& path) const;
  void add(const std::string& digest, std::string reply);
  std::string complete(const PromptDocument& prompt, const PromptConfig& cfg) override;
  std::string name() const override { return "scripted"; }

 private:
  std::map<std::string, std::string> replies_;
};

// OpenAI-compatible chat-completions client. The credential comes from an
// environment variable, never from configuration files. Transient failures
// are retried up to 3 times with exponential backoff.
class RemoteChatBackend : public Backend {
 public:
  RemoteChatBackend(std::string endpoint, std::string model,
                    std::string credential_env = "OPENAI_API_KEY");

  void set_max_in_flight(int n);
  void set_backoff_ms(int ms) { backoff_ms_ = ms; }  // base delay; tests shrink it

  std::string complete(const PromptDocument& prompt, const PromptConfig& cfg) override;
  std::string name() const override { return "remote"; }

 private:
  std::string endpoint_;
  std::string model_;
  std::string credential_env_;
  int backoff_ms_ = 500;
  int max_in_flight_ = 4;
  int in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace dkg
