#include "dkg/agent.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <regex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

namespace dkg {

std::string prompt_digest(const std::string& text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

// Split at top-level separators only; "(0, 4)" stays intact.
std::vector<std::string> split_options(const std::string& question) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    std::string t = trim(cur);
    if (!t.empty()) parts.push_back(t);
    cur.clear();
  };
  for (size_t i = 0; i < question.size(); ++i) {
    char c = question[i];
    if (c == '(') ++depth;
    if (c == ')') depth = std::max(0, depth - 1);
    if (depth == 0 && c == ',') {
      flush();
      continue;
    }
    if (depth == 0 && question.compare(i, 4, " or ") == 0) {
      flush();
      i += 3;
      continue;
    }
    cur += c;
  }
  flush();
  return parts;
}

std::string strip_prefix_ci(std::string s, const std::string& prefix) {
  if (lower(s).rfind(prefix, 0) == 0) return trim(s.substr(prefix.size()));
  return s;
}

}  // namespace

ParsedAgentReply parse_reply(const std::string& text, Condition condition) {
  ParsedAgentReply out;
  if (text.empty()) return out;

  if (condition == Condition::WithNorms) {
    size_t at = text.find("Norm:");
    if (at != std::string::npos) {
      size_t end = text.find('\n', at);
      std::string line = text.substr(at + 5, end == std::string::npos ? end : end - at - 5);
      out.norm_label = norm_label_from_text(line);
    }
    out.parse_ok = out.norm_label.has_value();
  } else {
    out.parse_ok = true;
  }

  size_t rat = text.find("Response:");
  out.response_text = trim(rat == std::string::npos ? text : text.substr(rat + 9));

  static const std::regex coord_re(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
  for (auto it = std::sregex_iterator(out.response_text.begin(), out.response_text.end(), coord_re);
       it != std::sregex_iterator(); ++it)
    out.coords.push_back({std::stoi((*it)[1]), std::stoi((*it)[2])});

  static const std::regex word_re(R"([A-Za-z]+)");
  for (auto it = std::sregex_iterator(out.response_text.begin(), out.response_text.end(), word_re);
       it != std::sregex_iterator(); ++it) {
    std::string w = lower(it->str());
    static const std::set<std::string> colors = {"red",   "yellow", "blue",  "green",
                                                 "purple", "orange", "white", "black"};
    if (colors.count(w) &&
        std::find(out.colors_mentioned.begin(), out.colors_mentioned.end(), w) ==
            out.colors_mentioned.end())
      out.colors_mentioned.push_back(w);
  }

  // Options: the final interrogative sentence, split on commas and "or".
  size_t qm = out.response_text.rfind('?');
  if (qm != std::string::npos) {
    size_t start = out.response_text.find_last_of(".?!", qm - 1);
    std::string question =
        out.response_text.substr(start == std::string::npos ? 0 : start + 1, qm - (start == std::string::npos ? 0 : start + 1));
    for (std::string part : split_options(trim(question))) {
      part = strip_prefix_ci(part, "do you want me to ");
      part = strip_prefix_ci(part, "would you like me to ");
      part = strip_prefix_ci(part, "or ");
      part = strip_prefix_ci(part, "and ");
      if (!part.empty()) out.options.push_back(part);
    }
  }
  return out;
}

std::string OracleBackend::complete(const PromptDocument& prompt, const PromptConfig& cfg) {
  const Grid& g = resolver_(prompt.grid_id);
  OracleResponse r = respond(g, prompt.instruction);
  if (cfg.condition == Condition::WithNorms)
    return "Norm: " + std::string(norm_label_name(r.label)) + ". " + r.rationale.detail +
           "\nResponse: " + r.nl_text;
  return "Response: " + r.nl_text;
}

ScriptedBackend ScriptedBackend::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AgentError("cannot open scripted replies: " + path);
  nlohmann::json doc;
  in >> doc;
  ScriptedBackend b;
  for (const auto& item : doc)
    b.replies_[item.at("digest").get<std::string>()] = item.at("reply").get<std::string>();
  return b;
}

void ScriptedBackend::save(const std::string& path) const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& [digest, reply] : replies_)
    doc.push_back({{"digest", digest}, {"reply", reply}});
  std::ofstream out(path);
  out << doc.dump(2) << "\n";
}

void ScriptedBackend::add(const std::string& digest, std::string reply) {
  replies_[digest] = std::move(reply);
}

std::string ScriptedBackend::complete(const PromptDocument& prompt, const PromptConfig&) {
  auto it = replies_.find(prompt_digest(prompt.full_text));
  if (it == replies_.end())
    throw AgentError("NoScriptedReply for digest " + prompt_digest(prompt.full_text));
  return it->second;
}

RemoteChatBackend::RemoteChatBackend(std::string endpoint, std::string model,
                                     std::string credential_env)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      credential_env_(std::move(credential_env)) {}

void RemoteChatBackend::set_max_in_flight(int n) { max_in_flight_ = std::max(1, n); }

std::string RemoteChatBackend::complete(const PromptDocument& prompt, const PromptConfig& cfg) {
  const char* key = std::getenv(credential_env_.c_str());
  if (!key || !*key)
    throw AgentError("MissingCredential: environment variable " + credential_env_ + " is not set");

  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  struct Slot {
    RemoteChatBackend* b;
    ~Slot() {
      std::lock_guard lock(b->mu_);
      --b->in_flight_;
      b->cv_.notify_one();
    }
  } slot{this};

  nlohmann::json body = {
      {"model", model_},
      {"temperature", cfg.temperature},
      {"max_tokens", cfg.max_tokens},
      {"messages", {{{"role", "user"}, {"content", prompt.full_text}}}},
  };

  std::string last_error;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms_ << (attempt - 1)));
    httplib::Client client(endpoint_);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failed";
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw AgentError("BackendUnavailable: HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      auto doc = nlohmann::json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw AgentError(std::string("BackendUnavailable: malformed response: ") + e.what());
    }
  }
  throw AgentError("BackendUnavailable after 3 attempts: " + last_error);
}

}  // namespace dkg
