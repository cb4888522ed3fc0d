#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "dkg/agent.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

using namespace dkg;

namespace {

Grid appendix() { return Grid::load_file(DKG_DATA_DIR "/grids/appendix-1.txt"); }

PromptDocument doc_for(const Grid& g, const std::string& instruction, Condition c) {
  PromptDocument d;
  d.grid_id = g.id();
  d.instruction = instruction;
  d.condition = c;
  d.full_text = "prompt for " + instruction;
  return d;
}

}  // namespace

TEST_CASE("prompt_digest is the stable FNV-1a 64 hex digest") {
  CHECK(prompt_digest("") == "cbf29ce484222325");
  CHECK(prompt_digest("hello") == "a430d84680aabd0b");
  CHECK(prompt_digest("hello") == prompt_digest("hello"));
  CHECK(prompt_digest("hello") != prompt_digest("hello "));
}

TEST_CASE("parse_reply extracts the norm line, coords, colors, and options") {
  std::string reply =
      "Norm: Quantity Violation. The instruction does not mention the yellow key.\n"
      "Response: There are one red key and one yellow key on the grid. I will collect the "
      "keys at (0, 0) and (1, 0), then pass them to you.";
  ParsedAgentReply p = parse_reply(reply, Condition::WithNorms);
  CHECK(p.parse_ok);
  CHECK(p.norm_label == NormLabel::QuantityViolation);
  CHECK(p.response_text.rfind("There are one red key", 0) == 0);
  REQUIRE(p.coords.size() == 2);
  CHECK(p.coords[0] == Position{0, 0});
  CHECK(p.coords[1] == Position{1, 0});
  CHECK(p.colors_mentioned == std::vector<std::string>{"red", "yellow"});
  CHECK(p.options.empty());
}

TEST_CASE("parse_reply splits the final question into options") {
  std::string reply =
      "Response: There is no blue key on the grid. Do you want me to collect the red key, "
      "the yellow key, or both of them?";
  ParsedAgentReply p = parse_reply(reply, Condition::WithoutNorms);
  CHECK(p.parse_ok);
  REQUIRE(p.options.size() == 3);
  CHECK(p.options[0] == "collect the red key");
  CHECK(p.options[1] == "the yellow key");
  CHECK(p.options[2] == "both of them");
}

TEST_CASE("parse_reply keeps coordinates intact when splitting options") {
  std::string reply =
      "Response: Which one? Do you want me to go for the gem at (2, 0), or the gem at (2, 8)?";
  ParsedAgentReply p = parse_reply(reply, Condition::WithoutNorms);
  REQUIRE(p.options.size() == 2);
  CHECK(p.options[0] == "go for the gem at (2, 0)");
  CHECK(p.options[1] == "the gem at (2, 8)");
  REQUIRE(p.coords.size() == 2);
  CHECK(p.coords[0] == Position{2, 0});
  CHECK(p.coords[1] == Position{2, 8});
}

TEST_CASE("parse_reply tolerates whitespace inside coordinates and repeats colors once") {
  ParsedAgentReply p =
      parse_reply("Response: red red yellow red keys at ( 3 , 4 )", Condition::WithoutNorms);
  REQUIRE(p.coords.size() == 1);
  CHECK(p.coords[0] == Position{3, 4});
  CHECK(p.colors_mentioned == std::vector<std::string>{"red", "yellow"});
}

TEST_CASE("parse_reply marks schema failures without throwing") {
  ParsedAgentReply missing = parse_reply("Response: no norm line here", Condition::WithNorms);
  CHECK_FALSE(missing.parse_ok);

  ParsedAgentReply garbage = parse_reply("Norm: gibberish\nResponse: x", Condition::WithNorms);
  CHECK_FALSE(garbage.parse_ok);

  ParsedAgentReply empty = parse_reply("", Condition::WithNorms);
  CHECK_FALSE(empty.parse_ok);
  CHECK(empty.coords.empty());

  // Without norms, any non-empty text parses.
  CHECK(parse_reply("free-form text", Condition::WithoutNorms).parse_ok);
  CHECK_FALSE(parse_reply("", Condition::WithoutNorms).parse_ok);
}

TEST_CASE("OracleBackend renders the oracle response in the reply schema") {
  Grid g = appendix();
  OracleBackend backend([&](const std::string&) -> const Grid& { return g; });

  PromptConfig with{Condition::WithNorms};
  std::string reply =
      backend.complete(doc_for(g, "Can you get the yellow key?", Condition::WithNorms), with);
  CHECK(reply.rfind("Norm: No Violation.", 0) == 0);
  ParsedAgentReply p = parse_reply(reply, Condition::WithNorms);
  CHECK(p.parse_ok);
  CHECK(p.norm_label == NormLabel::NoViolation);

  PromptConfig without{Condition::WithoutNorms};
  std::string bare =
      backend.complete(doc_for(g, "Can you get the yellow key?", Condition::WithoutNorms), without);
  CHECK(bare.rfind("Response: ", 0) == 0);
  CHECK(bare.find("Norm:") == std::string::npos);
}

TEST_CASE("ScriptedBackend replays by digest and round-trips through disk") {
  Grid g = appendix();
  PromptDocument d = doc_for(g, "x", Condition::WithNorms);
  PromptConfig cfg;

  ScriptedBackend b;
  b.add(prompt_digest(d.full_text), "canned reply");
  CHECK(b.complete(d, cfg) == "canned reply");

  std::string path = "/tmp/dkg_scripted_test.json";
  b.save(path);
  ScriptedBackend loaded = ScriptedBackend::load(path);
  CHECK(loaded.complete(d, cfg) == "canned reply");

  PromptDocument other = doc_for(g, "y", Condition::WithNorms);
  other.full_text = "different prompt";
  CHECK_THROWS_WITH_AS(loaded.complete(other, cfg), doctest::Contains("NoScriptedReply"),
                       AgentError);
  CHECK_THROWS_AS(ScriptedBackend::load("/tmp/no-such-replies.json"), AgentError);
}

TEST_CASE("RemoteChatBackend talks to an OpenAI-compatible server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};
  std::string seen_auth, seen_model;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_auth = req.get_header_value("Authorization");
    auto body = nlohmann::json::parse(req.body);
    seen_model = body.at("model").get<std::string>();
    if (fail_first > 0) {
      --fail_first;
      res.status = 500;
      res.set_content("transient", "text/plain");
      return;
    }
    nlohmann::json out = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "Response: remote ok"}}}}}}};
    res.set_content(out.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("DKG_TEST_KEY", "test-secret", 1);
  RemoteChatBackend backend("http://127.0.0.1:" + std::to_string(port), "test-model",
                            "DKG_TEST_KEY");
  backend.set_backoff_ms(1);

  Grid g = appendix();
  PromptDocument d = doc_for(g, "x", Condition::WithNorms);
  PromptConfig cfg;

  SUBCASE("success passes the bearer credential and model through") {
    CHECK(backend.complete(d, cfg) == "Response: remote ok");
    CHECK(hits == 1);
    CHECK(seen_auth == "Bearer test-secret");
    CHECK(seen_model == "test-model");
  }
  SUBCASE("5xx responses are retried with backoff") {
    fail_first = 2;
    CHECK(backend.complete(d, cfg) == "Response: remote ok");
    CHECK(hits == 3);
  }
  SUBCASE("persistent failure surfaces after three attempts") {
    fail_first = 99;
    CHECK_THROWS_WITH_AS(backend.complete(d, cfg), doctest::Contains("after 3 attempts"),
                         AgentError);
    CHECK(hits == 3);
  }
  SUBCASE("a missing credential fails before any request is made") {
    unsetenv("DKG_TEST_KEY");
    CHECK_THROWS_WITH_AS(backend.complete(d, cfg), doctest::Contains("MissingCredential"),
                         AgentError);
    CHECK(hits == 0);
  }

  server.stop();
  listener.join();
}
