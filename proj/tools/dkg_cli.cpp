// dkg — command-line surface for the Doors-Keys-Gems gridworld toolkit.
//
// Subcommands: validate, classify, prompt, run, repl, annotate.
// Exit codes: 0 success, 1 validation/scoring failure, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dkg/evalharness.hpp"

namespace fs = std::filesystem;
using namespace dkg;

namespace {

Grid load_grid_arg(const std::string& arg, const std::string& data_dir) {
  if (fs::is_regular_file(arg)) return Grid::load_file(arg);
  Corpus corpus = Corpus::load(data_dir, Corpus::Validation::Structural);
  if (corpus.has_grid(arg)) return corpus.grid(arg);
  throw GridError("no such grid file or corpus grid id: " + arg);
}

// Flat key = value config file; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

int cmd_validate(const std::string& corpus_dir) {
  try {
    Corpus corpus = Corpus::load(corpus_dir, Corpus::Validation::Strict);
    int gems_checked = 0;
    for (const auto& id : corpus.grid_ids()) {
      const Grid& g = corpus.grid(id);
      for (Position gem : g.locate(CellKind::Gem)) {
        GemAnalysis an = analyze_gem(g, g.human(), gem);
        auto brute = brute_force_required_keys(g, g.human(), gem);
        bool planner_reaches = an.human_cost.has_value();
        if (planner_reaches != brute.has_value() ||
            (brute && an.required_keys != *brute)) {
          std::cerr << "validate: planner/brute-force disagreement on grid " << id << " gem "
                    << coord(gem) << "\n";
          return 1;
        }
        ++gems_checked;
      }
    }
    std::cout << "corpus ok: " << corpus.grid_ids().size() << " grids, "
              << corpus.entries().size() << " instructions, " << gems_checked
              << " gem analyses cross-checked\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "validate: " << e.what() << "\n";
    return 1;
  }
}

int cmd_classify(const std::string& grid_arg, const std::string& instruction,
                 const std::string& data_dir) {
  try {
    Grid g = load_grid_arg(grid_arg, data_dir);
    OracleResponse r = respond(g, instruction);
    std::cout << "Label: " << norm_label_name(r.label) << "\n";
    std::cout << "Rationale: " << r.rationale.detail << "\n";
    if (r.inferred_gem) std::cout << "Inferred gem: " << coord(*r.inferred_gem) << "\n";
    std::cout << "Response: " << r.nl_text << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "classify: " << e.what() << "\n";
    return 1;
  }
}

int cmd_prompt(const std::string& grid_arg, const std::string& instruction,
               const std::string& condition_word, const std::string& data_dir) {
  try {
    auto condition = condition_from_name(condition_word);
    if (!condition) {
      std::cerr << "prompt: unknown condition '" << condition_word
                << "' (expected with-norms or without-norms)\n";
      return 2;
    }
    Grid g = load_grid_arg(grid_arg, data_dir);
    Corpus corpus = Corpus::load(data_dir, Corpus::Validation::Structural);
    TemplateSet templates = TemplateSet::load(data_dir + "/templates");
    std::string exemplar_file = *condition == Condition::WithNorms
                                    ? data_dir + "/exemplars/with_norms.json"
                                    : data_dir + "/exemplars/without_norms.json";
    auto exemplars = load_exemplars(exemplar_file, corpus.grid_ids());
    PromptConfig cfg;
    cfg.condition = *condition;
    PromptDocument doc = build_prompt(g, instruction, cfg, exemplars, templates);
    std::cout << doc.full_text << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "prompt: " << e.what() << "\n";
    return 1;
  }
}

struct RunConfig {
  std::string corpus;
  std::string conditions = "both";  // both | with-norms | without-norms
  std::string backend = "oracle";   // oracle | scripted | remote
  std::string scripted_replies;
  std::string endpoint = "https://api.openai.com";
  std::string model = "gpt-4";
  std::string credential_env = "OPENAI_API_KEY";
  double temperature = 0.2;
  int max_tokens = 512;
  int parallelism = 1;
  std::string output_dir = "out";
  std::string ratings;
};

void apply_config_file(RunConfig& rc, const std::map<std::string, std::string>& kv) {
  auto get = [&](const char* key, auto& field) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(field)>, std::string>)
      field = it->second;
    else if constexpr (std::is_same_v<std::decay_t<decltype(field)>, int>)
      field = std::stoi(it->second);
    else
      field = std::stod(it->second);
  };
  get("corpus", rc.corpus);
  get("conditions", rc.conditions);
  get("backend", rc.backend);
  get("scripted_replies", rc.scripted_replies);
  get("endpoint", rc.endpoint);
  get("model", rc.model);
  get("credential_env", rc.credential_env);
  get("temperature", rc.temperature);
  get("max_tokens", rc.max_tokens);
  get("parallelism", rc.parallelism);
  get("output_dir", rc.output_dir);
  get("ratings", rc.ratings);
}

int cmd_run(const RunConfig& rc) {
  try {
    if (rc.corpus.empty()) {
      std::cerr << "run: no corpus path configured\n";
      return 2;
    }
    if (rc.parallelism < 1) {
      std::cerr << "run: parallelism must be >= 1\n";
      return 2;
    }
    Corpus corpus = Corpus::load(rc.corpus, Corpus::Validation::Strict);
    TemplateSet templates = TemplateSet::load(rc.corpus + "/templates");
    auto with = load_exemplars(rc.corpus + "/exemplars/with_norms.json", corpus.grid_ids());
    auto without = load_exemplars(rc.corpus + "/exemplars/without_norms.json", corpus.grid_ids());

    RunOptions opts;
    opts.parallelism = rc.parallelism;
    opts.max_tokens = rc.max_tokens;
    opts.temperature = rc.temperature;
    if (rc.conditions == "with-norms")
      opts.conditions = {Condition::WithNorms};
    else if (rc.conditions == "without-norms")
      opts.conditions = {Condition::WithoutNorms};
    else if (rc.conditions != "both") {
      std::cerr << "run: unknown conditions value '" << rc.conditions << "'\n";
      return 2;
    }

    std::unique_ptr<Backend> backend;
    if (rc.backend == "oracle") {
      backend = std::make_unique<OracleBackend>(
          [&corpus](const std::string& id) -> const Grid& { return corpus.grid(id); });
    } else if (rc.backend == "scripted") {
      if (rc.scripted_replies.empty()) {
        std::cerr << "run: scripted backend needs scripted_replies\n";
        return 2;
      }
      backend = std::make_unique<ScriptedBackend>(ScriptedBackend::load(rc.scripted_replies));
    } else if (rc.backend == "remote") {
      backend = std::make_unique<RemoteChatBackend>(rc.endpoint, rc.model, rc.credential_env);
    } else {
      std::cerr << "run: unknown backend '" << rc.backend << "'\n";
      return 2;
    }

    auto records = run_experiment(corpus, opts, *backend, templates, with, without);
    if (!rc.ratings.empty()) ingest_ratings(records, rc.ratings);

    fs::create_directories(rc.output_dir);
    save_records(records, rc.output_dir + "/records.jsonl");
    MetricsReport report = build_report(records, corpus);
    std::string text = format_report(report);
    std::ofstream(rc.output_dir + "/report.txt") << text;
    std::ofstream(rc.output_dir + "/report.csv") << report_csv(report);
    std::cout << text;

    int failed = 0;
    for (const auto& r : records)
      if (r.failed) ++failed;
    if (failed > 0)
      std::cerr << "run: " << failed << " of " << records.size() << " records failed\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << "\n";
    return 1;
  }
}

// Applies the oracle plan to a grid snapshot: picked keys disappear,
// unlocked doors open, and the agent ends next to the human.
Grid apply_plan(const Grid& g, const Plan& plan) {
  std::vector<std::vector<Cell>> cells;
  for (int r = 0; r < g.height(); ++r) {
    cells.emplace_back();
    for (int c = 0; c < g.width(); ++c) cells.back().push_back(g.at({r, c}));
  }
  Position agent = g.agent();
  for (const auto& a : plan.actions) {
    switch (a.kind) {
      case AgentAction::Kind::MoveAlong:
        if (!a.path.cells.empty()) agent = a.path.cells.back();
        break;
      case AgentAction::Kind::PickUp:
      case AgentAction::Kind::Unlock:
        cells[a.pos.row][a.pos.col] = Cell{CellKind::Empty};
        break;
      case AgentAction::Kind::PassKeys: break;
    }
  }
  Position start = g.agent();
  cells[start.row][start.col] = Cell{CellKind::Empty};
  cells[agent.row][agent.col] = Cell{CellKind::Agent};
  return Grid::from_cells(std::move(cells), g.id());
}

int cmd_repl(const std::string& grid_arg, const std::string& data_dir) {
  try {
    Grid g = load_grid_arg(grid_arg, data_dir);
    std::optional<Plan> last_plan;
    std::cout << g.render() << "\n";
    std::cout << "Type an instruction, 'apply' to apply the last plan, 'show' to reprint, "
                 "'quit' to exit.\n";
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
      if (line == "quit" || line == "exit") return 0;
      if (line == "show") {
        std::cout << g.render() << "\n";
        continue;
      }
      if (line == "apply") {
        if (!last_plan) {
          std::cout << "No plan to apply yet.\n";
          continue;
        }
        SimResult sim = simulate(g, *last_plan);
        if (!sim.ok) {
          std::cout << "Plan no longer valid: " << sim.reason << "\n";
          continue;
        }
        g = apply_plan(g, *last_plan);
        last_plan.reset();
        std::cout << g.render() << "\n";
        continue;
      }
      if (line.empty()) continue;
      OracleResponse r = respond(g, line);
      std::cout << "Norm: " << norm_label_name(r.label) << ". " << r.rationale.detail << "\n";
      std::cout << "Response: " << r.nl_text << "\n";
      last_plan = r.plan;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "repl: " << e.what() << "\n";
    return 1;
  }
}

// Regenerates gold annotations from the oracle, preserving hand-authored
// ids, texts, and types. Fails if the oracle label contradicts the type.
int cmd_annotate(const std::string& corpus_dir) {
  try {
    Corpus corpus = Corpus::load(corpus_dir, Corpus::Validation::Structural);
    nlohmann::json entries = nlohmann::json::array();
    int mismatches = 0;
    for (const auto& entry : corpus.entries()) {
      const Grid& g = corpus.grid(entry.grid_id);
      OracleResponse r = respond(g, entry.text);
      NormLabel expected = *label_for_instruction_type(entry.instruction_type);
      if (r.label != expected) {
        std::cerr << "annotate: " << entry.instruction_id << " typed " << entry.instruction_type
                  << " but oracle says " << norm_label_name(r.label) << " (" << r.rationale.detail
                  << ")\n";
        ++mismatches;
      }
      nlohmann::json ej;
      ej["id"] = entry.instruction_id;
      ej["grid"] = entry.grid_id;
      ej["text"] = entry.text;
      ej["type"] = entry.instruction_type;
      nlohmann::json gold;
      gold["label"] = std::string(norm_label_name(r.label));
      if (r.inferred_gem) gold["gem"] = {r.inferred_gem->row, r.inferred_gem->col};
      if (r.plan) gold["plan"] = plan_to_json(*r.plan);
      if (!r.options.empty()) {
        nlohmann::json opts = nlohmann::json::array();
        for (const auto& o : r.options) opts.push_back(option_to_json(o));
        gold["options"] = std::move(opts);
      }
      ej["gold"] = std::move(gold);
      entries.push_back(std::move(ej));
    }
    if (mismatches > 0) return 1;
    nlohmann::json doc;
    doc["entries"] = std::move(entries);
    std::ofstream out(fs::path(corpus_dir) / "instructions.json");
    out << doc.dump(2) << "\n";
    std::cout << "annotated " << corpus.entries().size() << " instructions\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "annotate: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doors-Keys-Gems norm-aware instruction toolkit"};
  app.require_subcommand(1);

  std::string default_data = DKG_DATA_DIR;

  auto* validate = app.add_subcommand("validate", "Validate a corpus directory");
  std::string validate_dir = default_data;
  validate->add_option("corpus", validate_dir, "Corpus directory");

  auto* classify = app.add_subcommand("classify", "Classify one instruction against a grid");
  std::string cls_grid, cls_text, cls_data = default_data;
  classify->add_option("grid", cls_grid, "Grid file or corpus grid id")->required();
  classify->add_option("instruction", cls_text, "Instruction text")->required();
  classify->add_option("--data", cls_data, "Corpus directory for grid-id lookup");

  auto* prompt = app.add_subcommand("prompt", "Print the assembled prompt");
  std::string pr_grid, pr_text, pr_cond = "with-norms", pr_data = default_data;
  prompt->add_option("grid", pr_grid, "Grid file or corpus grid id")->required();
  prompt->add_option("instruction", pr_text, "Instruction text")->required();
  prompt->add_option("--condition", pr_cond, "with-norms or without-norms");
  prompt->add_option("--data", pr_data, "Corpus directory for templates and exemplars");

  auto* run = app.add_subcommand("run", "Run the full experiment");
  std::string run_config_path;
  RunConfig rc;
  rc.corpus = default_data;
  run->add_option("--config", run_config_path, "Flat key = value config file");
  std::string f_corpus, f_conditions, f_backend, f_scripted, f_endpoint, f_model, f_credential,
      f_output, f_ratings;
  int f_max_tokens = -1, f_parallelism = -1;
  double f_temperature = -1.0;
  run->add_option("--corpus", f_corpus, "Corpus directory");
  run->add_option("--conditions", f_conditions, "both, with-norms, or without-norms");
  run->add_option("--backend", f_backend, "oracle, scripted, or remote");
  run->add_option("--scripted-replies", f_scripted, "Scripted reply file");
  run->add_option("--endpoint", f_endpoint, "Remote endpoint URL");
  run->add_option("--model", f_model, "Remote model name");
  run->add_option("--credential-env", f_credential, "Environment variable holding the API key");
  run->add_option("--temperature", f_temperature, "Sampling temperature");
  run->add_option("--max-tokens", f_max_tokens, "Completion token limit");
  run->add_option("--parallelism", f_parallelism, "Concurrent evaluations");
  run->add_option("--output", f_output, "Output directory");
  run->add_option("--ratings", f_ratings, "Human ratings JSON file");

  auto* repl = app.add_subcommand("repl", "Interactive grid exploration");
  std::string repl_grid, repl_data = default_data;
  repl->add_option("grid", repl_grid, "Grid file or corpus grid id")->required();
  repl->add_option("--data", repl_data, "Corpus directory for grid-id lookup");

  auto* annotate = app.add_subcommand("annotate", "Regenerate gold annotations via the oracle");
  std::string annotate_dir = default_data;
  annotate->add_option("corpus", annotate_dir, "Corpus directory");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(validate_dir);
  if (classify->parsed()) return cmd_classify(cls_grid, cls_text, cls_data);
  if (prompt->parsed()) return cmd_prompt(pr_grid, pr_text, pr_cond, pr_data);
  if (repl->parsed()) return cmd_repl(repl_grid, repl_data);
  if (annotate->parsed()) return cmd_annotate(annotate_dir);

  // run: file values override defaults; flags override the file.
  try {
    if (!run_config_path.empty()) apply_config_file(rc, read_config(run_config_path));
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << "\n";
    return 2;
  }
  if (!f_corpus.empty()) rc.corpus = f_corpus;
  if (!f_conditions.empty()) rc.conditions = f_conditions;
  if (!f_backend.empty()) rc.backend = f_backend;
  if (!f_scripted.empty()) rc.scripted_replies = f_scripted;
  if (!f_endpoint.empty()) rc.endpoint = f_endpoint;
  if (!f_model.empty()) rc.model = f_model;
  if (!f_credential.empty()) rc.credential_env = f_credential;
  if (!f_output.empty()) rc.output_dir = f_output;
  if (!f_ratings.empty()) rc.ratings = f_ratings;
  if (f_temperature >= 0.0) rc.temperature = f_temperature;
  if (f_max_tokens >= 0) rc.max_tokens = f_max_tokens;
  if (f_parallelism >= 0) rc.parallelism = f_parallelism;
  return cmd_run(rc);
}
