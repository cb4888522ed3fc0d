#include "dkg/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace dkg {

namespace {

std::set<std::string> option_tokens(const std::string& text) {
  static const std::set<std::string> stop = {"the", "a", "an", "of", "at", "to", "me",
                                             "them", "collect", "unlock", "go", "for"};
  std::set<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!cur.empty()) {
      if (!stop.count(cur)) tokens.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty() && !stop.count(cur)) tokens.insert(cur);
  return tokens;
}

bool option_matches(const std::string& presented, const ClarificationOption& gold) {
  auto g = option_tokens(gold.description);
  auto p = option_tokens(presented);
  if (g.empty()) return false;
  return std::includes(p.begin(), p.end(), g.begin(), g.end());
}

struct Atom {
  enum class Kind { PickUp, Pass, Unlock } kind;
  Position pos{};               // PickUp/Unlock
  std::vector<Color> colors{};  // Pass, sorted

  auto key() const {
    return std::tuple(static_cast<int>(kind), pos.row, pos.col, colors);
  }
  bool operator<(const Atom& o) const { return key() < o.key(); }
};

std::set<Atom> plan_atoms(const Plan& plan) {
  std::set<Atom> atoms;
  for (const auto& a : plan.actions) {
    switch (a.kind) {
      case AgentAction::Kind::PickUp: atoms.insert({Atom::Kind::PickUp, a.pos}); break;
      case AgentAction::Kind::Unlock: atoms.insert({Atom::Kind::Unlock, a.pos}); break;
      case AgentAction::Kind::PassKeys: {
        auto colors = a.colors;
        std::sort(colors.begin(), colors.end());
        atoms.insert({Atom::Kind::Pass, {}, colors});
        break;
      }
      default: break;
    }
  }
  return atoms;
}

// Predicted atoms are over-generated from the reply's coordinates; spurious
// atoms never help because the score intersects against gold.
std::set<Atom> reply_atoms(const ParsedAgentReply& parsed, const Grid& g) {
  std::set<Atom> atoms;
  std::vector<Color> picked;
  for (Position p : parsed.coords) {
    if (!g.in_bounds(p)) continue;
    const Cell& cell = g.at(p);
    if (cell.kind == CellKind::Key) {
      atoms.insert({Atom::Kind::PickUp, p});
      picked.push_back(cell.color);
    } else if (cell.kind == CellKind::Door) {
      atoms.insert({Atom::Kind::Unlock, p});
    }
  }
  std::string lower;
  for (char c : parsed.response_text)
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower.find("pass") != std::string::npos && !picked.empty()) {
    std::sort(picked.begin(), picked.end());
    atoms.insert({Atom::Kind::Pass, {}, picked});
  }
  return atoms;
}

}  // namespace

double score_task(const ParsedAgentReply& parsed, const GoldAnnotation& gold, const Grid& g) {
  if (gold.gold_plan) {
    auto want = plan_atoms(*gold.gold_plan);
    if (want.empty()) return parsed.parse_ok ? 1.0 : 0.0;  // empty gold plan
    auto got = reply_atoms(parsed, g);
    int matched = 0;
    for (const auto& a : want)
      if (got.count(a)) ++matched;
    return static_cast<double>(matched) / static_cast<double>(want.size());
  }
  if (gold.gold_options.empty()) return 0.0;
  int matched = 0;
  for (const auto& go : gold.gold_options)
    for (const auto& po : parsed.options)
      if (option_matches(po, go)) {
        ++matched;
        break;
      }
  return static_cast<double>(matched) / static_cast<double>(gold.gold_options.size());
}

std::optional<double> score_options(const ParsedAgentReply& parsed, const GoldAnnotation& gold) {
  if (gold.gold_options.empty()) return std::nullopt;
  if (parsed.options.empty()) return 0.0;
  int valid = 0;
  for (const auto& po : parsed.options)
    for (const auto& go : gold.gold_options)
      if (option_matches(po, go)) {
        ++valid;
        break;
      }
  return static_cast<double>(valid) / static_cast<double>(parsed.options.size());
}

std::map<NormLabel, ClassMetrics> per_class_prf(
    const std::vector<std::pair<std::optional<NormLabel>, NormLabel>>& pairs) {
  constexpr NormLabel all[] = {NormLabel::NoViolation, NormLabel::QuantityViolation,
                               NormLabel::QualityViolation, NormLabel::RelationViolation,
                               NormLabel::MannerViolation};
  std::map<NormLabel, ClassMetrics> out;
  for (NormLabel c : all) {
    int tp = 0, fp = 0, fn = 0, support = 0;
    for (const auto& [pred, gold] : pairs) {
      if (gold == c) ++support;
      if (pred && *pred == c && gold == c) ++tp;
      else if (pred && *pred == c) ++fp;
      else if (gold == c) ++fn;
    }
    if (support == 0 && tp + fp == 0) continue;
    ClassMetrics m;
    m.support = support;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    out[c] = m;
  }
  return out;
}

StatsResult paired_stats(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw EvalError("paired_stats: unaligned samples");
  size_t n = a.size();
  if (n < 2) throw EvalError("paired_stats: need at least 2 pairs");
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));

  StatsResult r;
  r.df = static_cast<int>(n) - 1;
  if (sd == 0.0) {
    if (mean != 0.0) throw EvalError("DegenerateSample: constant nonzero differences");
    return r;  // t = 0, d = 0, p = 1
  }
  r.d = mean / sd;
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(r.df));
  r.p = 2.0 * boost::math::cdf(dist, -std::abs(r.t));
  return r;
}

namespace {

bool record_less(const RunRecord& a, const RunRecord& b) {
  return std::tie(a.grid_id, a.instruction_id, a.condition) <
         std::tie(b.grid_id, b.instruction_id, b.condition);
}

RunRecord evaluate_one(const Corpus& corpus, const CorpusEntry& entry, Condition condition,
                       const RunOptions& opts, Backend& backend, const TemplateSet& templates,
                       const std::vector<Exemplar>& exemplars) {
  RunRecord rec;
  rec.grid_id = entry.grid_id;
  rec.instruction_id = entry.instruction_id;
  rec.condition = condition;
  const Grid& g = corpus.grid(entry.grid_id);
  PromptConfig cfg{condition, opts.max_tokens, opts.temperature};
  try {
    PromptDocument prompt = build_prompt(g, entry.text, cfg, exemplars, templates);
    rec.prompt_digest = prompt_digest(prompt.full_text);
    rec.raw_reply = backend.complete(prompt, cfg);
    rec.parsed = parse_reply(rec.raw_reply, condition);
    rec.scores.task = score_task(rec.parsed, entry.gold, g);
    rec.scores.options_acc = score_options(rec.parsed, entry.gold);
    rec.scores.length = static_cast<int>(rec.parsed.response_text.size());
    if (!entry.gold.gold_options.empty())
      rec.scores.option_count = static_cast<int>(rec.parsed.options.size());
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const Corpus& corpus, const RunOptions& opts,
                                      Backend& backend, const TemplateSet& templates,
                                      const std::vector<Exemplar>& with_norms_exemplars,
                                      const std::vector<Exemplar>& without_norms_exemplars) {
  struct Job {
    const CorpusEntry* entry;
    Condition condition;
  };
  std::vector<Job> jobs;
  for (const auto& entry : corpus.entries())
    for (Condition c : opts.conditions) jobs.push_back({&entry, c});

  std::vector<RunRecord> records(jobs.size());
  auto work = [&](size_t i) {
    const Job& job = jobs[i];
    const auto& exemplars = job.condition == Condition::WithNorms ? with_norms_exemplars
                                                                  : without_norms_exemplars;
    records[i] = evaluate_one(corpus, *job.entry, job.condition, opts, backend, templates, exemplars);
  };

  int threads = std::max(1, opts.parallelism);
  if (threads == 1) {
    for (size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }
  std::sort(records.begin(), records.end(), record_less);
  return records;
}

void ingest_ratings(std::vector<RunRecord>& records, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EvalError("cannot open ratings file: " + path);
  nlohmann::json doc;
  in >> doc;
  auto check = [](double v) {
    for (double ok : {0.0, 0.25, 0.5, 0.75, 1.0})
      if (v == ok) return;
    throw EvalError("BadRatingValue: " + std::to_string(v));
  };
  for (const auto& rj : doc) {
    std::string grid_id = rj.at("grid_id").get<std::string>();
    std::string instruction_id = rj.at("instruction_id").get<std::string>();
    auto cond = condition_from_name(rj.at("condition").get<std::string>());
    if (!cond) throw EvalError("BadRatingValue: unknown condition");
    for (auto& rec : records) {
      if (rec.grid_id != grid_id || rec.instruction_id != instruction_id ||
          rec.condition != *cond)
        continue;
      if (rj.contains("relevancy")) {
        double v = rj.at("relevancy").get<double>();
        check(v);
        rec.scores.relevancy = v;
      }
      if (rj.contains("clarity")) {
        double v = rj.at("clarity").get<double>();
        check(v);
        rec.scores.clarity = v;
      }
    }
  }
}

namespace {

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::map<std::string, const CorpusEntry*> entry_index(const Corpus& corpus) {
  std::map<std::string, const CorpusEntry*> idx;
  for (const auto& e : corpus.entries()) idx[e.instruction_id] = &e;
  return idx;
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v, int prec = 4) {
  return v ? fmt(*v, prec) : std::string("-");
}

}  // namespace

MetricsReport build_report(const std::vector<RunRecord>& records, const Corpus& corpus) {
  MetricsReport report;
  auto idx = entry_index(corpus);
  std::vector<std::pair<std::optional<NormLabel>, NormLabel>> prf_pairs;

  for (Condition cond : {Condition::WithNorms, Condition::WithoutNorms}) {
    std::vector<double> task, opts_acc, lengths, opt_counts, relevancy, clarity, interp;
    for (const auto& rec : records) {
      if (rec.condition != cond || rec.failed) continue;
      auto it = idx.find(rec.instruction_id);
      if (it == idx.end()) continue;
      const CorpusEntry& entry = *it->second;
      task.push_back(rec.scores.task);
      lengths.push_back(rec.scores.length);
      if (rec.scores.options_acc) opts_acc.push_back(*rec.scores.options_acc);
      if (rec.scores.option_count) opt_counts.push_back(*rec.scores.option_count);
      if (rec.scores.relevancy) relevancy.push_back(*rec.scores.relevancy);
      if (rec.scores.clarity) clarity.push_back(*rec.scores.clarity);
      if (cond == Condition::WithNorms) {
        interp.push_back(rec.parsed.norm_label && *rec.parsed.norm_label == entry.gold.gold_label
                             ? 1.0
                             : 0.0);
        prf_pairs.push_back({rec.parsed.norm_label, entry.gold.gold_label});
      }
    }
    if (task.empty()) continue;
    ConditionSummary s;
    s.n = static_cast<int>(task.size());
    s.task = *mean_of(task);
    s.options_acc = mean_of(opts_acc);
    s.mean_length = *mean_of(lengths);
    s.mean_options = mean_of(opt_counts);
    s.relevancy = mean_of(relevancy);
    s.clarity = mean_of(clarity);
    if (cond == Condition::WithNorms) s.interpretation_accuracy = mean_of(interp);
    report.conditions[cond] = s;
  }
  report.per_class = per_class_prf(prf_pairs);
  return report;
}

std::string format_report(const MetricsReport& report) {
  std::ostringstream out;
  out << "Experiment          Task      Options   MeanLen   MeanOpts  Relevance Clarity\n";
  for (const auto& [cond, s] : report.conditions) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-18s  %-8s  %-8s  %-8s  %-8s  %-8s  %-8s\n",
                  std::string(condition_name(cond)).c_str(), fmt(s.task).c_str(),
                  fmt_opt(s.options_acc).c_str(), fmt(s.mean_length, 2).c_str(),
                  fmt_opt(s.mean_options, 2).c_str(), fmt_opt(s.relevancy).c_str(),
                  fmt_opt(s.clarity).c_str());
    out << line;
  }
  auto with = report.conditions.find(Condition::WithNorms);
  if (with != report.conditions.end() && with->second.interpretation_accuracy)
    out << "\nInstruction interpretation accuracy (with-norms): "
        << fmt(*with->second.interpretation_accuracy) << "\n";
  if (!report.per_class.empty()) {
    out << "\nPer-class interpretation metrics (with-norms)\n";
    out << "Class                Precision Recall    F1        Support\n";
    for (const auto& [label, m] : report.per_class) {
      char line[256];
      std::snprintf(line, sizeof(line), "%-20s %-9s %-9s %-9s %d\n",
                    std::string(norm_label_name(label)).c_str(), fmt(m.precision, 2).c_str(),
                    fmt(m.recall, 2).c_str(), fmt(m.f1, 2).c_str(), m.support);
      out << line;
    }
  }
  return out.str();
}

std::string report_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "experiment,task,options,mean_length,mean_options,relevance,clarity\n";
  for (const auto& [cond, s] : report.conditions) {
    out << condition_name(cond) << "," << fmt(s.task) << "," << fmt_opt(s.options_acc) << ","
        << fmt(s.mean_length, 2) << "," << fmt_opt(s.mean_options, 2) << ","
        << fmt_opt(s.relevancy) << "," << fmt_opt(s.clarity) << "\n";
  }
  out << "class,precision,recall,f1,support\n";
  for (const auto& [label, m] : report.per_class)
    out << norm_label_name(label) << "," << fmt(m.precision, 2) << "," << fmt(m.recall, 2) << ","
        << fmt(m.f1, 2) << "," << m.support << "\n";
  return out.str();
}

namespace {

nlohmann::json parsed_to_json(const ParsedAgentReply& p) {
  nlohmann::json j;
  if (p.norm_label) j["norm_label"] = std::string(norm_label_name(*p.norm_label));
  j["response_text"] = p.response_text;
  nlohmann::json coords = nlohmann::json::array();
  for (Position c : p.coords) coords.push_back({c.row, c.col});
  j["coords"] = std::move(coords);
  j["colors"] = p.colors_mentioned;
  j["options"] = p.options;
  j["parse_ok"] = p.parse_ok;
  return j;
}

ParsedAgentReply parsed_from_json(const nlohmann::json& j) {
  ParsedAgentReply p;
  if (j.contains("norm_label"))
    p.norm_label = norm_label_from_text(j.at("norm_label").get<std::string>());
  p.response_text = j.at("response_text").get<std::string>();
  for (const auto& cj : j.at("coords")) p.coords.push_back({cj.at(0).get<int>(), cj.at(1).get<int>()});
  p.colors_mentioned = j.at("colors").get<std::vector<std::string>>();
  p.options = j.at("options").get<std::vector<std::string>>();
  p.parse_ok = j.at("parse_ok").get<bool>();
  return p;
}

}  // namespace

void save_records(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw EvalError("cannot write records: " + path);
  for (const auto& rec : records) {
    nlohmann::json j;
    j["grid_id"] = rec.grid_id;
    j["instruction_id"] = rec.instruction_id;
    j["condition"] = condition_name(rec.condition);
    j["prompt_digest"] = rec.prompt_digest;
    j["raw_reply"] = rec.raw_reply;
    j["parsed"] = parsed_to_json(rec.parsed);
    j["task"] = rec.scores.task;
    if (rec.scores.options_acc) j["options_acc"] = *rec.scores.options_acc;
    j["length"] = rec.scores.length;
    if (rec.scores.option_count) j["option_count"] = *rec.scores.option_count;
    if (rec.scores.relevancy) j["relevancy"] = *rec.scores.relevancy;
    if (rec.scores.clarity) j["clarity"] = *rec.scores.clarity;
    j["failed"] = rec.failed;
    if (rec.failed) j["error"] = rec.error;
    out << j.dump() << "\n";
  }
}

std::vector<RunRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EvalError("cannot read records: " + path);
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    RunRecord rec;
    rec.grid_id = j.at("grid_id").get<std::string>();
    rec.instruction_id = j.at("instruction_id").get<std::string>();
    rec.condition = *condition_from_name(j.at("condition").get<std::string>());
    rec.prompt_digest = j.at("prompt_digest").get<std::string>();
    rec.raw_reply = j.at("raw_reply").get<std::string>();
    rec.parsed = parsed_from_json(j.at("parsed"));
    rec.scores.task = j.at("task").get<double>();
    if (j.contains("options_acc")) rec.scores.options_acc = j.at("options_acc").get<double>();
    rec.scores.length = j.at("length").get<int>();
    if (j.contains("option_count")) rec.scores.option_count = j.at("option_count").get<int>();
    if (j.contains("relevancy")) rec.scores.relevancy = j.at("relevancy").get<double>();
    if (j.contains("clarity")) rec.scores.clarity = j.at("clarity").get<double>();
    rec.failed = j.at("failed").get<bool>();
    if (j.contains("error")) rec.error = j.at("error").get<std::string>();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace dkg
