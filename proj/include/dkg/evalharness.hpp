#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dkg/agent.hpp"
#include "dkg/corpus.hpp"

namespace dkg {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scores {
  double task = 0.0;
  std::optional<double> options_acc;  // clarification-type gold only
  int length = 0;                     // characters of response_text
  std::optional<int> option_count;    // clarification-type gold only
  std::optional<double> relevancy;    // ingested human rating
  std::optional<double> clarity;
};

struct RunRecord {
  std::string grid_id;
  std::string instruction_id;
  Condition condition = Condition::WithNorms;
  std::string prompt_digest;
  std::string raw_reply;
  ParsedAgentReply parsed;
  Scores scores;
  bool failed = false;
  std::string error;
};

// Task accuracy: |predicted action atoms ∩ gold atoms| / |gold atoms|,
// order-insensitive. Clarification-type instructions score option overlap
// against gold options instead.
double score_task(const ParsedAgentReply& parsed, const GoldAnnotation& gold, const Grid& g);

// Options accuracy: |presented ∩ gold| / |presented|; absent for
// plan-type gold annotations.
std::optional<double> score_options(const ParsedAgentReply& parsed, const GoldAnnotation& gold);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
};

// (predicted, gold) pairs; an absent prediction counts as a miss.
std::map<NormLabel, ClassMetrics> per_class_prf(
    const std::vector<std::pair<std::optional<NormLabel>, NormLabel>>& pairs);

struct StatsResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;
  double d = 0.0;
};

// Two-tailed paired t-test plus paired Cohen's d (mean(diff)/sd(diff)).
// Degenerate all-zero diffs yield t = 0, d = 0, p = 1.
StatsResult paired_stats(const std::vector<double>& a, const std::vector<double>& b);

struct RunOptions {
  std::vector<Condition> conditions = {Condition::WithNorms, Condition::WithoutNorms};
  int parallelism = 1;
  int max_tokens = 512;
  double temperature = 0.2;
};

// One record per (instruction, condition), sorted by
// (grid_id, instruction_id, condition). Backend failures flag the record
// instead of aborting the run.
std::vector<RunRecord> run_experiment(const Corpus& corpus, const RunOptions& opts,
                                      Backend& backend, const TemplateSet& templates,
                                      const std::vector<Exemplar>& with_norms_exemplars,
                                      const std::vector<Exemplar>& without_norms_exemplars);

// Ratings file: JSON array of {grid_id, instruction_id, condition,
// relevancy?, clarity?}; values on the 0.25-step scale.
void ingest_ratings(std::vector<RunRecord>& records, const std::string& path);

struct ConditionSummary {
  int n = 0;
  double task = 0.0;
  std::optional<double> options_acc;
  double mean_length = 0.0;
  std::optional<double> mean_options;
  std::optional<double> relevancy;
  std::optional<double> clarity;
  std::optional<double> interpretation_accuracy;  // WithNorms only
};

struct MetricsReport {
  std::map<Condition, ConditionSummary> conditions;
  std::map<NormLabel, ClassMetrics> per_class;  // WithNorms predictions
};

MetricsReport build_report(const std::vector<RunRecord>& records, const Corpus& corpus);
std::string format_report(const MetricsReport& report);
std::string report_csv(const MetricsReport& report);

void save_records(const std::vector<RunRecord>& records, const std::string& path);  // JSONL
std::vector<RunRecord> load_records(const std::string& path);

}  // namespace dkg
