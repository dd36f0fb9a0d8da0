#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "montage/corpus.hpp"
#include "montage/dovescore.hpp"
#include "montage/eval.hpp"
#include "montage/montage_builder.hpp"
#include "montage/text.hpp"

namespace montage::cli {

namespace {

const std::vector<std::string> kEvaluators{"dovescore", "coarse-llm", "oracle", "constant"};

// Raw option values; empty means "not given on the command line".
struct Flags {
  std::string config;
  std::string backend;
  std::string model;
  std::string seed;
  std::string record;
  unsigned jobs = 0;
  double timeout_seconds = 0;
  int max_retries = -1;
  unsigned max_in_flight = 0;
  bool include_paraphrases = false;
  bool verbose = false;
  bool two_call_sorter = false;
};

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text.front() == '-')
    throw Error(Errc::usage, where + ": seed must be an unsigned 64-bit integer, got '" + text + "'");
  return value;
}

struct Layer {
  std::optional<std::string> backend, model, seed;
  std::optional<unsigned> jobs, max_in_flight;
  std::optional<int> max_retries;
  std::optional<double> timeout_seconds;
};

Layer config_file_layer(const std::string& path) {
  Layer layer;
  if (path.empty()) return layer;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::usage, "config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::usage, "config " + path + " must hold a JSON object");
  try {
    if (j.contains("api_key"))
      throw Error(Errc::usage, "config files may not hold api_key; set ALIGN_API_KEY instead");
    if (j.contains("backend")) layer.backend = j["backend"].get<std::string>();
    if (j.contains("model")) layer.model = j["model"].get<std::string>();
    if (j.contains("seed"))
      layer.seed = j["seed"].is_string() ? j["seed"].get<std::string>()
                                         : std::to_string(j["seed"].get<std::uint64_t>());
    if (j.contains("jobs")) layer.jobs = j["jobs"].get<unsigned>();
    if (j.contains("max_in_flight")) layer.max_in_flight = j["max_in_flight"].get<unsigned>();
    if (j.contains("max_retries")) layer.max_retries = j["max_retries"].get<int>();
    if (j.contains("timeout_seconds")) layer.timeout_seconds = j["timeout_seconds"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::usage, "config " + path + ": " + e.what());
  }
  return layer;
}

Layer env_layer() {
  Layer layer;
  auto get = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  layer.backend = get("ALIGN_BACKEND");
  layer.model = get("ALIGN_MODEL");
  layer.seed = get("ALIGN_SEED");
  if (auto jobs = get("ALIGN_JOBS")) layer.jobs = static_cast<unsigned>(parse_seed(*jobs, "ALIGN_JOBS"));
  return layer;
}

Layer flag_layer(const Flags& f) {
  Layer layer;
  if (!f.backend.empty()) layer.backend = f.backend;
  if (!f.model.empty()) layer.model = f.model;
  if (!f.seed.empty()) layer.seed = f.seed;
  if (f.jobs) layer.jobs = f.jobs;
  if (f.max_in_flight) layer.max_in_flight = f.max_in_flight;
  if (f.max_retries >= 0) layer.max_retries = f.max_retries;
  if (f.timeout_seconds > 0) layer.timeout_seconds = f.timeout_seconds;
  return layer;
}

RunConfig resolve(const Flags& flags) {
  Layer merged = config_file_layer(flags.config);
  for (const Layer& over : {env_layer(), flag_layer(flags)}) {
    if (over.backend) merged.backend = over.backend;
    if (over.model) merged.model = over.model;
    if (over.seed) merged.seed = over.seed;
    if (over.jobs) merged.jobs = over.jobs;
    if (over.max_in_flight) merged.max_in_flight = over.max_in_flight;
    if (over.max_retries) merged.max_retries = over.max_retries;
    if (over.timeout_seconds) merged.timeout_seconds = over.timeout_seconds;
  }

  RunConfig cfg;
  if (merged.model) cfg.model = *merged.model;
  if (merged.seed) cfg.master_seed = parse_seed(*merged.seed, "--seed");
  if (merged.jobs) cfg.jobs = std::max(1u, *merged.jobs);
  if (merged.backend) {
    BackendDescriptor d = parse_backend(*merged.backend);
    d.model = cfg.model;
    if (merged.max_in_flight) d.max_in_flight = std::max(1u, *merged.max_in_flight);
    if (merged.max_retries) d.max_retries = static_cast<unsigned>(std::max(0, *merged.max_retries));
    if (merged.timeout_seconds)
      d.request_timeout = std::chrono::milliseconds(static_cast<long long>(*merged.timeout_seconds * 1000));
    cfg.backend = d;
  }
  cfg.include_paraphrases = flags.include_paraphrases;
  cfg.verbose = flags.verbose;
  cfg.two_call_sorter = flags.two_call_sorter;
  if (!flags.record.empty()) cfg.record_fixture = flags.record;
  return cfg;
}

// Owns the configured backend and, when recording, the recorder wrapped
// around it. The fixture is written on success only.
class BackendSession {
public:
  explicit BackendSession(const RunConfig& cfg) : record_to_(cfg.record_fixture) {
    if (!cfg.backend) throw Error(Errc::usage, "this command needs --backend <url|scripted:<fixture>>");
    inner_ = make_backend(*cfg.backend);
    if (record_to_) recorder_ = std::make_unique<RecordingBackend>(*inner_);
  }

  Backend& get() { return recorder_ ? static_cast<Backend&>(*recorder_) : *inner_; }

  void finish() {
    if (recorder_) recorder_->write_fixture(*record_to_);
  }

private:
  std::optional<std::filesystem::path> record_to_;
  std::unique_ptr<Backend> inner_;
  std::unique_ptr<RecordingBackend> recorder_;
};

std::string read_nonempty(const std::string& path, const char* what) {
  std::string text = read_text_file(path);
  if (trim(text).empty()) throw Error(Errc::usage, std::string(what) + " file " + path + " is empty");
  return text;
}

int cmd_build_dataset(const RunConfig& cfg, const std::string& seeds_path,
                      const std::string& out_path, std::string failures_path, std::ostream& out) {
  if (failures_path.empty()) {
    std::filesystem::path p(out_path);
    failures_path = (p.parent_path() / (p.stem().string() + ".failures.jsonl")).string();
  }
  const std::vector<SeedPair> seeds = read_seed_file(seeds_path);
  BackendSession session(cfg);
  const BuildResult result = build_dataset(seeds, session.get(), cfg.master_seed, cfg.jobs);
  write_instances(out_path, result.instances);
  write_failures(failures_path, result.failures);
  session.finish();

  out << "seeds: " << seeds.size() << "  instances: " << result.instances.size()
      << "  failures: " << result.failures.size() << "  seed: " << cfg.master_seed << "\n";
  for (Difficulty d : kDifficulties) {
    const auto [lo, hi] = std::pair{band(d).lo(), band(d).hi()};
    out << "  " << to_string(d) << " [" << lo << ", " << hi << "]: " << result.instances.size()
        << " lies\n";
  }
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& inst : result.instances) ++histogram[inst.meta.num_events];
  if (!histogram.empty()) {
    std::vector<std::size_t> counts;
    for (const auto& inst : result.instances) counts.push_back(inst.meta.num_events);
    std::sort(counts.begin(), counts.end());
    out << "events per instance: min " << counts.front() << ", median "
        << counts[counts.size() / 2] << ", max " << counts.back() << "\n";
    for (const auto& [n, c] : histogram) out << "  " << n << " events: " << c << "\n";
  }
  std::map<std::string, std::size_t> by_error;
  for (const auto& f : result.failures) ++by_error[f.error.substr(0, f.error.find(':'))];
  for (const auto& [e, c] : by_error) out << "  failed with " << e << ": " << c << "\n";
  return kSuccess;
}

int cmd_score(const RunConfig& cfg, const std::string& source_path, const std::string& target_path,
              std::ostream& out) {
  const std::string source = read_nonempty(source_path, "source");
  const std::string target = read_nonempty(target_path, "target");
  BackendSession session(cfg);
  DoveScoreOptions options;
  options.two_call_sorter = cfg.two_call_sorter;
  options.jobs = cfg.jobs;
  const DoveScoreResult result = evaluate_dovescore(source, target, session.get(), options);
  session.finish();
  out << to_json(result, cfg.verbose);
  return kSuccess;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& dataset_path, const std::string& name,
                 const std::string& out_path, std::string scores_path, std::ostream& out) {
  if (std::find(kEvaluators.begin(), kEvaluators.end(), name) == kEvaluators.end()) {
    std::string valid;
    for (const auto& e : kEvaluators) valid += (valid.empty() ? "" : ", ") + e;
    throw Error(Errc::usage, "unknown evaluator '" + name + "'; valid: " + valid);
  }
  if (scores_path.empty()) {
    std::filesystem::path p(out_path);
    scores_path = (p.parent_path() / (p.stem().string() + ".scores.jsonl")).string();
  }
  const std::vector<DataInstance> dataset = read_instances(dataset_path);
  if (dataset.empty()) throw Error(Errc::usage, "dataset " + dataset_path + " holds no instances");

  std::optional<BackendSession> session;
  AlignmentEvaluator evaluator;
  if (name == "oracle") {
    evaluator = oracle_evaluator(dataset);
  } else if (name == "constant") {
    evaluator = constant_evaluator(0.5);
  } else {
    session.emplace(cfg);
    if (name == "coarse-llm") {
      evaluator = coarse_llm_evaluator(session->get());
    } else {
      DoveScoreOptions options;
      options.two_call_sorter = cfg.two_call_sorter;
      evaluator = dovescore_evaluator(session->get(), options);
    }
  }
  const BenchmarkRun run =
      evaluate_benchmark(dataset, evaluator, cfg.include_paraphrases, cfg.jobs, cfg.master_seed);
  write_report(out_path, run.report);
  write_scores(scores_path, run.pairs);
  if (session) session->finish();

  out << run.report.evaluator_name << " on " << run.report.num_instances << " instances";
  if (!run.report.exclusions.empty()) out << " (" << run.report.exclusions.size() << " exclusions)";
  out << "\n";
  for (Difficulty d : kDifficulties)
    out << "  " << to_string(d) << ": " << run.report.per_difficulty_auc[d] << "\n";
  out << "  average: " << run.report.average_auc << "\n";
  return kSuccess;
}

int cmd_report(const RunConfig& cfg, const std::string& scores_path, const std::string& name,
               bool include_flag_given, const std::string& out_path, std::ostream& out) {
  const std::vector<ScoredPair> pairs = read_scores(scores_path);
  bool include = cfg.include_paraphrases;
  if (!include_flag_given)
    include = std::any_of(pairs.begin(), pairs.end(), [](const ScoredPair& p) {
      return p.variant.kind == VariantKind::correct_paraphrase ||
             p.variant.kind == VariantKind::lie_paraphrase;
    });
  EvaluationReport report = aggregate_scores(name, pairs, include);
  report.master_seed = cfg.master_seed;
  if (out_path.empty()) {
    out << to_json(report);
  } else {
    write_report(out_path, report);
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build montage-lie benchmarks and evaluate information-alignment evaluators."};
  app.name("montage");
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "JSON config file (lowest precedence)");

  auto backend_options = [&](CLI::App* sub) {
    sub->add_option("--backend", flags.backend, "http(s) endpoint or scripted:<fixture.jsonl>");
    sub->add_option("--model", flags.model, "model name sent to the backend");
    sub->add_option("--record", flags.record, "write every exchange to this fixture file");
    sub->add_option("--timeout", flags.timeout_seconds, "per-request timeout in seconds");
    sub->add_option("--max-retries", flags.max_retries, "retries on 429/5xx/transport errors");
    sub->add_option("--max-in-flight", flags.max_in_flight, "concurrent request bound");
  };
  auto run_options = [&](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "master seed (u64)");
    sub->add_option("--jobs", flags.jobs, "worker threads");
  };

  std::string seeds_path, out_path, failures_path, source_path, target_path, dataset_path,
      evaluator_name, scores_path, report_name = "unknown";

  CLI::App* build = app.add_subcommand("build-dataset", "construct benchmark instances from seed pairs");
  build->add_option("--seeds", seeds_path, "seed JSONL {id, source, summary, origin}")->required();
  build->add_option("--out", out_path, "instance JSONL output")->required();
  build->add_option("--failures", failures_path, "failure JSONL (default <out>.failures.jsonl)");
  backend_options(build);
  run_options(build);

  CLI::App* score = app.add_subcommand("score", "DoveScore of one source/target pair");
  score->add_option("--source", source_path, "source text file")->required();
  score->add_option("--target", target_path, "target text file")->required();
  score->add_flag("--verbose", flags.verbose, "include the audit trail");
  score->add_flag("--two-call-sorter", flags.two_call_sorter, "sort target events with a second call");
  backend_options(score);
  run_options(score);

  CLI::App* evaluate = app.add_subcommand("evaluate", "AUC-ROC of an evaluator per difficulty");
  evaluate->add_option("--dataset", dataset_path, "instance JSONL")->required();
  evaluate->add_option("--evaluator", evaluator_name, "dovescore | coarse-llm | oracle | constant")
      ->required();
  evaluate->add_option("--out", out_path, "report JSON output")->required();
  evaluate->add_option("--scores-out", scores_path, "raw score JSONL (default <out>.scores.jsonl)");
  evaluate->add_flag("--include-paraphrases", flags.include_paraphrases,
                     "paraphrases join the positives and their difficulty's negatives");
  evaluate->add_flag("--two-call-sorter", flags.two_call_sorter, "dovescore: sort target events too");
  backend_options(evaluate);
  run_options(evaluate);

  CLI::App* report = app.add_subcommand("report", "re-aggregate raw scores into a report");
  report->add_option("--scores", scores_path, "raw score JSONL")->required();
  report->add_option("--name", report_name, "evaluator name for the report");
  report->add_option("--out", out_path, "report JSON output (default stdout)");
  auto* include_flag = report->add_flag("--include-paraphrases", flags.include_paraphrases,
                                        "force paraphrase handling (default: inferred)");
  run_options(report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    const RunConfig cfg = resolve(flags);
    if (*build) return cmd_build_dataset(cfg, seeds_path, out_path, failures_path, out);
    if (*score) return cmd_score(cfg, source_path, target_path, out);
    if (*evaluate)
      return cmd_evaluate(cfg, dataset_path, evaluator_name, out_path, scores_path, out);
    if (*report)
      return cmd_report(cfg, scores_path, report_name, include_flag->count() > 0, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::usage ? kUsageError : kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace montage::cli
