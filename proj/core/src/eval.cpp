#include "montage/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "montage/parallel.hpp"
#include "montage/parsers.hpp"
#include "montage/prompts.hpp"
#include "montage/text.hpp"

namespace montage {

int Variant::label() const noexcept {
  return kind == VariantKind::correct || kind == VariantKind::correct_paraphrase ? 1 : 0;
}

int Variant::rank() const noexcept {
  const int d = static_cast<int>(difficulty);
  switch (kind) {
    case VariantKind::correct: return 0;
    case VariantKind::correct_paraphrase: return 1;
    case VariantKind::lie: return 2 + d;
    case VariantKind::lie_paraphrase: return 6 + d;
  }
  return 0;
}

std::string to_string(const Variant& v) {
  switch (v.kind) {
    case VariantKind::correct: return "correct";
    case VariantKind::correct_paraphrase: return "correct_paraphrase";
    case VariantKind::lie: return "lie:" + std::string(to_string(v.difficulty));
    case VariantKind::lie_paraphrase: return "lie_paraphrase:" + std::string(to_string(v.difficulty));
  }
  return "correct";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "correct") return Variant{VariantKind::correct, Difficulty::easy};
  if (name == "correct_paraphrase") return Variant{VariantKind::correct_paraphrase, Difficulty::easy};
  const std::size_t colon = name.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto level = parse_difficulty(name.substr(colon + 1));
  if (!level) return std::nullopt;
  const std::string_view kind = name.substr(0, colon);
  if (kind == "lie") return Variant{VariantKind::lie, *level};
  if (kind == "lie_paraphrase") return Variant{VariantKind::lie_paraphrase, *level};
  return std::nullopt;
}

std::vector<Variant> required_variants(bool include_paraphrases) {
  std::vector<Variant> out{{VariantKind::correct, Difficulty::easy}};
  if (include_paraphrases) out.push_back({VariantKind::correct_paraphrase, Difficulty::easy});
  for (Difficulty d : kDifficulties) out.push_back({VariantKind::lie, d});
  if (include_paraphrases)
    for (Difficulty d : kDifficulties) out.push_back({VariantKind::lie_paraphrase, d});
  std::sort(out.begin(), out.end(),
            [](const Variant& a, const Variant& b) { return a.rank() < b.rank(); });
  return out;
}

const std::string& target_text(const DataInstance& instance, const Variant& v) {
  switch (v.kind) {
    case VariantKind::correct: return instance.correct;
    case VariantKind::correct_paraphrase: return instance.paraphrases.correct;
    case VariantKind::lie: return instance.lies[v.difficulty];
    case VariantKind::lie_paraphrase: return instance.paraphrases.lies[v.difficulty];
  }
  return instance.correct;
}

double auc_roc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty()) throw Error(Errc::empty_side, "no positive scores");
  if (negatives.empty()) throw Error(Errc::empty_side, "no negative scores");

  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // Twice the Mann-Whitney U statistic, accumulated in integers: a tie group
  // spanning ranks [i+1, j] gives each member the midrank (i + 1 + j) / 2.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    while (j < all.size() && all[j].score == all[i].score) group_pos += all[j++].positive;
    twice_rank_sum += group_pos * (i + 1 + j);
    i = j;
  }
  const std::uint64_t p = positives.size();
  const std::uint64_t n = negatives.size();
  const std::uint64_t twice_u = twice_rank_sum - p * (p + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(p) * static_cast<double>(n));
}

EvaluationReport aggregate_scores(std::string evaluator_name, std::span<const ScoredPair> pairs,
                                  bool include_paraphrases, std::vector<Exclusion> failures) {
  const std::vector<Variant> required = required_variants(include_paraphrases);

  std::map<std::string, std::map<int, double>> by_instance;
  for (const auto& p : pairs) {
    if (p.label != p.variant.label())
      throw Error(Errc::invariant_violation,
                  p.instance_id + " " + to_string(p.variant) + ": label does not match variant");
    if (!by_instance[p.instance_id].emplace(p.variant.rank(), p.score).second)
      throw Error(Errc::invariant_violation,
                  p.instance_id + " " + to_string(p.variant) + " scored twice");
  }
  std::set<std::string> failed;
  for (const auto& f : failures) {
    failed.insert(f.instance_id);
    by_instance.try_emplace(f.instance_id);
  }

  std::vector<Exclusion> exclusions = std::move(failures);
  std::vector<double> positives;
  PerDifficulty<std::vector<double>> negatives;
  std::size_t included = 0;
  for (const auto& [id, scores] : by_instance) {
    bool complete = !failed.count(id);
    for (const Variant& v : required) {
      if (scores.count(v.rank())) continue;
      complete = false;
      if (!failed.count(id)) exclusions.push_back({id, to_string(v), "missing score"});
    }
    if (!complete) continue;
    ++included;
    for (const Variant& v : required) {
      const double s = scores.at(v.rank());
      if (v.label() == 1)
        positives.push_back(s);
      else
        negatives[v.difficulty].push_back(s);
    }
  }
  std::sort(exclusions.begin(), exclusions.end(), [](const Exclusion& a, const Exclusion& b) {
    if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
    const auto va = parse_variant(a.variant), vb = parse_variant(b.variant);
    return (va ? va->rank() : 99) < (vb ? vb->rank() : 99);
  });
  if (included == 0) throw Error(Errc::empty_side, "no instance has a complete set of scores");

  EvaluationReport report;
  report.evaluator_name = std::move(evaluator_name);
  report.include_paraphrases = include_paraphrases;
  report.num_instances = included;
  report.exclusions = std::move(exclusions);
  double sum = 0.0;
  for (Difficulty d : kDifficulties) {
    report.per_difficulty_auc[d] = auc_roc(positives, negatives[d]);
    sum += report.per_difficulty_auc[d];
  }
  report.average_auc = sum / 4.0;
  return report;
}

BenchmarkRun evaluate_benchmark(std::span<const DataInstance> dataset,
                                const AlignmentEvaluator& evaluator, bool include_paraphrases,
                                unsigned jobs, std::uint64_t master_seed) {
  if (dataset.empty()) throw Error(Errc::empty_side, "empty dataset");
  const std::vector<Variant> required = required_variants(include_paraphrases);

  struct Task {
    std::size_t instance;
    Variant variant;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    for (const Variant& v : required) tasks.push_back({i, v});

  std::vector<std::optional<double>> scores(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const DataInstance& inst = dataset[tasks[t].instance];
    try {
      const double s = evaluator.score(inst.source, target_text(inst, tasks[t].variant));
      if (std::isnan(s))
        errors[t] = "evaluator returned NaN";
      else
        scores[t] = s;
    } catch (const Error& e) {
      errors[t] = e.what();
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });

  BenchmarkRun run;
  std::vector<Exclusion> failures;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const DataInstance& inst = dataset[tasks[t].instance];
    if (scores[t]) {
      run.pairs.push_back({inst.id, tasks[t].variant, *scores[t], tasks[t].variant.label()});
    } else {
      failures.push_back({inst.id, to_string(tasks[t].variant), errors[t]});
    }
  }
  std::stable_sort(run.pairs.begin(), run.pairs.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
    return a.variant.rank() < b.variant.rank();
  });
  run.report = aggregate_scores(evaluator.name, run.pairs, include_paraphrases, std::move(failures));
  run.report.master_seed = master_seed;
  return run;
}

double coarse_llm_score(std::string_view source, std::string_view target, Backend& backend) {
  if (trim(source).empty()) throw Error(Errc::missing_field, "source");
  if (trim(target).empty()) throw Error(Errc::missing_field, "target");
  const std::string prompt = prompts::coarse_evaluator().render(
      {{"Source", std::string(source)}, {"Target", std::string(target)}});
  return parse_consistency_score(ask(backend, prompt));
}

AlignmentEvaluator coarse_llm_evaluator(Backend& backend) {
  return {"coarse-llm", [&backend](std::string_view s, std::string_view t) {
            return coarse_llm_score(s, t, backend);
          }};
}

AlignmentEvaluator dovescore_evaluator(Backend& backend, DoveScoreOptions options) {
  return {options.order_blind ? "dovescore-order-blind" : "dovescore",
          [&backend, options](std::string_view s, std::string_view t) {
            return evaluate_dovescore(s, t, backend, options).score;
          }};
}

AlignmentEvaluator constant_evaluator(double value) {
  return {"constant", [value](std::string_view, std::string_view) { return value; }};
}

AlignmentEvaluator oracle_evaluator(std::span<const DataInstance> dataset) {
  auto positives = std::make_shared<std::unordered_set<std::string>>();
  for (const auto& inst : dataset) {
    positives->insert(inst.correct);
    positives->insert(inst.paraphrases.correct);
  }
  return {"oracle", [positives](std::string_view, std::string_view t) {
            return positives->count(std::string(t)) ? 1.0 : 0.0;
          }};
}

std::string to_json_line(const ScoredPair& pair) {
  nlohmann::ordered_json j;
  j["instance_id"] = pair.instance_id;
  j["variant"] = to_string(pair.variant);
  j["score"] = pair.score;
  j["label"] = pair.label;
  return j.dump();
}

ScoredPair parse_scored_pair_line(std::string_view line, std::size_t line_no) {
  const std::string where = line_no ? "line " + std::to_string(line_no) + ": " : "";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed_line, where + e.what());
  }
  for (const char* key : {"instance_id", "variant", "score", "label"})
    if (!j.is_object() || !j.contains(key)) throw Error(Errc::missing_field, where + key);
  if (!j["instance_id"].is_string() || !j["variant"].is_string() || !j["score"].is_number() ||
      !j["label"].is_number_integer())
    throw Error(Errc::malformed_line, where + "field of the wrong type");
  const auto variant = parse_variant(j["variant"].get<std::string>());
  if (!variant) throw Error(Errc::malformed_line, where + "unknown variant");
  ScoredPair p{j["instance_id"].get<std::string>(), *variant, j["score"].get<double>(),
               j["label"].get<int>()};
  if (p.label != variant->label())
    throw Error(Errc::invariant_violation, where + "label does not match variant");
  return p;
}

void write_scores(const std::filesystem::path& path, std::span<const ScoredPair> pairs) {
  std::string content;
  for (const auto& p : pairs) content += to_json_line(p) + "\n";
  write_text_file(path, content);
}

std::vector<ScoredPair> read_scores(const std::filesystem::path& path) {
  std::vector<ScoredPair> out;
  std::size_t line_no = 0;
  const std::string content = read_text_file(path);
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    out.push_back(parse_scored_pair_line(line, line_no));
  }
  return out;
}

}  // namespace montage
