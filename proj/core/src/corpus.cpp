#include "montage/corpus.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "montage/text.hpp"

namespace montage {

using json = nlohmann::ordered_json;

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::correct: return "correct";
    case Verdict::incorrect: return "incorrect";
    case Verdict::unverifiable: return "unverifiable";
  }
  return "unverifiable";
}

void FactSet::reset_verdicts() {
  event_verdicts.assign(event_facts.size(), Verdict::unverifiable);
  descriptive_verdicts.assign(descriptive_facts.size(), Verdict::unverifiable);
}

void FactSet::validate() const {
  if (event_verdicts.size() != event_facts.size() ||
      descriptive_verdicts.size() != descriptive_facts.size())
    throw Error(Errc::invariant_violation, "verdicts do not cover fact lists");
}

namespace {

void require_text(const std::string& value, const char* field) {
  if (value.empty()) throw Error(Errc::missing_field, field);
}

std::string field_name(const char* prefix, Difficulty d) {
  return std::string(prefix) + "." + std::string(to_string(d));
}

constexpr double kRatioTolerance = 1e-12;

// JSON access helpers: every lookup names the dotted path it failed on.

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw Error(Errc::malformed_line, path + " is not an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw Error(Errc::missing_field, path.empty() ? key : path + "." + key);
  return *it;
}

std::string get_string(const json& obj, const std::string& key, const std::string& path = {}) {
  const json& v = member(obj, key, path);
  if (!v.is_string())
    throw Error(Errc::malformed_line, (path.empty() ? key : path + "." + key) + " is not a string");
  return v.get<std::string>();
}

std::uint64_t get_uint(const json& obj, const std::string& key, const std::string& path = {}) {
  const json& v = member(obj, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw Error(Errc::malformed_line,
                (path.empty() ? key : path + "." + key) + " is not a non-negative integer");
  return v.get<std::uint64_t>();
}

double get_double(const json& obj, const std::string& key, const std::string& path = {}) {
  const json& v = member(obj, key, path);
  if (!v.is_number())
    throw Error(Errc::malformed_line, (path.empty() ? key : path + "." + key) + " is not a number");
  return v.get<double>();
}

template <class T, class Get>
PerDifficulty<T> get_per_difficulty(const json& obj, const std::string& key,
                                    const std::string& path, Get get) {
  const std::string here = path.empty() ? key : path + "." + key;
  const json& table = member(obj, key, path);
  PerDifficulty<T> out;
  for (Difficulty d : kDifficulties) out[d] = get(table, std::string(to_string(d)), here);
  return out;
}

template <class T>
json per_difficulty_json(const PerDifficulty<T>& table) {
  json out = json::object();
  for (Difficulty d : kDifficulties) out[std::string(to_string(d))] = table[d];
  return out;
}

json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(Errc::malformed_line, "line " + std::to_string(line_no) + ": " + e.what());
  }
}

// Re-raises a record-level error with the line number prefixed.
template <class F>
auto with_line(std::size_t line_no, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (line_no == 0) throw;
    throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line, "line " + std::to_string(line_no) + ": " + e.what());
  }
}

template <class F>
void for_each_line(const std::filesystem::path& path, F&& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    f(std::string_view(line), line_no);
  }
  if (in.bad()) throw Error(Errc::io_failure, "read failed on " + path.string());
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
  for (const auto& l : lines) out << l << '\n';
  out.flush();
  if (!out) throw Error(Errc::io_failure, "write failed on " + path.string());
}

}  // namespace

void validate(const SeedPair& seed) {
  require_text(seed.id, "id");
  require_text(seed.source, "source");
  require_text(seed.summary, "summary");
}

void validate(const DataInstance& inst) {
  require_text(inst.id, "id");
  require_text(inst.source, "source");
  require_text(inst.correct, "correct");
  for (Difficulty d : kDifficulties)
    if (inst.lies[d].empty()) throw Error(Errc::missing_field, field_name("lies", d));
  require_text(inst.paraphrases.correct, "paraphrases.correct");
  for (Difficulty d : kDifficulties)
    if (inst.paraphrases.lies[d].empty())
      throw Error(Errc::missing_field, field_name("paraphrases", d));

  const InstanceMeta& meta = inst.meta;
  if (meta.num_events < 1)
    throw Error(Errc::invariant_violation, "meta.num_events must be positive");
  const std::uint64_t max_inv = max_inversions(meta.num_events);
  for (Difficulty d : kDifficulties) {
    const std::uint64_t k = meta.target_inversions[d];
    if (k > max_inv)
      throw Error(Errc::invariant_violation,
                  field_name("meta.target_inversions", d) + " exceeds max inversions");
    const double expected = max_inv == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(max_inv);
    const double got = meta.achieved_shuffle_degree[d];
    if (!(std::fabs(got - expected) <= kRatioTolerance))
      throw Error(Errc::invariant_violation,
                  field_name("meta.achieved_shuffle_degree", d) + " = " + std::to_string(got) +
                      " but target_inversions / max_inversions = " + std::to_string(expected));
  }
}

void validate(const EvaluationReport& report) {
  require_text(report.evaluator_name, "evaluator_name");
  if (report.num_instances < 1)
    throw Error(Errc::invariant_violation, "num_instances must be positive");
  double sum = 0.0;
  for (Difficulty d : kDifficulties) {
    const double auc = report.per_difficulty_auc[d];
    if (!(auc >= 0.0 && auc <= 1.0))
      throw Error(Errc::invariant_violation, field_name("per_difficulty_auc", d) + " outside [0,1]");
    sum += auc;
  }
  if (!(std::fabs(report.average_auc - sum / 4.0) <= kRatioTolerance))
    throw Error(Errc::invariant_violation, "average_auc is not the mean of per_difficulty_auc");
}

SeedPair parse_seed_line(std::string_view line, std::size_t line_no) {
  return with_line(line_no, [&] {
    const json j = parse_json_line(line, line_no);
    SeedPair seed;
    seed.id = get_string(j, "id");
    seed.source = get_string(j, "source");
    seed.summary = get_string(j, "summary");
    seed.origin = j.contains("origin") && j["origin"].is_string() ? j["origin"].get<std::string>() : "";
    validate(seed);
    return seed;
  });
}

std::string to_json_line(const SeedPair& seed) {
  json j;
  j["id"] = seed.id;
  j["source"] = seed.source;
  j["summary"] = seed.summary;
  j["origin"] = seed.origin;
  return j.dump();
}

DataInstance parse_instance_line(std::string_view line, std::size_t line_no) {
  return with_line(line_no, [&] {
    const json j = parse_json_line(line, line_no);
    DataInstance inst;
    inst.id = get_string(j, "id");
    inst.source = get_string(j, "source");
    inst.correct = get_string(j, "correct");
    inst.lies = get_per_difficulty<std::string>(
        j, "lies", "", [](const json& o, const std::string& k, const std::string& p) {
          return get_string(o, k, p);
        });
    const json& para = member(j, "paraphrases", "");
    inst.paraphrases.correct = get_string(para, "correct", "paraphrases");
    for (Difficulty d : kDifficulties)
      inst.paraphrases.lies[d] = get_string(para, std::string(to_string(d)), "paraphrases");

    const json& meta = member(j, "meta", "");
    inst.meta.origin = get_string(meta, "origin", "meta");
    inst.meta.num_events = get_uint(meta, "num_events", "meta");
    inst.meta.target_inversions = get_per_difficulty<std::uint64_t>(
        meta, "target_inversions", "meta",
        [](const json& o, const std::string& k, const std::string& p) { return get_uint(o, k, p); });
    inst.meta.achieved_shuffle_degree = get_per_difficulty<double>(
        meta, "achieved_shuffle_degree", "meta",
        [](const json& o, const std::string& k, const std::string& p) { return get_double(o, k, p); });
    inst.meta.generator_model = get_string(meta, "generator_model", "meta");
    inst.meta.seed = get_uint(meta, "seed", "meta");
    validate(inst);
    return inst;
  });
}

std::string to_json_line(const DataInstance& inst) {
  json j;
  j["id"] = inst.id;
  j["source"] = inst.source;
  j["correct"] = inst.correct;
  j["lies"] = per_difficulty_json(inst.lies);
  json para;
  para["correct"] = inst.paraphrases.correct;
  for (Difficulty d : kDifficulties) para[std::string(to_string(d))] = inst.paraphrases.lies[d];
  j["paraphrases"] = para;
  json meta;
  meta["origin"] = inst.meta.origin;
  meta["num_events"] = inst.meta.num_events;
  meta["target_inversions"] = per_difficulty_json(inst.meta.target_inversions);
  meta["achieved_shuffle_degree"] = per_difficulty_json(inst.meta.achieved_shuffle_degree);
  meta["generator_model"] = inst.meta.generator_model;
  meta["seed"] = inst.meta.seed;
  j["meta"] = meta;
  return j.dump();
}

std::string to_json_line(const FailureRecord& failure) {
  json j;
  j["seed_id"] = failure.seed_id;
  j["stage"] = failure.stage;
  j["error"] = failure.error;
  j["master_seed"] = failure.master_seed;
  return j.dump();
}

std::string to_json(const EvaluationReport& report) {
  json j;
  j["evaluator_name"] = report.evaluator_name;
  j["per_difficulty_auc"] = per_difficulty_json(report.per_difficulty_auc);
  j["average_auc"] = report.average_auc;
  j["num_instances"] = report.num_instances;
  j["include_paraphrases"] = report.include_paraphrases;
  j["master_seed"] = report.master_seed;
  json excluded = json::array();
  for (const auto& e : report.exclusions)
    excluded.push_back({{"instance_id", e.instance_id}, {"variant", e.variant}, {"error", e.error}});
  j["exclusions"] = excluded;
  return j.dump(2) + "\n";
}

EvaluationReport parse_report(std::string_view text) {
  return with_line(0, [&] {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(Errc::malformed_line, e.what());
    }
    EvaluationReport r;
    r.evaluator_name = get_string(j, "evaluator_name");
    r.per_difficulty_auc = get_per_difficulty<double>(
        j, "per_difficulty_auc", "",
        [](const json& o, const std::string& k, const std::string& p) { return get_double(o, k, p); });
    r.average_auc = get_double(j, "average_auc");
    r.num_instances = get_uint(j, "num_instances");
    const json& flag = member(j, "include_paraphrases", "");
    if (!flag.is_boolean()) throw Error(Errc::malformed_line, "include_paraphrases is not a boolean");
    r.include_paraphrases = flag.get<bool>();
    if (j.contains("master_seed")) r.master_seed = get_uint(j, "master_seed");
    if (j.contains("exclusions")) {
      for (const auto& e : j["exclusions"])
        r.exclusions.push_back({get_string(e, "instance_id", "exclusions"),
                                get_string(e, "variant", "exclusions"),
                                get_string(e, "error", "exclusions")});
    }
    validate(r);
    return r;
  });
}

std::vector<SeedPair> read_seed_file(const std::filesystem::path& path) {
  std::vector<SeedPair> seeds;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    seeds.push_back(parse_seed_line(line, no));
  });
  return seeds;
}

void write_seed_file(const std::filesystem::path& path, std::span<const SeedPair> seeds) {
  std::vector<std::string> lines;
  for (const auto& s : seeds) {
    validate(s);
    lines.push_back(to_json_line(s));
  }
  write_lines(path, lines);
}

std::vector<DataInstance> read_instances(const std::filesystem::path& path) {
  std::vector<DataInstance> out;
  for_each_line(path, [&](std::string_view line, std::size_t no) {
    out.push_back(parse_instance_line(line, no));
  });
  return out;
}

void write_instances(const std::filesystem::path& path,
                     std::span<const DataInstance> instances) {
  std::vector<std::string> lines;
  lines.reserve(instances.size());
  for (const auto& inst : instances) {
    validate(inst);
    lines.push_back(to_json_line(inst));
  }
  write_lines(path, lines);
}

void write_failures(const std::filesystem::path& path,
                    std::span<const FailureRecord> failures) {
  std::vector<std::string> lines;
  for (const auto& f : failures) lines.push_back(to_json_line(f));
  write_lines(path, lines);
}

void write_report(const std::filesystem::path& path, const EvaluationReport& report) {
  validate(report);
  write_text_file(path, to_json(report));
}

EvaluationReport read_report(const std::filesystem::path& path) {
  return parse_report(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_failure, "read failed on " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(Errc::io_failure, "write failed on " + path.string());
}

}  // namespace montage
