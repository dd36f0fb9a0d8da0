#include "montage/dovescore.hpp"

#include <optional>

#include "json.hpp"
#include "montage/parallel.hpp"
#include "montage/parsers.hpp"
#include "montage/permutation.hpp"
#include "montage/prompts.hpp"
#include "montage/text.hpp"

namespace montage {

DoveScoreComponents compute_dovescore(std::size_t n_event, std::size_t n_event_correct,
                                      std::size_t n_desc, std::size_t n_desc_correct,
                                      double s_order) {
  if (n_event + n_desc == 0) throw Error(Errc::empty_decomposition, "no facts to score");
  if (n_event_correct > n_event)
    throw Error(Errc::invariant_violation, "more correct event facts than event facts");
  if (n_desc_correct > n_desc)
    throw Error(Errc::invariant_violation, "more correct descriptive facts than descriptive facts");
  if (!(s_order >= 0.0 && s_order <= 1.0))
    throw Error(Errc::invariant_violation, "order score outside [0, 1]");

  const auto total = static_cast<double>(n_event + n_desc);
  DoveScoreComponents c;
  c.alpha = static_cast<double>(n_event) / total;
  c.s_event = n_event == 0 ? 1.0 : static_cast<double>(n_event_correct) / static_cast<double>(n_event);
  c.s_desc = n_desc == 0 ? 1.0 : static_cast<double>(n_desc_correct) / static_cast<double>(n_desc);
  // alpha * S_E = n_event_correct / total and (1 - alpha) * S_D = n_desc_correct
  // / total, so the weighted sum is formed from counts without rounding the
  // intermediate ratios.
  c.score = (static_cast<double>(n_event_correct) * s_order + static_cast<double>(n_desc_correct)) /
            total;
  return c;
}

double event_order_score(std::span<const std::size_t> source_order,
                         std::span<const std::size_t> target_order) {
  if (source_order.size() != target_order.size())
    throw Error(Errc::not_a_permutation, "order lists differ in length");
  if (source_order.size() <= 1) {
    if (!std::equal(source_order.begin(), source_order.end(), target_order.begin()))
      throw Error(Errc::not_a_permutation, "order lists hold different facts");
    return 1.0;
  }
  return 1.0 - shuffle_degree(permutation_between_exact<std::size_t>(source_order, target_order));
}

namespace {

std::string call(Backend& backend, std::string prompt, AuditTrail* audit, std::string stage) {
  std::string response = ask(backend, prompt);
  if (audit) audit->push_back({std::move(stage), std::move(prompt), response});
  return response;
}

template <class F>
auto staged(std::string_view stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.at_stage(std::string(stage));
  }
}

}  // namespace

FactSet decompose(std::string_view target, Backend& backend, AuditTrail* audit) {
  if (trim(target).empty()) throw Error(Errc::missing_field, "target");
  const std::string prompt = prompts::decomposer().render({{"Paragraph", std::string(target)}});
  FactLists lists = parse_fact_lists(call(backend, prompt, audit, "decompose"));
  if (lists.event_facts.empty() && lists.descriptive_facts.empty())
    throw Error(Errc::empty_decomposition, "decomposer returned no facts");
  FactSet facts;
  facts.event_facts = std::move(lists.event_facts);
  facts.descriptive_facts = std::move(lists.descriptive_facts);
  facts.reset_verdicts();
  return facts;
}

FactSet check_facts(FactSet facts, std::string_view source, Backend& backend,
                    AuditTrail* audit, unsigned jobs) {
  if (facts.event_facts.empty() && facts.descriptive_facts.empty())
    throw Error(Errc::empty_decomposition, "no facts to check");
  facts.reset_verdicts();

  struct Job {
    bool event;
    std::size_t index;
  };
  std::vector<Job> work;
  for (std::size_t i = 0; i < facts.event_facts.size(); ++i) work.push_back({true, i});
  for (std::size_t i = 0; i < facts.descriptive_facts.size(); ++i) work.push_back({false, i});

  std::vector<AuditEntry> entries(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t w) {
    const Job job = work[w];
    const std::string& fact = job.event ? facts.event_facts[job.index]
                                        : facts.descriptive_facts[job.index];
    const std::string label = std::string(job.event ? "event" : "descriptive") + " fact " +
                              std::to_string(job.index);
    std::string prompt =
        prompts::fact_checker().render({{"Source", std::string(source)}, {"Fact", fact}});
    std::string response;
    try {
      response = ask(backend, prompt);
    } catch (const Error& e) {
      throw Error(e.code(), label + ": " + e.detail());
    }
    const Verdict v = parse_verdict(response);
    (job.event ? facts.event_verdicts[job.index] : facts.descriptive_verdicts[job.index]) = v;
    entries[w] = {"check:" + std::string(job.event ? "event:" : "descriptive:") +
                      std::to_string(job.index),
                  std::move(prompt), std::move(response)};
  });
  if (audit) audit->insert(audit->end(), entries.begin(), entries.end());
  return facts;
}

std::vector<std::size_t> order_events(std::string_view paragraph,
                                      std::span<const std::string> events, Backend& backend,
                                      AuditTrail* audit, std::string_view stage) {
  const std::string prompt = prompts::sorter().render(
      {{"Paragraph", std::string(paragraph)}, {"Events", prompts::bullet_list(events)}});
  const std::vector<std::string> returned =
      parse_sorted_events(call(backend, prompt, audit, std::string(stage)));

  std::vector<std::string> keys;
  std::vector<std::set<std::string>> tokens;
  for (const auto& e : events) {
    keys.push_back(match_key(e));
    tokens.push_back(token_set(e));
  }

  std::vector<std::size_t> order;
  std::vector<bool> placed(events.size(), false);
  std::size_t unmatched = 0;
  for (const auto& item : returned) {
    std::optional<std::size_t> hit;
    const std::string key = match_key(item);
    for (std::size_t i = 0; i < events.size() && !hit; ++i)
      if (keys[i] == key) hit = i;
    if (!hit) {
      const auto item_tokens = token_set(item);
      double best = -1.0;
      for (std::size_t i = 0; i < events.size(); ++i) {
        const double j = jaccard(item_tokens, tokens[i]);
        if (j > best) {
          best = j;
          hit = i;
        }
      }
      if (best < kMatchThreshold) hit.reset();
    }
    if (!hit) {
      ++unmatched;
      continue;
    }
    if (!placed[*hit]) {
      placed[*hit] = true;
      order.push_back(*hit);
    }
  }
  if (2 * unmatched > returned.size())
    throw Error(Errc::match_failure, std::to_string(unmatched) + " of " +
                                         std::to_string(returned.size()) +
                                         " sorter items match no input event");
  for (std::size_t i = 0; i < events.size(); ++i)
    if (!placed[i]) order.push_back(i);
  return order;
}

DoveScoreResult evaluate_dovescore(std::string_view source, std::string_view target,
                                   Backend& backend, const DoveScoreOptions& options) {
  if (trim(source).empty()) throw Error(Errc::missing_field, "source");
  if (trim(target).empty()) throw Error(Errc::missing_field, "target");

  DoveScoreResult r;
  r.facts = staged("decompose", [&] { return decompose(target, backend, &r.audit); });
  r.facts = staged("check", [&] {
    return check_facts(std::move(r.facts), source, backend, &r.audit, options.jobs);
  });

  std::vector<std::size_t> verified;
  for (std::size_t i = 0; i < r.facts.event_facts.size(); ++i)
    if (r.facts.event_verdicts[i] == Verdict::correct) verified.push_back(i);
  std::size_t desc_correct = 0;
  for (Verdict v : r.facts.descriptive_verdicts) desc_correct += v == Verdict::correct;

  r.target_order = verified;
  r.source_order = verified;
  if (verified.size() >= 2 && !options.order_blind) {
    std::vector<std::string> texts;
    for (std::size_t i : verified) texts.push_back(r.facts.event_facts[i]);
    auto to_fact_indices = [&](const std::vector<std::size_t>& positions) {
      std::vector<std::size_t> out;
      for (std::size_t p : positions) out.push_back(verified[p]);
      return out;
    };
    r.source_order = to_fact_indices(staged("sort:source", [&] {
      return order_events(source, texts, backend, &r.audit, "sort:source");
    }));
    if (options.two_call_sorter)
      r.target_order = to_fact_indices(staged("sort:target", [&] {
        return order_events(target, texts, backend, &r.audit, "sort:target");
      }));
  }

  r.s_order = options.order_blind ? 1.0 : event_order_score(r.source_order, r.target_order);
  const DoveScoreComponents c =
      compute_dovescore(r.facts.event_facts.size(), verified.size(),
                        r.facts.descriptive_facts.size(), desc_correct, r.s_order);
  r.alpha = c.alpha;
  r.s_event = c.s_event;
  r.s_desc = c.s_desc;
  r.score = c.score;
  return r;
}

std::string to_json(const DoveScoreResult& r, bool include_audit) {
  using json = nlohmann::ordered_json;
  json j;
  j["score"] = r.score;
  j["s_event"] = r.s_event;
  j["s_order"] = r.s_order;
  j["s_desc"] = r.s_desc;
  j["alpha"] = r.alpha;
  json facts;
  facts["event_facts"] = r.facts.event_facts;
  facts["descriptive_facts"] = r.facts.descriptive_facts;
  json ev = json::array(), dv = json::array();
  for (Verdict v : r.facts.event_verdicts) ev.push_back(to_string(v));
  for (Verdict v : r.facts.descriptive_verdicts) dv.push_back(to_string(v));
  facts["event_verdicts"] = ev;
  facts["descriptive_verdicts"] = dv;
  j["facts"] = facts;
  j["source_order"] = r.source_order;
  j["target_order"] = r.target_order;
  if (include_audit) {
    json audit = json::array();
    for (const auto& a : r.audit)
      audit.push_back({{"stage", a.stage}, {"prompt", a.prompt}, {"response", a.response}});
    j["audit"] = audit;
  }
  return j.dump(2) + "\n";
}

}  // namespace montage
