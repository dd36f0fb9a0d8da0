#include "montage/montage_builder.hpp"

#include "montage/parallel.hpp"
#include "montage/prompts.hpp"
#include "montage/text.hpp"

namespace montage {

EventSequence decompose_events(std::string_view summary, Backend& backend,
                               std::string summary_id) {
  if (trim(summary).empty()) throw Error(Errc::missing_field, "summary");
  const std::string prompt =
      prompts::decompose_events().render({{"Paragraph", std::string(summary)}});
  EventSequence seq;
  seq.events = parse_event_list(ask(backend, prompt));
  seq.source_summary_id = std::move(summary_id);
  if (seq.events.size() < kMinEvents)
    throw Error(Errc::too_few_events, std::to_string(seq.events.size()));
  return seq;
}

std::string narrate_incrementally(std::span<const std::string> events, Backend& backend) {
  if (events.empty()) throw Error(Errc::empty_event_list, "nothing to narrate");
  std::string paragraph = events.front();
  for (std::size_t i = 1; i < events.size(); ++i) {
    const std::string prompt = prompts::incremental_lie().render(
        {{"CurrentParagraph", paragraph}, {"Event", events[i]}});
    std::string next(trim(ask(backend, prompt)));
    if (next.empty())
      throw Error(Errc::empty_response, "incremental step " + std::to_string(i + 1));
    paragraph = std::move(next);
  }
  return paragraph;
}

LieDraft generate_lie_with_target(const EventSequence& seq, Difficulty level,
                                  std::uint64_t target_inversions, Backend& backend, Rng& rng) {
  LieDraft draft;
  draft.difficulty = level;
  draft.target_inversions = target_inversions;
  draft.shuffled_events = random_shuffle_with_inversions<std::string>(
      std::span<const std::string>(seq.events), target_inversions, rng);
  draft.text = narrate_incrementally(draft.shuffled_events, backend);
  return draft;
}

LieDraft generate_lie(const EventSequence& seq, Difficulty level, Backend& backend, Rng& rng) {
  const std::uint64_t k = sample_inversion_target(seq.events.size(), level, rng);
  return generate_lie_with_target(seq, level, k, backend, rng);
}

Paraphrase paraphrase(std::string_view text, Backend& backend) {
  if (trim(text).empty()) throw Error(Errc::missing_field, "paraphrase input");
  const std::string prompt = prompts::rephrase().render({{"Paragraph", std::string(text)}});
  RephraseResult parsed = parse_rephrase(ask(backend, prompt));
  if (parsed.original == parsed.chosen)
    throw Error(Errc::same_technique, std::string(to_string(parsed.chosen)));
  return {parsed.original, parsed.chosen, std::move(parsed.rephrased)};
}

namespace {

template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.at_stage(stage);
  }
}

std::string paraphrase_with_retry(const std::string& text, Backend& backend, unsigned retries) {
  for (unsigned attempt = 0;; ++attempt) {
    try {
      return paraphrase(text, backend).text;
    } catch (const Error& e) {
      if (e.code() != Errc::same_technique || attempt >= retries) throw;
    }
  }
}

}  // namespace

DataInstance build_instance(const SeedPair& seed, Backend& backend, const Rng& master,
                            const BuildOptions& options) {
  staged("seed", [&] { validate(seed); });
  const Rng instance_rng = master.split(seed.id);

  const EventSequence seq =
      staged("decompose", [&] { return decompose_events(seed.summary, backend, seed.id); });
  const std::size_t n = seq.events.size();
  const std::uint64_t max_inv = max_inversions(n);

  DataInstance inst;
  inst.id = seed.id;
  inst.source = seed.source;
  inst.correct = seed.summary;
  inst.meta.origin = seed.origin;
  inst.meta.num_events = n;
  inst.meta.generator_model = backend.model();
  inst.meta.seed = master.seed();

  for (Difficulty d : kDifficulties) {
    const std::string stage = "lie:" + std::string(to_string(d));
    Rng rng = instance_rng.split(stage);
    LieDraft draft = staged(stage, [&] { return generate_lie(seq, d, backend, rng); });
    inst.lies[d] = std::move(draft.text);
    inst.meta.target_inversions[d] = draft.target_inversions;
    inst.meta.achieved_shuffle_degree[d] =
        static_cast<double>(draft.target_inversions) / static_cast<double>(max_inv);
  }

  inst.paraphrases.correct = staged("paraphrase:correct", [&] {
    return paraphrase_with_retry(inst.correct, backend, options.paraphrase_retries);
  });
  for (Difficulty d : kDifficulties) {
    inst.paraphrases.lies[d] = staged("paraphrase:" + std::string(to_string(d)), [&] {
      return paraphrase_with_retry(inst.lies[d], backend, options.paraphrase_retries);
    });
  }
  staged("assemble", [&] { validate(inst); });
  return inst;
}

BuildResult build_dataset(std::span<const SeedPair> seeds, Backend& backend,
                          std::uint64_t master_seed, unsigned jobs,
                          const BuildOptions& options) {
  const Rng master(master_seed);
  std::vector<std::optional<DataInstance>> built(seeds.size());
  std::vector<std::optional<FailureRecord>> failed(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    try {
      built[i] = build_instance(seeds[i], backend, master, options);
    } catch (const Error& e) {
      failed[i] = FailureRecord{seeds[i].id, e.stage(),
                                std::string(to_string(e.code())) +
                                    (e.detail().empty() ? "" : ": " + e.detail()),
                                master_seed};
    }
  });
  BuildResult result;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (built[i]) result.instances.push_back(std::move(*built[i]));
    if (failed[i]) result.failures.push_back(std::move(*failed[i]));
  }
  return result;
}

}  // namespace montage
