#include "scripted_run.hpp"

#include "montage/eval.hpp"
#include "montage/montage_builder.hpp"
#include "synthetic_world.hpp"

namespace montage::testing {

ScriptedRun prepare_scripted_run(const std::filesystem::path& dir, std::size_t count,
                                 std::uint64_t world_seed, std::uint64_t master_seed) {
  ScriptedRun run{dir / "seeds.jsonl", dir / "build.fixture.jsonl", dir / "eval.fixture.jsonl"};
  const auto worlds = make_worlds(count, world_seed);
  auto registry = std::make_shared<const WorldRegistry>(worlds);

  std::vector<SeedPair> seeds;
  for (const auto& w : worlds) seeds.push_back(w.seed());
  write_seed_file(run.seeds, seeds);

  auto echo = make_echo_backend(registry);
  RecordingBackend build_recorder(*echo);
  const BuildResult built = build_dataset(seeds, build_recorder, master_seed);
  build_recorder.write_fixture(run.build_fixture);

  auto oracle = make_oracle_backend(registry);
  RecordingBackend eval_recorder(*oracle);
  DoveScoreOptions two_call;
  two_call.two_call_sorter = true;
  for (const AlignmentEvaluator& e :
       {dovescore_evaluator(eval_recorder), dovescore_evaluator(eval_recorder, two_call),
        coarse_llm_evaluator(eval_recorder)})
    evaluate_benchmark(built.instances, e, true);
  eval_recorder.write_fixture(run.eval_fixture);
  return run;
}

}  // namespace montage::testing
