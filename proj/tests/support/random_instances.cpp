#include "random_instances.hpp"

#include <array>

#include "montage/permutation.hpp"

namespace montage::testing {

namespace {

constexpr std::array<const char*, 16> kWords{
    "the",   "harbor", "\"quoted\"", "back\\slash", "tab\there", "caf\xC3\xA9",
    "\xE6\x97\xA5\xE6\x9C\xAC", "emoji\xF0\x9F\x90\x99", "line\nbreak", "{braces}",
    "[list]", "comma,", "O'Neil", "\xE2\x80\x94", "zero\x01" "ctl", "0.125"};

}  // namespace

std::string random_text(Rng& rng, std::size_t max_words) {
  const std::size_t n = rng.uniform(1, max_words);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kWords[rng.uniform(0, kWords.size() - 1)];
  }
  return out;
}

DataInstance random_instance(Rng& rng, std::string id) {
  DataInstance inst;
  inst.id = std::move(id);
  inst.source = random_text(rng, 200);
  inst.correct = random_text(rng);
  inst.paraphrases.correct = random_text(rng);
  inst.meta.origin = rng.uniform(0, 1) ? "booksum" : "summscreen";
  inst.meta.num_events = rng.uniform(5, 40);
  inst.meta.generator_model = "model-" + std::to_string(rng.uniform(0, 9));
  inst.meta.seed = rng.next();
  const std::uint64_t m = max_inversions(inst.meta.num_events);
  for (Difficulty d : kDifficulties) {
    inst.lies[d] = random_text(rng);
    inst.paraphrases.lies[d] = random_text(rng);
    const std::uint64_t k = sample_inversion_target(inst.meta.num_events, d, rng);
    inst.meta.target_inversions[d] = k;
    inst.meta.achieved_shuffle_degree[d] = static_cast<double>(k) / static_cast<double>(m);
  }
  return inst;
}

std::vector<DataInstance> random_instances(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DataInstance> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_instance(rng, "inst-" + std::to_string(i)));
  return out;
}

}  // namespace montage::testing
