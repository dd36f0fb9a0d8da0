#include <gtest/gtest.h>

#include <atomic>

#include "montage/dovescore.hpp"
#include "montage/montage_builder.hpp"
#include "montage/parsers.hpp"
#include "montage/prompts.hpp"
#include "montage/text.hpp"
#include "synthetic_world.hpp"

using namespace montage;
using namespace montage::testing;
using V = std::vector<std::string>;

namespace {

template <class F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected montage::Error";
  return Error(Errc::usage, "none");
}

std::string fact_lists(const V& events, const V& desc) {
  std::string out = "Event Facts List:\n";
  for (const auto& e : events) out += "- " + e + "\n";
  out += "Descriptive Facts List:\n";
  for (const auto& d : desc) out += "- " + d + "\n";
  return out;
}

/// Decomposer answers from `decomposition`, the fact checker marks exactly
/// `true_facts` True, and the sorter returns `sorted` (or echoes its input).
struct ProgrammedBackend {
  std::string decomposition;
  std::set<std::string> true_facts;
  std::optional<V> sorted;
  std::atomic<int> sorter_calls{0};

  CallbackBackend backend() {
    return CallbackBackend("programmed", [this](const CompletionRequest& r) -> std::string {
      auto id = prompts::identify(r.prompt);
      if (!id) throw Error(Errc::no_scripted_response, "?");
      if (id->prompt == &prompts::decomposer()) return decomposition;
      if (id->prompt == &prompts::fact_checker())
        return true_facts.count(id->fields.at("Fact")) ? "True" : "False";
      if (id->prompt == &prompts::sorter()) {
        ++sorter_calls;
        V items = sorted ? *sorted : parse_event_list(id->fields.at("Events"));
        std::string out = "[";
        for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
        return out + "]";
      }
      throw Error(Errc::no_scripted_response, id->prompt->name());
    });
  }
};

}  // namespace

TEST(ComputeDoveScore, Examples) {
  const auto c = compute_dovescore(6, 4, 4, 4, 0.5);
  EXPECT_EQ(c.alpha, 0.6);
  EXPECT_EQ(c.s_event, 2.0 / 3.0);
  EXPECT_EQ(c.s_desc, 1.0);
  EXPECT_EQ(c.score, 0.6);
  EXPECT_EQ(compute_dovescore(5, 5, 3, 3, 1.0).score, 1.0);
  const auto d = compute_dovescore(0, 0, 3, 2, 0.0);
  EXPECT_EQ(d.alpha, 0.0);
  EXPECT_EQ(d.score, 2.0 / 3.0);
  EXPECT_EQ(d.s_event, 1.0);
}

TEST(ComputeDoveScore, Errors) {
  EXPECT_EQ(error_of([] { compute_dovescore(0, 0, 0, 0, 1.0); }).code(), Errc::empty_decomposition);
  EXPECT_EQ(error_of([] { compute_dovescore(2, 3, 0, 0, 1.0); }).code(), Errc::invariant_violation);
  EXPECT_EQ(error_of([] { compute_dovescore(2, 1, 1, 2, 1.0); }).code(), Errc::invariant_violation);
  EXPECT_EQ(error_of([] { compute_dovescore(2, 1, 1, 1, 1.5); }).code(), Errc::invariant_violation);
}

TEST(ComputeDoveScore, PropertiesOverGrid) {
  for (std::size_t ne = 0; ne <= 8; ++ne)
    for (std::size_t nec = 0; nec <= ne; ++nec)
      for (std::size_t nd = 0; nd <= 6; ++nd)
        for (std::size_t ndc = 0; ndc <= nd; ++ndc) {
          if (ne + nd == 0) continue;
          double previous = -1.0;
          for (int step = 0; step <= 10; ++step) {
            const double so = step / 10.0;
            const auto c = compute_dovescore(ne, nec, nd, ndc, so);
            ASSERT_GE(c.score, 0.0);
            ASSERT_LE(c.score, 1.0);
            ASSERT_NEAR(c.score, c.alpha * c.s_event * so + (1 - c.alpha) * c.s_desc, 1e-12);
            ASSERT_GE(c.score, previous);
            previous = c.score;
          }
        }
}

TEST(EventOrderScore, Examples) {
  const std::vector<std::size_t> a{0, 1, 2, 3};
  const std::vector<std::size_t> rev{3, 2, 1, 0};
  EXPECT_EQ(event_order_score(a, a), 1.0);
  EXPECT_EQ(event_order_score(a, rev), 0.0);
  const std::vector<std::size_t> one{5};
  EXPECT_EQ(event_order_score(one, one), 1.0);
  EXPECT_EQ(event_order_score(std::vector<std::size_t>{}, std::vector<std::size_t>{}), 1.0);
  const std::vector<std::size_t> other{0, 1, 2, 9};
  EXPECT_EQ(error_of([&] { event_order_score(a, other); }).code(), Errc::not_a_permutation);
}

TEST(Decompose, PaperExamples) {
  ScriptedBackend b;
  b.add(prompts::decomposer().render({{"Paragraph", "Octopuses have three hearts."}}),
        "Event Facts List:\n- None\nDescriptive Facts List:\n- Octopuses have three hearts");
  b.add(prompts::decomposer().render({{"Paragraph", "Dr. Lin submitted her resignation."}}),
        "Event Facts List:\n- Dr. Lin submitted her resignation\nDescriptive Facts List:\n");
  const FactSet octopus = decompose("Octopuses have three hearts.", b);
  EXPECT_TRUE(octopus.event_facts.empty());
  EXPECT_EQ(octopus.descriptive_facts, V{"Octopuses have three hearts"});
  const FactSet lin = decompose("Dr. Lin submitted her resignation.", b);
  EXPECT_EQ(lin.event_facts, V{"Dr. Lin submitted her resignation"});
  EXPECT_TRUE(lin.descriptive_facts.empty());
  EXPECT_EQ(lin.event_verdicts, std::vector<Verdict>{Verdict::unverifiable});
}

TEST(Decompose, EmptyDecomposition) {
  ScriptedBackend b;
  b.add(prompts::decomposer().render({{"Paragraph", "x"}}),
        "Event Facts List:\nNone\nDescriptive Facts List:\nNone");
  EXPECT_EQ(error_of([&] { decompose("x", b); }).code(), Errc::empty_decomposition);
}

TEST(CheckFacts, Ratios) {
  ProgrammedBackend p;
  p.true_facts = {"e1", "e2", "e3", "e4"};
  auto b = p.backend();
  FactSet f;
  f.event_facts = {"e1", "e2", "e3", "e4", "e5", "e6"};
  f = check_facts(f, "source", b);
  const auto correct = std::count(f.event_verdicts.begin(), f.event_verdicts.end(), Verdict::correct);
  EXPECT_EQ(correct, 4);
  EXPECT_EQ(compute_dovescore(6, 4, 0, 0, 1.0).s_event, 2.0 / 3.0);
}

TEST(CheckFacts, UncertainCountsAsIncorrect) {
  CallbackBackend b("m", [](const CompletionRequest& r) {
    auto id = prompts::identify(r.prompt);
    return id->fields.at("Fact") == "a" ? std::string("True") : std::string("uncertain");
  });
  FactSet f;
  f.event_facts = {"a", "b"};
  f = check_facts(f, "src", b);
  EXPECT_EQ(f.event_verdicts[1], Verdict::unverifiable);

  ProgrammedBackend p;
  p.decomposition = fact_lists({"a", "b"}, {});
  CallbackBackend combined("m", [&](const CompletionRequest& r) {
    auto id = prompts::identify(r.prompt);
    if (id->prompt == &prompts::fact_checker()) return b.complete(r);
    return p.backend().complete(r);
  });
  const auto result = evaluate_dovescore("src", "tgt", combined);
  EXPECT_EQ(result.s_event, 0.5);
  EXPECT_EQ(result.score, 0.5);
}

TEST(CheckFacts, ErrorsNameTheFact) {
  CallbackBackend b("m", [](const CompletionRequest& r) -> std::string {
    auto id = prompts::identify(r.prompt);
    if (id->fields.at("Fact") == "bad") throw Error(Errc::timeout, "slow");
    return "True";
  });
  FactSet f;
  f.event_facts = {"ok", "bad"};
  const Error e = error_of([&] { check_facts(f, "src", b); });
  EXPECT_EQ(e.code(), Errc::timeout);
  EXPECT_NE(e.detail().find("event fact 1"), std::string::npos) << e.detail();
}

TEST(OrderEvents, IdentityAndPaperExample) {
  ProgrammedBackend p;
  auto b = p.backend();
  const V events{"a happened", "b happened", "c happened"};
  EXPECT_EQ(order_events("para", events, b), (std::vector<std::size_t>{0, 1, 2}));

  ProgrammedBackend tom;
  tom.sorted = V{"Tom woke up", "Tom brushed his teeth", "Tom had breakfast", "Tom went for a run"};
  auto tb = tom.backend();
  const V scrambled{"Tom had breakfast", "Tom woke up", "Tom went for a run", "Tom brushed his teeth"};
  EXPECT_EQ(order_events("Tom woke up early. He brushed his teeth and then had breakfast. After "
                         "that, he went for a run.",
                         scrambled, tb),
            (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(OrderEvents, ParaphrasedItemMatchedByTokenOverlap) {
  const auto a = token_set("Tom ate breakfast");
  const auto b = token_set("Tom had breakfast");
  std::size_t shared = 0;
  for (const auto& t : a) shared += b.count(t);
  const double overlap = static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
  ASSERT_GE(overlap, kMatchThreshold);

  ProgrammedBackend p;
  p.sorted = V{"Tom woke up", "Tom ate breakfast", "Tom went for a run"};
  auto backend = p.backend();
  const V events{"Tom went for a run", "Tom had breakfast", "Tom woke up"};
  EXPECT_EQ(order_events("para", events, backend), (std::vector<std::size_t>{2, 1, 0}));
}

TEST(OrderEvents, DroppedDuplicateAndCaseVariants) {
  ProgrammedBackend p;
  p.sorted = V{"C HAPPENED.", "a happened", "a happened"};
  auto b = p.backend();
  const V events{"a happened", "b happened", "c happened"};
  EXPECT_EQ(order_events("para", events, b), (std::vector<std::size_t>{2, 0, 1}));
}

TEST(OrderEvents, MatchFailure) {
  ProgrammedBackend p;
  p.sorted = V{"zebra", "yak", "a happened"};
  auto b = p.backend();
  const V events{"a happened", "b happened"};
  EXPECT_EQ(error_of([&] { order_events("para", events, b); }).code(), Errc::match_failure);

  ProgrammedBackend half;
  half.sorted = V{"zebra", "b happened"};
  auto hb = half.backend();
  EXPECT_EQ(order_events("para", events, hb), (std::vector<std::size_t>{1, 0}));
}

TEST(OrderEvents, UnparseableOrder) {
  CallbackBackend b("m", [](const CompletionRequest&) { return std::string("I refuse."); });
  const V events{"a", "b"};
  EXPECT_EQ(error_of([&] { order_events("para", events, b); }).code(), Errc::unparseable_order);
}

TEST(EvaluateDoveScore, AllCorrectOrdered) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "e2", "e3"}, {"d1"});
  p.true_facts = {"e1", "e2", "e3", "d1"};
  auto b = p.backend();
  const auto r = evaluate_dovescore("source", "target", b);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(r.alpha, 0.75);
  EXPECT_EQ(p.sorter_calls.load(), 1);
}

TEST(EvaluateDoveScore, ReversedSourceOrder) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "e2", "e3"}, {"d1", "d2"});
  p.true_facts = {"e1", "e2", "e3", "d1"};
  p.sorted = V{"e3", "e2", "e1"};
  auto b = p.backend();
  const auto r = evaluate_dovescore("source", "target", b);
  EXPECT_EQ(r.s_order, 0.0);
  EXPECT_EQ(r.s_desc, 0.5);
  EXPECT_DOUBLE_EQ(r.score, (1 - r.alpha) * r.s_desc);
  EXPECT_EQ(r.source_order, (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(r.target_order, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(EvaluateDoveScore, OnlyVerifiedEventsAreSorted) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "x", "e2"}, {});
  p.true_facts = {"e1", "e2"};
  p.sorted = V{"e2", "e1"};
  auto b = p.backend();
  const auto r = evaluate_dovescore("source", "target", b);
  EXPECT_EQ(r.source_order, (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(r.target_order, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(r.s_order, 0.0);
  EXPECT_EQ(r.score, 0.0);
}

TEST(EvaluateDoveScore, SingleVerifiedEventSkipsSorter) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "x"}, {});
  p.true_facts = {"e1"};
  auto b = p.backend();
  const auto r = evaluate_dovescore("source", "target", b);
  EXPECT_EQ(r.s_order, 1.0);
  EXPECT_EQ(r.score, 0.5);
  EXPECT_EQ(p.sorter_calls.load(), 0);
}

TEST(EvaluateDoveScore, LieFromItsOwnTruth) {
  const auto worlds = make_worlds(8, 31, 6, 12, 0);
  auto registry = std::make_shared<WorldRegistry>(worlds);
  auto echo = make_echo_backend(registry);
  auto oracle = make_oracle_backend(registry);
  for (const World& w : worlds) {
    const DataInstance inst = build_instance(w.seed(), *echo, Rng(3));
    for (Difficulty d : kDifficulties) {
      const auto r = evaluate_dovescore(inst.source, inst.lies[d], *oracle);
      EXPECT_EQ(r.s_event, 1.0);
      EXPECT_EQ(r.s_desc, 1.0);
      EXPECT_NEAR(r.s_order, 1.0 - inst.meta.achieved_shuffle_degree[d], 1e-12);
      EXPECT_NEAR(r.score, r.s_order, 1e-12);
    }
    EXPECT_EQ(evaluate_dovescore(inst.source, inst.correct, *oracle).score, 1.0);
  }
}

TEST(EvaluateDoveScore, TwoCallSorterAddsTargetStage) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "e2"}, {});
  p.true_facts = {"e1", "e2"};
  auto b = p.backend();
  DoveScoreOptions opts;
  const auto one = evaluate_dovescore("source", "target", b, opts);
  opts.two_call_sorter = true;
  const auto two = evaluate_dovescore("source", "target", b, opts);
  auto stages = [](const DoveScoreResult& r) {
    V out;
    for (const auto& a : r.audit) out.push_back(a.stage);
    return out;
  };
  EXPECT_EQ(stages(one), (V{"decompose", "check:event:0", "check:event:1", "sort:source"}));
  EXPECT_EQ(stages(two),
            (V{"decompose", "check:event:0", "check:event:1", "sort:source", "sort:target"}));
  EXPECT_EQ(two.score, 1.0);
}

TEST(EvaluateDoveScore, StageLabels) {
  CallbackBackend broken("m", [](const CompletionRequest&) { return std::string("garbage"); });
  EXPECT_EQ(error_of([&] { evaluate_dovescore("s", "t", broken); }).stage(), "decompose");

  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "e2"}, {});
  p.true_facts = {"e1", "e2"};
  p.sorted = V{"zz", "yy"};
  auto b = p.backend();
  const Error e = error_of([&] { evaluate_dovescore("s", "t", b); });
  EXPECT_EQ(e.code(), Errc::match_failure);
  EXPECT_EQ(e.stage(), "sort:source");

  CallbackBackend failing_check("m", [&](const CompletionRequest& r) -> std::string {
    auto id = prompts::identify(r.prompt);
    if (id->prompt == &prompts::fact_checker()) throw Error(Errc::rate_limited, "429");
    return p.backend().complete(r);
  });
  EXPECT_EQ(error_of([&] { evaluate_dovescore("s", "t", failing_check); }).stage(), "check");
  EXPECT_EQ(error_of([&] { evaluate_dovescore("s", " ", b); }).code(), Errc::missing_field);
}

TEST(EvaluateDoveScore, JobsDoNotChangeResult) {
  const auto worlds = make_worlds(3, 8, 8, 12, 3);
  auto registry = std::make_shared<WorldRegistry>(worlds);
  auto oracle = make_oracle_backend(registry);
  DoveScoreOptions serial, parallel;
  parallel.jobs = 4;
  for (const World& w : worlds) {
    const auto a = evaluate_dovescore(w.source, w.summary, *oracle, serial);
    const auto b = evaluate_dovescore(w.source, w.summary, *oracle, parallel);
    EXPECT_EQ(to_json(a, true), to_json(b, true));
  }
}

TEST(EvaluateDoveScore, OrderBlindIgnoresChronology) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "e2", "e3"}, {"d1"});
  p.true_facts = {"e1", "e2", "e3", "d1"};
  p.sorted = V{"e3", "e2", "e1"};
  auto b = p.backend();
  DoveScoreOptions blind;
  blind.order_blind = true;
  const auto r = evaluate_dovescore("s", "t", b, blind);
  EXPECT_EQ(r.s_order, 1.0);
  EXPECT_EQ(r.score, 1.0);
  EXPECT_EQ(p.sorter_calls.load(), 0);
  EXPECT_LT(evaluate_dovescore("s", "t", b).score, 1.0);
}

TEST(EvaluateDoveScore, JsonOutput) {
  ProgrammedBackend p;
  p.decomposition = fact_lists({"e1", "e2"}, {"d1"});
  p.true_facts = {"e1", "e2", "d1"};
  auto b = p.backend();
  const auto r = evaluate_dovescore("s", "t", b);
  const std::string quiet = to_json(r, false);
  const std::string verbose = to_json(r, true);
  EXPECT_EQ(quiet.find("\"audit\""), std::string::npos);
  EXPECT_NE(verbose.find("\"audit\""), std::string::npos);
  EXPECT_EQ(quiet.rfind("{\n  \"score\": 1.0", 0), 0u) << quiet;
}
