#include <catch2/catch_amalgamated.hpp>

#include "recarena/curation.hpp"
#include "recarena/paths.hpp"

using namespace recarena;

namespace {

const SentimentLexicon& lexicon() {
  static const SentimentLexicon lex = SentimentLexicon::load_tsv(data_dir() + "/vader_lexicon.tsv");
  return lex;
}

std::string response_like(const std::string& item) {
  return R"({"thought": "t", "actions": [{"kind": "like_product", "target_item": ")" + item +
         R"("}]})";
}

DecisionLogEntry entry(const std::string& run, int step, const std::string& agent,
                       const std::string& user, const std::string& response) {
  DecisionLogEntry d;
  d.run_id = run;
  d.step = step;
  d.agent_id = agent;
  d.user_id = user;
  d.prompt = "decision prompt for " + agent;
  d.response = response;
  return d;
}

}  // namespace

TEST_CASE("collect_cot_samples yields one sample per recorded decision") {
  std::vector<std::vector<DecisionLogEntry>> runs;
  for (int run = 0; run < 2; ++run) {
    std::vector<DecisionLogEntry> entries;
    for (int agent = 0; agent < 3; ++agent)
      for (int step = 1; step <= 2; ++step)
        entries.push_back(entry("run" + std::to_string(run), step,
                                "agent-" + std::to_string(agent), "u" + std::to_string(agent),
                                response_like("i1")));
    runs.push_back(std::move(entries));
  }
  const auto samples = collect_cot_samples(runs);
  CHECK(samples.size() == 12);
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.sample_id);
  CHECK(ids.size() == 12);
}

TEST_CASE("collect_cot_samples rejects runs without recorded prompts") {
  auto d = entry("run0", 1, "agent-0", "u0", response_like("i1"));
  d.prompt = "";
  CHECK_THROWS_AS(collect_cot_samples({{d}}), CurationError);
  CHECK_THROWS_AS(collect_cot_samples({}), CurationError);
}

TEST_CASE("format filter") {
  auto good = entry("r", 1, "a", "u", response_like("i1"));
  const auto samples = collect_cot_samples({{good}});
  CHECK(format_filter(samples[0]).pass);

  auto truncated = entry("r", 2, "a", "u", R"({"thought": "t", "actions": [{"kind")");
  auto unknown = entry("r", 3, "a", "u", R"({"thought":"t","actions":[{"kind":"fly"}]})");
  const auto bad = collect_cot_samples({{truncated, unknown}});
  CHECK_FALSE(format_filter(bad[0]).pass);
  CHECK_FALSE(format_filter(bad[1]).pass);
}

TEST_CASE("preference filter checks polarity against the real history") {
  const std::set<ItemId> history = {"i1", "i2"};

  auto like_known = collect_cot_samples({{entry("r", 1, "a", "u", response_like("i1"))}})[0];
  CHECK(preference_filter(like_known, history, lexicon()).pass);

  auto like_unknown = collect_cot_samples({{entry("r", 2, "a", "u", response_like("i9"))}})[0];
  CHECK_FALSE(preference_filter(like_unknown, history, lexicon()).pass);

  auto dislike_known = collect_cot_samples({{entry(
      "r", 3, "a", "u",
      R"({"thought":"t","actions":[{"kind":"dislike_product","target_item":"i1"}]})")}})[0];
  CHECK_FALSE(preference_filter(dislike_known, history, lexicon()).pass);

  auto dislike_unknown = collect_cot_samples({{entry(
      "r", 4, "a", "u",
      R"({"thought":"t","actions":[{"kind":"dislike_product","target_item":"i9"}]})")}})[0];
  CHECK(preference_filter(dislike_unknown, history, lexicon()).pass);

  // review polarity by compound sentiment sign
  auto positive_review = collect_cot_samples({{entry(
      "r", 5, "a", "u",
      R"({"thought":"t","actions":[{"kind":"create_review","target_item":"i9",
          "review_text":"wonderful food, great place"}]})")}})[0];
  CHECK_FALSE(preference_filter(positive_review, history, lexicon()).pass);

  auto negative_review = collect_cot_samples({{entry(
      "r", 6, "a", "u",
      R"({"thought":"t","actions":[{"kind":"create_review","target_item":"i9",
          "review_text":"terrible awful experience"}]})")}})[0];
  CHECK(preference_filter(negative_review, history, lexicon()).pass);

  auto nothing = collect_cot_samples({{entry(
      "r", 7, "a", "u", R"({"thought":"t","actions":[{"kind":"do_nothing"}]})")}})[0];
  CHECK(preference_filter(nothing, history, lexicon()).pass);
}

TEST_CASE("llm filter parses PASS and FAIL verdicts and holds on failure") {
  PromptLibrary prompts = PromptLibrary::bundled();
  auto sample = collect_cot_samples({{entry("r", 1, "a", "u", response_like("i1"))}})[0];

  ScriptedBackend pass_judge;
  pass_judge.set_default("PASS");
  CHECK(llm_filter(sample, pass_judge, prompts).pass);

  ScriptedBackend fail_judge;
  fail_judge.set_default("FAIL: implausible reasoning");
  const auto v = llm_filter(sample, fail_judge, prompts);
  CHECK_FALSE(v.pass);
  CHECK(v.reason == "implausible reasoning");

  ScriptedBackend broken;
  broken.fail_next(100, false);
  const auto held = llm_filter(sample, broken, prompts);
  CHECK_FALSE(held.valid);
}

TEST_CASE("review queue export/import round-trips and rejects bad input") {
  std::vector<CotSample> samples;
  for (int i = 0; i < 5; ++i) {
    auto s = collect_cot_samples({{entry("r", i + 1, "a", "u", response_like("i1"))}})[0];
    samples.push_back(s);
  }
  const std::string queue_path = "/tmp/recarena_test_queue.jsonl";
  export_review_queue(samples, queue_path);

  std::set<std::string> known;
  for (const auto& s : samples) known.insert(s.sample_id);

  // write decisions for every sample
  {
    std::ofstream out("/tmp/recarena_test_decisions.jsonl");
    for (const auto& s : samples)
      out << Json{{"sample_id", s.sample_id}, {"pass", true}, {"reason", "ok"}}.dump() << "\n";
  }
  const auto verdicts = import_human_decisions("/tmp/recarena_test_decisions.jsonl", known);
  CHECK(verdicts.size() == 5);

  {
    std::ofstream out("/tmp/recarena_test_decisions_dup.jsonl");
    const auto& id = *known.begin();
    out << Json{{"sample_id", id}, {"pass", true}}.dump() << "\n";
    out << Json{{"sample_id", id}, {"pass", false}}.dump() << "\n";
  }
  CHECK_THROWS_AS(import_human_decisions("/tmp/recarena_test_decisions_dup.jsonl", known),
                  CurationError);

  {
    std::ofstream out("/tmp/recarena_test_decisions_unknown.jsonl");
    out << Json{{"sample_id", "mystery"}, {"pass", true}}.dump() << "\n";
  }
  CHECK_THROWS_AS(import_human_decisions("/tmp/recarena_test_decisions_unknown.jsonl", known),
                  CurationError);

  {
    std::ofstream out("/tmp/recarena_test_decisions_bad.jsonl");
    out << "not json\n";
  }
  CHECK_THROWS_AS(import_human_decisions("/tmp/recarena_test_decisions_bad.jsonl", known),
                  CurationError);
}

TEST_CASE("pipeline emits exactly the all-stage passers, deterministically") {
  // 20 samples with known per-stage outcomes:
  //   0-4:   format failures
  //   5-9:   preference failures (like on an unknown item)
  //   10-13: llm failures (judge keyed to fail on these agents)
  //   14:    human reject
  //   15-19: full passes
  std::vector<DecisionLogEntry> entries;
  for (int i = 0; i < 20; ++i) {
    std::string response;
    if (i < 5) {
      response = "not structured at all";
    } else if (i < 10) {
      response = response_like("i_unknown");
    } else {
      response = response_like("i1");
    }
    entries.push_back(entry("run", i + 1, "agent-" + std::to_string(i), "u", response));
  }
  const auto samples = collect_cot_samples({entries});

  std::map<UserId, std::set<ItemId>> histories;
  histories["u"] = {"i1"};

  PromptLibrary prompts = PromptLibrary::bundled();
  ScriptedBackend judge;
  for (int i = 10; i < 14; ++i)
    judge.on_contains("agent-" + std::to_string(i), "FAIL: scripted");
  judge.set_default("PASS");

  std::map<std::string, HumanDecision> human;
  for (const auto& s : samples)
    human[s.sample_id] = {s.agent_id != "agent-14", ""};

  const auto outcomes =
      run_curation(samples, histories, lexicon(), &judge, &prompts, &human, {});
  const std::string out_path = "/tmp/recarena_test_finetune.jsonl";
  const std::size_t emitted = emit_finetune_dataset(outcomes, out_path);
  CHECK(emitted == 5);

  // every emitted sample has exactly four pass verdicts on record
  for (const auto& o : outcomes) {
    if (!o.passed_all) continue;
    REQUIRE(o.verdicts.size() == 4);
    for (const auto& v : o.verdicts) CHECK(v.pass);
  }

  // byte-identical re-run
  const auto outcomes2 =
      run_curation(samples, histories, lexicon(), &judge, &prompts, &human, {});
  const std::string out_path2 = "/tmp/recarena_test_finetune2.jsonl";
  emit_finetune_dataset(outcomes2, out_path2);
  std::ifstream a(out_path), b(out_path2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK_FALSE(sa.str().empty());

  // monotonicity: removing stages never decreases the emitted count
  CurationOptions no_llm;
  no_llm.llm = false;
  const auto without_llm =
      run_curation(samples, histories, lexicon(), nullptr, &prompts, &human, no_llm);
  const std::size_t emitted_without_llm =
      emit_finetune_dataset(without_llm, "/tmp/recarena_test_finetune3.jsonl");
  CHECK(emitted_without_llm >= emitted);

  CurationOptions only_format;
  only_format.preference = only_format.llm = only_format.human = false;
  const auto format_only =
      run_curation(samples, histories, lexicon(), nullptr, &prompts, nullptr, only_format);
  const std::size_t emitted_format_only =
      emit_finetune_dataset(format_only, "/tmp/recarena_test_finetune4.jsonl");
  CHECK(emitted_format_only >= emitted_without_llm);
  CHECK(emitted_format_only == 15);  // only the 5 format failures drop
}

TEST_CASE("samples missing a human decision stay pending") {
  const auto samples = collect_cot_samples({{entry("r", 1, "a", "u", response_like("i1"))}});
  std::map<UserId, std::set<ItemId>> histories;
  histories["u"] = {"i1"};
  PromptLibrary prompts = PromptLibrary::bundled();
  ScriptedBackend judge;
  judge.set_default("PASS");
  std::map<std::string, HumanDecision> empty_decisions;
  const auto outcomes =
      run_curation(samples, histories, lexicon(), &judge, &prompts, &empty_decisions, {});
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].pending);
  CHECK_FALSE(outcomes[0].passed_all);
  CHECK(emit_finetune_dataset(outcomes, "/tmp/recarena_test_finetune5.jsonl") == 0);
}
