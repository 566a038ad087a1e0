#include <catch2/catch_amalgamated.hpp>

#include "recarena/profiling.hpp"
#include "recarena/synth.hpp"

using namespace recarena;

namespace {

Dataset fixture_dataset() {
  Dataset ds;
  auto add_item = [&](const std::string& id, const std::string& name,
                      std::vector<std::string> cats) {
    ItemRecord rec;
    rec.item_id = id;
    rec.name = name;
    rec.categories = std::move(cats);
    rec.merchant_id = "m-" + id;
    ds.catalog[id] = rec;
  };
  add_item("i1", "Golden Wok", {"noodles"});
  add_item("i2", "Blue Fin", {"sushi"});
  add_item("i3", "Urban Greens", {"salads"});
  add_item("i4", "Copper Grill", {"bbq", "burgers"});
  return ds;
}

}  // namespace

TEST_CASE("objective profile basic statistics") {
  Dataset ds = fixture_dataset();
  ds.users["u1"] = {{"i1", 5, std::nullopt},
                    {"i2", 5, std::nullopt},
                    {"i3", 5, std::nullopt},
                    {"i4", 5, std::nullopt}};
  const auto stats = build_corpus_stats(ds);
  const auto p = compute_objective_profile(ds.users["u1"], ds.catalog, stats);
  CHECK(p.t_rate == Catch::Approx(5.0));
  CHECK(p.t_repr == Catch::Approx(0.0));
  CHECK(p.t_relen == Catch::Approx(0.0));
}

TEST_CASE("review probability and mean token length") {
  Dataset ds = fixture_dataset();
  // 4 interactions, 2 with reviews of 10 and 20 whitespace tokens
  const std::string ten = "a b c d e f g h i j";
  const std::string twenty = ten + " " + ten;
  ds.users["u1"] = {{"i1", 4, ten},
                    {"i2", 4, std::nullopt},
                    {"i3", 4, twenty},
                    {"i4", 4, std::nullopt}};
  const auto stats = build_corpus_stats(ds);
  const auto p = compute_objective_profile(ds.users["u1"], ds.catalog, stats);
  CHECK(p.t_repr == Catch::Approx(0.5));
  CHECK(p.t_relen == Catch::Approx(15.0));
}

TEST_CASE("top categories match a full-sort oracle") {
  Dataset ds;
  std::vector<HistoricalInteraction> history;
  // 35 distinct categories with strictly decreasing frequencies
  std::map<std::string, std::size_t> expected_counts;
  int item_no = 0;
  for (int c = 0; c < 35; ++c) {
    const std::string cat = "cat" + std::to_string(c);
    const std::size_t freq = std::size_t(36 - c);
    expected_counts[cat] = freq;
    for (std::size_t k = 0; k < freq; ++k) {
      const std::string id = "i" + std::to_string(item_no++);
      ItemRecord rec;
      rec.item_id = id;
      rec.name = id;
      rec.categories = {cat};
      rec.merchant_id = "m";
      ds.catalog[id] = rec;
      history.push_back({id, 5, std::nullopt});
    }
  }
  ds.users["u1"] = history;
  const auto stats = build_corpus_stats(ds);
  const auto p = compute_objective_profile(history, ds.catalog, stats);

  // oracle: full sort by (count desc, name asc), take 30
  std::vector<std::pair<std::string, std::size_t>> sorted(expected_counts.begin(),
                                                          expected_counts.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  REQUIRE(p.t_cate.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) CHECK(p.t_cate[i] == sorted[i].first);

  // prefix stability: top-10 of the top-30 equals an independent top-10
  std::map<std::string, std::size_t> counts_for_top10(expected_counts.begin(),
                                                      expected_counts.end());
  const auto top10 = top_by_count(counts_for_top10, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(p.t_cate[i] == top10[i]);
}

TEST_CASE("t_repr times history size equals the non-empty review count") {
  const Dataset ds = synth::make_dataset({.n_users = 20, .n_items = 10, .seed = 8});
  const auto stats = build_corpus_stats(ds);
  for (const auto& [user, history] : ds.users) {
    const auto p = compute_objective_profile(history, ds.catalog, stats);
    std::size_t reviewed = 0;
    for (const auto& h : history)
      if (h.review_text && !h.review_text->empty()) ++reviewed;
    CHECK(p.t_repr * double(history.size()) == Catch::Approx(double(reviewed)));
  }
}

TEST_CASE("empty history is rejected") {
  Dataset ds = fixture_dataset();
  const auto stats = build_corpus_stats(ds);
  CHECK_THROWS_AS(compute_objective_profile({}, ds.catalog, stats), std::invalid_argument);
}

TEST_CASE("gateway-backed subjective profile parses the fixed schema") {
  const Dataset ds = fixture_dataset();
  const std::vector<HistoricalInteraction> sampled = {{"i1", 5, std::string("lovely noodles")}};
  PromptLibrary prompts = PromptLibrary::bundled();

  const std::string valid = R"({
    "reason": "test",
    "profile": {
      "consumption_budget_range": "moderate",
      "scenario_preferences": ["family dinner"],
      "consumption_habits": ["weekend outings"],
      "taste_preferences": ["noodles"]
    }
  })";

  SECTION("valid response parses") {
    ScriptedBackend backend;
    backend.enqueue(valid);
    const auto p = build_subjective_profile(sampled, ds.catalog, backend, prompts);
    CHECK(p.consumption_budget_range == "moderate");
    CHECK(p.taste_preferences == std::vector<std::string>{"noodles"});
    CHECK(p.reason == "test");
  }

  SECTION("invalid then valid succeeds with one reprompt") {
    ScriptedBackend backend;
    backend.enqueue("no json here");
    backend.enqueue(valid);
    const auto p = build_subjective_profile(sampled, ds.catalog, backend, prompts);
    CHECK(p.consumption_budget_range == "moderate");
    CHECK(backend.calls().size() == 2);
  }

  SECTION("invalid twice surfaces a parse error") {
    ScriptedBackend backend;
    backend.enqueue("nope");
    backend.enqueue("still nope");
    CHECK_THROWS_AS(build_subjective_profile(sampled, ds.catalog, backend, prompts),
                    ProfileParseError);
  }
}

TEST_CASE("inferred profile normalizes empty fields to unknown") {
  const Dataset ds = fixture_dataset();
  const std::vector<HistoricalInteraction> sampled = {{"i1", 5, std::string("nice")}};
  PromptLibrary prompts = PromptLibrary::bundled();

  ScriptedBackend backend;
  backend.enqueue(R"({
    "reason": "r",
    "profile": {
      "estimated_age_range": "",
      "possible_occupation_type": "engineer",
      "estimated_income_level": "",
      "life_status": "single",
      "price_sensitivity": "low",
      "quality_consciousness": "high",
      "service_preferences": ["fast"],
      "points_of_concern": [],
      "review_language_style": ["concise"]
    }
  })");
  const auto p = build_inferred_profile(sampled, ds.catalog, backend, prompts);
  CHECK(p.estimated_age_range == "unknown");
  CHECK(p.estimated_income_level == "unknown");
  CHECK(p.possible_occupation_type == "engineer");
}

TEST_CASE("inferred profile runs on ratings-only input") {
  const Dataset ds = fixture_dataset();
  const std::vector<HistoricalInteraction> sampled = {{"i2", 3, std::nullopt}};
  PromptLibrary prompts = PromptLibrary::bundled();
  ScriptedBackend backend;
  backend.enqueue(R"({"profile": {"estimated_age_range": "", "possible_occupation_type": "",
    "estimated_income_level": "", "life_status": "", "price_sensitivity": "",
    "quality_consciousness": "", "service_preferences": [], "points_of_concern": [],
    "review_language_style": []}})");
  const auto p = build_inferred_profile(sampled, ds.catalog, backend, prompts);
  CHECK(p.estimated_age_range == "unknown");
  CHECK(p.quality_consciousness == "unknown");
}

TEST_CASE("profile pool is deterministic and degrades per user") {
  const Dataset ds = synth::make_dataset({.n_users = 3, .n_items = 8, .seed = 21});
  PromptLibrary prompts = PromptLibrary::bundled();

  SECTION("mock mode: placeholder blocks, byte-identical across runs") {
    const auto pool1 = assemble_profile_pool(ds, nullptr, prompts, 5);
    const auto pool2 = assemble_profile_pool(ds, nullptr, prompts, 5);
    REQUIRE(pool1.size() == 3);
    Json j1 = Json::object(), j2 = Json::object();
    for (const auto& [u, p] : pool1) j1[u] = p;
    for (const auto& [u, p] : pool2) j2[u] = p;
    CHECK(j1.dump() == j2.dump());
    for (const auto& [u, p] : pool1) CHECK(p.placeholder);
  }

  SECTION("permanent gateway failure yields a flagged placeholder, pool continues") {
    ScriptedBackend backend;
    backend.fail_next(1000, false);  // every call fails hard
    const auto pool = assemble_profile_pool(ds, &backend, prompts, 5);
    REQUIRE(pool.size() == 3);
    for (const auto& [u, p] : pool) {
      CHECK(p.placeholder);
      CHECK_FALSE(p.objective.t_cate.empty());  // objective block still computed
    }
  }

  SECTION("empty dataset yields an empty pool") {
    Dataset empty;
    CHECK(assemble_profile_pool(empty, nullptr, prompts, 5).empty());
  }
}

TEST_CASE("profile pool persists as JSONL") {
  const Dataset ds = synth::make_dataset({.n_users = 4, .n_items = 8, .seed = 13});
  PromptLibrary prompts = PromptLibrary::bundled();
  const auto pool = assemble_profile_pool(ds, nullptr, prompts, 5);
  save_profile_pool(pool, "/tmp/recarena_test_pool.jsonl");
  const auto loaded = load_profile_pool("/tmp/recarena_test_pool.jsonl");
  REQUIRE(loaded.size() == pool.size());
  for (const auto& [u, p] : pool) CHECK(Json(loaded.at(u)).dump() == Json(p).dump());
}
