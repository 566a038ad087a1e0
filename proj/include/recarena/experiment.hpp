#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "recarena/config.hpp"
#include "recarena/evaluate.hpp"
#include "recarena/manifest.hpp"
#include "recarena/platform.hpp"
#include "recarena/report.hpp"
#include "recarena/snapshot.hpp"
#include "recarena/synth.hpp"

namespace recarena {

// A scripted scenario: runs that differ only in the scripted variable, plus
// the comparison to emit afterwards.
struct ExperimentRun {
  std::string label;
  SimulationConfig config;
};

struct ExperimentScript {
  std::string scenario;
  synth::SynthConfig synth;
  std::vector<ExperimentRun> runs;
  ItemId tracked_item;
  ActionKind tracked_kind = ActionKind::LikeProduct;
};

inline const std::vector<std::string>& experiment_scenarios() {
  static const std::vector<std::string> v = {"interaction-ablation", "malicious-review",
                                             "merchant-reply",       "brand-rename",
                                             "seed-boost",           "credibility-eval"};
  return v;
}

namespace detail {

inline const std::vector<std::string>& malicious_texts() {
  static const std::vector<std::string> texts = {
      "Honestly disappointing, the food was bland and my order arrived cold.",
      "Bad experience, the tables were dirty and the staff seemed annoyed with everyone.",
      "Not worth the hype, slow service and the portions felt like a scam."};
  return texts;
}

inline SimulationConfig experiment_base_config(std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.total_steps = 10;
  cfg.agent_count = 200;
  cfg.page_size = 12;
  cfg.recommender = "most_popular";
  cfg.seed = seed;
  cfg.llm_backend = "mock";
  cfg.record_prompts = false;
  return cfg;
}

}  // namespace detail

// Deterministic desk-scale configurations per scenario; paired runs share
// everything except the scripted variable.
inline ExperimentScript build_experiment(const std::string& scenario, std::uint64_t seed) {
  ExperimentScript script;
  script.scenario = scenario;
  script.synth.seed = mix_seed(seed, "synth");
  script.synth.n_users = 200;
  script.synth.n_items = 12;
  script.synth.history_len = 8;

  SimulationConfig base = detail::experiment_base_config(seed);

  if (scenario == "interaction-ablation") {
    script.tracked_item = "it_003";
    base.mock_persona = "popularity-sensitive";
    base.persona.popularity_threshold = 150.0;
    base.persona.explore_prob = 0.05;
    Intervention boost;
    boost.kind = InterventionKind::SeedBoost;
    boost.step = 0;
    boost.item_id = script.tracked_item;
    boost.initial_sales = 130;
    base.interventions = {boost};
    ExperimentRun on{"interaction-on", base};
    ExperimentRun off{"interaction-off", base};
    off.config.interaction_enabled = false;
    script.runs = {on, off};
  } else if (scenario == "malicious-review") {
    script.tracked_item = "it_003";
    base.mock_persona = "sentiment-sensitive";
    base.persona.popularity_threshold = 80.0;
    base.persona.explore_prob = 0.05;
    Intervention boost;
    boost.kind = InterventionKind::SeedBoost;
    boost.step = 0;
    boost.item_id = script.tracked_item;
    boost.initial_sales = 200;
    base.interventions = {boost};
    ExperimentRun control{"control", base};
    ExperimentRun injected{"injected", base};
    Intervention malicious;
    malicious.kind = InterventionKind::MaliciousReviews;
    malicious.step = 5;
    malicious.item_id = script.tracked_item;
    malicious.texts = detail::malicious_texts();
    injected.config.interventions.push_back(malicious);
    script.runs = {control, injected};
  } else if (scenario == "merchant-reply") {
    script.tracked_item = "it_003";
    base.mock_persona = "sentiment-sensitive";
    base.persona.popularity_threshold = 80.0;
    base.persona.explore_prob = 0.05;
    Intervention boost;
    boost.kind = InterventionKind::SeedBoost;
    boost.step = 0;
    boost.item_id = script.tracked_item;
    boost.initial_sales = 200;
    Intervention malicious;
    malicious.kind = InterventionKind::MaliciousReviews;
    malicious.step = 2;
    malicious.item_id = script.tracked_item;
    malicious.texts = detail::malicious_texts();
    base.interventions = {boost, malicious};
    const MerchantId merchant = "m-" + script.tracked_item;
    ExperimentRun none{"no-reply", base};
    none.config.merchant_strategy_map[merchant] = MerchantStrategyKind::NoReply;
    ExperimentRun positive{"positive-engage", base};
    positive.config.merchant_strategy_map[merchant] = MerchantStrategyKind::PositiveEngage;
    ExperimentRun negative{"negative-confront", base};
    negative.config.merchant_strategy_map[merchant] = MerchantStrategyKind::NegativeConfront;
    script.runs = {positive, negative, none};
  } else if (scenario == "brand-rename") {
    script.tracked_item = "it_003";
    base.mock_persona = "popularity-sensitive";
    base.persona.popularity_threshold = 80.0;
    Intervention boost;
    boost.kind = InterventionKind::SeedBoost;
    boost.step = 0;
    boost.item_id = script.tracked_item;
    boost.initial_sales = 200;
    base.interventions = {boost};
    ExperimentRun baseline{"baseline", base};
    ExperimentRun renamed{"renamed", base};
    Intervention rename;
    rename.kind = InterventionKind::BrandRename;
    rename.step = 3;
    rename.item_id = script.tracked_item;
    rename.new_name = "Vertex Grill";
    renamed.config.interventions.push_back(rename);
    script.runs = {baseline, renamed};
  } else if (scenario == "seed-boost") {
    script.tracked_item = "it_007";
    base.mock_persona = "popularity-sensitive";
    base.persona.popularity_threshold = 80.0;
    base.persona.explore_prob = 0.05;
    ExperimentRun boosted{"boosted", base};
    Intervention boost;
    boost.kind = InterventionKind::SeedBoost;
    boost.step = 0;
    boost.item_id = script.tracked_item;
    boost.texts = {"Fantastic find, everything we ordered was amazing.",
                   "Great spot, friendly staff and wonderful flavors.",
                   "Excellent meal, absolutely worth a visit."};
    boost.initial_sales = 100;
    boosted.config.interventions = {boost};
    ExperimentRun control{"control", base};
    script.runs = {boosted, control};
  } else if (scenario == "credibility-eval") {
    script.synth.n_items = 40;
    script.synth.n_users = 120;
    script.synth.history_len = 12;
    base.mock_persona = "preference-match";
    base.page_size = 12;
    base.agent_count = int(script.synth.n_users);
    ExperimentRun run{"simulation", base};
    script.runs = {run};
  } else {
    throw std::invalid_argument("unknown scenario: " + scenario +
                                " (valid: interaction-ablation, malicious-review, "
                                "merchant-reply, brand-rename, seed-boost, credibility-eval)");
  }
  return script;
}

struct ExperimentResult {
  ExperimentScript script;
  std::vector<RunManifest> manifests;
  std::vector<RunResult> runs;
  Json comparison;
};

// Executes every run of a scenario against the scenario's synthetic fixture
// and writes event logs, snapshots, manifests, and a comparison report.
inline ExperimentResult execute_experiment(const ExperimentScript& script,
                                           const std::string& out_dir,
                                           const SentimentLexicon& lexicon) {
  namespace fs = std::filesystem;
  ExperimentResult result;
  result.script = script;

  const Dataset ds = synth::make_dataset(script.synth);
  const PromptLibrary prompts = PromptLibrary::bundled();
  const auto pool = assemble_profile_pool(ds, nullptr, prompts, script.synth.seed);

  fs::create_directories(out_dir + "/" + script.scenario);

  std::vector<LabeledLog> labeled;
  for (const auto& run : script.runs) {
    const auto kind = rec_kind_from_string(run.config.recommender);
    const TrainedModel model = train_model(*kind, flatten_interactions(ds), run.config.rec_train);
    RunDeps deps;
    deps.model = &model;
    deps.lexicon = &lexicon;
    deps.prompts = &prompts;

    const std::string run_dir = out_dir + "/" + script.scenario + "/" + run.label;
    fs::create_directories(run_dir);

    RunManifest manifest = make_run_manifest("experiment " + script.scenario, run.config, 0,
                                             run.config.total_steps);
    auto res = run_simulation(run.config, ds, pool, deps, manifest.run_id);
    save_event_log(res.log, run_dir + "/events.jsonl");
    write_snapshot(res.state, run_dir + "/snapshot.json");
    manifest.artifacts["events"] = run_dir + "/events.jsonl";
    manifest.artifacts["snapshot"] = run_dir + "/snapshot.json";
    save_manifest(manifest, run_dir + "/manifest.json");
    result.manifests.push_back(std::move(manifest));
    result.runs.push_back(std::move(res));
  }
  for (std::size_t i = 0; i < script.runs.size(); ++i)
    labeled.push_back({script.runs[i].label, &result.runs[i].log});

  Json comparison{{"scenario", script.scenario}};
  if (script.scenario == "credibility-eval") {
    // Metric protocol at every ratio plus macro-level distribution alignment.
    Json reports = Json::array();
    for (int m : {1, 3, 9}) {
      EvalRunConfig ec;
      ec.m = m;
      ec.max_samples = 200;
      ec.policy = SelectionPolicy::Oracle;
      ec.seed = mix_seed(script.synth.seed, m);
      const auto samples = run_metric_protocol(ds, pool, ec);
      reports.push_back(eval_report("oracle", m, aggregate_metrics(samples)));
    }
    comparison["metric_reports"] = reports;

    // Real-vs-simulated action distribution over like/dislike/review.
    std::vector<double> real = {0.0, 0.0, 0.0};
    for (const auto& [user, history] : ds.users)
      for (const auto& h : history) {
        if (h.rating >= 4) real[0] += 1.0;
        if (h.rating <= 2) real[1] += 1.0;
        if (h.review_text && !h.review_text->empty()) real[2] += 1.0;
      }
    double total = real[0] + real[1] + real[2];
    if (total > 0)
      for (auto& v : real) v /= total;
    const auto sim = action_distribution(result.runs[0].log, default_distribution_kinds());
    comparison["real_distribution"] = real;
    comparison["sim_distribution"] = sim;
    comparison["jensen_shannon"] = compare_distributions(real, sim);

    std::map<ItemId, long> real_counts, sim_counts;
    for (const auto& [user, history] : ds.users)
      for (const auto& h : history) ++real_counts[h.item_id];
    for (const auto& e : result.runs[0].log)
      if (e.type == LogEntry::Type::Action && e.action.action.target_item)
        ++sim_counts[*e.action.action.target_item];
    const auto overlap = top_items_overlap(real_counts, sim_counts, 10);
    comparison["top10_overlap"] = overlap.overlap;
    comparison["top10_real"] = overlap.top_real;
    comparison["top10_sim"] = overlap.top_sim;
  } else {
    const int steps = script.runs.front().config.total_steps;
    write_series_csv(out_dir + "/" + script.scenario + "/series.csv", script.tracked_item,
                     script.tracked_kind, steps, labeled);
    Json per_run = Json::object();
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      const auto series =
          cumulative_series(*labeled[i].log, script.tracked_item, script.tracked_kind, steps);
      per_run[labeled[i].label] = Json{{"series", series}, {"final", series.back()}};
    }
    comparison["tracked_item"] = script.tracked_item;
    comparison["kind"] = to_string(script.tracked_kind);
    comparison["runs"] = per_run;
  }

  std::ofstream out(out_dir + "/" + script.scenario + "/comparison.json");
  out << comparison.dump(2) << "\n";
  result.comparison = std::move(comparison);
  return result;
}

}  // namespace recarena
