#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recarena/config.hpp"
#include "recarena/curation.hpp"
#include "recarena/evaluate.hpp"
#include "recarena/experiment.hpp"
#include "recarena/manifest.hpp"
#include "recarena/paths.hpp"
#include "recarena/platform.hpp"
#include "recarena/report.hpp"
#include "recarena/snapshot.hpp"
#include "recarena/synth.hpp"

namespace recarena::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config_path;
  bool mock_llm = false;
  std::optional<std::string> replay_path;
  std::optional<std::string> script_path;
  std::optional<std::string> record_gateway_path;
  std::string data_dir_override;
};

inline SentimentLexicon load_lexicon() {
  return SentimentLexicon::load_tsv(data_dir() + "/vader_lexicon.tsv");
}

// Backend per config/flags: a null get() means mock personas (no gateway).
// --record-gateway wraps the live backend so the traffic becomes a replay log.
struct ResolvedBackend {
  std::unique_ptr<ChatBackend> inner;
  std::unique_ptr<ChatBackend> recorder;
  ChatBackend* get() const { return recorder ? recorder.get() : inner.get(); }
};

inline ResolvedBackend resolve_backend(const std::string& llm_backend, const GlobalOptions& g) {
  ResolvedBackend r;
  if (g.mock_llm) return r;
  if (g.replay_path) {
    r.inner = std::make_unique<ReplayBackend>(ReplayBackend::load(*g.replay_path));
  } else if (g.script_path) {
    r.inner = std::make_unique<ScriptedBackend>(ScriptedBackend::load(*g.script_path));
  } else if (llm_backend == "mock") {
    return r;
  } else if (llm_backend.rfind("script:", 0) == 0) {
    r.inner = std::make_unique<ScriptedBackend>(ScriptedBackend::load(llm_backend.substr(7)));
  } else if (llm_backend.rfind("replay:", 0) == 0) {
    r.inner = std::make_unique<ReplayBackend>(ReplayBackend::load(llm_backend.substr(7)));
  } else if (llm_backend.rfind("http:", 0) == 0) {
    r.inner = std::make_unique<HttpBackend>(llm_backend);
  } else {
    throw std::runtime_error("unknown llm backend: " + llm_backend);
  }
  if (g.record_gateway_path)
    r.recorder = std::make_unique<RecordingBackend>(*r.inner, *g.record_gateway_path);
  return r;
}

inline SimulationConfig load_config_or_default(const GlobalOptions& g) {
  SimulationConfig cfg;
  if (g.config_path) cfg = load_config(*g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.mock_llm) cfg.llm_backend = "mock";
  if (g.replay_path) cfg.llm_backend = "replay:" + *g.replay_path;
  return cfg;
}

inline void save_decisions(const std::vector<DecisionLogEntry>& decisions,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write decisions log: " + path);
  for (const auto& d : decisions) out << Json(d).dump() << "\n";
}

inline std::vector<DecisionLogEntry> load_decisions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open decisions log: " + path);
  std::vector<DecisionLogEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(Json::parse(line).get<DecisionLogEntry>());
  }
  return out;
}

// ---------------------------------------------------------------------------

inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"recarena: agent-based recommender-platform simulation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions g;
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "Override the run seed");
  std::string config_opt;
  auto* config_flag = app.add_option("--config", config_opt, "Configuration file (JSON)");
  app.add_flag("--mock-llm", g.mock_llm, "Force deterministic mock personas (no gateway)");
  std::string replay_opt;
  auto* replay_flag = app.add_option("--replay", replay_opt, "Replay a recorded gateway log");
  std::string script_opt;
  auto* script_flag = app.add_option("--llm-script", script_opt, "Scripted gateway responses");
  std::string record_opt;
  auto* record_flag =
      app.add_option("--record-gateway", record_opt, "Record gateway traffic to a replay log");
  app.add_option("--data-dir", g.data_dir_override, "Override the bundled data directory");

  // --- ingest ---
  auto* ingest = app.add_subcommand("ingest", "Parse and filter a raw interaction corpus");
  std::string ingest_input, ingest_out = "out/ingest";
  std::size_t min_user = 0, min_item = 0;
  std::string category_contains, region_equals;
  ingest->add_option("--input", ingest_input, "Raw JSONL interaction log")->required();
  ingest->add_option("--out", ingest_out, "Output dataset directory");
  ingest->add_option("--min-user-interactions", min_user,
                     "Keep users with strictly more interactions than this");
  ingest->add_option("--min-item-interactions", min_item,
                     "Keep items with strictly more interactions than this");
  ingest->add_option("--category-contains", category_contains,
                     "Keep only items with a category containing this substring");
  ingest->add_option("--region-equals", region_equals, "Keep only items from this region");

  // --- profile ---
  auto* profile = app.add_subcommand("profile", "Build the user profile pool");
  std::string profile_dataset, profile_out = "out/profiles.jsonl";
  bool profile_augment = false;
  std::string augment_cache_path;
  profile->add_option("--dataset", profile_dataset, "Dataset directory")->required();
  profile->add_option("--out", profile_out, "Profile pool output (JSONL)");
  profile->add_flag("--augment", profile_augment, "Run item augmentation before profiling");
  profile->add_option("--augment-cache", augment_cache_path, "Augmentation cache file");

  // --- simulate ---
  auto* simulate = app.add_subcommand("simulate", "Run the simulation loop");
  std::string sim_dataset, sim_profiles, sim_out = "out/run", sim_resume;
  bool sim_record_prompts = false;
  simulate->add_option("--dataset", sim_dataset, "Dataset directory (synthetic if omitted)");
  simulate->add_option("--profiles", sim_profiles, "Profile pool (built on the fly if omitted)");
  simulate->add_option("--out", sim_out, "Run output directory");
  simulate->add_option("--resume", sim_resume, "Resume from a snapshot file");
  simulate->add_flag("--record-prompts", sim_record_prompts,
                     "Record decision prompts for CoT curation");

  // --- evaluate ---
  auto* evaluate = app.add_subcommand("evaluate", "Run the 1:m metric-based credibility protocol");
  std::string eval_dataset, eval_out = "out/eval";
  int eval_m = 1;
  std::size_t eval_samples = 1000;
  std::string eval_policy = "oracle";
  double eval_coin_p = 0.5;
  evaluate->add_option("--dataset", eval_dataset, "Dataset directory (synthetic if omitted)");
  evaluate->add_option("--m", eval_m, "Negative ratio m (1, 3 or 9)");
  evaluate->add_option("--samples", eval_samples, "Number of agent samples");
  evaluate->add_option("--policy", eval_policy, "Selection policy: oracle | coin | gateway");
  evaluate->add_option("--coin-p", eval_coin_p, "Selection probability for the coin policy");
  evaluate->add_option("--out", eval_out, "Output directory");

  // --- judge ---
  auto* judge = app.add_subcommand("judge", "Pairwise LLM judging between two runs");
  std::string judge_a, judge_b, judge_out = "out/judge", judge_export;
  std::size_t judge_pairs = 20;
  judge->add_option("--run-a", judge_a, "Run directory for method A")->required();
  judge->add_option("--run-b", judge_b, "Run directory for method B")->required();
  judge->add_option("--pairs", judge_pairs, "Number of agent pairs to judge");
  judge->add_option("--out", judge_out, "Output directory");
  judge->add_option("--export-pairs", judge_export,
                    "Also export the rendered pairs for external annotation");

  // --- curate ---
  auto* curate = app.add_subcommand("curate", "Filter CoT samples into a fine-tune dataset");
  std::vector<std::string> curate_decisions;
  std::string curate_dataset, curate_out = "out/curate", curate_human, curate_queue;
  bool curate_auto_human = false, curate_skip_llm = false;
  curate->add_option("--decisions", curate_decisions, "Decision log(s) from recorded runs")
      ->required();
  curate->add_option("--dataset", curate_dataset, "Dataset directory (for real histories)")
      ->required();
  curate->add_option("--out", curate_out, "Output directory");
  curate->add_option("--human-decisions", curate_human, "Imported human verdicts (JSONL)");
  curate->add_option("--export-queue", curate_queue, "Write the human review queue here");
  curate->add_flag("--auto-human", curate_auto_human, "Treat the human stage as accept-all");
  curate->add_flag("--skip-llm", curate_skip_llm, "Skip the LLM filter stage");

  // --- experiment ---
  auto* experiment = app.add_subcommand("experiment", "Run a scripted intervention scenario");
  std::string scenario, experiment_out = "out/experiments";
  experiment->add_option("scenario", scenario, "interaction-ablation | malicious-review | "
                                               "merchant-reply | brand-rename | seed-boost | "
                                               "credibility-eval")
      ->required();
  experiment->add_option("--out", experiment_out, "Output directory");

  // --- report ---
  auto* report = app.add_subcommand("report", "Emit plot-ready data from event logs");
  std::vector<std::string> report_events, report_labels;
  std::string report_item, report_kind = "like_product", report_out = "out/report";
  int report_steps = 10;
  std::size_t report_top_words = 50;
  report->add_option("--events", report_events, "Event log file(s)")->required();
  report->add_option("--labels", report_labels, "Run labels (default: run1, run2, ...)");
  report->add_option("--item", report_item, "Tracked item id for the cumulative series");
  report->add_option("--kind", report_kind, "Tracked action kind");
  report->add_option("--steps", report_steps, "Total steps covered by the series");
  report->add_option("--top-words", report_top_words, "Word-frequency table size");
  report->add_option("--out", report_out, "Output directory");

  try {
    std::vector<const char*> argv;
    argv.push_back("recarena");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << "\n";
    std::cerr << app.help();
    return 2;
  }

  if (seed_flag->count()) g.seed = seed_opt;
  if (config_flag->count()) g.config_path = config_opt;
  if (replay_flag->count()) g.replay_path = replay_opt;
  if (script_flag->count()) g.script_path = script_opt;
  if (record_flag->count()) g.record_gateway_path = record_opt;
  if (!g.data_dir_override.empty()) setenv("RECARENA_DATA_DIR", g.data_dir_override.c_str(), 1);

  try {
    if (*ingest) {
      fs::create_directories(ingest_out);
      auto parsed = parse_interaction_log_file(ingest_input);
      CategoryPredicate cat_pred = nullptr;
      if (!category_contains.empty())
        cat_pred = [&](const std::vector<std::string>& cats) {
          for (const auto& c : cats)
            if (c.find(category_contains) != std::string::npos) return true;
          return false;
        };
      RegionPredicate region_pred = nullptr;
      if (!region_equals.empty())
        region_pred = [&](const std::optional<std::string>& r) {
          return r && *r == region_equals;
        };
      FilterReport freport;
      const Dataset ds =
          filter_dataset(parsed.records, min_user, min_item, cat_pred, region_pred, &freport);
      save_dataset(ds, ingest_out);
      if (ds.users.empty())
        std::cerr << Json{{"warning", "filtered dataset is empty"}}.dump() << "\n";

      SimulationConfig cfg = load_config_or_default(g);
      RunManifest manifest = make_run_manifest("ingest", cfg, 0, 0);
      manifest.artifacts["items"] = ingest_out + "/items.jsonl";
      manifest.artifacts["interactions"] = ingest_out + "/interactions.jsonl";
      save_manifest(manifest, ingest_out + "/manifest.json");
      std::cout << Json{{"users", ds.users.size()},
                        {"items", ds.catalog.size()},
                        {"malformed_lines", parsed.malformed},
                        {"dropped_empty_categories", freport.dropped_empty_categories},
                        {"out", ingest_out}}
                       .dump()
                << "\n";
      return 0;
    }

    if (*profile) {
      SimulationConfig cfg = load_config_or_default(g);
      Dataset ds = load_dataset(profile_dataset);
      const PromptLibrary prompts = PromptLibrary::bundled();
      auto backend = resolve_backend(cfg.llm_backend, g);
      if (profile_augment && backend.get()) {
        AugmentationCache cache = augment_cache_path.empty()
                                      ? AugmentationCache{}
                                      : AugmentationCache::load(augment_cache_path);
        std::size_t failed = 0;
        for (auto& [id, rec] : ds.catalog)
          if (!augment_item(rec, *backend.get(), prompts, cache)) ++failed;
        if (failed > 0)
          std::cerr << Json{{"warning", "augmentation failures"}, {"count", failed}}.dump()
                    << "\n";
      }
      const auto pool = assemble_profile_pool(ds, backend.get(), prompts, cfg.seed);
      fs::create_directories(fs::path(profile_out).parent_path().empty()
                                 ? "."
                                 : fs::path(profile_out).parent_path().string());
      save_profile_pool(pool, profile_out);
      RunManifest manifest = make_run_manifest("profile", cfg, 0, 0);
      manifest.artifacts["profiles"] = profile_out;
      save_manifest(manifest, profile_out + ".manifest.json");
      std::cout << Json{{"profiles", pool.size()}, {"out", profile_out}}.dump() << "\n";
      return 0;
    }

    if (*simulate) {
      SimulationConfig cfg = load_config_or_default(g);
      if (!sim_dataset.empty()) cfg.dataset_dir = sim_dataset;
      if (!sim_profiles.empty()) cfg.profiles_path = sim_profiles;
      if (sim_record_prompts) cfg.record_prompts = true;

      Dataset ds;
      if (cfg.dataset_dir) {
        ds = load_dataset(*cfg.dataset_dir);
      } else {
        synth::SynthConfig sc;
        sc.seed = cfg.seed;
        sc.n_users = std::size_t(cfg.agent_count);
        sc.n_items = std::size_t(std::max(cfg.page_size, 12));
        ds = synth::make_dataset(sc);
        std::cerr << Json{{"warning", "no dataset given; using a synthetic fixture"}}.dump()
                  << "\n";
      }
      const PromptLibrary prompts = PromptLibrary::bundled();
      const SentimentLexicon lexicon = load_lexicon();
      std::map<UserId, UserProfile> pool;
      if (cfg.profiles_path) {
        pool = load_profile_pool(*cfg.profiles_path);
      } else {
        pool = assemble_profile_pool(ds, nullptr, prompts, cfg.seed);
      }
      const auto kind = rec_kind_from_string(cfg.recommender);
      const TrainedModel model = train_model(*kind, flatten_interactions(ds), cfg.rec_train);
      auto backend = resolve_backend(cfg.llm_backend, g);

      RunDeps deps;
      deps.model = &model;
      deps.backend = backend.get();
      deps.prompts = &prompts;
      deps.lexicon = &lexicon;

      fs::create_directories(sim_out);
      RunManifest manifest = make_run_manifest("simulate", cfg, 0, cfg.total_steps);
      const SnapshotSink sink = [&](const SimulationState& s) {
        write_snapshot(s, sim_out + "/snapshot.json");
      };

      RunResult res;
      if (!sim_resume.empty()) {
        SimulationState state = read_snapshot(sim_resume);
        manifest.start_step = state.step;
        res = resume_simulation(std::move(state), cfg, deps, manifest.run_id, sink);
      } else {
        res = run_simulation(cfg, ds, pool, deps, manifest.run_id, sink);
      }
      save_event_log(res.log, sim_out + "/events.jsonl");
      if (cfg.record_prompts) save_decisions(res.decisions, sim_out + "/decisions.jsonl");
      write_snapshot(res.state, sim_out + "/snapshot.json");
      manifest.artifacts["events"] = sim_out + "/events.jsonl";
      manifest.artifacts["snapshot"] = sim_out + "/snapshot.json";
      if (cfg.record_prompts) manifest.artifacts["decisions"] = sim_out + "/decisions.jsonl";
      save_manifest(manifest, sim_out + "/manifest.json");
      std::cout << Json{{"run_id", manifest.run_id},
                        {"events", res.log.size()},
                        {"out", sim_out}}
                       .dump()
                << "\n";
      return 0;
    }

    if (*evaluate) {
      SimulationConfig cfg = load_config_or_default(g);
      Dataset ds;
      if (!eval_dataset.empty()) {
        ds = load_dataset(eval_dataset);
      } else {
        synth::SynthConfig sc;
        sc.seed = cfg.seed;
        sc.n_users = 200;
        sc.n_items = 40;
        sc.history_len = 12;
        ds = synth::make_dataset(sc);
      }
      const PromptLibrary prompts = PromptLibrary::bundled();
      const auto pool = assemble_profile_pool(ds, nullptr, prompts, cfg.seed);
      EvalRunConfig ec;
      ec.m = eval_m;
      ec.max_samples = eval_samples;
      ec.seed = cfg.seed;
      ec.coin_p = eval_coin_p;
      ResolvedBackend backend;
      if (eval_policy == "oracle") {
        ec.policy = SelectionPolicy::Oracle;
      } else if (eval_policy == "coin") {
        ec.policy = SelectionPolicy::CoinFlip;
      } else if (eval_policy == "gateway") {
        ec.policy = SelectionPolicy::Gateway;
        backend = resolve_backend(cfg.llm_backend, g);
        if (!backend.get()) throw std::runtime_error("gateway policy requires a non-mock backend");
      } else {
        throw std::runtime_error("unknown policy: " + eval_policy);
      }
      const auto samples = run_metric_protocol(ds, pool, ec, backend.get(), &prompts);
      const Metrics metrics = aggregate_metrics(samples);
      fs::create_directories(eval_out);
      const Json report_json = eval_report(eval_policy, eval_m, metrics);
      std::ofstream out(eval_out + "/eval.json");
      out << report_json.dump(2) << "\n";
      RunManifest manifest = make_run_manifest("evaluate", cfg, 0, 0);
      manifest.artifacts["eval"] = eval_out + "/eval.json";
      save_manifest(manifest, eval_out + "/manifest.json");
      std::cout << report_json.dump() << "\n";
      return 0;
    }

    if (*judge) {
      SimulationConfig cfg = load_config_or_default(g);
      const PromptLibrary prompts = PromptLibrary::bundled();
      auto backend = resolve_backend(cfg.llm_backend, g);
      if (!backend.get())
        throw std::runtime_error("judging requires a gateway backend (--llm-script, --replay "
                                 "or an http llm_backend)");

      const SimulationState state_a = read_snapshot(judge_a + "/snapshot.json");
      const SimulationState state_b = read_snapshot(judge_b + "/snapshot.json");
      const auto log_a = load_event_log(judge_a + "/events.jsonl");
      const auto log_b = load_event_log(judge_b + "/events.jsonl");

      auto render_for = [&](const SimulationState& state, const std::vector<LogEntry>& log,
                            const AgentId& agent_id) -> std::optional<std::string> {
        const UserAgentState* agent = nullptr;
        for (const auto& a : state.agents)
          if (a.agent_id == agent_id) agent = &a;
        if (!agent) return std::nullopt;
        std::vector<EventRecord> trace;
        for (const auto& e : log)
          if (e.type == LogEntry::Type::Action && e.action.agent_id == agent_id)
            trace.push_back(e.action);
        RetrievalParams params;
        const auto memories = retrieve(agent->memory, "", state.step + 1, params);
        return render_simulation_sample(agent->profile, memories, trace);
      };

      std::vector<AgentId> common;
      for (const auto& a : state_a.agents)
        for (const auto& b : state_b.agents)
          if (a.agent_id == b.agent_id) common.push_back(a.agent_id);
      if (common.empty()) throw std::runtime_error("runs share no agent ids");
      Rng rng(cfg.seed);
      auto picks = rng.sample_indices(common.size(), judge_pairs);

      fs::create_directories(judge_out);
      std::ofstream ledger(judge_out + "/verdicts.jsonl");
      std::ofstream pairs_out;
      if (!judge_export.empty()) pairs_out.open(judge_export);
      JudgeTotals totals;
      for (auto idx : picks) {
        const AgentId& agent_id = common[idx];
        const auto sample_a = render_for(state_a, log_a, agent_id);
        const auto sample_b = render_for(state_b, log_b, agent_id);
        if (!sample_a || !sample_b) continue;
        if (pairs_out.is_open())
          pairs_out << Json{{"pair_id", agent_id}, {"sample_a", *sample_a},
                            {"sample_b", *sample_b}}
                           .dump()
                    << "\n";
        const JudgeVerdict v = pairwise_judge(agent_id, *sample_a, *sample_b, *backend.get(), prompts);
        totals.add(v);
        ledger << Json(v).dump() << "\n";
      }
      Json summary{{"win", totals.win},
                   {"loss", totals.loss},
                   {"tie", totals.tie},
                   {"invalid", totals.invalid},
                   {"adjusted_win_rate",
                    totals.win + totals.loss + totals.tie > 0
                        ? Json(totals.adjusted_win_rate_value())
                        : Json(nullptr)}};
      std::ofstream awr(judge_out + "/awr.json");
      awr << summary.dump(2) << "\n";
      RunManifest manifest = make_run_manifest("judge", cfg, 0, 0);
      manifest.artifacts["verdicts"] = judge_out + "/verdicts.jsonl";
      manifest.artifacts["awr"] = judge_out + "/awr.json";
      save_manifest(manifest, judge_out + "/manifest.json");
      std::cout << summary.dump() << "\n";
      return 0;
    }

    if (*curate) {
      SimulationConfig cfg = load_config_or_default(g);
      const Dataset ds = load_dataset(curate_dataset);
      const SentimentLexicon lexicon = load_lexicon();
      const PromptLibrary prompts = PromptLibrary::bundled();

      std::vector<std::vector<DecisionLogEntry>> runs;
      for (const auto& path : curate_decisions) runs.push_back(load_decisions(path));
      const auto samples = collect_cot_samples(runs);

      std::map<UserId, std::set<ItemId>> histories;
      for (const auto& [user, history] : ds.users)
        for (const auto& h : history) histories[user].insert(h.item_id);

      CurationOptions options;
      options.auto_human = curate_auto_human;
      options.llm = !curate_skip_llm;
      ResolvedBackend backend;
      if (options.llm) {
        backend = resolve_backend(cfg.llm_backend, g);
        if (!backend.get())
          throw std::runtime_error(
              "llm filter requires a gateway backend; pass --llm-script/--replay or --skip-llm");
      }
      std::optional<std::map<std::string, HumanDecision>> human;
      if (!curate_human.empty()) {
        std::set<std::string> known;
        for (const auto& s : samples) known.insert(s.sample_id);
        human = import_human_decisions(curate_human, known);
      }
      const auto outcomes = run_curation(samples, histories, lexicon, backend.get(), &prompts,
                                         human ? &*human : nullptr, options);
      fs::create_directories(curate_out);
      if (!curate_queue.empty()) {
        std::vector<CotSample> queue;
        for (const auto& o : outcomes)
          if (o.pending) queue.push_back(o.sample);
        export_review_queue(queue, curate_queue);
      }
      const std::size_t emitted =
          emit_finetune_dataset(outcomes, curate_out + "/finetune.jsonl");
      save_verdict_ledger(outcomes, curate_out + "/verdicts.jsonl");
      RunManifest manifest = make_run_manifest("curate", cfg, 0, 0);
      manifest.artifacts["finetune"] = curate_out + "/finetune.jsonl";
      manifest.artifacts["verdicts"] = curate_out + "/verdicts.jsonl";
      save_manifest(manifest, curate_out + "/manifest.json");
      std::cout << Json{{"samples", samples.size()}, {"emitted", emitted}}.dump() << "\n";
      return 0;
    }

    if (*experiment) {
      SimulationConfig cfg = load_config_or_default(g);
      const SentimentLexicon lexicon = load_lexicon();
      const auto script = build_experiment(scenario, g.seed.value_or(cfg.seed));
      const auto result = execute_experiment(script, experiment_out, lexicon);
      std::cout << result.comparison.dump() << "\n";
      return 0;
    }

    if (*report) {
      SimulationConfig cfg = load_config_or_default(g);
      const SentimentLexicon lexicon = load_lexicon();
      std::vector<std::vector<LogEntry>> logs;
      for (const auto& path : report_events) logs.push_back(load_event_log(path));
      std::vector<LabeledLog> labeled;
      for (std::size_t i = 0; i < logs.size(); ++i) {
        const std::string label =
            i < report_labels.size() ? report_labels[i] : "run" + std::to_string(i + 1);
        labeled.push_back({label, &logs[i]});
      }
      fs::create_directories(report_out);
      RunManifest manifest = make_run_manifest("report", cfg, 0, 0);
      if (!report_item.empty()) {
        const auto kind = action_kind_from_string(report_kind);
        if (!kind) throw std::runtime_error("unknown action kind: " + report_kind);
        write_series_csv(report_out + "/series.csv", report_item, *kind, report_steps, labeled);
        manifest.artifacts["series"] = report_out + "/series.csv";
      }
      write_distribution_csv(report_out + "/distribution.csv", labeled);
      manifest.artifacts["distribution"] = report_out + "/distribution.csv";
      std::vector<std::string> texts;
      for (const auto& l : labeled) {
        const auto t = review_texts_in_log(*l.log);
        texts.insert(texts.end(), t.begin(), t.end());
      }
      write_sentiment_histogram_csv(report_out + "/sentiment_histogram.csv", texts, lexicon);
      manifest.artifacts["sentiment_histogram"] = report_out + "/sentiment_histogram.csv";
      write_word_frequency_csv(report_out + "/word_frequency.csv", texts, report_top_words);
      manifest.artifacts["word_frequency"] = report_out + "/word_frequency.csv";
      save_manifest(manifest, report_out + "/manifest.json");
      std::cout << Json{{"out", report_out}}.dump() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace recarena::cli
