#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/agent.hpp"
#include "recarena/domain.hpp"
#include "recarena/ingest.hpp"
#include "recarena/memory.hpp"
#include "recarena/profiling.hpp"
#include "recarena/recommend.hpp"
#include "recarena/rng.hpp"
#include "recarena/sentiment.hpp"

namespace recarena {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Item store: static records plus the mutable attribute tables.

struct ItemStore {
  std::map<ItemId, ItemRecord> statics;
  std::map<ItemId, ItemDynamics> dynamics;
};

inline ItemStore init_store(const std::map<ItemId, ItemRecord>& catalog) {
  ItemStore store;
  store.statics = catalog;
  for (const auto& [id, rec] : catalog) store.dynamics[id];
  return store;
}

namespace detail {

inline ItemDynamics& dynamics_of(ItemStore& store, const ItemId& id) {
  auto it = store.dynamics.find(id);
  if (it == store.dynamics.end()) throw StoreError("unknown item: " + id);
  return it->second;
}

inline Review* find_review(ItemDynamics& d, const ReviewId& review_id) {
  for (auto& r : d.reviews)
    if (r.review_id == review_id) return &r;
  return nullptr;
}

inline ReviewId next_review_id(const ItemId& item, ItemDynamics& d) {
  return item + "#r" + std::to_string(d.next_review_seq++);
}

}  // namespace detail

// Enriched item view: statics, current counters, average rating and the
// `review_window` most recent reviews (with replies and vote counts). The
// dynamics map may be a frozen copy when interaction is disabled.
inline ItemSnapshot snapshot_item(const std::map<ItemId, ItemRecord>& statics,
                                  const std::map<ItemId, ItemDynamics>& dynamics,
                                  const ItemId& id, int review_window) {
  auto sit = statics.find(id);
  auto dit = dynamics.find(id);
  if (sit == statics.end() || dit == dynamics.end()) throw StoreError("unknown item: " + id);
  const ItemDynamics& d = dit->second;
  ItemSnapshot s;
  s.record = sit->second;
  s.like_count = d.like_count;
  s.dislike_count = d.dislike_count;
  s.share_count = d.share_count;
  s.purchase_count = d.purchase_count;
  s.avg_rating = average_rating(d);
  s.review_count = long(d.reviews.size());
  const std::size_t window = review_window < 0 ? 0 : std::size_t(review_window);
  const std::size_t take = std::min(window, d.reviews.size());
  s.recent_reviews.assign(d.reviews.end() - long(take), d.reviews.end());
  return s;
}

inline ItemSnapshot snapshot_item(const ItemStore& store, const ItemId& id, int review_window) {
  return snapshot_item(store.statics, store.dynamics, id, review_window);
}

// Applies one agent action to the live tables. Counters only move up here;
// interventions are the only writers allowed to set counters directly.
inline void apply_action(ItemStore& store, const AgentId& agent_id, const Action& action,
                         int step) {
  const auto violations = validate_action(action);
  if (!violations.empty()) throw StoreError("invalid action: " + violations.front());
  switch (action.kind) {
    case ActionKind::DoNothing:
      return;
    case ActionKind::LikeProduct: {
      auto& d = detail::dynamics_of(store, *action.target_item);
      ++d.like_count;
      d.last_updated_step = step;
      return;
    }
    case ActionKind::DislikeProduct: {
      auto& d = detail::dynamics_of(store, *action.target_item);
      ++d.dislike_count;
      d.last_updated_step = step;
      return;
    }
    case ActionKind::ShareProduct: {
      auto& d = detail::dynamics_of(store, *action.target_item);
      ++d.share_count;
      d.last_updated_step = step;
      return;
    }
    case ActionKind::PurchaseProduct: {
      auto& d = detail::dynamics_of(store, *action.target_item);
      ++d.purchase_count;
      d.last_updated_step = step;
      return;
    }
    case ActionKind::CreateReview: {
      auto& d = detail::dynamics_of(store, *action.target_item);
      Review r;
      r.review_id = detail::next_review_id(*action.target_item, d);
      r.item_id = *action.target_item;
      r.author = ReviewAuthor::User;
      r.author_id = agent_id;
      r.text = *action.review_text;
      r.rating = action.rating;
      r.step = step;
      if (action.rating) {
        d.rating_sum += *action.rating;
        ++d.rating_count;
      }
      d.reviews.push_back(std::move(r));
      d.last_updated_step = step;
      return;
    }
    case ActionKind::LikeReview:
    case ActionKind::DislikeReview: {
      Review* target = nullptr;
      if (action.target_item) {
        target = detail::find_review(detail::dynamics_of(store, *action.target_item),
                                     *action.target_review);
      } else {
        for (auto& [id, d] : store.dynamics)
          if ((target = detail::find_review(d, *action.target_review))) break;
      }
      if (!target) throw StoreError("unknown review: " + *action.target_review);
      if (action.kind == ActionKind::LikeReview)
        ++target->like_count;
      else
        ++target->dislike_count;
      return;
    }
  }
}

// Appends a merchant reply under its parent review and assigns the reply id.
inline ReviewId append_merchant_reply(ItemStore& store, const ReviewId& parent,
                                      Review reply) {
  auto& d = detail::dynamics_of(store, reply.item_id);
  Review* target = detail::find_review(d, parent);
  if (!target) throw StoreError("unknown review: " + parent);
  reply.review_id = detail::next_review_id(reply.item_id, d);
  const ReviewId id = reply.review_id;
  const int reply_step = reply.step;
  target->replies.push_back(std::move(reply));
  d.last_updated_step = reply_step;
  return id;
}

// Scripted state rewrite. Returns the per-counter deltas for the event log;
// the usual counter monotonicity is suspended for this write.
inline InterventionEvent apply_intervention(ItemStore& store, const Intervention& iv, int step) {
  if (iv.step != step)
    throw StoreError("intervention scheduled for step " + std::to_string(iv.step) +
                     " applied at step " + std::to_string(step));
  InterventionEvent ev;
  ev.step = step;
  ev.intervention = iv;
  auto& d = detail::dynamics_of(store, iv.item_id);
  switch (iv.kind) {
    case InterventionKind::MaliciousReviews: {
      for (const auto& text : iv.texts) {
        Review r;
        r.review_id = detail::next_review_id(iv.item_id, d);
        r.item_id = iv.item_id;
        r.author = ReviewAuthor::Injected;
        r.text = text;
        r.step = step;
        d.reviews.push_back(std::move(r));
      }
      ev.deltas["reviews"] = double(iv.texts.size());
      break;
    }
    case InterventionKind::BrandRename: {
      auto sit = store.statics.find(iv.item_id);
      if (sit == store.statics.end()) throw StoreError("unknown item: " + iv.item_id);
      sit->second.name = iv.new_name;
      ev.deltas["renamed"] = 1.0;
      break;
    }
    case InterventionKind::SeedBoost: {
      for (const auto& text : iv.texts) {
        Review r;
        r.review_id = detail::next_review_id(iv.item_id, d);
        r.item_id = iv.item_id;
        r.author = ReviewAuthor::Injected;
        r.text = text;
        r.rating = 5;
        r.step = step;
        d.reviews.push_back(std::move(r));
        d.rating_sum += 5;
        ++d.rating_count;
      }
      ev.deltas["reviews"] = double(iv.texts.size());
      ev.deltas["rating_sum"] = 5.0 * double(iv.texts.size());
      ev.deltas["rating_count"] = double(iv.texts.size());
      ev.deltas["purchase_count"] = double(iv.initial_sales - d.purchase_count);
      d.purchase_count = iv.initial_sales;
      break;
    }
  }
  d.last_updated_step = step;
  return ev;
}

// ---------------------------------------------------------------------------
// Event log

struct MerchantReplyEvent {
  int step = 0;
  MerchantId merchant_id;
  ItemId item_id;
  ReviewId parent_review;
  ReviewId reply_review;
};

inline void to_json(Json& j, const MerchantReplyEvent& e) {
  j = Json{{"step", e.step},
           {"merchant_id", e.merchant_id},
           {"item_id", e.item_id},
           {"parent_review", e.parent_review},
           {"reply_review", e.reply_review}};
}

inline void from_json(const Json& j, MerchantReplyEvent& e) {
  e.step = j.at("step").get<int>();
  e.merchant_id = j.at("merchant_id").get<std::string>();
  e.item_id = j.at("item_id").get<std::string>();
  e.parent_review = j.at("parent_review").get<std::string>();
  e.reply_review = j.at("reply_review").get<std::string>();
}

struct LogEntry {
  enum class Type { Action, Intervention, MerchantReply };
  Type type = Type::Action;
  EventRecord action;
  InterventionEvent intervention;
  MerchantReplyEvent reply;

  static LogEntry of(EventRecord e) {
    LogEntry le;
    le.type = Type::Action;
    le.action = std::move(e);
    return le;
  }
  static LogEntry of(InterventionEvent e) {
    LogEntry le;
    le.type = Type::Intervention;
    le.intervention = std::move(e);
    return le;
  }
  static LogEntry of(MerchantReplyEvent e) {
    LogEntry le;
    le.type = Type::MerchantReply;
    le.reply = std::move(e);
    return le;
  }

  int step() const {
    switch (type) {
      case Type::Action: return action.step;
      case Type::Intervention: return intervention.step;
      case Type::MerchantReply: return reply.step;
    }
    return 0;
  }
};

inline void to_json(Json& j, const LogEntry& e) {
  switch (e.type) {
    case LogEntry::Type::Action:
      j = e.action;
      j["type"] = "action";
      break;
    case LogEntry::Type::Intervention:
      j = e.intervention;
      j["type"] = "intervention";
      break;
    case LogEntry::Type::MerchantReply:
      j = e.reply;
      j["type"] = "merchant_reply";
      break;
  }
}

inline void from_json(const Json& j, LogEntry& e) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "action") {
    e.type = LogEntry::Type::Action;
    e.action = j.get<EventRecord>();
  } else if (type == "intervention") {
    e.type = LogEntry::Type::Intervention;
    e.intervention = j.get<InterventionEvent>();
  } else if (type == "merchant_reply") {
    e.type = LogEntry::Type::MerchantReply;
    e.reply = j.get<MerchantReplyEvent>();
  } else {
    throw std::invalid_argument("unknown log entry type: " + type);
  }
}

inline void save_event_log(const std::vector<LogEntry>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write event log: " + path);
  for (const auto& e : log) out << Json(e).dump() << "\n";
}

inline std::vector<LogEntry> load_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event log: " + path);
  std::vector<LogEntry> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    log.push_back(Json::parse(line).get<LogEntry>());
  }
  return log;
}

// ---------------------------------------------------------------------------
// Recommendation pages

struct PageBuild {
  std::vector<ItemSnapshot> page;
  bool padded = false;
};

// Top-page_size ranking passed through snapshot_item, with popularity-ordered
// padding when the recommender comes up short after exclusions.
inline PageBuild build_recommendation_page(const TrainedModel& model, const UserId& user,
                                           const std::map<ItemId, ItemRecord>& statics,
                                           const std::map<ItemId, ItemDynamics>& presented,
                                           int page_size, const std::string& exclusion_policy,
                                           const std::set<ItemId>& purchased,
                                           int review_window, bool live_popularity,
                                           std::uint64_t context_seed) {
  if (page_size < 1) throw std::invalid_argument("page_size must be >= 1");
  const std::set<ItemId>& exclusion =
      exclusion_policy == "exclude-purchased" ? purchased : std::set<ItemId>{};

  std::vector<ItemId> ranking;
  if (model.kind == RecKind::MostPopular && live_popularity) {
    std::vector<std::pair<ItemId, long>> counts;
    for (const auto& [id, d] : presented)
      if (!exclusion.count(id)) counts.push_back({id, d.like_count + d.purchase_count});
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (std::size_t i = 0; i < counts.size() && i < std::size_t(page_size); ++i)
      ranking.push_back(counts[i].first);
  } else {
    ranking = recommend(model, user, std::size_t(page_size), exclusion, context_seed);
  }

  PageBuild out;
  std::set<ItemId> on_page(ranking.begin(), ranking.end());
  if (ranking.size() < std::size_t(page_size)) {
    // Popularity fallback over the presented counters, exclusions waived.
    std::vector<std::pair<ItemId, long>> counts;
    for (const auto& [id, d] : presented)
      if (!on_page.count(id)) counts.push_back({id, d.like_count + d.purchase_count});
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (const auto& [id, n] : counts) {
      if (ranking.size() >= std::size_t(page_size)) break;
      ranking.push_back(id);
      on_page.insert(id);
      out.padded = true;
    }
  }
  for (const auto& id : ranking) out.page.push_back(snapshot_item(statics, presented, id, review_window));
  return out;
}

// ---------------------------------------------------------------------------
// Simulation state and loop

struct SimulationState {
  int step = 0;
  ItemStore store;
  std::optional<std::map<ItemId, ItemDynamics>> frozen_dynamics;
  std::vector<UserAgentState> agents;
  std::vector<UserId> agent_users;  // agent index -> profile user
  std::string rng_state;
};

struct DecisionLogEntry {
  std::string run_id;
  int step = 0;
  AgentId agent_id;
  UserId user_id;
  std::string prompt;
  std::string response;
};

inline void to_json(Json& j, const DecisionLogEntry& e) {
  j = Json{{"run_id", e.run_id}, {"step", e.step},     {"agent_id", e.agent_id},
           {"user_id", e.user_id}, {"prompt", e.prompt}, {"response", e.response}};
}

inline void from_json(const Json& j, DecisionLogEntry& e) {
  e.run_id = j.at("run_id").get<std::string>();
  e.step = j.at("step").get<int>();
  e.agent_id = j.at("agent_id").get<std::string>();
  e.user_id = j.at("user_id").get<std::string>();
  e.prompt = get_or<std::string>(j, "prompt", "");
  e.response = get_or<std::string>(j, "response", "");
}

struct RunDeps {
  const TrainedModel* model = nullptr;
  ChatBackend* backend = nullptr;  // nullptr -> deterministic mock persona
  const PromptLibrary* prompts = nullptr;
  const SentimentLexicon* lexicon = nullptr;
};

struct RunResult {
  SimulationState state;
  std::vector<LogEntry> log;
  std::vector<DecisionLogEntry> decisions;
  std::vector<std::string> warnings;
};

class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(const std::string& msg, Json dump)
      : std::runtime_error(msg), state_dump(std::move(dump)) {}
  Json state_dump;
};

using SnapshotSink = std::function<void(const SimulationState&)>;

namespace detail {

inline ItemNameLookup name_lookup(const ItemStore& store) {
  return [&store](const ItemId& id) {
    auto it = store.statics.find(id);
    return it == store.statics.end() ? id : it->second.name;
  };
}

inline std::string reasoning_context(const std::vector<ItemSnapshot>& page) {
  std::ostringstream os;
  for (const auto& s : page) {
    os << s.record.name << ' ';
    for (const auto& c : s.record.categories) os << c << ' ';
  }
  return os.str();
}

// Advances the simulation through steps (state.step, last_step]. Behavior is
// a pure function of (state, config, deps scripts), so a resumed run replays
// the uninterrupted one.
inline void run_steps(SimulationState& state, int last_step, const SimulationConfig& cfg,
                      const RunDeps& deps, RunResult& result, const std::string& run_id,
                      const SnapshotSink& on_snapshot) {
  Rng rng(cfg.seed);
  if (!state.rng_state.empty()) rng.restore_state(state.rng_state);

  const std::optional<Persona> persona = persona_from_string(cfg.mock_persona);
  if (!deps.backend && !persona)
    throw std::invalid_argument("unknown mock persona: " + cfg.mock_persona);

  DecideParams decide_params;
  decide_params.max_actions = cfg.max_actions_per_step;
  decide_params.show_share_count = cfg.show_share_count;
  decide_params.chat_model = cfg.chat_model;
  decide_params.temperature = cfg.temperature;
  decide_params.top_p = cfg.top_p;
  decide_params.max_tokens = cfg.max_tokens;

  for (int t = state.step + 1; t <= last_step; ++t) {
    std::vector<Review> new_reviews;  // this step's new user/injected reviews

    for (const auto& iv : cfg.interventions) {
      if (iv.step != t) continue;
      auto ev = apply_intervention(state.store, iv, t);
      if (iv.kind != InterventionKind::BrandRename) {
        const auto& d = state.store.dynamics.at(iv.item_id);
        const std::size_t added = iv.texts.size();
        for (std::size_t i = d.reviews.size() - added; i < d.reviews.size(); ++i)
          new_reviews.push_back(d.reviews[i]);
      }
      result.log.push_back(LogEntry::of(std::move(ev)));
    }

    std::vector<std::size_t> order(state.agents.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    const auto& presented =
        state.frozen_dynamics ? *state.frozen_dynamics : state.store.dynamics;

    for (const auto agent_idx : order) {
      UserAgentState& agent = state.agents[agent_idx];
      const UserId& user = state.agent_users[agent_idx];

      auto built = build_recommendation_page(*deps.model, user, state.store.statics, presented,
                                             cfg.page_size, cfg.exclusion_policy,
                                             agent.purchased, cfg.review_window,
                                             cfg.live_popularity, mix_seed(cfg.seed, t));
      if (built.page.size() != std::size_t(cfg.page_size))
        throw SimulationAbort("page construction produced " + std::to_string(built.page.size()) +
                                  " items instead of " + std::to_string(cfg.page_size),
                              Json{{"step", t}, {"agent", agent.agent_id}});

      const std::string context = reasoning_context(built.page);
      const auto retrieved =
          retrieve(agent.memory, context, t, cfg.retrieval, name_lookup(state.store));

      DecisionOutcome outcome;
      if (deps.backend) {
        outcome = decide(agent, built.page, retrieved, *deps.backend, *deps.prompts,
                         decide_params, t, name_lookup(state.store));
      } else {
        outcome = mock_policy_decide(*persona, agent, built.page, rng, *deps.lexicon,
                                     cfg.persona, decide_params, t, retrieved,
                                     cfg.record_prompts ? deps.prompts : nullptr);
      }

      std::vector<ItemId> page_ids;
      for (const auto& s : built.page) page_ids.push_back(s.record.item_id);

      bool first = true;
      for (const auto& action : outcome.decision.actions) {
        const std::size_t reviews_before =
            action.kind == ActionKind::CreateReview
                ? state.store.dynamics.at(*action.target_item).reviews.size()
                : 0;
        apply_action(state.store, agent.agent_id, action, t);
        if (action.kind == ActionKind::PurchaseProduct) agent.purchased.insert(*action.target_item);
        if (action.kind == ActionKind::CreateReview) {
          const auto& d = state.store.dynamics.at(*action.target_item);
          if (d.reviews.size() > reviews_before) new_reviews.push_back(d.reviews.back());
        }
        EventRecord ev;
        ev.step = t;
        ev.agent_id = agent.agent_id;
        ev.action = action;
        ev.page_items = page_ids;
        ev.thought = outcome.decision.thought;
        if (first) {
          ev.flags = outcome.flags;
          if (built.padded) ev.flags.push_back("page-padded");
          first = false;
        }
        result.log.push_back(LogEntry::of(std::move(ev)));
      }

      if (cfg.record_prompts)
        result.decisions.push_back(
            {run_id, t, agent.agent_id, user, outcome.prompt, outcome.response});
    }

    // Merchant phase: strategies respond to this step's new reviews.
    std::map<MerchantId, std::vector<Review>> by_merchant;
    for (const auto& r : new_reviews) {
      auto sit = state.store.statics.find(r.item_id);
      if (sit == state.store.statics.end()) continue;
      by_merchant[sit->second.merchant_id].push_back(r);
    }
    std::map<ItemId, std::string> item_names;
    for (const auto& [id, rec] : state.store.statics) item_names[id] = rec.name;
    for (const auto& [merchant, reviews] : by_merchant) {
      auto strat_it = cfg.merchant_strategy_map.find(merchant);
      const MerchantStrategyKind strategy = strat_it == cfg.merchant_strategy_map.end()
                                                ? MerchantStrategyKind::NoReply
                                                : strat_it->second;
      if (strategy == MerchantStrategyKind::NoReply) continue;
      auto replies = merchant_step(merchant, reviews, strategy, deps.backend,
                                   deps.prompts ? *deps.prompts : PromptLibrary::bundled(),
                                   *deps.lexicon, t, item_names);
      for (auto& mr : replies) {
        const ItemId item = mr.reply.item_id;
        const ReviewId reply_id =
            append_merchant_reply(state.store, mr.parent_review, std::move(mr.reply));
        MerchantReplyEvent ev;
        ev.step = t;
        ev.merchant_id = merchant;
        ev.item_id = item;
        ev.parent_review = mr.parent_review;
        ev.reply_review = reply_id;
        result.log.push_back(LogEntry::of(std::move(ev)));
      }
    }

    state.step = t;
    state.rng_state = rng.save_state();
    if (on_snapshot && ((cfg.snapshot_interval > 0 && t % cfg.snapshot_interval == 0) ||
                        t == last_step))
      on_snapshot(state);
  }
}

}  // namespace detail

inline void validate_run_inputs(const SimulationConfig& cfg, const Dataset& ds,
                                const std::map<UserId, UserProfile>& pool) {
  if (cfg.total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (cfg.agent_count < 1) throw std::invalid_argument("agent_count must be >= 1");
  if (cfg.page_size < 1) throw std::invalid_argument("page_size must be >= 1");
  if (std::size_t(cfg.page_size) > ds.catalog.size())
    throw std::invalid_argument("page_size exceeds catalog size");
  if (std::size_t(cfg.agent_count) > pool.size())
    throw std::invalid_argument("agent_count exceeds profile pool size");
  for (const auto& iv : cfg.interventions) {
    if (iv.step < 0 || iv.step > cfg.total_steps)
      throw std::invalid_argument("intervention step out of range");
    if (!ds.catalog.count(iv.item_id))
      throw std::invalid_argument("intervention targets unknown item " + iv.item_id);
  }
}

// Builds the initial state: store from the catalog, one agent per profile (in
// user_id order, truncated to agent_count), step-0 interventions applied, and
// the presented dynamics frozen when interaction is disabled.
inline SimulationState init_simulation(const SimulationConfig& cfg, const Dataset& ds,
                                       const std::map<UserId, UserProfile>& pool,
                                       std::vector<LogEntry>* log = nullptr) {
  validate_run_inputs(cfg, ds, pool);
  SimulationState state;
  state.store = init_store(ds.catalog);
  int n = 0;
  for (const auto& [user, profile] : pool) {
    if (n >= cfg.agent_count) break;
    UserAgentState agent;
    agent.agent_id = "agent-" + user;
    agent.profile = profile;
    state.agents.push_back(std::move(agent));
    state.agent_users.push_back(user);
    ++n;
  }
  for (const auto& iv : cfg.interventions) {
    if (iv.step != 0) continue;
    auto ev = apply_intervention(state.store, iv, 0);
    if (log) log->push_back(LogEntry::of(std::move(ev)));
  }
  if (!cfg.interaction_enabled) state.frozen_dynamics = state.store.dynamics;
  return state;
}

// Full run: T steps of page -> retrieve -> decide -> apply, merchants at the
// end of each step. Deterministic given (config, seed) under mock personas or
// scripted/replay backends.
inline RunResult run_simulation(const SimulationConfig& cfg, const Dataset& ds,
                                const std::map<UserId, UserProfile>& pool, const RunDeps& deps,
                                const std::string& run_id = "run",
                                const SnapshotSink& on_snapshot = nullptr) {
  if (!deps.model) throw std::invalid_argument("run_simulation: model is required");
  if (!deps.lexicon) throw std::invalid_argument("run_simulation: lexicon is required");
  if (deps.backend && !deps.prompts)
    throw std::invalid_argument("run_simulation: prompts required with a gateway backend");
  RunResult result;
  result.state = init_simulation(cfg, ds, pool, &result.log);
  detail::run_steps(result.state, cfg.total_steps, cfg, deps, result, run_id, on_snapshot);
  return result;
}

// Continues a snapshot-restored state to total_steps. The produced log covers
// only the resumed steps.
inline RunResult resume_simulation(SimulationState state, const SimulationConfig& cfg,
                                   const RunDeps& deps, const std::string& run_id = "run",
                                   const SnapshotSink& on_snapshot = nullptr) {
  RunResult result;
  result.state = std::move(state);
  detail::run_steps(result.state, cfg.total_steps, cfg, deps, result, run_id, on_snapshot);
  return result;
}

}  // namespace recarena
