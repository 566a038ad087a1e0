#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/json_util.hpp"

namespace recarena {

using ItemId = std::string;
using UserId = std::string;
using AgentId = std::string;
using MerchantId = std::string;
using ReviewId = std::string;

// ---------------------------------------------------------------------------
// Actions

enum class ActionKind {
  DoNothing,
  LikeProduct,
  DislikeProduct,
  ShareProduct,
  PurchaseProduct,
  CreateReview,
  LikeReview,
  DislikeReview,
};

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::DoNothing: return "do_nothing";
    case ActionKind::LikeProduct: return "like_product";
    case ActionKind::DislikeProduct: return "dislike_product";
    case ActionKind::ShareProduct: return "share_product";
    case ActionKind::PurchaseProduct: return "purchase_product";
    case ActionKind::CreateReview: return "create_review";
    case ActionKind::LikeReview: return "like_review";
    case ActionKind::DislikeReview: return "dislike_review";
  }
  return "unknown";
}

inline std::optional<ActionKind> action_kind_from_string(const std::string& s) {
  static const std::map<std::string, ActionKind> table = {
      {"do_nothing", ActionKind::DoNothing},
      {"like_product", ActionKind::LikeProduct},
      {"dislike_product", ActionKind::DislikeProduct},
      {"share_product", ActionKind::ShareProduct},
      {"purchase_product", ActionKind::PurchaseProduct},
      {"create_review", ActionKind::CreateReview},
      {"like_review", ActionKind::LikeReview},
      {"dislike_review", ActionKind::DislikeReview},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

struct Action {
  ActionKind kind = ActionKind::DoNothing;
  std::optional<ItemId> target_item;
  std::optional<ReviewId> target_review;
  std::optional<std::string> review_text;
  std::optional<int> rating;
};

// Total: returns every violated invariant; a valid action yields an empty list.
inline std::vector<std::string> validate_action(const Action& a) {
  std::vector<std::string> v;
  const bool needs_item = a.kind != ActionKind::DoNothing && a.kind != ActionKind::LikeReview &&
                          a.kind != ActionKind::DislikeReview;
  if (needs_item && !a.target_item) v.push_back("target_item required");
  if (a.kind == ActionKind::CreateReview && (!a.review_text || a.review_text->empty()))
    v.push_back("review_text required");
  if ((a.kind == ActionKind::LikeReview || a.kind == ActionKind::DislikeReview) && !a.target_review)
    v.push_back("target_review required");
  if (a.rating && (*a.rating < 1 || *a.rating > 5)) v.push_back("rating must be in 1..5");
  if (a.rating && a.kind != ActionKind::CreateReview)
    v.push_back("rating only valid on create_review");
  return v;
}

inline void to_json(Json& j, const Action& a) {
  j = Json{{"kind", to_string(a.kind)}};
  put_opt(j, "target_item", a.target_item);
  put_opt(j, "target_review", a.target_review);
  put_opt(j, "review_text", a.review_text);
  put_opt(j, "rating", a.rating);
}

inline void from_json(const Json& j, Action& a) {
  const auto kind = action_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown action kind: " + j.at("kind").get<std::string>());
  a.kind = *kind;
  a.target_item = get_opt<ItemId>(j, "target_item");
  a.target_review = get_opt<ReviewId>(j, "target_review");
  a.review_text = get_opt<std::string>(j, "review_text");
  a.rating = get_opt<int>(j, "rating");
}

// ---------------------------------------------------------------------------
// Reviews and items

enum class ReviewAuthor { User, Merchant, Injected };

inline const char* to_string(ReviewAuthor a) {
  switch (a) {
    case ReviewAuthor::User: return "user";
    case ReviewAuthor::Merchant: return "merchant";
    case ReviewAuthor::Injected: return "injected";
  }
  return "unknown";
}

inline ReviewAuthor review_author_from_string(const std::string& s) {
  if (s == "user") return ReviewAuthor::User;
  if (s == "merchant") return ReviewAuthor::Merchant;
  if (s == "injected") return ReviewAuthor::Injected;
  throw std::invalid_argument("unknown review author: " + s);
}

struct Review {
  ReviewId review_id;
  ItemId item_id;
  ReviewAuthor author = ReviewAuthor::User;
  std::string author_id;  // agent_id or merchant_id; empty for injected
  std::string text;
  std::optional<int> rating;  // user/injected authors only
  long like_count = 0;
  long dislike_count = 0;
  std::vector<Review> replies;  // merchant replies only
  int step = 0;
};

inline void to_json(Json& j, const Review& r) {
  j = Json{{"review_id", r.review_id}, {"item_id", r.item_id},
           {"author", to_string(r.author)}, {"author_id", r.author_id},
           {"text", r.text},             {"like_count", r.like_count},
           {"dislike_count", r.dislike_count}, {"step", r.step}};
  put_opt(j, "rating", r.rating);
  if (!r.replies.empty()) j["replies"] = r.replies;
}

inline void from_json(const Json& j, Review& r) {
  r.review_id = j.at("review_id").get<std::string>();
  r.item_id = j.at("item_id").get<std::string>();
  r.author = review_author_from_string(j.at("author").get<std::string>());
  r.author_id = get_or<std::string>(j, "author_id", "");
  r.text = j.at("text").get<std::string>();
  r.rating = get_opt<int>(j, "rating");
  r.like_count = get_or<long>(j, "like_count", 0);
  r.dislike_count = get_or<long>(j, "dislike_count", 0);
  r.replies = get_or<std::vector<Review>>(j, "replies", {});
  r.step = get_or<int>(j, "step", 0);
}

struct ItemRecord {
  ItemId item_id;
  std::string name;
  std::optional<std::string> brand;
  std::vector<std::string> categories;
  std::string description;
  std::optional<std::string> augmented_description;
  MerchantId merchant_id;
  std::optional<std::string> region;
};

inline void to_json(Json& j, const ItemRecord& r) {
  j = Json{{"item_id", r.item_id},   {"name", r.name},
           {"categories", r.categories}, {"description", r.description},
           {"merchant_id", r.merchant_id}};
  put_opt(j, "brand", r.brand);
  put_opt(j, "augmented_description", r.augmented_description);
  put_opt(j, "region", r.region);
}

inline void from_json(const Json& j, ItemRecord& r) {
  r.item_id = j.at("item_id").get<std::string>();
  r.name = j.at("name").get<std::string>();
  r.brand = get_opt<std::string>(j, "brand");
  r.categories = get_or<std::vector<std::string>>(j, "categories", {});
  r.description = get_or<std::string>(j, "description", "");
  r.augmented_description = get_opt<std::string>(j, "augmented_description");
  r.merchant_id = get_or<std::string>(j, "merchant_id", "");
  r.region = get_opt<std::string>(j, "region");
}

// Mutable attribute block rewritten by agent actions during a run.
struct ItemDynamics {
  long like_count = 0;
  long dislike_count = 0;
  long share_count = 0;
  long purchase_count = 0;
  std::vector<Review> reviews;
  double rating_sum = 0.0;
  long rating_count = 0;
  int last_updated_step = 0;
  long next_review_seq = 0;
};

inline std::optional<double> average_rating(const ItemDynamics& d) {
  if (d.rating_count <= 0) return std::nullopt;
  return d.rating_sum / double(d.rating_count);
}

inline void to_json(Json& j, const ItemDynamics& d) {
  j = Json{{"like_count", d.like_count},
           {"dislike_count", d.dislike_count},
           {"share_count", d.share_count},
           {"purchase_count", d.purchase_count},
           {"reviews", d.reviews},
           {"rating_sum", d.rating_sum},
           {"rating_count", d.rating_count},
           {"last_updated_step", d.last_updated_step},
           {"next_review_seq", d.next_review_seq}};
}

inline void from_json(const Json& j, ItemDynamics& d) {
  d.like_count = j.at("like_count").get<long>();
  d.dislike_count = j.at("dislike_count").get<long>();
  d.share_count = j.at("share_count").get<long>();
  d.purchase_count = j.at("purchase_count").get<long>();
  d.reviews = get_or<std::vector<Review>>(j, "reviews", {});
  d.rating_sum = j.at("rating_sum").get<double>();
  d.rating_count = j.at("rating_count").get<long>();
  d.last_updated_step = get_or<int>(j, "last_updated_step", 0);
  d.next_review_seq = get_or<long>(j, "next_review_seq", 0);
}

// Read view of one item: statics plus current dynamics, as presented on pages.
struct ItemSnapshot {
  ItemRecord record;
  long like_count = 0;
  long dislike_count = 0;
  long share_count = 0;
  long purchase_count = 0;
  std::optional<double> avg_rating;
  long review_count = 0;
  std::vector<Review> recent_reviews;
};

inline void to_json(Json& j, const ItemSnapshot& s) {
  j = Json{{"record", s.record},
           {"like_count", s.like_count},
           {"dislike_count", s.dislike_count},
           {"share_count", s.share_count},
           {"purchase_count", s.purchase_count},
           {"review_count", s.review_count},
           {"recent_reviews", s.recent_reviews}};
  put_opt(j, "avg_rating", s.avg_rating);
}

inline void from_json(const Json& j, ItemSnapshot& s) {
  s.record = j.at("record").get<ItemRecord>();
  s.like_count = j.at("like_count").get<long>();
  s.dislike_count = j.at("dislike_count").get<long>();
  s.share_count = j.at("share_count").get<long>();
  s.purchase_count = j.at("purchase_count").get<long>();
  s.avg_rating = get_opt<double>(j, "avg_rating");
  s.review_count = get_or<long>(j, "review_count", 0);
  s.recent_reviews = get_or<std::vector<Review>>(j, "recent_reviews", {});
}

// ---------------------------------------------------------------------------
// Histories and events

struct HistoricalInteraction {
  ItemId item_id;
  int rating = 0;  // 1..5
  std::optional<std::string> review_text;
};

inline void to_json(Json& j, const HistoricalInteraction& h) {
  j = Json{{"item_id", h.item_id}, {"rating", h.rating}};
  put_opt(j, "review_text", h.review_text);
}

inline void from_json(const Json& j, HistoricalInteraction& h) {
  h.item_id = j.at("item_id").get<std::string>();
  h.rating = j.at("rating").get<int>();
  h.review_text = get_opt<std::string>(j, "review_text");
}

struct EventRecord {
  int step = 0;
  AgentId agent_id;
  Action action;
  std::vector<ItemId> page_items;
  std::optional<std::string> thought;
  std::vector<std::string> flags;
};

inline void to_json(Json& j, const EventRecord& e) {
  j = Json{{"step", e.step}, {"agent_id", e.agent_id}, {"action", e.action},
           {"page_items", e.page_items}};
  put_opt(j, "thought", e.thought);
  if (!e.flags.empty()) j["flags"] = e.flags;
}

inline void from_json(const Json& j, EventRecord& e) {
  e.step = j.at("step").get<int>();
  e.agent_id = j.at("agent_id").get<std::string>();
  e.action = j.at("action").get<Action>();
  e.page_items = get_or<std::vector<ItemId>>(j, "page_items", {});
  e.thought = get_opt<std::string>(j, "thought");
  e.flags = get_or<std::vector<std::string>>(j, "flags", {});
}

// ---------------------------------------------------------------------------
// Interventions

enum class InterventionKind { MaliciousReviews, BrandRename, SeedBoost };

inline const char* to_string(InterventionKind k) {
  switch (k) {
    case InterventionKind::MaliciousReviews: return "malicious_reviews";
    case InterventionKind::BrandRename: return "brand_rename";
    case InterventionKind::SeedBoost: return "seed_boost";
  }
  return "unknown";
}

inline InterventionKind intervention_kind_from_string(const std::string& s) {
  if (s == "malicious_reviews") return InterventionKind::MaliciousReviews;
  if (s == "brand_rename") return InterventionKind::BrandRename;
  if (s == "seed_boost") return InterventionKind::SeedBoost;
  throw std::invalid_argument("unknown intervention kind: " + s);
}

struct Intervention {
  InterventionKind kind = InterventionKind::MaliciousReviews;
  int step = 0;  // 0 = before the simulation starts
  ItemId item_id;
  std::vector<std::string> texts;   // malicious_reviews / seed_boost review texts
  std::string new_name;             // brand_rename
  long initial_sales = 0;           // seed_boost
};

inline void to_json(Json& j, const Intervention& iv) {
  j = Json{{"kind", to_string(iv.kind)}, {"step", iv.step}, {"item_id", iv.item_id}};
  switch (iv.kind) {
    case InterventionKind::MaliciousReviews: j["texts"] = iv.texts; break;
    case InterventionKind::BrandRename: j["new_name"] = iv.new_name; break;
    case InterventionKind::SeedBoost:
      j["texts"] = iv.texts;
      j["initial_sales"] = iv.initial_sales;
      break;
  }
}

inline void from_json(const Json& j, Intervention& iv) {
  iv.kind = intervention_kind_from_string(j.at("kind").get<std::string>());
  iv.step = j.at("step").get<int>();
  iv.item_id = j.at("item_id").get<std::string>();
  iv.texts = get_or<std::vector<std::string>>(j, "texts", {});
  iv.new_name = get_or<std::string>(j, "new_name", "");
  iv.initial_sales = get_or<long>(j, "initial_sales", 0);
}

// Log entry recording what an intervention changed, counter by counter.
struct InterventionEvent {
  int step = 0;
  Intervention intervention;
  std::map<std::string, double> deltas;  // e.g. {"purchase_count": +100}
};

inline void to_json(Json& j, const InterventionEvent& e) {
  j = Json{{"step", e.step}, {"intervention", e.intervention}, {"deltas", e.deltas}};
}

inline void from_json(const Json& j, InterventionEvent& e) {
  e.step = j.at("step").get<int>();
  e.intervention = j.at("intervention").get<Intervention>();
  e.deltas = get_or<std::map<std::string, double>>(j, "deltas", {});
}

// ---------------------------------------------------------------------------
// Merchant strategies (behavior lives in agent.hpp)

enum class MerchantStrategyKind { NoReply, PositiveEngage, NegativeConfront };

inline const char* to_string(MerchantStrategyKind k) {
  switch (k) {
    case MerchantStrategyKind::NoReply: return "no_reply";
    case MerchantStrategyKind::PositiveEngage: return "positive_engage";
    case MerchantStrategyKind::NegativeConfront: return "negative_confront";
  }
  return "unknown";
}

inline std::optional<MerchantStrategyKind> merchant_strategy_from_string(const std::string& s) {
  if (s == "no_reply") return MerchantStrategyKind::NoReply;
  if (s == "positive_engage") return MerchantStrategyKind::PositiveEngage;
  if (s == "negative_confront") return MerchantStrategyKind::NegativeConfront;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Simulation configuration

// Memory-retrieval hyperparameters (scoring lives in memory.hpp).
struct RetrievalParams {
  double alpha = 0.7;
  double beta = 0.3;
  double gamma = 0.2;
  std::size_t theta_p = 25;  // perceptual retrieval cap
  std::size_t theta_c = 5;   // cognitive retrieval cap
};

inline void to_json(Json& j, const RetrievalParams& p) {
  j = Json{{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma},
           {"theta_p", p.theta_p}, {"theta_c", p.theta_c}};
}

inline void from_json(const Json& j, RetrievalParams& p) {
  p.alpha = get_or<double>(j, "alpha", 0.7);
  p.beta = get_or<double>(j, "beta", 0.3);
  p.gamma = get_or<double>(j, "gamma", 0.2);
  p.theta_p = get_or<std::size_t>(j, "theta_p", 25);
  p.theta_c = get_or<std::size_t>(j, "theta_c", 5);
}

struct PersonaParams {
  double popularity_threshold = 5.0;  // like+purchase level that triggers action
  double explore_prob = 0.05;         // below-threshold like probability
  double review_prob = 0.15;          // preference-match review probability
};

inline void to_json(Json& j, const PersonaParams& p) {
  j = Json{{"popularity_threshold", p.popularity_threshold},
           {"explore_prob", p.explore_prob},
           {"review_prob", p.review_prob}};
}

inline void from_json(const Json& j, PersonaParams& p) {
  p.popularity_threshold = get_or<double>(j, "popularity_threshold", 5.0);
  p.explore_prob = get_or<double>(j, "explore_prob", 0.05);
  p.review_prob = get_or<double>(j, "review_prob", 0.15);
}

struct RecTrainConfig {
  int dim = 64;
  int layers = 2;       // LightGCN propagation depth K
  int epochs = 200;
  double learning_rate = 0.05;
  int negatives_per_positive = 1;
  double l2 = 1e-4;
  int positive_threshold = 4;  // rating >= value is a positive interaction
  std::uint64_t seed = 1;
};

inline void to_json(Json& j, const RecTrainConfig& c) {
  j = Json{{"dim", c.dim},
           {"layers", c.layers},
           {"epochs", c.epochs},
           {"learning_rate", c.learning_rate},
           {"negatives_per_positive", c.negatives_per_positive},
           {"l2", c.l2},
           {"positive_threshold", c.positive_threshold},
           {"seed", c.seed}};
}

inline void from_json(const Json& j, RecTrainConfig& c) {
  c.dim = get_or<int>(j, "dim", 64);
  c.layers = get_or<int>(j, "layers", 2);
  c.epochs = get_or<int>(j, "epochs", 200);
  c.learning_rate = get_or<double>(j, "learning_rate", 0.05);
  c.negatives_per_positive = get_or<int>(j, "negatives_per_positive", 1);
  c.l2 = get_or<double>(j, "l2", 1e-4);
  c.positive_threshold = get_or<int>(j, "positive_threshold", 4);
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
}

struct SimulationConfig {
  int total_steps = 10;
  int agent_count = 1000;
  int page_size = 20;
  std::string recommender = "lightgcn";  // random | most_popular | mf | lightgcn
  std::uint64_t seed = 42;
  bool interaction_enabled = true;
  std::map<MerchantId, MerchantStrategyKind> merchant_strategy_map;
  std::vector<Intervention> interventions;
  std::string llm_backend = "mock";  // mock | script:<path> | replay:<path> | http:<url>
  std::string mock_persona = "preference-match";
  PersonaParams persona;
  RetrievalParams retrieval;
  RecTrainConfig rec_train;
  std::string exclusion_policy = "none";  // none | exclude-purchased
  int review_window = 5;
  int max_actions_per_step = 4;
  int snapshot_interval = 0;  // 0 = final snapshot only
  bool record_prompts = false;
  bool show_share_count = false;
  bool live_popularity = false;
  std::string chat_model = "default";
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1024;
  std::optional<std::string> dataset_dir;
  std::optional<std::string> profiles_path;
};

inline void to_json(Json& j, const SimulationConfig& c) {
  Json merchants = Json::object();
  for (const auto& [id, k] : c.merchant_strategy_map) merchants[id] = to_string(k);
  j = Json{{"total_steps", c.total_steps},
           {"agent_count", c.agent_count},
           {"page_size", c.page_size},
           {"recommender", c.recommender},
           {"seed", c.seed},
           {"interaction_enabled", c.interaction_enabled},
           {"merchant_strategy_map", merchants},
           {"interventions", c.interventions},
           {"llm_backend", c.llm_backend},
           {"mock_persona", c.mock_persona},
           {"persona", c.persona},
           {"retrieval", c.retrieval},
           {"rec_train", c.rec_train},
           {"exclusion_policy", c.exclusion_policy},
           {"review_window", c.review_window},
           {"max_actions_per_step", c.max_actions_per_step},
           {"snapshot_interval", c.snapshot_interval},
           {"record_prompts", c.record_prompts},
           {"show_share_count", c.show_share_count},
           {"live_popularity", c.live_popularity},
           {"chat_model", c.chat_model},
           {"temperature", c.temperature},
           {"top_p", c.top_p},
           {"max_tokens", c.max_tokens}};
  put_opt(j, "dataset_dir", c.dataset_dir);
  put_opt(j, "profiles_path", c.profiles_path);
}

inline void from_json(const Json& j, SimulationConfig& c) {
  c.total_steps = get_or<int>(j, "total_steps", 10);
  c.agent_count = get_or<int>(j, "agent_count", 1000);
  c.page_size = get_or<int>(j, "page_size", 20);
  c.recommender = get_or<std::string>(j, "recommender", "lightgcn");
  c.seed = get_or<std::uint64_t>(j, "seed", 42);
  c.interaction_enabled = get_or<bool>(j, "interaction_enabled", true);
  c.merchant_strategy_map.clear();
  if (auto it = j.find("merchant_strategy_map"); it != j.end()) {
    for (const auto& [id, name] : it->items()) {
      auto k = merchant_strategy_from_string(name.get<std::string>());
      if (!k)
        throw std::invalid_argument("merchant_strategy_map." + id + ": unknown strategy '" +
                                    name.get<std::string>() + "'");
      c.merchant_strategy_map[id] = *k;
    }
  }
  c.interventions = get_or<std::vector<Intervention>>(j, "interventions", {});
  c.llm_backend = get_or<std::string>(j, "llm_backend", "mock");
  c.mock_persona = get_or<std::string>(j, "mock_persona", "preference-match");
  c.persona = get_or<PersonaParams>(j, "persona", {});
  c.retrieval = get_or<RetrievalParams>(j, "retrieval", {});
  c.rec_train = get_or<RecTrainConfig>(j, "rec_train", {});
  c.exclusion_policy = get_or<std::string>(j, "exclusion_policy", "none");
  c.review_window = get_or<int>(j, "review_window", 5);
  c.max_actions_per_step = get_or<int>(j, "max_actions_per_step", 4);
  c.snapshot_interval = get_or<int>(j, "snapshot_interval", 0);
  c.record_prompts = get_or<bool>(j, "record_prompts", false);
  c.show_share_count = get_or<bool>(j, "show_share_count", false);
  c.live_popularity = get_or<bool>(j, "live_popularity", false);
  c.chat_model = get_or<std::string>(j, "chat_model", "default");
  c.temperature = get_or<double>(j, "temperature", 0.0);
  c.top_p = get_or<double>(j, "top_p", 1.0);
  c.max_tokens = get_or<int>(j, "max_tokens", 1024);
  c.dataset_dir = get_opt<std::string>(j, "dataset_dir");
  c.profiles_path = get_opt<std::string>(j, "profiles_path");
}

}  // namespace recarena
