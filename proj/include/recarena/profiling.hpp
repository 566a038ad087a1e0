#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/domain.hpp"
#include "recarena/gateway.hpp"
#include "recarena/ingest.hpp"
#include "recarena/prompts.hpp"
#include "recarena/text.hpp"

namespace recarena {

// Objective statistics block of a user profile.
struct ObjectiveProfile {
  double t_act = 0.0;    // activity quantile within the dataset, [0,1]
  double t_conf = 0.0;   // mean |rating - item mean rating|; low = conformist
  double t_cons = 0.0;   // 1 - distinct categories / interactions, clamped to [0,1]
  std::vector<std::string> t_cate;           // top-30 categories by frequency
  std::vector<std::string> t_item;           // top-10 item names by frequency
  double t_rate = 0.0;                       // mean rating
  double t_repr = 0.0;                       // fraction of interactions with a review
  double t_relen = 0.0;                      // mean token length of non-empty reviews
  std::vector<text::WeightedToken> t_rekey;  // top-20 tf-idf keywords
};

namespace text {

inline void to_json(Json& j, const WeightedToken& w) {
  j = Json{{"token", w.token}, {"weight", w.weight}};
}

inline void from_json(const Json& j, WeightedToken& w) {
  w.token = j.at("token").get<std::string>();
  w.weight = j.at("weight").get<double>();
}

}  // namespace text

inline void to_json(Json& j, const ObjectiveProfile& p) {
  j = Json{{"t_act", p.t_act},   {"t_conf", p.t_conf},   {"t_cons", p.t_cons},
           {"t_cate", p.t_cate}, {"t_item", p.t_item},   {"t_rate", p.t_rate},
           {"t_repr", p.t_repr}, {"t_relen", p.t_relen}, {"t_rekey", p.t_rekey}};
}

inline void from_json(const Json& j, ObjectiveProfile& p) {
  p.t_act = j.at("t_act").get<double>();
  p.t_conf = j.at("t_conf").get<double>();
  p.t_cons = j.at("t_cons").get<double>();
  p.t_cate = j.at("t_cate").get<std::vector<std::string>>();
  p.t_item = j.at("t_item").get<std::vector<std::string>>();
  p.t_rate = j.at("t_rate").get<double>();
  p.t_repr = j.at("t_repr").get<double>();
  p.t_relen = j.at("t_relen").get<double>();
  p.t_rekey = j.at("t_rekey").get<std::vector<text::WeightedToken>>();
}

struct SubjectiveProfile {
  std::string consumption_budget_range;
  std::vector<std::string> scenario_preferences;
  std::vector<std::string> consumption_habits;
  std::vector<std::string> taste_preferences;
  std::string reason;
};

inline void to_json(Json& j, const SubjectiveProfile& p) {
  j = Json{{"consumption_budget_range", p.consumption_budget_range},
           {"scenario_preferences", p.scenario_preferences},
           {"consumption_habits", p.consumption_habits},
           {"taste_preferences", p.taste_preferences},
           {"reason", p.reason}};
}

inline void from_json(const Json& j, SubjectiveProfile& p) {
  p.consumption_budget_range = j.at("consumption_budget_range").get<std::string>();
  p.scenario_preferences = j.at("scenario_preferences").get<std::vector<std::string>>();
  p.consumption_habits = j.at("consumption_habits").get<std::vector<std::string>>();
  p.taste_preferences = j.at("taste_preferences").get<std::vector<std::string>>();
  p.reason = get_or<std::string>(j, "reason", "");
}

// Review-derived block; uncertain fields hold the literal "unknown".
struct InferredProfile {
  std::string estimated_age_range = "unknown";
  std::string possible_occupation_type = "unknown";
  std::string estimated_income_level = "unknown";
  std::string life_status = "unknown";
  std::string price_sensitivity = "unknown";
  std::string quality_consciousness = "unknown";
  std::vector<std::string> service_preferences;
  std::vector<std::string> points_of_concern;
  std::vector<std::string> review_language_style;
  std::string reason;
};

inline void to_json(Json& j, const InferredProfile& p) {
  j = Json{{"estimated_age_range", p.estimated_age_range},
           {"possible_occupation_type", p.possible_occupation_type},
           {"estimated_income_level", p.estimated_income_level},
           {"life_status", p.life_status},
           {"price_sensitivity", p.price_sensitivity},
           {"quality_consciousness", p.quality_consciousness},
           {"service_preferences", p.service_preferences},
           {"points_of_concern", p.points_of_concern},
           {"review_language_style", p.review_language_style},
           {"reason", p.reason}};
}

inline void from_json(const Json& j, InferredProfile& p) {
  auto norm = [&](const char* key) {
    const std::string v = get_or<std::string>(j, key, "");
    return v.empty() ? std::string("unknown") : v;
  };
  p.estimated_age_range = norm("estimated_age_range");
  p.possible_occupation_type = norm("possible_occupation_type");
  p.estimated_income_level = norm("estimated_income_level");
  p.life_status = norm("life_status");
  p.price_sensitivity = norm("price_sensitivity");
  p.quality_consciousness = norm("quality_consciousness");
  p.service_preferences = get_or<std::vector<std::string>>(j, "service_preferences", {});
  p.points_of_concern = get_or<std::vector<std::string>>(j, "points_of_concern", {});
  p.review_language_style = get_or<std::vector<std::string>>(j, "review_language_style", {});
  p.reason = get_or<std::string>(j, "reason", "");
}

struct UserProfile {
  UserId user_id;
  ObjectiveProfile objective;
  SubjectiveProfile subjective;
  InferredProfile inferred;
  bool placeholder = false;  // subjective/inferred blocks are fillers (mock mode or gateway failure)
};

inline void to_json(Json& j, const UserProfile& p) {
  j = Json{{"user_id", p.user_id},
           {"objective", p.objective},
           {"subjective", p.subjective},
           {"inferred", p.inferred},
           {"placeholder", p.placeholder}};
}

inline void from_json(const Json& j, UserProfile& p) {
  p.user_id = j.at("user_id").get<std::string>();
  p.objective = j.at("objective").get<ObjectiveProfile>();
  p.subjective = j.at("subjective").get<SubjectiveProfile>();
  p.inferred = j.at("inferred").get<InferredProfile>();
  p.placeholder = get_or<bool>(j, "placeholder", false);
}

// ---------------------------------------------------------------------------
// Corpus-level statistics shared across per-user objective profiling.

struct CorpusStats {
  std::vector<std::size_t> interaction_counts;  // one per user, unsorted
  std::map<ItemId, double> item_mean_rating;
  text::DocumentFrequency review_df;  // one document per user (concatenated reviews)
};

inline CorpusStats build_corpus_stats(const Dataset& ds) {
  CorpusStats stats;
  std::map<ItemId, std::pair<double, std::size_t>> rating_acc;
  for (const auto& [user, history] : ds.users) {
    stats.interaction_counts.push_back(history.size());
    std::string doc;
    for (const auto& h : history) {
      auto& [sum, n] = rating_acc[h.item_id];
      sum += h.rating;
      ++n;
      if (h.review_text && !h.review_text->empty()) {
        doc += *h.review_text;
        doc += '\n';
      }
    }
    stats.review_df.add_document(doc);
  }
  for (const auto& [id, acc] : rating_acc)
    stats.item_mean_rating[id] = acc.first / double(acc.second);
  return stats;
}

inline constexpr std::size_t kTopCategories = 30;
inline constexpr std::size_t kTopItems = 10;
inline constexpr std::size_t kTopKeywords = 20;

// Frequency-ranked top-k with deterministic tie-break (count desc, name asc).
inline std::vector<std::string> top_by_count(const std::map<std::string, std::size_t>& counts,
                                             std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < k; ++i) out.push_back(v[i].first);
  return out;
}

inline std::vector<text::WeightedToken> compute_tfidf_keywords(
    const std::vector<std::string>& user_reviews, const text::DocumentFrequency& corpus,
    std::size_t n) {
  if (corpus.doc_count == 0) throw std::invalid_argument("tf-idf requires a non-empty corpus");
  return text::tfidf_keywords(user_reviews, corpus, n);
}

inline ObjectiveProfile compute_objective_profile(
    const std::vector<HistoricalInteraction>& history,
    const std::map<ItemId, ItemRecord>& catalog, const CorpusStats& stats) {
  if (history.empty())
    throw std::invalid_argument("compute_objective_profile: history must be non-empty");

  ObjectiveProfile p;

  double rating_sum = 0.0;
  std::size_t reviewed = 0;
  std::size_t review_tokens = 0;
  std::map<std::string, std::size_t> cate_counts;
  std::map<std::string, std::size_t> item_counts;
  std::set<std::string> distinct_categories;
  std::vector<std::string> review_texts;
  double conf_sum = 0.0;

  for (const auto& h : history) {
    rating_sum += h.rating;
    if (h.review_text && !h.review_text->empty()) {
      ++reviewed;
      review_tokens += text::whitespace_token_count(*h.review_text);
      review_texts.push_back(*h.review_text);
    }
    auto cat_it = catalog.find(h.item_id);
    if (cat_it != catalog.end()) {
      for (const auto& c : cat_it->second.categories) {
        ++cate_counts[c];
        distinct_categories.insert(c);
      }
      ++item_counts[cat_it->second.name];
    } else {
      ++item_counts[h.item_id];
    }
    auto mean_it = stats.item_mean_rating.find(h.item_id);
    if (mean_it != stats.item_mean_rating.end())
      conf_sum += std::abs(double(h.rating) - mean_it->second);
  }

  const double n = double(history.size());
  p.t_rate = rating_sum / n;
  p.t_repr = double(reviewed) / n;
  p.t_relen = reviewed == 0 ? 0.0 : double(review_tokens) / double(reviewed);
  p.t_cate = top_by_count(cate_counts, kTopCategories);
  p.t_item = top_by_count(item_counts, kTopItems);
  p.t_rekey = compute_tfidf_keywords(review_texts, stats.review_df, kTopKeywords);
  p.t_conf = conf_sum / n;
  p.t_cons = std::clamp(1.0 - double(distinct_categories.size()) / n, 0.0, 1.0);

  // Activity quantile: fraction of users with interaction count <= this one.
  std::size_t le = 0;
  for (auto c : stats.interaction_counts)
    if (c <= history.size()) ++le;
  p.t_act = stats.interaction_counts.empty()
                ? 1.0
                : double(le) / double(stats.interaction_counts.size());
  return p;
}

// ---------------------------------------------------------------------------
// Gateway-backed subjective / inferred blocks.

class ProfileParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json extract_json_block(const std::string& body) {
  auto j = try_extract_json_block(body);
  if (!j) throw ProfileParseError("no parseable JSON block in model output");
  return *j;
}

// Renders one sampled interaction line for profiling prompts.
inline std::string render_profile_input(const std::vector<HistoricalInteraction>& sampled,
                                        const std::map<ItemId, ItemRecord>& catalog,
                                        bool include_reviews) {
  std::ostringstream os;
  for (const auto& h : sampled) {
    auto it = catalog.find(h.item_id);
    os << "- item: " << (it != catalog.end() ? it->second.name : h.item_id);
    if (it != catalog.end()) {
      if (!it->second.categories.empty()) {
        os << " | categories: ";
        for (std::size_t i = 0; i < it->second.categories.size(); ++i) {
          if (i) os << ", ";
          os << it->second.categories[i];
        }
      }
      if (it->second.augmented_description)
        os << " | about: " << *it->second.augmented_description;
      else if (!it->second.description.empty())
        os << " | about: " << it->second.description;
    }
    os << " | rating: " << h.rating;
    if (include_reviews && h.review_text && !h.review_text->empty())
      os << " | review: " << *h.review_text;
    os << "\n";
  }
  return os.str();
}

namespace detail {

// One reprompt on schema mismatch, then error.
template <typename Block>
Block gateway_block(const std::string& prompt_name, const std::string& input,
                    ChatBackend& backend, const PromptLibrary& prompts,
                    const RetryPolicy& retry) {
  ChatRequest req;
  req.messages = {{"user", prompts.render(prompt_name, {{"input_data", input}})}};
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ChatResponse resp = llm_chat(req, backend, retry);
    try {
      Json j = extract_json_block(resp.text);
      const Json& block = j.contains("profile") ? j.at("profile") : j;
      Block parsed = block.get<Block>();
      if (j.contains("reason")) {
        // reason may sit beside the profile block
        Json merged = block;
        merged["reason"] = j.at("reason");
        parsed = merged.get<Block>();
      }
      return parsed;
    } catch (const std::exception& e) {
      last_error = e.what();
      req.messages.push_back({"assistant", resp.text});
      req.messages.push_back(
          {"user", "The previous output did not match the required JSON format. "
                   "Reply again with only the JSON object."});
    }
  }
  throw ProfileParseError("profile block unparseable after retry: " + last_error);
}

}  // namespace detail

inline SubjectiveProfile build_subjective_profile(
    const std::vector<HistoricalInteraction>& sampled,
    const std::map<ItemId, ItemRecord>& catalog, ChatBackend& backend,
    const PromptLibrary& prompts, const RetryPolicy& retry = {}) {
  if (sampled.empty())
    throw std::invalid_argument("build_subjective_profile: need at least one interaction");
  return detail::gateway_block<SubjectiveProfile>(
      "subjective_profile", render_profile_input(sampled, catalog, false), backend, prompts,
      retry);
}

inline InferredProfile build_inferred_profile(
    const std::vector<HistoricalInteraction>& sampled,
    const std::map<ItemId, ItemRecord>& catalog, ChatBackend& backend,
    const PromptLibrary& prompts, const RetryPolicy& retry = {}) {
  if (sampled.empty())
    throw std::invalid_argument("build_inferred_profile: need at least one interaction");
  return detail::gateway_block<InferredProfile>(
      "inferred_profile", render_profile_input(sampled, catalog, true), backend, prompts, retry);
}

inline SubjectiveProfile placeholder_subjective() {
  SubjectiveProfile p;
  p.consumption_budget_range = "unknown";
  p.reason = "placeholder";
  return p;
}

inline InferredProfile placeholder_inferred() {
  InferredProfile p;
  p.reason = "placeholder";
  return p;
}

inline constexpr std::size_t kProfileSampleSize = 60;

// One profile per user. backend == nullptr builds objective-only profiles
// with placeholder subjective/inferred blocks (mock mode). Per-user gateway
// failures degrade to flagged placeholders instead of aborting the pool.
inline std::map<UserId, UserProfile> assemble_profile_pool(
    const Dataset& ds, ChatBackend* backend, const PromptLibrary& prompts, std::uint64_t seed,
    const RetryPolicy& retry = {}) {
  const CorpusStats stats = build_corpus_stats(ds);
  std::map<UserId, UserProfile> pool;
  for (const auto& [user, history] : ds.users) {
    UserProfile p;
    p.user_id = user;
    p.objective = compute_objective_profile(history, ds.catalog, stats);
    if (backend) {
      const auto sampled =
          sample_history(history, kProfileSampleSize, mix_seed(seed, user));
      try {
        p.subjective = build_subjective_profile(sampled, ds.catalog, *backend, prompts, retry);
        p.inferred = build_inferred_profile(sampled, ds.catalog, *backend, prompts, retry);
      } catch (const std::exception&) {
        p.subjective = placeholder_subjective();
        p.inferred = placeholder_inferred();
        p.placeholder = true;
      }
    } else {
      p.subjective = placeholder_subjective();
      p.inferred = placeholder_inferred();
      p.placeholder = true;
    }
    pool.emplace(user, std::move(p));
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Profile pool persistence: JSONL, one UserProfile per line, user_id order.

inline void save_profile_pool(const std::map<UserId, UserProfile>& pool,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile pool: " + path);
  for (const auto& [user, profile] : pool) out << Json(profile).dump() << "\n";
}

inline std::map<UserId, UserProfile> load_profile_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile pool: " + path);
  std::map<UserId, UserProfile> pool;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto p = Json::parse(line).get<UserProfile>();
    pool.emplace(p.user_id, std::move(p));
  }
  return pool;
}

}  // namespace recarena
