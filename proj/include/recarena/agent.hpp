#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/domain.hpp"
#include "recarena/gateway.hpp"
#include "recarena/memory.hpp"
#include "recarena/profiling.hpp"
#include "recarena/prompts.hpp"
#include "recarena/rng.hpp"
#include "recarena/sentiment.hpp"

namespace recarena {

struct UserAgentState {
  AgentId agent_id;
  UserProfile profile;
  MemoryStore memory;
  std::set<ItemId> purchased;  // tracked for the exclude-purchased page policy
};

struct AgentDecision {
  std::string thought;
  std::vector<Action> actions;
};

inline void to_json(Json& j, const AgentDecision& d) {
  j = Json{{"thought", d.thought}, {"actions", d.actions}};
}

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structured {thought, actions} block extracted from model text. Surrounding
// prose is tolerated; unknown kinds and invariant violations are rejected.
inline AgentDecision parse_agent_output(const std::string& body) {
  const auto j = try_extract_json_block(body);
  if (!j) throw FormatError("no structured block found in output");
  AgentDecision d;
  d.thought = get_or<std::string>(*j, "thought", "");
  auto it = j->find("actions");
  if (it == j->end() || !it->is_array()) throw FormatError("missing actions array");
  for (const auto& aj : *it) {
    Action a;
    try {
      a = aj.get<Action>();
    } catch (const std::exception& e) {
      throw FormatError(e.what());
    }
    const auto violations = validate_action(a);
    if (!violations.empty()) {
      std::string msg = "invalid action";
      for (const auto& v : violations) msg += ": " + v;
      throw FormatError(msg);
    }
    d.actions.push_back(std::move(a));
  }
  if (d.actions.empty()) throw FormatError("actions must be non-empty");
  const bool has_nothing = std::any_of(d.actions.begin(), d.actions.end(), [](const Action& a) {
    return a.kind == ActionKind::DoNothing;
  });
  if (has_nothing && d.actions.size() > 1)
    throw FormatError("do_nothing must be the only action");
  return d;
}

// ---------------------------------------------------------------------------
// Prompt rendering

inline std::string render_profile_text(const UserProfile& p) {
  Json j{{"objective",
          Json{{"average_rating_given", p.objective.t_rate},
               {"review_probability", p.objective.t_repr},
               {"preferred_categories", p.objective.t_cate},
               {"favorite_items", p.objective.t_item}}},
         {"subjective", p.subjective},
         {"inferred", p.inferred}};
  return j.dump(2);
}

inline std::string render_page_text(const std::vector<ItemSnapshot>& page,
                                    bool show_share_count) {
  std::ostringstream os;
  for (const auto& s : page) {
    os << "- [" << s.record.item_id << "] " << s.record.name;
    if (!s.record.categories.empty()) {
      os << " | categories: ";
      for (std::size_t i = 0; i < s.record.categories.size(); ++i) {
        if (i) os << ", ";
        os << s.record.categories[i];
      }
    }
    os << " | likes: " << s.like_count << " | dislikes: " << s.dislike_count
       << " | sales: " << s.purchase_count;
    if (show_share_count) os << " | shares: " << s.share_count;
    if (s.avg_rating) os << " | avg rating: " << *s.avg_rating;
    os << " | reviews: " << s.review_count;
    for (const auto& r : s.recent_reviews) {
      os << "\n    review [" << r.review_id << "]";
      if (r.rating) os << " (rating " << *r.rating << ")";
      os << ": " << r.text;
      for (const auto& reply : r.replies) os << "\n      merchant reply: " << reply.text;
    }
    os << "\n";
  }
  return os.str();
}

inline std::string render_memories_text(const RetrievedMemories& retrieved,
                                        const ItemNameLookup& name_of = nullptr) {
  std::ostringstream os;
  for (const auto& m : retrieved.cognitive)
    os << "- step " << m.step << ": thought \"" << m.thought << "\", then "
       << to_string(m.action.kind) << "\n";
  for (const auto& m : retrieved.perceptual) {
    os << "- step " << m.step << ": saw ";
    for (std::size_t i = 0; i < m.page_item_ids.size(); ++i) {
      if (i) os << ", ";
      os << (name_of ? name_of(m.page_item_ids[i]) : m.page_item_ids[i]);
    }
    os << "; did " << to_string(m.action.kind) << "\n";
  }
  if (os.tellp() == 0) os << "(no relevant memories)\n";
  return os.str();
}

inline std::string render_decision_prompt(const PromptLibrary& prompts, const UserProfile& profile,
                                          const RetrievedMemories& retrieved,
                                          const std::vector<ItemSnapshot>& page, int max_actions,
                                          bool show_share_count,
                                          const ItemNameLookup& name_of = nullptr) {
  return prompts.render("decide", {{"profile", render_profile_text(profile)},
                                   {"memories", render_memories_text(retrieved, name_of)},
                                   {"page", render_page_text(page, show_share_count)},
                                   {"max_actions", std::to_string(max_actions)}});
}

// ---------------------------------------------------------------------------
// Decision execution

struct DecideParams {
  int max_actions = 4;
  bool show_share_count = false;
  std::string chat_model = "default";
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1024;
  RetryPolicy retry;
};

struct DecisionOutcome {
  AgentDecision decision;
  std::string prompt;
  std::string response;
  bool fallback = false;       // gateway or format failure forced do_nothing
  std::vector<std::string> flags;
};

namespace detail {

// Keeps only actions that reference the current page (or reviews shown on
// it), enforces the do_nothing exclusivity and the per-step cap.
inline void sanitize_decision(AgentDecision& d, const std::vector<ItemSnapshot>& page,
                              int max_actions, std::vector<std::string>& flags) {
  std::set<ItemId> page_ids;
  std::set<ReviewId> page_reviews;
  for (const auto& s : page) {
    page_ids.insert(s.record.item_id);
    for (const auto& r : s.recent_reviews) page_reviews.insert(r.review_id);
  }
  std::vector<Action> kept;
  for (auto& a : d.actions) {
    if (a.kind == ActionKind::DoNothing) {
      kept.push_back(a);
      continue;
    }
    if (a.target_item && !page_ids.count(*a.target_item)) {
      flags.push_back("dropped-offpage-action");
      continue;
    }
    if ((a.kind == ActionKind::LikeReview || a.kind == ActionKind::DislikeReview) &&
        !page_reviews.count(*a.target_review)) {
      flags.push_back("dropped-offpage-action");
      continue;
    }
    kept.push_back(a);
  }
  if (kept.size() > std::size_t(max_actions)) {
    kept.resize(max_actions);
    flags.push_back("actions-truncated");
  }
  if (kept.empty()) kept.push_back(Action{});
  d.actions = std::move(kept);
}

inline void record_decision(UserAgentState& state, const std::vector<ItemSnapshot>& page,
                            const AgentDecision& d, int step) {
  std::vector<ItemId> page_ids;
  std::vector<EnrichedPageEntry> enriched;
  for (const auto& s : page) {
    page_ids.push_back(s.record.item_id);
    enriched.push_back(enrich(s));
  }
  const Action primary = d.actions.empty() ? Action{} : d.actions.front();
  state.memory.record_perceptual(std::move(page_ids), primary, step);
  state.memory.record_cognitive(std::move(enriched),
                                d.thought.empty() ? std::string("(no thought)") : d.thought,
                                primary, step);
}

}  // namespace detail

// Gateway-backed think-then-act step. Builds the decision prompt, parses the
// structured output (one re-ask on format errors), falls back to do_nothing
// when the gateway or parsing ultimately fails, and records both memory types
// before returning.
inline DecisionOutcome decide(UserAgentState& state, const std::vector<ItemSnapshot>& page,
                              const RetrievedMemories& retrieved, ChatBackend& backend,
                              const PromptLibrary& prompts, const DecideParams& params, int step,
                              const ItemNameLookup& name_of = nullptr) {
  if (page.empty()) throw std::invalid_argument("decide: page must be non-empty");
  DecisionOutcome out;
  out.prompt = render_decision_prompt(prompts, state.profile, retrieved, page,
                                      params.max_actions, params.show_share_count, name_of);
  ChatRequest req;
  req.model = params.chat_model;
  req.temperature = params.temperature;
  req.top_p = params.top_p;
  req.max_tokens = params.max_tokens;
  req.messages = {{"user", out.prompt}};

  bool decided = false;
  for (int attempt = 0; attempt < 2 && !decided; ++attempt) {
    try {
      const ChatResponse resp = llm_chat(req, backend, params.retry);
      out.response = resp.text;
      out.decision = parse_agent_output(resp.text);
      decided = true;
    } catch (const GatewayError&) {
      break;  // retries exhausted inside llm_chat
    } catch (const FormatError&) {
      req.messages.push_back({"assistant", out.response});
      req.messages.push_back({"user", "The output did not match the required JSON format. "
                                      "Reply again with only the JSON object."});
    }
  }
  if (!decided) {
    out.decision = AgentDecision{"(fallback)", {Action{}}};
    out.fallback = true;
    out.flags.push_back("decision-fallback");
  } else {
    detail::sanitize_decision(out.decision, page, params.max_actions, out.flags);
  }
  detail::record_decision(state, page, out.decision, step);
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic mock personas: gateway-free decision policies for scaled
// experiments and tests.

enum class Persona { PreferenceMatch, PopularitySensitive, SentimentSensitive, RandomActor };

inline std::optional<Persona> persona_from_string(const std::string& s) {
  if (s == "preference-match") return Persona::PreferenceMatch;
  if (s == "popularity-sensitive") return Persona::PopularitySensitive;
  if (s == "sentiment-sensitive") return Persona::SentimentSensitive;
  if (s == "random") return Persona::RandomActor;
  return std::nullopt;
}

inline const char* to_string(Persona p) {
  switch (p) {
    case Persona::PreferenceMatch: return "preference-match";
    case Persona::PopularitySensitive: return "popularity-sensitive";
    case Persona::SentimentSensitive: return "sentiment-sensitive";
    case Persona::RandomActor: return "random";
  }
  return "unknown";
}

namespace detail {

inline const std::vector<std::string>& positive_review_texts() {
  static const std::vector<std::string> texts = {
      "Really enjoyed this place, great food and friendly service.",
      "Wonderful experience, everything was fresh and delicious.",
      "Loved it, the staff was amazing and I will definitely come back.",
      "Excellent quality for the price, highly recommended."};
  return texts;
}

inline const std::vector<std::string>& neutral_review_texts() {
  static const std::vector<std::string> texts = {
      "It was okay, nothing special but nothing wrong either.",
      "Average visit, the menu is fairly standard."};
  return texts;
}

inline const std::vector<std::string>& negative_review_texts() {
  static const std::vector<std::string> texts = {
      "Disappointing visit, the food was bland and the service slow.",
      "Not worth it, my order was wrong and nobody seemed to care.",
      "Bad experience, the place was dirty and the staff rude."};
  return texts;
}

inline double recent_sentiment_mean(const ItemSnapshot& s, const SentimentLexicon& lexicon) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : s.recent_reviews) {
    sum += sentiment_compound(r.text, lexicon);
    ++n;
    for (const auto& reply : r.replies) {
      sum += sentiment_compound(reply.text, lexicon);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / double(n);
}

// Most popular page entry by like+purchase, ties toward the smaller item id.
inline const ItemSnapshot* popularity_argmax(const std::vector<ItemSnapshot>& page) {
  const ItemSnapshot* best = nullptr;
  for (const auto& s : page) {
    if (!best) {
      best = &s;
      continue;
    }
    const long cur = s.like_count + s.purchase_count;
    const long top = best->like_count + best->purchase_count;
    if (cur > top || (cur == top && s.record.item_id < best->record.item_id)) best = &s;
  }
  return best;
}

}  // namespace detail

// Deterministic decision policy: same (seed, inputs) always yields the same
// decision. Memories are recorded exactly as in the gateway path, and the
// canonical prompt/response pair is synthesized so prompt recording works.
inline DecisionOutcome mock_policy_decide(Persona persona, UserAgentState& state,
                                          const std::vector<ItemSnapshot>& page, Rng& rng,
                                          const SentimentLexicon& lexicon,
                                          const PersonaParams& pp, const DecideParams& params,
                                          int step, const RetrievedMemories& retrieved,
                                          const PromptLibrary* prompts = nullptr) {
  if (page.empty()) throw std::invalid_argument("mock_policy_decide: page must be non-empty");
  AgentDecision d;

  switch (persona) {
    case Persona::PreferenceMatch: {
      const std::set<std::string> prefs(state.profile.objective.t_cate.begin(),
                                        state.profile.objective.t_cate.end());
      const ItemSnapshot* match = nullptr;
      for (const auto& s : page) {
        for (const auto& c : s.record.categories)
          if (prefs.count(c)) {
            match = &s;
            break;
          }
        if (match) break;
      }
      if (!match) {
        d.thought = "none of the recommended items fit my usual categories";
        d.actions.push_back(Action{});
        break;
      }
      d.thought = "the item " + match->record.name + " matches my preferred categories";
      Action like;
      like.kind = ActionKind::LikeProduct;
      like.target_item = match->record.item_id;
      d.actions.push_back(like);
      if (rng.chance(pp.review_prob)) {
        const auto& texts = detail::positive_review_texts();
        Action rev;
        rev.kind = ActionKind::CreateReview;
        rev.target_item = match->record.item_id;
        rev.review_text = texts[rng.below(texts.size())];
        rev.rating = 5;
        d.actions.push_back(rev);
      }
      break;
    }

    case Persona::PopularitySensitive:
    case Persona::SentimentSensitive: {
      std::vector<ItemSnapshot> candidates;
      if (persona == Persona::SentimentSensitive) {
        for (const auto& s : page)
          if (detail::recent_sentiment_mean(s, lexicon) >= 0.0) candidates.push_back(s);
      } else {
        candidates = page;
      }
      if (candidates.empty()) {
        d.thought = "recent reviews everywhere look too negative, skipping this page";
        d.actions.push_back(Action{});
        break;
      }
      const ItemSnapshot* best = detail::popularity_argmax(candidates);
      const long pop = best->like_count + best->purchase_count;
      if (double(pop) >= pp.popularity_threshold) {
        std::ostringstream os;
        os << best->record.name << " is clearly popular (" << pop
           << " likes+sales), I trust the crowd";
        d.thought = os.str();
        Action like;
        like.kind = ActionKind::LikeProduct;
        like.target_item = best->record.item_id;
        Action buy;
        buy.kind = ActionKind::PurchaseProduct;
        buy.target_item = best->record.item_id;
        d.actions.push_back(like);
        d.actions.push_back(buy);
      } else if (rng.chance(pp.explore_prob)) {
        d.thought = "nothing stands out yet, but " + best->record.name + " seems worth a try";
        Action like;
        like.kind = ActionKind::LikeProduct;
        like.target_item = best->record.item_id;
        d.actions.push_back(like);
      } else {
        d.thought = "nothing on this page looks popular enough to bother";
        d.actions.push_back(Action{});
      }
      break;
    }

    case Persona::RandomActor: {
      const int kind_idx = int(rng.below(8));
      const auto kind = static_cast<ActionKind>(kind_idx);
      Action a;
      a.kind = kind;
      d.thought = "acting on impulse";
      if (kind == ActionKind::DoNothing) {
        d.actions.push_back(a);
        break;
      }
      const auto& target = page[rng.below(page.size())];
      a.target_item = target.record.item_id;
      if (kind == ActionKind::CreateReview) {
        const int rating = 1 + int(rng.below(5));
        a.rating = rating;
        const auto& texts = rating >= 4   ? detail::positive_review_texts()
                            : rating <= 2 ? detail::negative_review_texts()
                                          : detail::neutral_review_texts();
        a.review_text = texts[rng.below(texts.size())];
      } else if (kind == ActionKind::LikeReview || kind == ActionKind::DislikeReview) {
        if (target.recent_reviews.empty()) {
          a = Action{};  // nothing to vote on
          d.thought = "wanted to vote on a review but found none";
        } else {
          a.target_review = target.recent_reviews[rng.below(target.recent_reviews.size())].review_id;
        }
      }
      d.actions.push_back(a);
      break;
    }
  }

  DecisionOutcome out;
  out.decision = std::move(d);
  if (prompts) {
    out.prompt = render_decision_prompt(*prompts, state.profile, retrieved, page,
                                        params.max_actions, params.show_share_count);
  }
  out.response = Json(out.decision).dump();
  detail::record_decision(state, page, out.decision, step);
  return out;
}

// ---------------------------------------------------------------------------
// Merchant agents

struct MerchantReply {
  ReviewId parent_review;
  Review reply;
};

inline bool is_negative_review(const Review& r, const SentimentLexicon& lexicon) {
  if (r.rating && *r.rating <= 2) return true;
  return sentiment_compound(r.text, lexicon) < -0.05;
}

namespace detail {

inline std::string canned_merchant_reply(MerchantStrategyKind strategy) {
  if (strategy == MerchantStrategyKind::PositiveEngage)
    return "Thank you so much for the feedback, we truly appreciate it and would love to "
           "welcome you back for an even better visit.";
  return "This review is unfair and wrong, we completely reject this dishonest account of "
         "our business.";
}

}  // namespace detail

// Replies to this step's new reviews according to the merchant's strategy.
// backend == nullptr uses canned deterministic reply text. Gateway failures
// skip the reply rather than aborting the step.
inline std::vector<MerchantReply> merchant_step(
    const MerchantId& merchant_id, const std::vector<Review>& new_reviews,
    MerchantStrategyKind strategy, ChatBackend* backend, const PromptLibrary& prompts,
    const SentimentLexicon& lexicon, int step,
    const std::map<ItemId, std::string>& item_names, const RetryPolicy& retry = {}) {
  std::vector<MerchantReply> out;
  if (strategy == MerchantStrategyKind::NoReply) return out;
  for (const auto& r : new_reviews) {
    if (strategy == MerchantStrategyKind::NegativeConfront && !is_negative_review(r, lexicon))
      continue;
    std::string text;
    if (backend) {
      const char* tpl = strategy == MerchantStrategyKind::PositiveEngage
                            ? "merchant_reply_positive"
                            : "merchant_reply_negative";
      auto name_it = item_names.find(r.item_id);
      ChatRequest req;
      req.messages = {{"user", prompts.render(tpl, {{"item_name", name_it != item_names.end()
                                                                      ? name_it->second
                                                                      : r.item_id},
                                                    {"rating", r.rating
                                                                   ? std::to_string(*r.rating)
                                                                   : std::string("none")},
                                                    {"review_text", r.text}})}};
      try {
        text = llm_chat(req, *backend, retry).text;
      } catch (const GatewayError&) {
        continue;  // skip this reply, flagged by the caller
      }
    } else {
      text = detail::canned_merchant_reply(strategy);
    }
    Review reply;
    reply.item_id = r.item_id;
    reply.author = ReviewAuthor::Merchant;
    reply.author_id = merchant_id;
    reply.text = std::move(text);
    reply.step = step;
    out.push_back({r.review_id, std::move(reply)});
  }
  return out;
}

}  // namespace recarena
