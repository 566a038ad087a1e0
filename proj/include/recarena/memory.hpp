#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/domain.hpp"
#include "recarena/text.hpp"

namespace recarena {

struct PerceptualMemory {
  std::vector<ItemId> page_item_ids;
  Action action;
  int step = 0;
};

inline void to_json(Json& j, const PerceptualMemory& m) {
  j = Json{{"page_item_ids", m.page_item_ids}, {"action", m.action}, {"step", m.step}};
}

inline void from_json(const Json& j, PerceptualMemory& m) {
  m.page_item_ids = j.at("page_item_ids").get<std::vector<ItemId>>();
  m.action = j.at("action").get<Action>();
  m.step = j.at("step").get<int>();
}

// Compact attribute view of one page entry as remembered by the agent.
struct EnrichedPageEntry {
  ItemId item_id;
  std::string name;
  long like_count = 0;
  long dislike_count = 0;
  long share_count = 0;
  long purchase_count = 0;
  std::optional<double> avg_rating;
};

inline void to_json(Json& j, const EnrichedPageEntry& e) {
  j = Json{{"item_id", e.item_id},       {"name", e.name},
           {"like_count", e.like_count}, {"dislike_count", e.dislike_count},
           {"share_count", e.share_count}, {"purchase_count", e.purchase_count}};
  put_opt(j, "avg_rating", e.avg_rating);
}

inline void from_json(const Json& j, EnrichedPageEntry& e) {
  e.item_id = j.at("item_id").get<std::string>();
  e.name = j.at("name").get<std::string>();
  e.like_count = j.at("like_count").get<long>();
  e.dislike_count = j.at("dislike_count").get<long>();
  e.share_count = j.at("share_count").get<long>();
  e.purchase_count = j.at("purchase_count").get<long>();
  e.avg_rating = get_opt<double>(j, "avg_rating");
}

inline EnrichedPageEntry enrich(const ItemSnapshot& s) {
  EnrichedPageEntry e;
  e.item_id = s.record.item_id;
  e.name = s.record.name;
  e.like_count = s.like_count;
  e.dislike_count = s.dislike_count;
  e.share_count = s.share_count;
  e.purchase_count = s.purchase_count;
  e.avg_rating = s.avg_rating;
  return e;
}

struct CognitiveMemory {
  std::vector<EnrichedPageEntry> page;
  std::string thought;
  Action action;
  int step = 0;
};

inline void to_json(Json& j, const CognitiveMemory& m) {
  j = Json{{"page", m.page}, {"thought", m.thought}, {"action", m.action}, {"step", m.step}};
}

inline void from_json(const Json& j, CognitiveMemory& m) {
  m.page = j.at("page").get<std::vector<EnrichedPageEntry>>();
  m.thought = j.at("thought").get<std::string>();
  m.action = j.at("action").get<Action>();
  m.step = j.at("step").get<int>();
}

using ItemNameLookup = std::function<std::string(const ItemId&)>;

// Text rendering used for relevance scoring: item names plus the action
// label, plus the thought for cognitive entries.
inline std::string render_memory(const PerceptualMemory& m, const ItemNameLookup& name_of) {
  std::ostringstream os;
  for (const auto& id : m.page_item_ids) os << (name_of ? name_of(id) : id) << ' ';
  os << to_string(m.action.kind);
  return os.str();
}

inline std::string render_memory(const CognitiveMemory& m) {
  std::ostringstream os;
  for (const auto& e : m.page) os << e.name << ' ';
  os << to_string(m.action.kind) << ' ' << m.thought;
  return os.str();
}

// Importance score: alpha * exp(-gamma * elapsed) + beta * sim(text, context).
inline double score_memory_text(int memory_step, const std::string& rendered,
                                const std::string& reasoning_context, int now,
                                const RetrievalParams& params) {
  if (now < memory_step)
    throw std::invalid_argument("score_memory: memory step is in the future");
  const double elapsed = double(now - memory_step);
  return params.alpha * std::exp(-params.gamma * elapsed) +
         params.beta * text::similarity(rendered, reasoning_context);
}

inline double score_memory(const PerceptualMemory& m, const std::string& reasoning_context,
                           int now, const RetrievalParams& params,
                           const ItemNameLookup& name_of = nullptr) {
  return score_memory_text(m.step, render_memory(m, name_of), reasoning_context, now, params);
}

inline double score_memory(const CognitiveMemory& m, const std::string& reasoning_context,
                           int now, const RetrievalParams& params) {
  return score_memory_text(m.step, render_memory(m), reasoning_context, now, params);
}

// Per-agent store of both memory types. Steps are strictly increasing within
// each type.
class MemoryStore {
 public:
  void record_perceptual(std::vector<ItemId> page_item_ids, Action action, int step) {
    if (!perceptual_.empty() && step <= perceptual_.back().step)
      throw std::invalid_argument("record_perceptual: step not strictly increasing");
    perceptual_.push_back({std::move(page_item_ids), std::move(action), step});
  }

  void record_cognitive(std::vector<EnrichedPageEntry> page, std::string thought, Action action,
                        int step) {
    if (thought.empty()) throw std::invalid_argument("record_cognitive: thought must be non-empty");
    if (!cognitive_.empty() && step <= cognitive_.back().step)
      throw std::invalid_argument("record_cognitive: step not strictly increasing");
    cognitive_.push_back({std::move(page), std::move(thought), std::move(action), step});
  }

  const std::vector<PerceptualMemory>& perceptual() const { return perceptual_; }
  const std::vector<CognitiveMemory>& cognitive() const { return cognitive_; }

  void restore(std::vector<PerceptualMemory> p, std::vector<CognitiveMemory> c) {
    perceptual_ = std::move(p);
    cognitive_ = std::move(c);
  }

 private:
  std::vector<PerceptualMemory> perceptual_;
  std::vector<CognitiveMemory> cognitive_;
};

struct RetrievedMemories {
  std::vector<PerceptualMemory> perceptual;
  std::vector<CognitiveMemory> cognitive;
};

// Rank each memory type by importance score (ties broken toward recency) and
// truncate at theta_p / theta_c.
inline RetrievedMemories retrieve(const MemoryStore& store, const std::string& reasoning_context,
                                  int now, const RetrievalParams& params,
                                  const ItemNameLookup& name_of = nullptr) {
  RetrievedMemories out;

  auto rank = [&](const auto& entries, std::size_t cap, auto score_fn) {
    std::vector<std::size_t> order(entries.size());
    std::vector<double> scores(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      order[i] = i;
      scores[i] = score_fn(entries[i]);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return entries[a].step > entries[b].step;
    });
    if (order.size() > cap) order.resize(cap);
    return order;
  };

  const auto p_order = rank(store.perceptual(), params.theta_p, [&](const PerceptualMemory& m) {
    return score_memory(m, reasoning_context, now, params, name_of);
  });
  for (auto i : p_order) out.perceptual.push_back(store.perceptual()[i]);

  const auto c_order = rank(store.cognitive(), params.theta_c, [&](const CognitiveMemory& m) {
    return score_memory(m, reasoning_context, now, params);
  });
  for (auto i : c_order) out.cognitive.push_back(store.cognitive()[i]);

  return out;
}

}  // namespace recarena
