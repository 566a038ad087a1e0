#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/domain.hpp"
#include "recarena/gateway.hpp"
#include "recarena/prompts.hpp"
#include "recarena/rng.hpp"

namespace recarena {

struct RawRecord {
  UserId user_id;
  ItemId item_id;
  int rating = 0;
  std::optional<std::string> review_text;
  std::string item_name;
  std::vector<std::string> categories;
  std::optional<std::string> region;
  std::optional<std::int64_t> timestamp;
  // Optional enrichments tolerated on input.
  std::optional<std::string> brand;
  std::optional<std::string> description;
  std::optional<std::string> merchant_id;
};

inline void to_json(Json& j, const RawRecord& r) {
  j = Json{{"user_id", r.user_id},   {"item_id", r.item_id}, {"rating", r.rating},
           {"item_name", r.item_name}, {"categories", r.categories}};
  put_opt(j, "review", r.review_text);
  put_opt(j, "region", r.region);
  put_opt(j, "ts", r.timestamp);
  put_opt(j, "brand", r.brand);
  put_opt(j, "description", r.description);
  put_opt(j, "merchant_id", r.merchant_id);
}

inline void from_json(const Json& j, RawRecord& r) {
  r.user_id = j.at("user_id").get<std::string>();
  r.item_id = j.at("item_id").get<std::string>();
  if (r.user_id.empty()) throw std::invalid_argument("user_id empty");
  if (r.item_id.empty()) throw std::invalid_argument("item_id empty");
  r.rating = j.at("rating").get<int>();
  if (r.rating < 1 || r.rating > 5) throw std::invalid_argument("rating out of range");
  r.review_text = get_opt<std::string>(j, "review");
  r.item_name = get_or<std::string>(j, "item_name", r.item_id);
  r.categories = get_or<std::vector<std::string>>(j, "categories", {});
  r.region = get_opt<std::string>(j, "region");
  r.timestamp = get_opt<std::int64_t>(j, "ts");
  r.brand = get_opt<std::string>(j, "brand");
  r.description = get_opt<std::string>(j, "description");
  r.merchant_id = get_opt<std::string>(j, "merchant_id");
}

struct ParseResult {
  std::vector<RawRecord> records;
  std::size_t malformed = 0;
};

class CorpusFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSONL interaction log, one record per line. Malformed lines are counted;
// more than half malformed aborts with a corpus-format error.
inline ParseResult parse_interaction_log(std::istream& in) {
  ParseResult out;
  std::string line;
  std::size_t total = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++total;
    try {
      out.records.push_back(Json::parse(line).get<RawRecord>());
    } catch (const std::exception&) {
      ++out.malformed;
    }
  }
  if (total > 0 && out.malformed * 2 > total)
    throw CorpusFormatError("more than half of the input lines are malformed (" +
                            std::to_string(out.malformed) + "/" + std::to_string(total) + ")");
  return out;
}

inline ParseResult parse_interaction_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open interaction log: " + path);
  return parse_interaction_log(in);
}

struct Dataset {
  std::map<UserId, std::vector<HistoricalInteraction>> users;
  std::map<ItemId, ItemRecord> catalog;
};

using CategoryPredicate = std::function<bool(const std::vector<std::string>&)>;
using RegionPredicate = std::function<bool(const std::optional<std::string>&)>;

struct FilterReport {
  std::size_t dropped_by_predicate = 0;
  std::size_t dropped_empty_categories = 0;
  std::size_t rounds = 0;
};

// Applies category/region predicates, then iterates the user-count and
// item-count filters to a fixed point: the returned dataset satisfies
// count(user) > min_user_interactions and count(item) > min_item_interactions
// simultaneously. Thresholds are strict.
inline Dataset filter_dataset(const std::vector<RawRecord>& records,
                              std::size_t min_user_interactions,
                              std::size_t min_item_interactions,
                              const CategoryPredicate& category_predicate = nullptr,
                              const RegionPredicate& region_predicate = nullptr,
                              FilterReport* report = nullptr) {
  FilterReport local;
  FilterReport& rep = report ? *report : local;

  // Item info comes from the first record mentioning the item.
  std::map<ItemId, ItemRecord> info;
  std::vector<const RawRecord*> live;
  for (const auto& r : records) {
    if (r.categories.empty()) {
      ++rep.dropped_empty_categories;
      continue;
    }
    if (category_predicate && !category_predicate(r.categories)) {
      ++rep.dropped_by_predicate;
      continue;
    }
    if (region_predicate && !region_predicate(r.region)) {
      ++rep.dropped_by_predicate;
      continue;
    }
    live.push_back(&r);
    if (!info.count(r.item_id)) {
      ItemRecord rec;
      rec.item_id = r.item_id;
      rec.name = r.item_name;
      rec.brand = r.brand;
      rec.categories = r.categories;
      rec.description = r.description.value_or("");
      rec.merchant_id = r.merchant_id.value_or("m-" + r.item_id);
      rec.region = r.region;
      info.emplace(r.item_id, std::move(rec));
    }
  }

  std::set<UserId> dead_users;
  std::set<ItemId> dead_items;
  bool changed = true;
  while (changed) {
    changed = false;
    ++rep.rounds;
    std::map<ItemId, std::size_t> item_counts;
    for (const auto* r : live)
      if (!dead_users.count(r->user_id) && !dead_items.count(r->item_id))
        ++item_counts[r->item_id];
    for (const auto& [id, rec] : info) {
      if (dead_items.count(id)) continue;
      auto it = item_counts.find(id);
      if (it == item_counts.end() || it->second <= min_item_interactions) {
        dead_items.insert(id);
        changed = true;
      }
    }
    std::map<UserId, std::size_t> user_counts;
    for (const auto* r : live)
      if (!dead_users.count(r->user_id) && !dead_items.count(r->item_id))
        ++user_counts[r->user_id];
    for (const auto& [u, n] : user_counts) {
      if (n <= min_user_interactions) {
        dead_users.insert(u);
        changed = true;
      }
    }
    // Users that lost every interaction also go.
    for (const auto* r : live) {
      if (dead_users.count(r->user_id)) continue;
      if (!user_counts.count(r->user_id)) dead_users.insert(r->user_id);
    }
  }

  Dataset ds;
  for (const auto* r : live) {
    if (dead_users.count(r->user_id) || dead_items.count(r->item_id)) continue;
    ds.users[r->user_id].push_back({r->item_id, r->rating, r->review_text});
  }
  // At the fixed point every live item still has at least one live interaction.
  for (auto& [id, rec] : info)
    if (!dead_items.count(id)) ds.catalog.emplace(id, rec);
  return ds;
}

// Uniform sample of min(n, |history|) interactions without replacement,
// deterministic for a fixed seed. Order follows the draw.
inline std::vector<HistoricalInteraction> sample_history(
    const std::vector<HistoricalInteraction>& history, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_history: n must be >= 1");
  Rng rng(seed);
  const auto idx = rng.sample_indices(history.size(), n);
  std::vector<HistoricalInteraction> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(history[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Dataset persistence: items.jsonl + interactions.jsonl in a directory.

inline void save_dataset(const Dataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream items(dir + "/items.jsonl");
  if (!items) throw std::runtime_error("cannot write " + dir + "/items.jsonl");
  for (const auto& [id, rec] : ds.catalog) items << Json(rec).dump() << "\n";
  std::ofstream inter(dir + "/interactions.jsonl");
  if (!inter) throw std::runtime_error("cannot write " + dir + "/interactions.jsonl");
  for (const auto& [user, history] : ds.users) {
    for (const auto& h : history) {
      Json j{{"user_id", user}, {"item_id", h.item_id}, {"rating", h.rating}};
      put_opt(j, "review_text", h.review_text);
      inter << j.dump() << "\n";
    }
  }
}

inline Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  std::ifstream items(dir + "/items.jsonl");
  if (!items) throw std::runtime_error("cannot open " + dir + "/items.jsonl");
  std::string line;
  while (std::getline(items, line)) {
    if (line.empty()) continue;
    auto rec = Json::parse(line).get<ItemRecord>();
    ds.catalog.emplace(rec.item_id, std::move(rec));
  }
  std::ifstream inter(dir + "/interactions.jsonl");
  if (!inter) throw std::runtime_error("cannot open " + dir + "/interactions.jsonl");
  while (std::getline(inter, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    HistoricalInteraction h;
    h.item_id = j.at("item_id").get<std::string>();
    h.rating = j.at("rating").get<int>();
    h.review_text = get_opt<std::string>(j, "review_text");
    if (!ds.catalog.count(h.item_id))
      throw std::runtime_error("interaction references unknown item " + h.item_id);
    ds.users[j.at("user_id").get<std::string>()].push_back(std::move(h));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Item information augmentation, cached by item_id so re-runs are idempotent.

class AugmentationCache {
 public:
  AugmentationCache() = default;

  static AugmentationCache load(const std::string& path) {
    AugmentationCache c;
    c.path_ = path;
    std::ifstream in(path);
    if (in) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        c.entries_[j.at("item_id").get<std::string>()] = j.at("augmented").get<std::string>();
      }
    }
    return c;
  }

  std::optional<std::string> lookup(const ItemId& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const ItemId& id, const std::string& text) {
    entries_[id] = text;
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      out << Json{{"item_id", id}, {"augmented", text}}.dump() << "\n";
    }
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::string path_;
  std::map<ItemId, std::string> entries_;
};

// Fills item.augmented_description via the gateway. Returns false (and leaves
// the item untouched) when the gateway fails after retries.
inline bool augment_item(ItemRecord& item, ChatBackend& backend, const PromptLibrary& prompts,
                         AugmentationCache& cache, const RetryPolicy& retry = {}) {
  if (auto cached = cache.lookup(item.item_id)) {
    item.augmented_description = *cached;
    return true;
  }
  std::string cats;
  for (std::size_t i = 0; i < item.categories.size(); ++i) {
    if (i) cats += ", ";
    cats += item.categories[i];
  }
  ChatRequest req;
  req.messages = {{"user", prompts.render("item_augment", {{"name", item.name},
                                                           {"categories", cats},
                                                           {"description", item.description}})}};
  try {
    const ChatResponse resp = llm_chat(req, backend, retry);
    cache.put(item.item_id, resp.text);
    item.augmented_description = resp.text;
    return true;
  } catch (const GatewayError&) {
    return false;
  }
}

}  // namespace recarena
