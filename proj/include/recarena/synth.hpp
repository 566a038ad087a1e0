#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "recarena/agent.hpp"
#include "recarena/ingest.hpp"
#include "recarena/rng.hpp"

namespace recarena::synth {

// Deterministic restaurant-flavored fixture corpus for desk-scale runs,
// tests, and the scripted experiments.
struct SynthConfig {
  std::size_t n_users = 200;
  std::size_t n_items = 12;
  std::size_t history_len = 8;
  double review_prob = 0.5;
  std::uint64_t seed = 99;
};

inline const std::vector<std::string>& category_pool() {
  static const std::vector<std::string> v = {"burgers", "pizza",   "sushi",  "cafe",  "bbq",
                                             "noodles", "salads",  "dessert", "tacos", "ramen"};
  return v;
}

inline std::string item_name_for(std::size_t i) {
  static const std::vector<std::string> first = {"Golden", "Urban",  "Blue",   "Sunny",
                                                 "Rustic", "Velvet", "Copper", "Lucky"};
  static const std::vector<std::string> second = {"Wok",   "Table", "Fork",   "Kitchen",
                                                  "Grill", "Spoon", "Garden", "Corner"};
  return first[i % first.size()] + " " + second[(i / first.size()) % second.size()] + " " +
         std::to_string(i);
}

inline std::vector<RawRecord> make_raw_records(const SynthConfig& cfg) {
  Rng rng(cfg.seed);
  const auto& cats = category_pool();

  struct ItemInfo {
    ItemId id;
    std::string name;
    std::vector<std::string> categories;
  };
  std::vector<ItemInfo> items;
  for (std::size_t i = 0; i < cfg.n_items; ++i) {
    ItemInfo info;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "it_%03zu", i);
    info.id = buf;
    info.name = item_name_for(i);
    info.categories.push_back(cats[i % cats.size()]);
    if (rng.chance(0.4)) info.categories.push_back(cats[(i + 3) % cats.size()]);
    items.push_back(std::move(info));
  }

  std::vector<RawRecord> records;
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u_%04zu", u);
    const UserId user = buf;
    const std::string pref_a = cats[u % cats.size()];
    const std::string pref_b = cats[(u + 1) % cats.size()];

    // Preferred-category items first so histories skew toward the user's taste.
    std::vector<std::size_t> preferred, rest;
    for (std::size_t i = 0; i < items.size(); ++i) {
      bool pref = false;
      for (const auto& c : items[i].categories)
        if (c == pref_a || c == pref_b) pref = true;
      (pref ? preferred : rest).push_back(i);
    }

    const std::size_t len = std::min(cfg.history_len, items.size());
    std::vector<std::size_t> chosen;
    auto pref_order = rng.sample_indices(preferred.size(), preferred.size());
    auto rest_order = rng.sample_indices(rest.size(), rest.size());
    for (auto i : pref_order)
      if (chosen.size() < len && (chosen.size() < (len * 3) / 4 || rest.empty()))
        chosen.push_back(preferred[i]);
    for (auto i : rest_order)
      if (chosen.size() < len) chosen.push_back(rest[i]);

    for (auto item_idx : chosen) {
      const auto& info = items[item_idx];
      bool liked = false;
      for (const auto& c : info.categories)
        if (c == pref_a || c == pref_b) liked = true;
      RawRecord r;
      r.user_id = user;
      r.item_id = info.id;
      r.item_name = info.name;
      r.categories = info.categories;
      r.region = "California";
      r.merchant_id = "m-" + info.id;
      r.rating = liked ? int(4 + rng.below(2)) : int(1 + rng.below(3));
      if (rng.chance(cfg.review_prob)) {
        const auto& pool = r.rating >= 4   ? recarena::detail::positive_review_texts()
                           : r.rating <= 2 ? recarena::detail::negative_review_texts()
                                           : recarena::detail::neutral_review_texts();
        r.review_text = pool[rng.below(pool.size())];
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

inline Dataset make_dataset(const SynthConfig& cfg) {
  return filter_dataset(make_raw_records(cfg), 0, 0);
}

inline void write_raw_jsonl(const std::vector<RawRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write raw corpus: " + path);
  for (const auto& r : records) out << Json(r).dump() << "\n";
}

}  // namespace recarena::synth
