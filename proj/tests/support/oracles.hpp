// Test-only oracles: independent brute-force implementations used to freeze
// expected values. Nothing here may call the implementation paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "recarena/domain.hpp"
#include "recarena/platform.hpp"
#include "recarena/recommend.hpp"

namespace oracles {

using recarena::ActionKind;
using recarena::ItemId;
using recarena::LogEntry;

// Confusion-matrix recount straight from label/selection pairs.
struct Confusion {
  long tp = 0, tn = 0, fp = 0, fn = 0;
};

inline Confusion recount(const std::vector<std::pair<bool, bool>>& label_sel) {
  Confusion c;
  for (const auto& [label, sel] : label_sel) {
    if (label && sel) ++c.tp;
    if (!label && !sel) ++c.tn;
    if (!label && sel) ++c.fp;
    if (label && !sel) ++c.fn;
  }
  return c;
}

// Dense symmetric-normalized propagation over the stacked (users+items)
// embedding matrix: S = D^{-1/2} A D^{-1/2}, output = mean of S^k E, k=0..K.
// Isolated nodes keep their layer-0 rows, matching the production contract.
inline std::vector<std::vector<double>> dense_propagate(
    std::size_t n_users, std::size_t n_items,
    const std::vector<std::pair<std::size_t, std::size_t>>& edges,
    const std::vector<std::vector<double>>& e0, int layers) {
  const std::size_t n = n_users + n_items;
  const std::size_t d = e0.front().size();
  std::vector<std::vector<double>> adj(n, std::vector<double>(n, 0.0));
  std::vector<double> deg(n, 0.0);
  for (const auto& [u, i] : edges) {
    adj[u][n_users + i] = 1.0;
    adj[n_users + i][u] = 1.0;
    deg[u] += 1.0;
    deg[n_users + i] += 1.0;
  }
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (adj[r][c] != 0.0) s[r][c] = 1.0 / std::sqrt(deg[r] * deg[c]);

  std::vector<std::vector<double>> cur = e0, acc = e0;
  for (int k = 0; k < layers; ++k) {
    std::vector<std::vector<double>> next(n, std::vector<double>(d, 0.0));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (s[r][c] != 0.0)
          for (std::size_t x = 0; x < d; ++x) next[r][x] += s[r][c] * cur[c][x];
    cur = next;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t x = 0; x < d; ++x) acc[r][x] += cur[r][x];
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t x = 0; x < d; ++x) acc[r][x] /= double(layers + 1);
  for (std::size_t r = 0; r < n; ++r)
    if (deg[r] == 0.0) acc[r] = e0[r];
  return acc;
}

// Central finite differences of a scalar function of one matrix entry.
template <typename F>
double central_difference(F&& f, double& cell, double h) {
  const double saved = cell;
  cell = saved + h;
  const double up = f();
  cell = saved - h;
  const double down = f();
  cell = saved;
  return (up - down) / (2.0 * h);
}

// Counter deltas recovered from the event log: per-item action counts plus
// intervention deltas.
struct CounterDeltas {
  std::map<ItemId, long> likes, dislikes, shares, purchases, reviews;
  std::map<ItemId, double> rating_sum;
  std::map<ItemId, long> rating_count;
  std::map<std::string, long> review_likes, review_dislikes;
};

inline CounterDeltas recount_log(const std::vector<LogEntry>& log) {
  CounterDeltas d;
  for (const auto& e : log) {
    if (e.type == LogEntry::Type::Action) {
      const auto& a = e.action.action;
      switch (a.kind) {
        case ActionKind::LikeProduct: ++d.likes[*a.target_item]; break;
        case ActionKind::DislikeProduct: ++d.dislikes[*a.target_item]; break;
        case ActionKind::ShareProduct: ++d.shares[*a.target_item]; break;
        case ActionKind::PurchaseProduct: ++d.purchases[*a.target_item]; break;
        case ActionKind::CreateReview:
          ++d.reviews[*a.target_item];
          if (a.rating) {
            d.rating_sum[*a.target_item] += *a.rating;
            ++d.rating_count[*a.target_item];
          }
          break;
        case ActionKind::LikeReview: ++d.review_likes[*a.target_review]; break;
        case ActionKind::DislikeReview: ++d.review_dislikes[*a.target_review]; break;
        case ActionKind::DoNothing: break;
      }
    } else if (e.type == LogEntry::Type::Intervention) {
      const auto& iv = e.intervention;
      const ItemId& item = iv.intervention.item_id;
      auto delta = [&](const char* key) {
        auto it = iv.deltas.find(key);
        return it == iv.deltas.end() ? 0.0 : it->second;
      };
      d.reviews[item] += long(delta("reviews"));
      d.purchases[item] += long(delta("purchase_count"));
      d.rating_sum[item] += delta("rating_sum");
      d.rating_count[item] += long(delta("rating_count"));
    }
  }
  return d;
}

// Pairwise-comparison ranking oracle: O(n^2) selection of the best remaining
// element under (score desc, step desc).
inline std::vector<std::size_t> selection_sort_order(const std::vector<double>& scores,
                                                     const std::vector<int>& steps) {
  std::vector<std::size_t> remaining(scores.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> order;
  while (!remaining.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k) {
      const std::size_t a = remaining[k], b = remaining[best];
      if (scores[a] > scores[b] || (scores[a] == scores[b] && steps[a] > steps[b])) best = k;
    }
    order.push_back(remaining[best]);
    remaining.erase(remaining.begin() + long(best));
  }
  return order;
}

// AUC over held-out positives vs never-interacted items, by pairwise
// comparison of model scores.
inline double auc(const recarena::TrainedModel& model,
                  const std::vector<std::pair<recarena::UserId, ItemId>>& heldout_positives,
                  const std::map<recarena::UserId, std::set<ItemId>>& all_positives,
                  const std::vector<ItemId>& items) {
  double wins = 0.0, total = 0.0;
  for (const auto& [user, pos] : heldout_positives) {
    const double pos_score = recarena::model_score(model, user, pos);
    auto known = all_positives.find(user);
    for (const auto& item : items) {
      if (known != all_positives.end() && known->second.count(item)) continue;
      const double neg_score = recarena::model_score(model, user, item);
      total += 1.0;
      if (pos_score > neg_score) wins += 1.0;
      else if (pos_score == neg_score) wins += 0.5;
    }
  }
  return total == 0.0 ? 0.0 : wins / total;
}

}  // namespace oracles
