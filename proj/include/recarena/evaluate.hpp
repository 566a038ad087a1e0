#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/agent.hpp"
#include "recarena/domain.hpp"
#include "recarena/gateway.hpp"
#include "recarena/ingest.hpp"
#include "recarena/platform.hpp"
#include "recarena/profiling.hpp"
#include "recarena/rng.hpp"

namespace recarena {

inline constexpr std::size_t kEvalSetSize = 20;

// One 1:m credibility sample: 20 items with ground-truth labels and the
// agent's selections.
struct EvalSample {
  UserId user_id;
  std::vector<ItemId> items;
  std::vector<bool> labels;      // truly interacted?
  std::vector<bool> selections;  // agent chose?
};

inline void to_json(Json& j, const EvalSample& s) {
  j = Json{{"user_id", s.user_id}, {"items", s.items}, {"labels", s.labels},
           {"selections", s.selections}};
}

inline void from_json(const Json& j, EvalSample& s) {
  s.user_id = j.at("user_id").get<std::string>();
  s.items = j.at("items").get<std::vector<ItemId>>();
  s.labels = j.at("labels").get<std::vector<bool>>();
  s.selections = get_or<std::vector<bool>>(j, "selections", {});
}

// Labeled 20-item set for one user: 20/(1+m) positives from the history, the
// rest sampled from never-interacted items, order shuffled by seed.
inline EvalSample build_eval_set(const UserId& user,
                                 const std::vector<HistoricalInteraction>& history,
                                 const std::map<ItemId, ItemRecord>& catalog, int m,
                                 std::uint64_t seed) {
  if (m != 1 && m != 3 && m != 9)
    throw std::invalid_argument("build_eval_set: m must be one of {1, 3, 9}");
  const std::size_t n_pos = kEvalSetSize / std::size_t(1 + m);

  std::set<ItemId> interacted;
  std::vector<ItemId> history_items;
  for (const auto& h : history)
    if (interacted.insert(h.item_id).second) history_items.push_back(h.item_id);
  if (history_items.size() < n_pos)
    throw std::invalid_argument("build_eval_set: user has fewer than " + std::to_string(n_pos) +
                                " distinct historical items");

  std::vector<ItemId> never;
  for (const auto& [id, rec] : catalog)
    if (!interacted.count(id)) never.push_back(id);
  const std::size_t n_neg = kEvalSetSize - n_pos;
  if (never.size() < n_neg)
    throw std::invalid_argument("build_eval_set: catalog has fewer than " +
                                std::to_string(n_neg) + " never-interacted items");

  Rng rng(seed);
  EvalSample sample;
  sample.user_id = user;
  for (auto idx : rng.sample_indices(history_items.size(), n_pos)) {
    sample.items.push_back(history_items[idx]);
    sample.labels.push_back(true);
  }
  for (auto idx : rng.sample_indices(never.size(), n_neg)) {
    sample.items.push_back(never[idx]);
    sample.labels.push_back(false);
  }
  std::vector<std::size_t> order(kEvalSetSize);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  EvalSample shuffled;
  shuffled.user_id = user;
  for (auto i : order) {
    shuffled.items.push_back(sample.items[i]);
    shuffled.labels.push_back(sample.labels[i]);
  }
  shuffled.selections.assign(kEvalSetSize, false);
  return shuffled;
}

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

inline void to_json(Json& j, const Metrics& m) {
  j = Json{{"accuracy", m.accuracy},
           {"precision", m.precision},
           {"recall", m.recall},
           {"f1", m.f1},
           {"precision_undefined", m.precision_undefined},
           {"recall_undefined", m.recall_undefined}};
}

// Micro-averaged over all (agent, item) decisions. Undefined ratios report 0
// with a flag.
inline Metrics aggregate_metrics(const std::vector<EvalSample>& samples) {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  for (const auto& s : samples) {
    if (s.selections.size() != s.items.size())
      throw std::invalid_argument("aggregate_metrics: sample is missing selections");
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      const bool label = s.labels[i];
      const bool sel = s.selections[i];
      if (label && sel) ++tp;
      else if (!label && !sel) ++tn;
      else if (!label && sel) ++fp;
      else ++fn;
    }
  }
  Metrics m;
  const long total = tp + tn + fp + fn;
  m.accuracy = total == 0 ? 0.0 : double(tp + tn) / double(total);
  if (tp + fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = double(tp) / double(tp + fp);
  }
  if (tp + fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = double(tp) / double(tp + fn);
  }
  m.f1 = (m.precision + m.recall) == 0.0 ? 0.0
                                         : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

// ---------------------------------------------------------------------------
// Pairwise LLM judging

inline double adjusted_win_rate(long win, long loss, long tie) {
  if (win < 0 || loss < 0 || tie < 0)
    throw std::invalid_argument("adjusted_win_rate: counts must be non-negative");
  const long total = win + loss + tie;
  if (total == 0) throw std::invalid_argument("adjusted_win_rate: zero total");
  return (double(win) + 0.5 * double(tie)) / double(total);
}

enum class JudgeOutcome { Win, Loss, Tie };

inline const char* to_string(JudgeOutcome o) {
  switch (o) {
    case JudgeOutcome::Win: return "win";
    case JudgeOutcome::Loss: return "loss";
    case JudgeOutcome::Tie: return "tie";
  }
  return "unknown";
}

struct JudgeVerdict {
  std::string pair_id;
  char first_pass = 'A';   // method preferred when A is shown first
  char second_pass = 'A';  // method preferred when B is shown first
  JudgeOutcome outcome = JudgeOutcome::Tie;
  bool valid = true;
};

inline void to_json(Json& j, const JudgeVerdict& v) {
  j = Json{{"pair_id", v.pair_id},
           {"first_pass", std::string(1, v.first_pass)},
           {"second_pass", std::string(1, v.second_pass)},
           {"outcome", to_string(v.outcome)},
           {"valid", v.valid}};
}

inline void from_json(const Json& j, JudgeVerdict& v) {
  v.pair_id = j.at("pair_id").get<std::string>();
  v.first_pass = j.at("first_pass").get<std::string>().at(0);
  v.second_pass = j.at("second_pass").get<std::string>().at(0);
  const std::string o = j.at("outcome").get<std::string>();
  v.outcome = o == "win" ? JudgeOutcome::Win : o == "loss" ? JudgeOutcome::Loss : JudgeOutcome::Tie;
  v.valid = get_or<bool>(j, "valid", true);
}

namespace detail {

// The judge must answer with token 1 or 2 (first or second presented).
inline int parse_judge_choice(const std::string& text) {
  for (char c : text) {
    if (c == '1') return 1;
    if (c == '2') return 2;
    if (!std::isspace(static_cast<unsigned char>(c))) break;
  }
  // tolerate a little prose before the verdict token
  const auto pos1 = text.find('1');
  const auto pos2 = text.find('2');
  if (pos1 == std::string::npos && pos2 == std::string::npos)
    throw FormatError("judge output has no verdict token");
  if (pos1 == std::string::npos) return 2;
  if (pos2 == std::string::npos) return 1;
  return pos1 < pos2 ? 1 : 2;
}

}  // namespace detail

// Order-swapped pairwise judgment: sample A wins only if it is preferred in
// both presentation orders; symmetric for losses; everything else ties.
// Gateway failures mark the verdict invalid so it drops out of the totals.
inline JudgeVerdict pairwise_judge(const std::string& pair_id, const std::string& sample_a,
                                   const std::string& sample_b, ChatBackend& judge,
                                   const PromptLibrary& prompts, const RetryPolicy& retry = {}) {
  JudgeVerdict v;
  v.pair_id = pair_id;
  auto ask = [&](const std::string& first, const std::string& second) {
    ChatRequest req;
    req.messages = {
        {"user", prompts.render("judge_pairwise", {{"sample_1", first}, {"sample_2", second}})}};
    return detail::parse_judge_choice(llm_chat(req, judge, retry).text);
  };
  try {
    const int pass1 = ask(sample_a, sample_b);  // 1 -> A, 2 -> B
    const int pass2 = ask(sample_b, sample_a);  // 1 -> B, 2 -> A
    v.first_pass = pass1 == 1 ? 'A' : 'B';
    v.second_pass = pass2 == 1 ? 'B' : 'A';
    if (v.first_pass == 'A' && v.second_pass == 'A') v.outcome = JudgeOutcome::Win;
    else if (v.first_pass == 'B' && v.second_pass == 'B') v.outcome = JudgeOutcome::Loss;
    else v.outcome = JudgeOutcome::Tie;
  } catch (const std::exception&) {
    v.valid = false;
  }
  return v;
}

struct JudgeTotals {
  long win = 0;
  long loss = 0;
  long tie = 0;
  long invalid = 0;

  void add(const JudgeVerdict& v) {
    if (!v.valid) {
      ++invalid;
      return;
    }
    switch (v.outcome) {
      case JudgeOutcome::Win: ++win; break;
      case JudgeOutcome::Loss: ++loss; break;
      case JudgeOutcome::Tie: ++tie; break;
    }
  }

  double adjusted_win_rate_value() const { return adjusted_win_rate(win, loss, tie); }
};

// Rendered simulation sample for judging and export: profile, retrieved
// memories, behavior trace.
inline std::string render_simulation_sample(const UserProfile& profile,
                                            const RetrievedMemories& memories,
                                            const std::vector<EventRecord>& trace,
                                            const ItemNameLookup& name_of = nullptr) {
  std::ostringstream os;
  os << "Profile:\n" << render_profile_text(profile) << "\n";
  os << "Memories:\n" << render_memories_text(memories, name_of);
  os << "Behavior trace:\n";
  for (const auto& e : trace) {
    os << "- step " << e.step << ": " << to_string(e.action.kind);
    if (e.action.target_item)
      os << " on " << (name_of ? name_of(*e.action.target_item) : *e.action.target_item);
    if (e.thought && !e.thought->empty()) os << " (thought: " << *e.thought << ")";
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Macro-level distribution comparisons

// Proportions over the requested action kinds, in the given order.
inline std::vector<double> action_distribution(const std::vector<LogEntry>& log,
                                               const std::vector<ActionKind>& kinds,
                                               bool* flagged_zero = nullptr) {
  std::vector<double> counts(kinds.size(), 0.0);
  for (const auto& e : log) {
    if (e.type != LogEntry::Type::Action) continue;
    for (std::size_t k = 0; k < kinds.size(); ++k)
      if (e.action.action.kind == kinds[k]) counts[k] += 1.0;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  if (flagged_zero) *flagged_zero = total == 0.0;
  if (total == 0.0) return counts;
  for (double& c : counts) c /= total;
  return counts;
}

inline const std::vector<ActionKind>& default_distribution_kinds() {
  static const std::vector<ActionKind> kinds = {ActionKind::LikeProduct,
                                                ActionKind::DislikeProduct,
                                                ActionKind::CreateReview};
  return kinds;
}

// Jensen-Shannon divergence with natural log, in [0, ln 2].
inline double compare_distributions(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("compare_distributions: mismatched support");
  auto kl_to_mix = [&](const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] <= 0.0) continue;
      const double m = 0.5 * (p[i] + q[i]);
      s += a[i] * std::log(a[i] / m);
    }
    return s;
  };
  return 0.5 * kl_to_mix(p) + 0.5 * kl_to_mix(q);
}

struct TopOverlap {
  std::size_t overlap = 0;
  std::vector<ItemId> top_real;
  std::vector<ItemId> top_sim;
};

inline TopOverlap top_items_overlap(const std::map<ItemId, long>& real_counts,
                                    const std::map<ItemId, long>& sim_counts, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_items_overlap: k must be >= 1");
  auto top_k = [&](const std::map<ItemId, long>& counts) {
    std::vector<std::pair<ItemId, long>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::vector<ItemId> out;
    for (std::size_t i = 0; i < v.size() && i < k; ++i) out.push_back(v[i].first);
    return out;
  };
  TopOverlap o;
  o.top_real = top_k(real_counts);
  o.top_sim = top_k(sim_counts);
  const std::set<ItemId> real_set(o.top_real.begin(), o.top_real.end());
  for (const auto& id : o.top_sim)
    if (real_set.count(id)) ++o.overlap;
  return o;
}

// ---------------------------------------------------------------------------
// Metric-protocol execution with pluggable selection policies.

enum class SelectionPolicy { Oracle, CoinFlip, Gateway };

struct EvalRunConfig {
  int m = 1;
  std::size_t max_samples = 1000;
  SelectionPolicy policy = SelectionPolicy::Oracle;
  double coin_p = 0.5;
  std::uint64_t seed = 7;
};

// Builds one eval sample per eligible user (cycling when max_samples exceeds
// the user count) and fills selections by the chosen policy.
inline std::vector<EvalSample> run_metric_protocol(const Dataset& ds,
                                                   const std::map<UserId, UserProfile>& pool,
                                                   const EvalRunConfig& cfg,
                                                   ChatBackend* backend = nullptr,
                                                   const PromptLibrary* prompts = nullptr) {
  const std::size_t n_pos = kEvalSetSize / std::size_t(1 + cfg.m);
  std::vector<const UserId*> eligible;
  for (const auto& [user, history] : ds.users) {
    std::set<ItemId> distinct;
    for (const auto& h : history) distinct.insert(h.item_id);
    if (distinct.size() >= n_pos &&
        ds.catalog.size() >= distinct.size() + (kEvalSetSize - n_pos))
      eligible.push_back(&user);
  }
  if (eligible.empty()) throw std::runtime_error("no users eligible for the 1:m protocol");

  Rng rng(cfg.seed);
  std::vector<EvalSample> samples;
  for (std::size_t n = 0; n < cfg.max_samples; ++n) {
    const UserId& user = *eligible[n % eligible.size()];
    EvalSample s = build_eval_set(user, ds.users.at(user), ds.catalog, cfg.m,
                                  mix_seed(cfg.seed, n));
    switch (cfg.policy) {
      case SelectionPolicy::Oracle:
        s.selections.assign(s.labels.begin(), s.labels.end());
        break;
      case SelectionPolicy::CoinFlip:
        for (std::size_t i = 0; i < s.selections.size(); ++i)
          s.selections[i] = rng.chance(cfg.coin_p);
        break;
      case SelectionPolicy::Gateway: {
        if (!backend || !prompts)
          throw std::invalid_argument("gateway selection policy requires backend and prompts");
        std::ostringstream items;
        for (std::size_t i = 0; i < s.items.size(); ++i) {
          auto it = ds.catalog.find(s.items[i]);
          items << i << ". " << (it != ds.catalog.end() ? it->second.name : s.items[i]) << "\n";
        }
        auto profile_it = pool.find(user);
        ChatRequest req;
        req.messages = {{"user", prompts->render(
                                     "eval_select",
                                     {{"profile", profile_it != pool.end()
                                                      ? render_profile_text(profile_it->second)
                                                      : std::string("(unknown)")},
                                      {"items", items.str()}})}};
        const ChatResponse resp = llm_chat(req, *backend);
        const auto j = try_extract_json_block(resp.text);
        if (j && j->contains("selections")) {
          for (const auto& idx : j->at("selections")) {
            const std::size_t i = idx.get<std::size_t>();
            if (i < s.selections.size()) s.selections[i] = true;
          }
        }
        break;
      }
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

// Eval report JSON: {method, m, accuracy, precision, recall, f1}.
inline Json eval_report(const std::string& method, int m, const Metrics& metrics) {
  return Json{{"method", method},       {"m", m},
              {"accuracy", metrics.accuracy}, {"precision", metrics.precision},
              {"recall", metrics.recall},     {"f1", metrics.f1}};
}

}  // namespace recarena
