#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "recarena/evaluate.hpp"
#include "recarena/platform.hpp"
#include "recarena/sentiment.hpp"
#include "recarena/text.hpp"

namespace recarena {

struct LabeledLog {
  std::string label;
  const std::vector<LogEntry>* log = nullptr;
};

// Per-step cumulative count of `kind` actions on `item` over steps 1..T.
inline std::vector<long> cumulative_series(const std::vector<LogEntry>& log, const ItemId& item,
                                           ActionKind kind, int total_steps) {
  std::vector<long> per_step(std::size_t(total_steps) + 1, 0);
  for (const auto& e : log) {
    if (e.type != LogEntry::Type::Action) continue;
    if (e.action.action.kind != kind) continue;
    if (!e.action.action.target_item || *e.action.action.target_item != item) continue;
    if (e.action.step >= 1 && e.action.step <= total_steps) ++per_step[std::size_t(e.action.step)];
  }
  std::vector<long> cum(std::size_t(total_steps), 0);
  long acc = 0;
  for (int t = 1; t <= total_steps; ++t) {
    acc += per_step[std::size_t(t)];
    cum[std::size_t(t) - 1] = acc;
  }
  return cum;
}

// CSV: step, then one cumulative column per run, then pairwise diff columns
// (first run minus each other run).
inline void write_series_csv(const std::string& path, const ItemId& item, ActionKind kind,
                             int total_steps, const std::vector<LabeledLog>& runs) {
  std::vector<std::vector<long>> series;
  for (const auto& r : runs) series.push_back(cumulative_series(*r.log, item, kind, total_steps));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "step";
  for (const auto& r : runs) out << "," << r.label << "_" << to_string(kind) << "_" << item;
  for (std::size_t i = 1; i < runs.size(); ++i)
    out << ",diff_" << runs[0].label << "_minus_" << runs[i].label;
  out << "\n";
  for (int t = 1; t <= total_steps; ++t) {
    out << t;
    for (const auto& s : series) out << "," << s[std::size_t(t) - 1];
    for (std::size_t i = 1; i < series.size(); ++i)
      out << "," << (series[0][std::size_t(t) - 1] - series[i][std::size_t(t) - 1]);
    out << "\n";
  }
}

inline void write_distribution_csv(const std::string& path, const std::vector<LabeledLog>& runs) {
  const auto& kinds = default_distribution_kinds();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "run,kind,proportion\n";
  for (const auto& r : runs) {
    bool zero = false;
    const auto dist = action_distribution(*r.log, kinds, &zero);
    for (std::size_t k = 0; k < kinds.size(); ++k)
      out << r.label << "," << to_string(kinds[k]) << "," << dist[k] << "\n";
  }
}

inline std::vector<std::string> review_texts_in_log(const std::vector<LogEntry>& log) {
  std::vector<std::string> texts;
  for (const auto& e : log) {
    if (e.type == LogEntry::Type::Action && e.action.action.kind == ActionKind::CreateReview &&
        e.action.action.review_text)
      texts.push_back(*e.action.action.review_text);
    if (e.type == LogEntry::Type::Intervention)
      for (const auto& t : e.intervention.intervention.texts) texts.push_back(t);
  }
  return texts;
}

// 20 equal-width compound-score bins over [-1, 1].
inline void write_sentiment_histogram_csv(const std::string& path,
                                          const std::vector<std::string>& texts,
                                          const SentimentLexicon& lexicon) {
  constexpr int bins = 20;
  std::vector<long> counts(bins, 0);
  for (const auto& t : texts) {
    const double s = sentiment_compound(t, lexicon);
    int b = int((s + 1.0) / 2.0 * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    ++counts[std::size_t(b)];
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "bin_low,bin_high,count\n";
  for (int b = 0; b < bins; ++b)
    out << (-1.0 + 2.0 * b / bins) << "," << (-1.0 + 2.0 * (b + 1) / bins) << ","
        << counts[std::size_t(b)] << "\n";
}

// Word-frequency table over review texts (content tokens), the plot-data
// substitute for rendered word clouds.
inline void write_word_frequency_csv(const std::string& path,
                                     const std::vector<std::string>& texts, std::size_t top_n) {
  std::map<std::string, long> counts;
  for (const auto& t : texts)
    for (const auto& tok : text::content_tokens(t)) ++counts[tok];
  std::vector<std::pair<std::string, long>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (v.size() > top_n) v.resize(top_n);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "token,count\n";
  for (const auto& [tok, n] : v) out << tok << "," << n << "\n";
}

}  // namespace recarena
