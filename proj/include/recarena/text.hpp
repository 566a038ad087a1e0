#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace recarena::text {

// Bundled English stop-word list used for tf vectors and tf-idf keywords.
// Sentiment scoring deliberately does not use it (negators live here).
inline const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
      "any", "are", "aren't", "as", "at", "be", "because", "been", "before", "being",
      "below", "between", "both", "but", "by", "can", "can't", "cannot", "could",
      "couldn't", "did", "didn't", "do", "does", "doesn't", "doing", "don't", "down",
      "during", "each", "few", "for", "from", "further", "had", "hadn't", "has",
      "hasn't", "have", "haven't", "having", "he", "her", "here", "hers", "herself",
      "him", "himself", "his", "how", "i", "if", "in", "into", "is", "isn't", "it",
      "its", "itself", "just", "me", "more", "most", "mustn't", "my", "myself", "no",
      "nor", "not", "of", "off", "on", "once", "only", "or", "other", "ought", "our",
      "ours", "ourselves", "out", "over", "own", "same", "shan't", "she", "should",
      "shouldn't", "so", "some", "such", "than", "that", "the", "their", "theirs",
      "them", "themselves", "then", "there", "these", "they", "this", "those",
      "through", "to", "too", "under", "until", "up", "very", "was", "wasn't", "we",
      "were", "weren't", "what", "when", "where", "which", "while", "who", "whom",
      "why", "with", "won't", "would", "wouldn't", "you", "your", "yours",
      "yourself", "yourselves"};
  return words;
}

inline bool is_stopword(const std::string& token) {
  return stopwords().count(token) > 0;
}

// Lowercased word tokens. A token is a run of alphanumerics; apostrophes and
// hyphens are kept when they sit between alphanumerics ("don't", "so-so").
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (is_word(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if ((c == '\'' || c == '-') && !cur.empty() && i + 1 < s.size() &&
               is_word(static_cast<unsigned char>(s[i + 1]))) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::vector<std::string> content_tokens(std::string_view s) {
  std::vector<std::string> toks = tokenize(s);
  std::erase_if(toks, [](const std::string& t) { return is_stopword(t); });
  return toks;
}

inline std::size_t whitespace_token_count(std::string_view s) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : s) {
    const bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!ws && !in_token) ++n;
    in_token = !ws;
  }
  return n;
}

using TfVector = std::map<std::string, double>;

inline TfVector tf_vector(std::string_view s) {
  TfVector tf;
  for (auto& t : content_tokens(s)) tf[t] += 1.0;
  return tf;
}

inline double cosine(const TfVector& a, const TfVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a) {
    na += w * w;
    auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : b) nb += w * w;
  if (dot == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

// Lexical similarity in [0, 1]: cosine of stop-worded term-frequency vectors.
inline double similarity(std::string_view a, std::string_view b) {
  return cosine(tf_vector(a), tf_vector(b));
}

// Document-frequency table over a corpus, one document per call to add().
struct DocumentFrequency {
  std::size_t doc_count = 0;
  std::map<std::string, std::size_t> df;

  void add_document(std::string_view doc) {
    ++doc_count;
    std::unordered_set<std::string> seen;
    for (auto& t : content_tokens(doc)) seen.insert(std::move(t));
    for (const auto& t : seen) ++df[t];
  }

  std::size_t of(const std::string& token) const {
    auto it = df.find(token);
    return it == df.end() ? 0 : it->second;
  }
};

struct WeightedToken {
  std::string token;
  double weight = 0.0;
};

// Smoothed idf: ln((1 + N) / (1 + df)) + 1.
inline double smoothed_idf(std::size_t corpus_size, std::size_t df) {
  return std::log((1.0 + double(corpus_size)) / (1.0 + double(df))) + 1.0;
}

// Top-n keywords of a user's concatenated review document, scored tf * idf
// against the given corpus. Ties break lexicographically.
inline std::vector<WeightedToken> tfidf_keywords(const std::vector<std::string>& user_docs,
                                                 const DocumentFrequency& corpus,
                                                 std::size_t n) {
  if (n == 0) return {};
  TfVector tf;
  for (const auto& doc : user_docs)
    for (auto& t : content_tokens(doc)) tf[t] += 1.0;
  std::vector<WeightedToken> scored;
  scored.reserve(tf.size());
  for (const auto& [tok, count] : tf)
    scored.push_back({tok, count * smoothed_idf(corpus.doc_count, corpus.of(tok))});
  std::sort(scored.begin(), scored.end(), [](const WeightedToken& x, const WeightedToken& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.token < y.token;
  });
  if (scored.size() > n) scored.resize(n);
  return scored;
}

}  // namespace recarena::text
