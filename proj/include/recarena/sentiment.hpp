#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "recarena/text.hpp"

namespace recarena {

// Valence lexicon for compound sentiment scoring. The bundled table lives at
// data/vader_lexicon.tsv (token <tab> valence, one entry per line).
struct SentimentLexicon {
  std::unordered_map<std::string, double> valence;
  double alpha_norm = 15.0;

  static SentimentLexicon load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sentiment lexicon: " + path);
    SentimentLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      lex.valence[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
    }
    if (lex.valence.empty()) throw std::runtime_error("empty sentiment lexicon: " + path);
    return lex;
  }
};

namespace detail {
inline const std::unordered_set<std::string>& negators() {
  static const std::unordered_set<std::string> words = {
      "not",     "no",      "never",    "none",    "nobody",  "nothing",  "neither",
      "nor",     "cannot",  "can't",    "don't",   "won't",   "isn't",    "wasn't",
      "aren't",  "weren't", "doesn't",  "didn't",  "couldn't", "shouldn't", "wouldn't",
      "hasn't",  "haven't", "hadn't",   "ain't",   "without", "rarely",   "seldom"};
  return words;
}
}  // namespace detail

// Compound sentiment in [-1, 1]: sum of matched token valences, with the sign
// flipped for a token preceded by a negator within 3 tokens, normalized by
// x / sqrt(x^2 + alpha_norm). Empty or unmatched text scores 0.
inline double sentiment_compound(std::string_view txt, const SentimentLexicon& lex) {
  const auto tokens = text::tokenize(txt);
  double x = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex.valence.find(tokens[i]);
    if (it == lex.valence.end()) continue;
    double v = it->second;
    const std::size_t lookback = i < 3 ? i : 3;
    for (std::size_t k = 1; k <= lookback; ++k) {
      if (detail::negators().count(tokens[i - k])) {
        v = -v;
        break;
      }
    }
    x += v;
  }
  if (x == 0.0) return 0.0;
  return x / std::sqrt(x * x + lex.alpha_norm);
}

}  // namespace recarena
