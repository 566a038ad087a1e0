#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/agent.hpp"
#include "recarena/platform.hpp"
#include "recarena/sentiment.hpp"

namespace recarena {

class CurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CotSample {
  std::string sample_id;
  std::string prompt;
  std::string response;
  std::optional<AgentDecision> parsed;
  UserId user_id;
  std::string run_id;
  int step = 0;
  AgentId agent_id;
};

inline void to_json(Json& j, const CotSample& s) {
  j = Json{{"sample_id", s.sample_id}, {"prompt", s.prompt}, {"response", s.response},
           {"user_id", s.user_id},     {"run_id", s.run_id}, {"step", s.step},
           {"agent_id", s.agent_id}};
}

enum class FilterStage { Format, Preference, Llm, Human };

inline const char* to_string(FilterStage s) {
  switch (s) {
    case FilterStage::Format: return "format";
    case FilterStage::Preference: return "preference";
    case FilterStage::Llm: return "llm";
    case FilterStage::Human: return "human";
  }
  return "unknown";
}

struct FilterVerdict {
  FilterStage stage = FilterStage::Format;
  bool pass = false;
  std::string reason;
  bool valid = true;  // false: stage could not run (gateway down), sample held
};

inline void to_json(Json& j, const FilterVerdict& v) {
  j = Json{{"stage", to_string(v.stage)}, {"pass", v.pass}, {"reason", v.reason},
           {"valid", v.valid}};
}

// One CoT sample per recorded agent-step decision. Runs must have been
// executed with prompt recording enabled.
inline std::vector<CotSample> collect_cot_samples(
    const std::vector<std::vector<DecisionLogEntry>>& runs) {
  std::vector<CotSample> out;
  std::set<std::string> seen;
  for (const auto& run : runs) {
    for (const auto& d : run) {
      if (d.prompt.empty())
        throw CurationError("prompts not recorded: run " + d.run_id +
                            " was executed without prompt recording");
      CotSample s;
      s.sample_id = d.run_id + "/" + std::to_string(d.step) + "/" + d.agent_id;
      if (!seen.insert(s.sample_id).second)
        throw CurationError("duplicate sample id: " + s.sample_id);
      s.prompt = d.prompt;
      s.response = d.response;
      s.user_id = d.user_id;
      s.run_id = d.run_id;
      s.step = d.step;
      s.agent_id = d.agent_id;
      try {
        s.parsed = parse_agent_output(d.response);
      } catch (const FormatError&) {
        s.parsed.reset();
      }
      out.push_back(std::move(s));
    }
  }
  if (out.empty()) throw CurationError("prompts not recorded: no decision entries found");
  return out;
}

inline FilterVerdict format_filter(const CotSample& sample) {
  FilterVerdict v;
  v.stage = FilterStage::Format;
  try {
    parse_agent_output(sample.response);
    v.pass = true;
  } catch (const FormatError& e) {
    v.pass = false;
    v.reason = e.what();
  }
  return v;
}

// Alignment with the user's real interactions: items targeted by positive
// actions (like/share/purchase/positive review) must appear in the real
// history; items targeted by negative actions (dislike/negative review) must
// not. Review polarity comes from the compound sentiment sign.
inline FilterVerdict preference_filter(const CotSample& sample,
                                       const std::set<ItemId>& real_history,
                                       const SentimentLexicon& lexicon) {
  FilterVerdict v;
  v.stage = FilterStage::Preference;
  if (!sample.parsed) {
    v.pass = false;
    v.reason = "sample has no parsed decision";
    return v;
  }
  for (const auto& a : sample.parsed->actions) {
    bool positive = false;
    bool negative = false;
    switch (a.kind) {
      case ActionKind::LikeProduct:
      case ActionKind::ShareProduct:
      case ActionKind::PurchaseProduct:
        positive = true;
        break;
      case ActionKind::DislikeProduct:
        negative = true;
        break;
      case ActionKind::CreateReview: {
        const double s = sentiment_compound(a.review_text.value_or(""), lexicon);
        (s >= 0.0 ? positive : negative) = true;
        break;
      }
      default:
        break;  // do_nothing and review votes pass vacuously
    }
    if (!a.target_item) continue;
    if (positive && !real_history.count(*a.target_item)) {
      v.pass = false;
      v.reason = "positive action on never-interacted item " + *a.target_item;
      return v;
    }
    if (negative && real_history.count(*a.target_item)) {
      v.pass = false;
      v.reason = "negative action on truly-interacted item " + *a.target_item;
      return v;
    }
  }
  v.pass = true;
  return v;
}

// Plausibility/consistency check by a judge model. Expects PASS or
// FAIL: <reason>. Gateway failure marks the verdict invalid (sample held).
inline FilterVerdict llm_filter(const CotSample& sample, ChatBackend& judge,
                                const PromptLibrary& prompts, const RetryPolicy& retry = {}) {
  FilterVerdict v;
  v.stage = FilterStage::Llm;
  ChatRequest req;
  req.messages = {{"user", prompts.render("llm_filter", {{"prompt", sample.prompt},
                                                         {"response", sample.response}})}};
  try {
    const std::string text = llm_chat(req, judge, retry).text;
    const auto first = text.find_first_not_of(" \t\r\n");
    const std::string body = first == std::string::npos ? "" : text.substr(first);
    if (body.rfind("PASS", 0) == 0) {
      v.pass = true;
    } else if (body.rfind("FAIL", 0) == 0) {
      v.pass = false;
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        auto reason = body.substr(colon + 1);
        const auto start = reason.find_first_not_of(" \t");
        v.reason = start == std::string::npos ? "" : reason.substr(start);
      }
    } else {
      v.pass = false;
      v.reason = "unrecognized judge verdict";
    }
  } catch (const GatewayError&) {
    v.valid = false;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Human review queue

inline void export_review_queue(const std::vector<CotSample>& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write review queue: " + path);
  for (const auto& s : samples)
    out << Json{{"sample_id", s.sample_id}, {"prompt", s.prompt}, {"response", s.response}}.dump()
        << "\n";
}

struct HumanDecision {
  bool pass = false;
  std::string reason;
};

// Decisions file: JSONL of {sample_id, pass, reason}. Unknown and duplicate
// sample ids are rejected.
inline std::map<std::string, HumanDecision> import_human_decisions(
    const std::string& path, const std::set<std::string>& known_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open decisions file: " + path);
  std::map<std::string, HumanDecision> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      throw CurationError("malformed decisions file at line " + std::to_string(line_no) + ": " +
                          e.what());
    }
    const std::string id = j.at("sample_id").get<std::string>();
    if (!known_ids.count(id)) throw CurationError("unknown sample_id in decisions file: " + id);
    if (out.count(id)) throw CurationError("duplicate sample_id in decisions file: " + id);
    out[id] = {j.at("pass").get<bool>(), get_or<std::string>(j, "reason", "")};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct CurationOptions {
  bool format = true;
  bool preference = true;
  bool llm = true;
  bool human = true;
  bool auto_human = false;  // treat the human stage as accept-all (mock pipelines)
};

struct CurationOutcome {
  CotSample sample;
  std::vector<FilterVerdict> verdicts;
  bool passed_all = false;
  bool pending = false;  // held: llm stage invalid or human decision missing
};

// Stages run in the fixed order format -> preference -> llm -> human; a
// sample reaches stage k only after passing all earlier enabled stages.
inline std::vector<CurationOutcome> run_curation(
    const std::vector<CotSample>& samples,
    const std::map<UserId, std::set<ItemId>>& real_histories, const SentimentLexicon& lexicon,
    ChatBackend* judge, const PromptLibrary* prompts,
    const std::map<std::string, HumanDecision>* human_decisions,
    const CurationOptions& options = {}) {
  std::vector<CurationOutcome> out;
  for (const auto& s : samples) {
    CurationOutcome o;
    o.sample = s;
    bool alive = true;

    if (alive && options.format) {
      o.verdicts.push_back(format_filter(s));
      alive = o.verdicts.back().pass;
    }
    if (alive && options.preference) {
      auto hist = real_histories.find(s.user_id);
      if (hist == real_histories.end()) throw CurationError("unknown user: " + s.user_id);
      o.verdicts.push_back(preference_filter(s, hist->second, lexicon));
      alive = o.verdicts.back().pass;
    }
    if (alive && options.llm) {
      if (!judge || !prompts) throw CurationError("llm filter requires a judge backend");
      o.verdicts.push_back(llm_filter(s, *judge, *prompts));
      if (!o.verdicts.back().valid) {
        o.pending = true;
        alive = false;
      } else {
        alive = o.verdicts.back().pass;
      }
    }
    if (alive && options.human) {
      FilterVerdict v;
      v.stage = FilterStage::Human;
      if (options.auto_human) {
        v.pass = true;
        v.reason = "auto-accepted";
      } else if (human_decisions && human_decisions->count(s.sample_id)) {
        const auto& d = human_decisions->at(s.sample_id);
        v.pass = d.pass;
        v.reason = d.reason;
      } else {
        o.pending = true;
        alive = false;
      }
      if (!o.pending) {
        o.verdicts.push_back(v);
        alive = v.pass;
      }
    }
    o.passed_all = alive;
    out.push_back(std::move(o));
  }
  return out;
}

// Fine-tune dataset: JSONL of {prompt, response} for every sample that passed
// all stages, ordered by (run_id, step, agent_id). Returns the emitted count.
inline std::size_t emit_finetune_dataset(const std::vector<CurationOutcome>& outcomes,
                                         const std::string& path) {
  std::vector<const CotSample*> passed;
  for (const auto& o : outcomes)
    if (o.passed_all) passed.push_back(&o.sample);
  std::sort(passed.begin(), passed.end(), [](const CotSample* a, const CotSample* b) {
    if (a->run_id != b->run_id) return a->run_id < b->run_id;
    if (a->step != b->step) return a->step < b->step;
    return a->agent_id < b->agent_id;
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fine-tune dataset: " + path);
  for (const auto* s : passed)
    out << Json{{"prompt", s->prompt}, {"response", s->response}}.dump() << "\n";
  return passed.size();
}

inline void save_verdict_ledger(const std::vector<CurationOutcome>& outcomes,
                                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write verdict ledger: " + path);
  for (const auto& o : outcomes) {
    Json j{{"sample_id", o.sample.sample_id},
           {"passed_all", o.passed_all},
           {"pending", o.pending},
           {"verdicts", o.verdicts}};
    out << j.dump() << "\n";
  }
}

}  // namespace recarena
