#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/agent.hpp"
#include "recarena/domain.hpp"
#include "recarena/recommend.hpp"

namespace recarena {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& errors)
      : std::runtime_error(join(errors)), errors_(errors) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& e : errors) os << "\n  " << e;
    return os.str();
  }
  std::vector<std::string> errors_;
};

inline std::vector<std::string> validate_config(const SimulationConfig& c) {
  std::vector<std::string> errors;
  if (c.total_steps < 1) errors.push_back("total_steps: must be >= 1");
  if (c.agent_count < 1) errors.push_back("agent_count: must be >= 1");
  if (c.page_size < 1) errors.push_back("page_size: must be >= 1");
  if (!rec_kind_from_string(c.recommender))
    errors.push_back("recommender: unknown name '" + c.recommender +
                     "' (valid: random, most_popular, mf, lightgcn)");
  const bool known_backend = c.llm_backend == "mock" || c.llm_backend.rfind("script:", 0) == 0 ||
                             c.llm_backend.rfind("replay:", 0) == 0 ||
                             c.llm_backend.rfind("http:", 0) == 0;
  if (!known_backend)
    errors.push_back("llm_backend: expected mock, script:<path>, replay:<path> or http:<url>");
  if (c.llm_backend == "mock" && !persona_from_string(c.mock_persona))
    errors.push_back("mock_persona: unknown persona '" + c.mock_persona +
                     "' (valid: preference-match, popularity-sensitive, sentiment-sensitive, "
                     "random)");
  if (c.exclusion_policy != "none" && c.exclusion_policy != "exclude-purchased")
    errors.push_back("exclusion_policy: expected none or exclude-purchased");
  if (c.review_window < 0) errors.push_back("review_window: must be >= 0");
  if (c.max_actions_per_step < 1) errors.push_back("max_actions_per_step: must be >= 1");
  if (c.snapshot_interval < 0) errors.push_back("snapshot_interval: must be >= 0");
  if (c.retrieval.alpha < 0 || c.retrieval.beta < 0)
    errors.push_back("retrieval: alpha and beta must be >= 0");
  if (c.retrieval.gamma <= 0) errors.push_back("retrieval.gamma: must be > 0");
  if (c.rec_train.dim < 1) errors.push_back("rec_train.dim: must be >= 1");
  if (c.rec_train.layers < 0) errors.push_back("rec_train.layers: must be >= 0");
  if (c.rec_train.learning_rate <= 0) errors.push_back("rec_train.learning_rate: must be > 0");
  if (c.rec_train.epochs < 1) errors.push_back("rec_train.epochs: must be >= 1");
  if (c.persona.explore_prob < 0 || c.persona.explore_prob > 1)
    errors.push_back("persona.explore_prob: must be in [0, 1]");
  if (c.persona.review_prob < 0 || c.persona.review_prob > 1)
    errors.push_back("persona.review_prob: must be in [0, 1]");
  for (std::size_t i = 0; i < c.interventions.size(); ++i) {
    const auto& iv = c.interventions[i];
    const std::string prefix = "interventions[" + std::to_string(i) + "]";
    if (iv.step < 0 || iv.step > c.total_steps)
      errors.push_back(prefix + ".step: must be in [0, total_steps]");
    if (iv.item_id.empty()) errors.push_back(prefix + ".item_id: required");
    if (iv.kind == InterventionKind::MaliciousReviews && iv.texts.empty())
      errors.push_back(prefix + ".texts: malicious_reviews requires at least one text");
    if (iv.kind == InterventionKind::BrandRename && iv.new_name.empty())
      errors.push_back(prefix + ".new_name: brand_rename requires a name");
    if (iv.kind == InterventionKind::SeedBoost && iv.initial_sales < 0)
      errors.push_back(prefix + ".initial_sales: must be >= 0");
  }
  return errors;
}

// Parses and validates a config file, defaults applied (T=10, 1000 agents,
// page size 20, lightgcn).
inline SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  SimulationConfig cfg;
  try {
    cfg = j.get<SimulationConfig>();
  } catch (const std::exception& e) {
    throw ConfigError({e.what()});
  }
  const auto errors = validate_config(cfg);
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

inline std::string config_hash(const SimulationConfig& cfg) {
  std::ostringstream os;
  os << std::hex << fnv1a64(Json(cfg).dump());
  return os.str();
}

}  // namespace recarena
