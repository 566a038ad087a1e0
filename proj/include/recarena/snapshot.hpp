#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include "recarena/platform.hpp"

namespace recarena {

inline constexpr int kSnapshotFormatVersion = 1;

class SnapshotVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void to_json(Json& j, const UserAgentState& a) {
  j = Json{{"agent_id", a.agent_id},
           {"profile", a.profile},
           {"purchased", a.purchased},
           {"perceptual", a.memory.perceptual()},
           {"cognitive", a.memory.cognitive()}};
}

inline void from_json(const Json& j, UserAgentState& a) {
  a.agent_id = j.at("agent_id").get<std::string>();
  a.profile = j.at("profile").get<UserProfile>();
  a.purchased = j.at("purchased").get<std::set<ItemId>>();
  a.memory.restore(j.at("perceptual").get<std::vector<PerceptualMemory>>(),
                   j.at("cognitive").get<std::vector<CognitiveMemory>>());
}

inline void to_json(Json& j, const SimulationState& s) {
  j = Json{{"format_version", kSnapshotFormatVersion},
           {"step", s.step},
           {"statics", s.store.statics},
           {"dynamics", s.store.dynamics},
           {"agents", s.agents},
           {"agent_users", s.agent_users},
           {"rng_state", s.rng_state}};
  if (s.frozen_dynamics) j["frozen_dynamics"] = *s.frozen_dynamics;
}

inline void from_json(const Json& j, SimulationState& s) {
  const int version = get_or<int>(j, "format_version", 0);
  if (version != kSnapshotFormatVersion)
    throw SnapshotVersionError("snapshot format version " + std::to_string(version) +
                               " is not supported (expected " +
                               std::to_string(kSnapshotFormatVersion) + ")");
  s.step = j.at("step").get<int>();
  s.store.statics = j.at("statics").get<std::map<ItemId, ItemRecord>>();
  s.store.dynamics = j.at("dynamics").get<std::map<ItemId, ItemDynamics>>();
  s.agents = j.at("agents").get<std::vector<UserAgentState>>();
  s.agent_users = j.at("agent_users").get<std::vector<UserId>>();
  s.rng_state = j.at("rng_state").get<std::string>();
  if (j.contains("frozen_dynamics"))
    s.frozen_dynamics = j.at("frozen_dynamics").get<std::map<ItemId, ItemDynamics>>();
  else
    s.frozen_dynamics.reset();
}

inline void write_snapshot(const SimulationState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot: " + path);
  out << Json(state).dump() << "\n";
}

inline SimulationState read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);
  return Json::parse(in).get<SimulationState>();
}

}  // namespace recarena
