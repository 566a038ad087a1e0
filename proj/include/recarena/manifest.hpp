#pragma once

#include <fstream>
#include <map>
#include <string>

#include "recarena/config.hpp"

namespace recarena {

// Binds a CLI run to its exact configuration and artifact paths. run_id is
// derived from the config hash so identical (config, seed) runs map to the
// same identity and can be reproduced byte-for-byte.
struct RunManifest {
  std::string run_id;
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  int start_step = 0;
  int end_step = 0;
  std::map<std::string, std::string> artifacts;
};

inline void to_json(Json& j, const RunManifest& m) {
  j = Json{{"run_id", m.run_id},         {"command", m.command},
           {"config_hash", m.config_hash}, {"seed", m.seed},
           {"start_step", m.start_step},   {"end_step", m.end_step},
           {"artifacts", m.artifacts}};
}

inline void from_json(const Json& j, RunManifest& m) {
  m.run_id = j.at("run_id").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.start_step = j.at("start_step").get<int>();
  m.end_step = j.at("end_step").get<int>();
  m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
}

inline RunManifest make_run_manifest(const std::string& command, const SimulationConfig& cfg,
                                     int start_step, int end_step) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.start_step = start_step;
  m.end_step = end_step;
  m.run_id = "run-" + m.config_hash;
  return m;
}

inline void save_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << Json(m).dump(2) << "\n";
}

inline RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  return Json::parse(in).get<RunManifest>();
}

}  // namespace recarena
