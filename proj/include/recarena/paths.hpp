#pragma once

#include <cstdlib>
#include <string>

namespace recarena {

// Bundled data directory (lexicon, prompt templates). Resolution order:
// RECARENA_DATA_DIR environment variable, compile-time default, ./data.
inline std::string data_dir() {
  if (const char* env = std::getenv("RECARENA_DATA_DIR"); env && *env) return env;
#ifdef RECARENA_DATA_DIR
  return RECARENA_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace recarena
