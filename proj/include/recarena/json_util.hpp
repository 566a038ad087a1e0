#pragma once

#include <optional>
#include <string>

#include "json.hpp"

namespace recarena {

using Json = nlohmann::json;

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
  if (v.has_value()) j[key] = *v;
}

template <typename T>
std::optional<T> get_opt(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

// First balanced, parseable JSON object embedded in free-form text. Scans
// brace pairs while respecting string literals, so prose around (and JSON
// fragments before) the block are tolerated.
inline std::optional<Json> try_extract_json_block(const std::string& body) {
  for (std::size_t start = body.find('{'); start != std::string::npos;
       start = body.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < body.size(); ++i) {
      const char c = body[i];
      if (in_string) {
        if (c == '\\')
          ++i;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      if (c == '{') ++depth;
      if (c == '}') {
        --depth;
        if (depth == 0) {
          Json parsed = Json::parse(body.substr(start, i - start + 1), nullptr, false);
          if (!parsed.is_discarded()) return parsed;
          break;  // malformed candidate; try the next '{'
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace recarena
