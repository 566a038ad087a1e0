#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "recarena/paths.hpp"

namespace recarena {

// {{name}} placeholder substitution. Unknown placeholders are left intact so
// missing bindings are visible in the rendered text.
inline std::string render_template(const std::string& tpl,
                                   const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const auto open = tpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tpl, pos, std::string::npos);
      break;
    }
    out.append(tpl, pos, open - pos);
    const auto close = tpl.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(tpl, open, std::string::npos);
      break;
    }
    const std::string key = tpl.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it != vars.end()) {
      out += it->second;
    } else {
      out.append(tpl, open, close + 2 - open);
    }
    pos = close + 2;
  }
  return out;
}

// Plain-text prompt templates, one file per prompt, loaded from a directory.
class PromptLibrary {
 public:
  static PromptLibrary load(const std::string& dir) {
    PromptLibrary lib;
    lib.dir_ = dir;
    return lib;
  }

  static PromptLibrary bundled() { return load(data_dir() + "/prompts"); }

  const std::string& get(const std::string& name) const {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    const std::string path = dir_ + "/" + name + ".txt";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing prompt template: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    auto [ins, ok] = cache_.emplace(name, os.str());
    return ins->second;
  }

  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& vars) const {
    return render_template(get(name), vars);
  }

 private:
  std::string dir_;
  mutable std::map<std::string, std::string> cache_;
};

}  // namespace recarena
