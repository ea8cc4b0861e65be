#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "rlab/error.hpp"

namespace rlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::vector<ConfigEntry> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  std::vector<ConfigEntry> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(path + ":" + std::to_string(number) + ": expected 'key = value'");
    ConfigEntry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), number};
    if (e.key.rfind("--", 0) == 0) e.key = e.key.substr(2);
    if (e.key.empty()) throw InvalidArgument(path + ":" + std::to_string(number) + ": empty key");
    if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') e.value = e.value.substr(1, e.value.size() - 2);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::set<std::string>& switches) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InvalidArgument("--config needs a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  std::set<std::string> given;
  for (const std::string& a : rest) {
    if (a.rfind("--", 0) != 0) continue;
    given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  for (const ConfigEntry& e : read_config(path)) {
    if (given.count(e.key)) continue;
    if (switches.count(e.key)) {
      const std::string v = lower(e.value);
      if (v == "true" || v == "yes" || v == "1" || v == "on") {
        rest.push_back("--" + e.key);
      } else if (!(v == "false" || v == "no" || v == "0" || v == "off")) {
        throw InvalidArgument("config line " + std::to_string(e.line) + ": '" + e.key + "' expects true or false");
      }
    } else {
      rest.push_back("--" + e.key + "=" + e.value);
    }
  }
  return rest;
}

}  // namespace rlab::cli
