#pragma once

#include <set>
#include <string>
#include <vector>

namespace rlab::cli {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Reads `key = value` lines; blank lines and lines starting with '#' are
/// skipped. Throws InvalidArgument on unreadable files or malformed lines.
std::vector<ConfigEntry> read_config(const std::string& path);

/// Removes --config PATH from `args` and appends the file's entries as
/// flags for every key not already given on the command line. Keys in
/// `switches` are boolean: true/yes/1/on adds the bare flag, false/no/0/off
/// adds nothing.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::set<std::string>& switches);

}  // namespace rlab::cli
