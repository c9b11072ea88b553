#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace fxrca {

// Flat `key = value` configuration. Blank lines and lines starting with '#'
// are ignored. Duplicate keys are rejected.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_kv(std::istream& in);
KeyValues read_kv_file(const std::filesystem::path& path);

double kv_double(const std::string& key, const std::string& value);
long long kv_integer(const std::string& key, const std::string& value);
bool kv_bool(const std::string& key, const std::string& value);

std::string format_double(double value);

}  // namespace fxrca
