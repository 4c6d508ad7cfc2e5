#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace tcn {

// Flat "key=value" text, one pair per line; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text, const std::string& origin = "<string>");
KeyValues read_key_values(const std::filesystem::path& path);

double parse_real(const std::string& key, const std::string& value);
long long parse_integer(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);

}  // namespace tcn
