#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace actis {

using KvMap = std::map<std::string, std::string>;

// key=value lines; '#' starts a comment, blank lines are skipped, whitespace
// around keys and values is trimmed. A later duplicate key wins.
KvMap parse_kv_text(const std::string& text);
KvMap load_kv_file(const std::string& path);  // throws std::runtime_error

// Each override is a "key=value" token layered on top of base.
void apply_overrides(KvMap& base, const std::vector<std::string>& overrides);

// Typed accessors; key is only used for the error message.
std::int64_t parse_int(const std::string& value, const std::string& key);
double parse_double(const std::string& value, const std::string& key);
std::vector<std::string> split_list(const std::string& value);  // by ','

// Shortest decimal string that round-trips the exact double.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& text);
std::string hex16(std::uint64_t v);

}  // namespace actis
