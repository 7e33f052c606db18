#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace avsql {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
/// Lowercase + collapse internal whitespace runs to single spaces + trim.
std::string normalize_value(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Levenshtein distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - lev(a,b)/max(|a|,|b|); 1.0 when both empty.
double edit_similarity(std::string_view a, std::string_view b);

/// SHA-256 hex digest.
std::string sha256_hex(std::string_view data);

/// Deterministic 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a 64-bit over bytes.
std::uint64_t fnv1a64(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace avsql
