#pragma once

#include <map>
#include <string>
#include <vector>

#include "avsql/schema.hpp"

namespace avsql {

enum class ClusterKind { Table, Column };

struct ClusterPattern {
  std::string pattern;               // contains one or more {NUM} placeholders
  std::vector<std::string> members;  // >= 2 original names, catalog order
  ClusterKind kind = ClusterKind::Table;
  std::string owner_table;           // merged table name for column clusters
};

struct CompressedCatalog {
  SchemaCatalog catalog;
  std::vector<ClusterPattern> table_clusters;
  std::vector<ClusterPattern> column_clusters;
  std::map<std::string, std::vector<std::string>> expansion_map;  // pattern -> members
};

/// Replaces every maximal run of >= 2 digits with {NUM}; returns the input
/// unchanged when no such run exists.
std::string name_skeleton(std::string_view name);

/// Merges near-duplicate tables (same skeleton, identical ordered
/// column-name/type lists, identical key metadata) and, within each table,
/// near-duplicate columns (same skeleton, identical type, no key
/// participation). Idempotent.
CompressedCatalog compress_schema(const SchemaCatalog& catalog);

/// Pattern names expand to their members; names present in the compressed
/// catalog expand to themselves. Throws on unknown names.
std::vector<std::string> expand_name(const std::string& name, const CompressedCatalog& compressed);

std::string expansion_map_json(const CompressedCatalog& compressed);

}  // namespace avsql
