#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace avsql {

enum class DataType { Text, Integer, Real, Date, Timestamp, Boolean, Other };

std::string_view data_type_name(DataType t);
DataType data_type_from_name(std::string_view name);
/// Maps a vendor type string (VARCHAR(40), NUMBER, DATETIME, ...) onto the tag set.
DataType normalize_type(std::string_view vendor_type);

struct ColumnDef {
  std::string name;
  DataType type = DataType::Other;
  std::string description;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::string description;
  std::vector<std::string> primary_key;                  // column names, in key order
  std::vector<std::vector<std::string>> sample_rows;     // at most 3, rendered values

  const ColumnDef* find_column(std::string_view column_name) const;
};

struct ForeignKeyRef {
  std::string child_table;
  std::string child_column;
  std::string parent_table;
  std::string parent_column;

  bool operator==(const ForeignKeyRef&) const = default;
};

struct SchemaCatalog {
  std::string db_id;
  std::vector<TableDef> tables;
  std::vector<ForeignKeyRef> relations;

  const TableDef* find_table(std::string_view table_name) const;
};

/// Throws std::runtime_error naming the first violated invariant
/// (duplicate table, duplicate column, dangling foreign key endpoint).
void validate_catalog(const SchemaCatalog& catalog);

enum class DetailLevel { NamesOnly, Full };

/// Deterministic prompt text: one block per table in catalog order, then
/// foreign-key lines restricted to edges whose both endpoints are present.
std::string serialize_schema(const SchemaCatalog& catalog, DetailLevel detail);
std::string serialize_tables(std::span<const TableDef> tables,
                             std::span<const ForeignKeyRef> relations, DetailLevel detail);

struct TokenEstimate {
  std::int64_t value = 0;
};

class TokenEstimator {
 public:
  virtual ~TokenEstimator() = default;
  virtual TokenEstimate estimate(std::string_view text) const = 0;
};

/// ceil(bytes / 4)
class ByteRatioEstimator final : public TokenEstimator {
 public:
  TokenEstimate estimate(std::string_view text) const override;
};

const TokenEstimator& default_token_estimator();
TokenEstimate estimate_tokens(std::string_view text);

/// Introspects a SQLite database file. Throws on unreadable files or when no
/// user tables exist.
SchemaCatalog ingest_from_database(const std::string& db_path, std::string db_id = "");

/// Loads the JSON schema manifest format: {db_id, tables:[{name, description?,
/// columns:[{name,type,description?}], primary_key?}], foreign_keys:[[ct,cc,pt,pc]]}.
SchemaCatalog load_manifest(const std::string& manifest_path);
SchemaCatalog parse_manifest_json(const std::string& json_text, const std::string& origin);
std::string manifest_json(const SchemaCatalog& catalog);

}  // namespace avsql
