#include "avsql/schema.hpp"

#include <sqlite3.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "avsql/util.hpp"

namespace avsql {

using nlohmann::json;

std::string_view data_type_name(DataType t) {
  switch (t) {
    case DataType::Text: return "text";
    case DataType::Integer: return "integer";
    case DataType::Real: return "real";
    case DataType::Date: return "date";
    case DataType::Timestamp: return "timestamp";
    case DataType::Boolean: return "boolean";
    case DataType::Other: return "other";
  }
  return "other";
}

DataType data_type_from_name(std::string_view name) {
  if (iequals(name, "text")) return DataType::Text;
  if (iequals(name, "integer")) return DataType::Integer;
  if (iequals(name, "real")) return DataType::Real;
  if (iequals(name, "date")) return DataType::Date;
  if (iequals(name, "timestamp")) return DataType::Timestamp;
  if (iequals(name, "boolean")) return DataType::Boolean;
  return DataType::Other;
}

DataType normalize_type(std::string_view vendor_type) {
  std::string t = to_lower(vendor_type);
  auto has = [&](std::string_view needle) { return t.find(needle) != std::string::npos; };
  if (t.empty()) return DataType::Other;
  if (has("bool")) return DataType::Boolean;
  if (has("timestamp") || has("datetime")) return DataType::Timestamp;
  if (has("date")) return DataType::Date;
  if (has("time")) return DataType::Timestamp;
  if (has("int")) return DataType::Integer;
  if (has("char") || has("text") || has("clob") || has("string") || has("varchar") ||
      has("enum"))
    return DataType::Text;
  if (has("real") || has("floa") || has("doub") || has("number") || has("numeric") ||
      has("decimal"))
    return DataType::Real;
  // Direct tag names round-trip.
  DataType tag = data_type_from_name(t);
  if (tag != DataType::Other) return tag;
  return DataType::Other;
}

const ColumnDef* TableDef::find_column(std::string_view column_name) const {
  for (const auto& c : columns) {
    if (iequals(c.name, column_name)) return &c;
  }
  return nullptr;
}

const TableDef* SchemaCatalog::find_table(std::string_view table_name) const {
  for (const auto& t : tables) {
    if (iequals(t.name, table_name)) return &t;
  }
  return nullptr;
}

void validate_catalog(const SchemaCatalog& catalog) {
  std::set<std::string> names;
  for (const auto& t : catalog.tables) {
    if (t.columns.empty()) {
      throw std::runtime_error("table has no columns: " + t.name);
    }
    if (!names.insert(to_lower(t.name)).second) {
      throw std::runtime_error("duplicate table name: " + t.name);
    }
    std::set<std::string> cols;
    for (const auto& c : t.columns) {
      if (c.name.empty()) throw std::runtime_error("empty column name in table " + t.name);
      if (!cols.insert(to_lower(c.name)).second) {
        throw std::runtime_error("duplicate column " + c.name + " in table " + t.name);
      }
    }
  }
  for (const auto& fk : catalog.relations) {
    const TableDef* child = catalog.find_table(fk.child_table);
    const TableDef* parent = catalog.find_table(fk.parent_table);
    if (!child || !child->find_column(fk.child_column) || !parent ||
        !parent->find_column(fk.parent_column)) {
      throw std::runtime_error("dangling foreign key " + fk.child_table + "." + fk.child_column +
                               " -> " + fk.parent_table + "." + fk.parent_column);
    }
  }
}

namespace {

void append_table_block(std::string& out, const TableDef& t, DetailLevel detail) {
  out += "table(" + t.name + ")";
  if (detail == DetailLevel::Full && !t.description.empty()) {
    out += " -- " + t.description;
  }
  out += "\n";
  for (const auto& c : t.columns) {
    out += "  " + c.name;
    if (detail == DetailLevel::Full) {
      out += ": ";
      out += data_type_name(c.type);
      if (!c.description.empty()) out += " -- " + c.description;
    }
    out += "\n";
  }
  if (detail == DetailLevel::Full && !t.primary_key.empty()) {
    out += "  primary_key: (" + join(t.primary_key, ", ") + ")\n";
  }
  if (detail == DetailLevel::Full && !t.sample_rows.empty()) {
    out += "  sample:";
    for (std::size_t i = 0; i < t.sample_rows.size() && i < 3; ++i) {
      out += (i ? ", (" : " (") + join(t.sample_rows[i], ", ") + ")";
    }
    out += "\n";
  }
}

}  // namespace

std::string serialize_tables(std::span<const TableDef> tables,
                             std::span<const ForeignKeyRef> relations, DetailLevel detail) {
  std::string out;
  for (const auto& t : tables) {
    append_table_block(out, t, detail);
  }
  auto present = [&](std::string_view name) {
    return std::any_of(tables.begin(), tables.end(),
                       [&](const TableDef& t) { return iequals(t.name, name); });
  };
  for (const auto& fk : relations) {
    if (present(fk.child_table) && present(fk.parent_table)) {
      out += "foreign_key: " + fk.child_table + "." + fk.child_column + " -> " + fk.parent_table +
             "." + fk.parent_column + "\n";
    }
  }
  return out;
}

std::string serialize_schema(const SchemaCatalog& catalog, DetailLevel detail) {
  return serialize_tables(catalog.tables, catalog.relations, detail);
}

TokenEstimate ByteRatioEstimator::estimate(std::string_view text) const {
  return TokenEstimate{static_cast<std::int64_t>((text.size() + 3) / 4)};
}

const TokenEstimator& default_token_estimator() {
  static const ByteRatioEstimator instance;
  return instance;
}

TokenEstimate estimate_tokens(std::string_view text) {
  return default_token_estimator().estimate(text);
}

namespace {

struct SqliteHandle {
  sqlite3* db = nullptr;
  ~SqliteHandle() {
    if (db) sqlite3_close(db);
  }
};

std::vector<std::vector<std::string>> run_rows(sqlite3* db, const std::string& sql) {
  std::vector<std::vector<std::string>> rows;
  sqlite3_stmt* stmt = nullptr;
  if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
    throw std::runtime_error(std::string("sqlite introspection failed: ") + sqlite3_errmsg(db));
  }
  while (sqlite3_step(stmt) == SQLITE_ROW) {
    std::vector<std::string> row;
    int n = sqlite3_column_count(stmt);
    for (int i = 0; i < n; ++i) {
      const unsigned char* text = sqlite3_column_text(stmt, i);
      row.emplace_back(text ? reinterpret_cast<const char*>(text) : "");
    }
    rows.push_back(std::move(row));
  }
  sqlite3_finalize(stmt);
  return rows;
}

}  // namespace

SchemaCatalog ingest_from_database(const std::string& db_path, std::string db_id) {
  SqliteHandle handle;
  if (sqlite3_open_v2(db_path.c_str(), &handle.db, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK) {
    std::string msg = handle.db ? sqlite3_errmsg(handle.db) : "out of memory";
    throw std::runtime_error("unreadable database file " + db_path + ": " + msg);
  }
  // An invalid file is often detected only on first query.
  SchemaCatalog catalog;
  catalog.db_id = db_id.empty() ? db_path : std::move(db_id);
  std::vector<std::vector<std::string>> names;
  try {
    names = run_rows(handle.db,
                     "SELECT name FROM sqlite_master WHERE type='table' "
                     "AND name NOT LIKE 'sqlite\\_%' ESCAPE '\\' ORDER BY rowid");
  } catch (const std::exception& e) {
    throw std::runtime_error("unreadable database file " + db_path + ": " + e.what());
  }
  if (names.empty()) {
    throw std::runtime_error("zero user tables in database " + db_path);
  }
  for (const auto& row : names) {
    const std::string& table_name = row[0];
    TableDef table;
    table.name = table_name;
    std::string quoted = "\"" + table_name + "\"";
    for (const auto& col : run_rows(handle.db, "PRAGMA table_info(" + quoted + ")")) {
      // cid, name, type, notnull, dflt_value, pk
      ColumnDef c;
      c.name = col[1];
      c.type = normalize_type(col[2]);
      table.columns.push_back(std::move(c));
      if (col.size() > 5 && col[5] != "0") table.primary_key.push_back(col[1]);
    }
    for (const auto& fk : run_rows(handle.db, "PRAGMA foreign_key_list(" + quoted + ")")) {
      // id, seq, table, from, to, ...
      ForeignKeyRef ref;
      ref.child_table = table_name;
      ref.child_column = fk[3];
      ref.parent_table = fk[2];
      ref.parent_column = fk[4];
      catalog.relations.push_back(std::move(ref));
    }
    catalog.tables.push_back(std::move(table));
  }
  // Foreign keys whose parent column was left implicit point at the parent's
  // primary key.
  for (auto& fk : catalog.relations) {
    if (!fk.parent_column.empty()) continue;
    const TableDef* parent = catalog.find_table(fk.parent_table);
    if (parent && parent->primary_key.size() == 1) fk.parent_column = parent->primary_key[0];
  }
  validate_catalog(catalog);
  return catalog;
}

SchemaCatalog parse_manifest_json(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid schema manifest " + origin + ": " + e.what());
  }
  SchemaCatalog catalog;
  catalog.db_id = doc.value("db_id", origin);
  for (const auto& jt : doc.value("tables", json::array())) {
    TableDef table;
    table.name = jt.at("name").get<std::string>();
    table.description = jt.value("description", "");
    for (const auto& jc : jt.value("columns", json::array())) {
      ColumnDef c;
      c.name = jc.at("name").get<std::string>();
      c.type = normalize_type(jc.value("type", ""));
      c.description = jc.value("description", "");
      table.columns.push_back(std::move(c));
    }
    for (const auto& pk : jt.value("primary_key", json::array())) {
      table.primary_key.push_back(pk.get<std::string>());
    }
    catalog.tables.push_back(std::move(table));
  }
  for (const auto& jf : doc.value("foreign_keys", json::array())) {
    if (!jf.is_array() || jf.size() != 4) {
      throw std::runtime_error("invalid foreign_keys entry in manifest " + origin);
    }
    catalog.relations.push_back(ForeignKeyRef{jf[0].get<std::string>(), jf[1].get<std::string>(),
                                              jf[2].get<std::string>(), jf[3].get<std::string>()});
  }
  validate_catalog(catalog);
  return catalog;
}

SchemaCatalog load_manifest(const std::string& manifest_path) {
  return parse_manifest_json(read_file(manifest_path), manifest_path);
}

std::string manifest_json(const SchemaCatalog& catalog) {
  json doc;
  doc["db_id"] = catalog.db_id;
  doc["tables"] = json::array();
  for (const auto& t : catalog.tables) {
    json jt;
    jt["name"] = t.name;
    if (!t.description.empty()) jt["description"] = t.description;
    jt["columns"] = json::array();
    for (const auto& c : t.columns) {
      json jc;
      jc["name"] = c.name;
      jc["type"] = std::string(data_type_name(c.type));
      if (!c.description.empty()) jc["description"] = c.description;
      jt["columns"].push_back(std::move(jc));
    }
    if (!t.primary_key.empty()) jt["primary_key"] = t.primary_key;
    doc["tables"].push_back(std::move(jt));
  }
  doc["foreign_keys"] = json::array();
  for (const auto& fk : catalog.relations) {
    doc["foreign_keys"].push_back(
        json::array({fk.child_table, fk.child_column, fk.parent_table, fk.parent_column}));
  }
  return doc.dump(2) + "\n";
}

}  // namespace avsql
