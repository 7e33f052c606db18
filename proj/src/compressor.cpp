#include "avsql/compressor.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "avsql/util.hpp"

namespace avsql {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Key metadata of a table with its own name abstracted away, so that two
// cluster candidates can be compared member-for-member.
struct TableSignature {
  std::vector<std::pair<std::string, DataType>> columns;
  std::vector<std::string> primary_key;
  std::set<std::string> fk_edges;  // rendered with the own name replaced by "@"

  bool operator==(const TableSignature&) const = default;
  bool operator<(const TableSignature& o) const {
    if (columns != o.columns) return columns < o.columns;
    if (primary_key != o.primary_key) return primary_key < o.primary_key;
    return fk_edges < o.fk_edges;
  }
};

TableSignature table_signature(const TableDef& t, const SchemaCatalog& catalog) {
  TableSignature sig;
  for (const auto& c : t.columns) sig.columns.emplace_back(to_lower(c.name), c.type);
  for (const auto& pk : t.primary_key) sig.primary_key.push_back(to_lower(pk));
  for (const auto& fk : catalog.relations) {
    bool child = iequals(fk.child_table, t.name);
    bool parent = iequals(fk.parent_table, t.name);
    if (!child && !parent) continue;
    std::string edge = (child ? "@" : to_lower(fk.child_table)) + "." + to_lower(fk.child_column) +
                       "->" + (parent ? "@" : to_lower(fk.parent_table)) + "." +
                       to_lower(fk.parent_column);
    sig.fk_edges.insert(edge);
  }
  return sig;
}

bool participates_in_keys(const TableDef& t, const std::string& column,
                          const SchemaCatalog& catalog) {
  for (const auto& pk : t.primary_key) {
    if (iequals(pk, column)) return true;
  }
  for (const auto& fk : catalog.relations) {
    if (iequals(fk.child_table, t.name) && iequals(fk.child_column, column)) return true;
    if (iequals(fk.parent_table, t.name) && iequals(fk.parent_column, column)) return true;
  }
  return false;
}

std::string shared_or_empty(const std::vector<std::string>& values) {
  for (const auto& v : values) {
    if (v != values.front()) return "";
  }
  return values.front();
}

}  // namespace

std::string name_skeleton(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  std::size_t i = 0;
  while (i < name.size()) {
    if (is_digit(name[i])) {
      std::size_t j = i;
      while (j < name.size() && is_digit(name[j])) ++j;
      if (j - i >= 2) {
        out += "{NUM}";
      } else {
        out.append(name.substr(i, j - i));
      }
      i = j;
    } else {
      out.push_back(name[i]);
      ++i;
    }
  }
  return out;
}

CompressedCatalog compress_schema(const SchemaCatalog& catalog) {
  CompressedCatalog result;
  result.catalog.db_id = catalog.db_id;

  std::set<std::string> existing_names;
  for (const auto& t : catalog.tables) existing_names.insert(to_lower(t.name));

  // Candidate table groups: same skeleton (which must differ from the raw
  // name), then same structural signature.
  std::map<std::string, std::map<TableSignature, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < catalog.tables.size(); ++i) {
    const TableDef& t = catalog.tables[i];
    std::string skeleton = name_skeleton(t.name);
    if (skeleton == t.name) continue;
    if (existing_names.count(to_lower(skeleton))) continue;  // pattern collides with a real table
    groups[skeleton][table_signature(t, catalog)].push_back(i);
  }

  std::map<std::size_t, std::string> merged_into;  // table index -> pattern name
  std::set<std::size_t> cluster_reps;              // first member of each cluster
  for (auto& [skeleton, by_sig] : groups) {
    // Only one structural variant may claim the pattern name.
    if (by_sig.size() != 1) continue;
    auto& members = by_sig.begin()->second;
    if (members.size() < 2) continue;
    ClusterPattern cluster;
    cluster.pattern = skeleton;
    cluster.kind = ClusterKind::Table;
    for (std::size_t idx : members) cluster.members.push_back(catalog.tables[idx].name);
    cluster_reps.insert(members.front());
    for (std::size_t idx : members) merged_into[idx] = skeleton;
    result.expansion_map[skeleton] = cluster.members;
    result.table_clusters.push_back(std::move(cluster));
  }

  auto table_output_name = [&](const std::string& original) -> std::string {
    for (std::size_t i = 0; i < catalog.tables.size(); ++i) {
      if (!iequals(catalog.tables[i].name, original)) continue;
      auto it = merged_into.find(i);
      return it == merged_into.end() ? original : it->second;
    }
    return original;
  };

  for (std::size_t i = 0; i < catalog.tables.size(); ++i) {
    auto it = merged_into.find(i);
    if (it != merged_into.end() && !cluster_reps.count(i)) continue;  // folded into its rep
    TableDef table = catalog.tables[i];
    if (it != merged_into.end()) {
      table.name = it->second;
      // Descriptions/samples only carry over when they agree across members.
      std::vector<std::string> descs;
      for (const auto& cl : result.table_clusters) {
        if (cl.pattern != it->second) continue;
        for (const auto& m : cl.members) {
          descs.push_back(catalog.find_table(m)->description);
        }
      }
      table.description = shared_or_empty(descs);
      table.sample_rows.clear();
    }
    result.catalog.tables.push_back(std::move(table));
  }

  // Rewrite FK endpoints through merged table names, dropping duplicates.
  std::set<std::string> seen_edges;
  for (const auto& fk : catalog.relations) {
    ForeignKeyRef out = fk;
    out.child_table = table_output_name(fk.child_table);
    out.parent_table = table_output_name(fk.parent_table);
    std::string key = to_lower(out.child_table) + "." + to_lower(out.child_column) + ">" +
                      to_lower(out.parent_table) + "." + to_lower(out.parent_column);
    if (seen_edges.insert(key).second) result.catalog.relations.push_back(out);
  }

  // Column clusters within each surviving table.
  for (auto& table : result.catalog.tables) {
    std::map<std::string, std::vector<std::size_t>> col_groups;
    std::set<std::string> col_names;
    for (const auto& c : table.columns) col_names.insert(to_lower(c.name));
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const ColumnDef& c = table.columns[i];
      std::string skeleton = name_skeleton(c.name);
      if (skeleton == c.name) continue;
      if (col_names.count(to_lower(skeleton))) continue;
      if (participates_in_keys(table, c.name, result.catalog)) continue;
      col_groups[skeleton].push_back(i);
    }
    std::map<std::size_t, std::string> col_merged;
    std::set<std::size_t> col_reps;
    for (auto& [skeleton, members] : col_groups) {
      if (members.size() < 2) continue;
      DataType type = table.columns[members.front()].type;
      bool same_type = std::all_of(members.begin(), members.end(), [&](std::size_t idx) {
        return table.columns[idx].type == type;
      });
      if (!same_type) continue;
      ClusterPattern cluster;
      cluster.pattern = skeleton;
      cluster.kind = ClusterKind::Column;
      cluster.owner_table = table.name;
      std::vector<std::string> descs;
      for (std::size_t idx : members) {
        cluster.members.push_back(table.columns[idx].name);
        descs.push_back(table.columns[idx].description);
      }
      col_reps.insert(members.front());
      for (std::size_t idx : members) col_merged[idx] = skeleton;
      auto& expansion = result.expansion_map[skeleton];
      for (const auto& m : cluster.members) {
        if (std::find(expansion.begin(), expansion.end(), m) == expansion.end()) {
          expansion.push_back(m);
        }
      }
      result.column_clusters.push_back(std::move(cluster));
      table.columns[members.front()].description = shared_or_empty(descs);
    }
    if (col_merged.empty()) continue;
    std::vector<ColumnDef> kept;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      auto it = col_merged.find(i);
      if (it != col_merged.end()) {
        if (!col_reps.count(i)) continue;
        ColumnDef merged = table.columns[i];
        merged.name = it->second;
        kept.push_back(std::move(merged));
      } else {
        kept.push_back(table.columns[i]);
      }
    }
    table.columns = std::move(kept);
    table.sample_rows.clear();  // rows no longer line up with merged columns
  }

  validate_catalog(result.catalog);
  return result;
}

std::vector<std::string> expand_name(const std::string& name,
                                     const CompressedCatalog& compressed) {
  auto it = compressed.expansion_map.find(name);
  if (it != compressed.expansion_map.end()) return it->second;
  // Case-insensitive pattern lookup.
  for (const auto& [pattern, members] : compressed.expansion_map) {
    if (iequals(pattern, name)) return members;
  }
  if (compressed.catalog.find_table(name)) return {name};
  for (const auto& t : compressed.catalog.tables) {
    if (t.find_column(name)) return {name};
  }
  throw std::runtime_error("unknown name: " + name);
}

std::string expansion_map_json(const CompressedCatalog& compressed) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [pattern, members] : compressed.expansion_map) {
    doc[pattern] = members;
  }
  return doc.dump(2) + "\n";
}

}  // namespace avsql
