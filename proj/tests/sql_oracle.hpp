// SPDX-License-Identifier: Apache-2.0
// Brute-force relational evaluation of a view script over inserted rows.
#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "dpc/runtime.hpp"
#include "dpc/sql.hpp"
#include "dpc/text_format.hpp"
#include "support.hpp"

namespace sqlcheck {

using Relations = std::map<std::string, dpc::CollectionValue>;

/// Selection then projection, row by row.
inline dpc::CollectionValue select(const dpc::sql::Select& q, const Relations& rel) {
  dpc::CollectionValue out;
  for (const auto& [key, fields] : rel.at(q.source)) {
    if (q.where) {
      auto keep = ref::eval(*q.where, fields);
      if (!keep || !keep->is_bool() || !keep->as_bool()) continue;
    }
    if (q.star) {
      out.assign(key, fields);
      continue;
    }
    dpc::Fields row;
    bool ok = true;
    for (const auto& p : q.columns) {
      auto v = ref::eval(p.expr, fields);
      if (!v) {
        ok = false;
        break;
      }
      row[p.name] = *v;
    }
    if (ok) out.assign(key, row);
  }
  return out;
}

/// Every table and view of `statements` given the rows inserted per table.
inline Relations evaluate(const std::vector<dpc::sql::Statement>& statements,
                          const Relations& inserted) {
  Relations rel;
  for (const auto& st : statements) {
    if (auto* t = std::get_if<dpc::sql::CreateTable>(&st)) {
      auto it = inserted.find(t->name);
      rel[t->name] = it == inserted.end() ? dpc::CollectionValue{} : it->second;
    } else if (auto* v = std::get_if<dpc::sql::CreateView>(&st)) {
      rel[v->name] = select(v->body, rel);
    }
  }
  return rel;
}

struct Result {
  bool ok = true;
  std::string detail;
};

/// Runs `script`, inserts `rows` random rows with distinct keys into its
/// first table, and checks SELECT * on every relation plus a filtered
/// SELECT per relation against the oracle, with and without contraction.
inline Result compare_with_oracle(const std::string& script, int rows, std::uint64_t seed) {
  const auto statements = dpc::sql::parse_sql(script);
  std::string table;
  std::vector<std::string> columns;
  for (const auto& st : statements) {
    if (auto* t = std::get_if<dpc::sql::CreateTable>(&st); t && table.empty()) {
      table = t->name;
      columns = t->columns;
    }
  }
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* regions[] = {"north", "south", "east", "west"};
  std::vector<std::pair<std::string, dpc::Fields>> inserts;
  for (int i = 0; i < rows; ++i) {
    dpc::Fields f;
    for (const auto& c : columns) {
      // A missing value now and then.
      if (pick(0, 49) == 0) continue;
      if (c == "region") f[c] = std::string(regions[pick(0, 3)]);
      else if (c == "price") f[c] = std::int64_t{pick(1, 50)};
      else f[c] = std::int64_t{pick(1, 10)};
    }
    inserts.emplace_back("r" + std::to_string(i), std::move(f));
  }
  Relations inserted;
  for (const auto& [k, f] : inserts) inserted[table].assign(k, f);
  const Relations expect = evaluate(statements, inserted);

  Result res;
  for (bool contract : {false, true}) {
    dpc::Runtime rt;
    dpc::sql::Session session(rt);
    session.execute_script(script);
    if (contract) rt.schedule_passes(1);
    for (const auto& [k, f] : inserts) session.insert(table, k, f);
    rt.quiesce();
    const std::string mode = contract ? " (contracting)" : "";
    for (const auto& [name, rows_expected] : expect) {
      auto got = session.execute_script("SELECT * FROM " + name + ";");
      if (got.size() != 1 || got[0] != rows_expected) {
        res.ok = false;
        res.detail = "SELECT * FROM " + name + mode;
        return res;
      }
      // A filtered query on the first column, as a transient view.
      const auto& cols = session.relation(name).columns;
      const std::string q = "SELECT * FROM " + name + " WHERE " + cols.front() + " > 3;";
      const auto parsed = dpc::sql::parse_sql(q);
      const auto want = select(std::get<dpc::sql::SelectQuery>(parsed.front()).body, expect);
      got = session.execute_script(q);
      if (got.size() != 1 || got[0] != want) {
        res.ok = false;
        res.detail = q + mode;
        return res;
      }
    }
  }
  return res;
}

}  // namespace sqlcheck
