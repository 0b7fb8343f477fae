#pragma once

// Instance data: a finite key set per type and a total function per aspect.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "olog/core.hpp"
#include "olog/csv.hpp"
#include "olog/entailment.hpp"
#include "olog/error.hpp"

namespace olog {

  using Key = std::string;

  struct KeyDiagram {
    std::map<Id, std::set<Key>>        sets;
    std::map<Id, std::map<Key, Key>> funcs;

    [[nodiscard]] std::set<Key> const& set(Id const& type) const {
      static std::set<Key> const empty;
      auto                       it = sets.find(type);
      return it == sets.end() ? empty : it->second;
    }

    [[nodiscard]] std::map<Key, Key> const& func(Id const& aspect) const {
      static std::map<Key, Key> const empty;
      auto                            it = funcs.find(aspect);
      return it == funcs.end() ? empty : it->second;
    }

    bool operator==(KeyDiagram const&) const = default;
  };

  // Totality and closure violations of `d` as a diagram over `g`.
  inline std::vector<std::string> diagram_problems(KeyDiagram const& d,
                                                   Graph const&      g) {
    std::vector<std::string> out;
    for (auto const& a : g.aspects()) {
      auto const& src = d.set(a.src);
      auto const& tgt = d.set(a.tgt);
      auto const& fn  = d.func(a.id);
      for (auto const& k : src) {
        auto it = fn.find(k);
        if (it == fn.end()) {
          out.push_back("aspect '" + a.id + "' undefined on key '" + k + "'");
        } else if (!tgt.contains(it->second)) {
          out.push_back("aspect '" + a.id + "' sends '" + k + "' to '"
                        + it->second + "', not a key of '" + a.tgt + "'");
        }
      }
      for (auto const& [k, _] : fn) {
        if (!src.contains(k)) {
          out.push_back("aspect '" + a.id + "' defined on '" + k
                        + "', not a key of '" + a.src + "'");
        }
      }
    }
    return out;
  }

  inline Key eval_path(KeyDiagram const& d, Path const& p, Key const& k) {
    if (!d.set(p.source).contains(k)) {
      throw Error(ErrorKind::instance,
                  "key '" + k + "' is not in the set of '" + p.source + "'");
    }
    Key at = k;
    for (auto const& e : p.edges) {
      auto const& fn = d.func(e);
      auto        it = fn.find(at);
      if (it == fn.end()) {
        throw Error(ErrorKind::instance,
                    "aspect '" + e + "' is undefined on key '" + at + "'");
      }
      at = it->second;
    }
    return at;
  }

  struct Counterexample {
    Fact fact;
    Key  start;
    Key  lhs_value;
    Key  rhs_value;
  };

  struct FactStatus {
    Fact                        fact;
    bool                        satisfied = true;
    std::vector<Counterexample> counterexamples;
  };

  struct SatisfactionReport {
    std::vector<FactStatus> facts;

    [[nodiscard]] bool satisfied() const {
      for (auto const& f : facts) {
        if (!f.satisfied) {
          return false;
        }
      }
      return true;
    }
  };

  inline FactStatus satisfies_fact(KeyDiagram const& d, Fact const& fact) {
    FactStatus st{fact, true, {}};
    for (auto const& k : d.set(fact.lhs.source)) {
      auto l = eval_path(d, fact.lhs, k);
      auto r = eval_path(d, fact.rhs, k);
      if (l != r) {
        st.counterexamples.push_back({fact, k, std::move(l), std::move(r)});
      }
    }
    st.satisfied = st.counterexamples.empty();
    return st;
  }

  inline SatisfactionReport satisfies_spec(KeyDiagram const&    d,
                                           Specification const& spec) {
    SatisfactionReport rep;
    for (auto const& f : spec.facts) {
      rep.facts.push_back(satisfies_fact(d, f));
    }
    return rep;
  }

  // Every bounded equation that `d` satisfies. Paths are grouped by the
  // function they compute, so this is linear in the universe.
  inline FactSet intent(KeyDiagram const& d, Graph const& g, Bound bound = {}) {
    PathUniverse u(g, bound.max_path_len, bound.max_universe);
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::vector<Key>>,
             std::vector<std::uint32_t>>
        groups;
    for (std::uint32_t i = 0; i < u.size(); ++i) {
      Path const       p = u.path(i);
      std::vector<Key> values;
      for (auto const& k : d.set(p.source)) {
        values.push_back(eval_path(d, p, k));
      }
      groups[{u.source(i), u.target(i), std::move(values)}].push_back(i);
    }
    FactSet out;
    for (auto const& [_, members] : groups) {
      for (auto a : members) {
        for (auto b : members) {
          out.insert(Fact{u.path(a), u.path(b)});
        }
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Tables on disk
  ////////////////////////////////////////////////////////////////////////

  struct LoadOptions {
    // Types whose table may be absent; they load as empty sets.
    std::set<Id> optional_tables;
    // Aspects whose columns are ignored (and may be absent).
    std::set<Id> skip_aspects;
  };

  namespace detail {
    inline std::string read_file(std::filesystem::path const& p) {
      std::ifstream in(p, std::ios::binary);
      if (!in) {
        throw Error(ErrorKind::io, "cannot read " + p.string());
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
  }  // namespace detail

  inline KeyDiagram load_instances(std::filesystem::path const& dir,
                                   Specification const&         spec,
                                   LoadOptions const&           opts = {}) {
    namespace fs = std::filesystem;
    auto const& g = spec.graph;
    KeyDiagram  d;

    // Which table supplied each (aspect, key) cell, for dangling-key messages.
    std::map<Id, std::map<Key, std::size_t>> row_of;

    for (auto const& t : g.types()) {
      auto const file = dir / (t.id + ".csv");
      auto&      keys = d.sets[t.id];
      std::vector<Aspect const*> cols;
      for (auto const* a : g.outgoing(t.id)) {
        if (!opts.skip_aspects.contains(a->id)) {
          cols.push_back(a);
          d.funcs[a->id];
        }
      }
      if (!fs::exists(file)) {
        if (opts.optional_tables.contains(t.id)) {
          continue;
        }
        throw Error(ErrorKind::instance,
                    "missing table " + file.string() + " for type '" + t.id
                        + "'");
      }
      auto const  rows  = csv::parse(detail::read_file(file));
      std::string where = t.id + ".csv";
      if (rows.empty()) {
        throw Error(ErrorKind::instance, where + ": missing header row");
      }
      auto const& header = rows[0];
      if (header.empty() || header[0] != "Id") {
        throw Error(ErrorKind::instance,
                    where + ": first column must be 'Id'");
      }
      // Column positions; canonical order is required for the aspects we
      // read, skipped aspects may appear anywhere or not at all.
      std::vector<std::size_t> pos;
      std::size_t              next = 1;
      for (auto const* a : cols) {
        while (next < header.size() && header[next] != a->id
               && opts.skip_aspects.contains(header[next])) {
          ++next;
        }
        if (next >= header.size() || header[next] != a->id) {
          bool present = false;
          for (auto const& h : header) {
            present |= (h == a->id);
          }
          throw Error(ErrorKind::instance,
                      where + ": "
                          + (present ? "column '" + a->id
                                           + "' out of canonical order"
                                     : "missing aspect column '" + a->id
                                           + "'"));
        }
        pos.push_back(next++);
      }
      for (std::size_t h = 1; h < header.size(); ++h) {
        auto const* a = g.find_aspect(header[h]);
        if (a == nullptr || a->src != t.id) {
          throw Error(ErrorKind::instance,
                      where + ": unexpected column '" + header[h] + "'");
        }
      }
      for (std::size_t r = 1; r < rows.size(); ++r) {
        auto const& row = rows[r];
        auto const  at  = where + " row " + std::to_string(r + 1);
        if (row.size() != header.size()) {
          throw Error(ErrorKind::instance,
                      at + ": expected " + std::to_string(header.size())
                          + " cells, found " + std::to_string(row.size()));
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (row[c].empty()) {
            throw Error(ErrorKind::instance,
                        at + ": empty cell in column '" + header[c] + "'");
          }
        }
        if (!keys.insert(row[0]).second) {
          throw Error(ErrorKind::instance,
                      at + ": duplicate Id '" + row[0] + "'");
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
          d.funcs[cols[c]->id][row[0]] = row[pos[c]];
          row_of[cols[c]->id][row[0]]  = r + 1;
        }
      }
    }

    for (auto const& a : g.aspects()) {
      if (opts.skip_aspects.contains(a.id)) {
        continue;
      }
      auto const& tgt = d.sets[a.tgt];
      for (auto const& [k, v] : d.funcs[a.id]) {
        if (!tgt.contains(v)) {
          throw Error(ErrorKind::instance,
                      a.src + ".csv row " + std::to_string(row_of[a.id][k])
                          + ", column '" + a.id + "': dangling key '" + v
                          + "' not found in " + a.tgt + ".csv");
        }
      }
    }
    return d;
  }

  // One CSV per type, rows in key order.
  inline void write_table(std::ostream&     out,
                          KeyDiagram const& d,
                          Graph const&      g,
                          Id const&         type) {
    csv::Row header{"Id"};
    auto     cols = g.outgoing(type);
    for (auto const* a : cols) {
      header.push_back(a->id);
    }
    csv::write_row(out, header);
    for (auto const& k : d.set(type)) {
      csv::Row row{k};
      for (auto const* a : cols) {
        row.push_back(d.func(a->id).at(k));
      }
      csv::write_row(out, row);
    }
  }

  inline void write_instances(std::filesystem::path const& dir,
                              KeyDiagram const&            d,
                              Graph const&                 g) {
    std::filesystem::create_directories(dir);
    for (auto const& t : g.types()) {
      std::ofstream out(dir / (t.id + ".csv"), std::ios::binary);
      if (!out) {
        throw Error(ErrorKind::io,
                    "cannot write " + (dir / (t.id + ".csv")).string());
      }
      write_table(out, d, g, t.id);
    }
  }

}  // namespace olog
