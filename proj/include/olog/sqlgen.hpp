#pragma once

// Relational schema for an olog: a table per type keyed by Id, a foreign-key
// column per outgoing aspect. Facts and sketch declarations are carried in
// comments.

#include <string>
#include <vector>

#include "olog/core.hpp"
#include "olog/dsl.hpp"
#include "olog/instance.hpp"

namespace olog::sql {

  inline std::string ident(std::string const& id) {
    std::string out = "\"";
    for (char c : id) {
      if (c == '"') {
        out += '"';
      }
      out += c;
    }
    return out + '"';
  }

  inline std::string literal(std::string const& s) {
    std::string out = "'";
    for (char c : s) {
      if (c == '\'') {
        out += '\'';
      }
      out += c;
    }
    return out + '\'';
  }

  namespace detail {
    // Labels may hold line breaks; keep each comment on one line.
    inline std::string one_line(std::string s) {
      for (auto& c : s) {
        if (c == '\n' || c == '\r') {
          c = ' ';
        }
      }
      return s;
    }

    inline void emit_inserts(std::string&         out,
                             Specification const& spec,
                             KeyDiagram const&    d) {
      auto const& g = spec.graph;
      for (auto const& t : g.types()) {
        auto const  cols = g.outgoing(t.id);
        std::string head = "INSERT INTO " + ident(t.id) + " (" + ident("Id");
        for (auto const* a : cols) {
          head += ", " + ident(a->id);
        }
        head += ") VALUES (";
        for (auto const& k : d.set(t.id)) {
          std::string row = head + literal(k);
          for (auto const* a : cols) {
            row += ", " + literal(d.func(a->id).at(k));
          }
          out += row + ");\n";
        }
      }
      if (!g.types().empty()) {
        out += "\n";
      }
    }
  }  // namespace detail

  // With `data`, INSERT statements go between the tables and the foreign
  // keys so that cyclic references load.
  inline std::string emit_ddl(Specification const& spec,
                              KeyDiagram const*    data = nullptr) {
    auto const& g = spec.graph;
    std::string out;
    out += "-- schema for olog " + (spec.name.empty() ? "unnamed" : spec.name)
           + "\n";
    out += "-- path equations are not expressible as constraints; "
           "they are listed as FACT comments\n";
    out += "\n";

    std::vector<std::vector<std::string>> decls_by_type(g.types().size());
    auto index_of = [&](Id const& id) {
      for (std::size_t i = 0; i < g.types().size(); ++i) {
        if (g.types()[i].id == id) {
          return i;
        }
      }
      return g.types().size();
    };
    auto decls = spec.sketch;
    dsl::canonical_sort(decls);
    for (auto const& d : decls) {
      auto const i = index_of(decl_target(d));
      if (i < decls_by_type.size()) {
        decls_by_type[i].push_back(dsl::detail::decl_text(d));
      }
    }

    for (std::size_t i = 0; i < g.types().size(); ++i) {
      auto const& t    = g.types()[i];
      auto const  cols = g.outgoing(t.id);
      out += "CREATE TABLE " + ident(t.id) + " (\n";
      out += "  " + ident("Id") + " VARCHAR(255) NOT NULL PRIMARY KEY";
      for (auto const* a : cols) {
        out += ",\n  " + ident(a->id) + " VARCHAR(255) NOT NULL";
      }
      out += "\n);\n";
      out += "-- " + t.id + ": " + detail::one_line(t.label) + "\n";
      for (auto const* a : cols) {
        std::string mods;
        if (a->injective) {
          mods += " [injective]";
        }
        if (a->surjective) {
          mods += " [surjective]";
        }
        out += "--   " + a->id + " -> " + a->tgt + ": "
               + detail::one_line(a->label) + mods + "\n";
      }
      for (auto const& f : spec.facts) {
        if (f.lhs.source == t.id) {
          out += "-- FACT: " + to_string(f) + "\n";
        }
      }
      for (auto const& s : decls_by_type[i]) {
        out += "-- SKETCH: " + s + "\n";
      }
      out += "\n";
    }

    if (data != nullptr) {
      detail::emit_inserts(out, spec, *data);
    }

    for (auto const& t : g.types()) {
      for (auto const* a : g.outgoing(t.id)) {
        out += "ALTER TABLE " + ident(t.id) + " ADD CONSTRAINT "
               + ident("fk_" + t.id + "_" + a->id) + " FOREIGN KEY ("
               + ident(a->id) + ") REFERENCES " + ident(a->tgt) + " ("
               + ident("Id") + ");\n";
      }
    }
    return out;
  }

}  // namespace olog::sql
