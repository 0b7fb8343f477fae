#pragma once

// Reference implementations used only by the tests. They work from the
// definitions directly and share nothing with the library's algorithms
// beyond the plain data types (Graph, Path, Fact, KeyDiagram).

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "olog/core.hpp"
#include "olog/instance.hpp"
#include "olog/sketch_decl.hpp"

namespace oracle {

  using olog::Fact;
  using olog::FactSet;
  using olog::Graph;
  using olog::Id;
  using olog::Key;
  using olog::KeyDiagram;
  using olog::Path;

  ////////////////////////////////////////////////////////////////////////
  // Paths
  ////////////////////////////////////////////////////////////////////////

  inline Id end_of(Graph const& g, Path const& p) {
    Id at = p.source;
    for (auto const& e : p.edges) {
      at = g.aspect(e).tgt;
    }
    return at;
  }

  // Depth-first enumeration of every path of length <= max_len.
  inline std::vector<Path> all_paths(Graph const& g, std::size_t max_len) {
    std::vector<Path> out;
    std::vector<Path> frontier;
    for (auto const& t : g.types()) {
      frontier.push_back(Path{t.id, {}});
    }
    while (!frontier.empty()) {
      Path p = frontier.back();
      frontier.pop_back();
      out.push_back(p);
      if (p.edges.size() == max_len) {
        continue;
      }
      Id const at = end_of(g, p);
      for (auto const& a : g.aspects()) {
        if (a.src == at) {
          Path q = p;
          q.edges.push_back(a.id);
          frontier.push_back(q);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  inline Path concat(Path p, Path const& q) {
    p.edges.insert(p.edges.end(), q.edges.begin(), q.edges.end());
    return p;
  }

  ////////////////////////////////////////////////////////////////////////
  // Entailment: apply the inference rules to a set of pairs until nothing
  // new appears. Every rule conclusion must itself fit the bound.
  ////////////////////////////////////////////////////////////////////////

  inline FactSet naive_consequence(Graph const&   g,
                                   FactSet const& declared,
                                   std::size_t    max_len) {
    auto const paths = all_paths(g, max_len);
    std::map<Path, std::size_t> index;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      index.emplace(paths[i], i);
    }
    std::vector<Id> src(paths.size());
    std::vector<Id> tgt(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
      src[i] = paths[i].source;
      tgt[i] = end_of(g, paths[i]);
    }

    std::set<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      rel.emplace(i, i);  // reflexive
    }
    for (auto const& f : declared) {  // basic
      rel.emplace(index.at(f.lhs), index.at(f.rhs));
    }

    // Left and right extensions by arbitrary paths (bi-closed).
    std::map<Id, std::vector<std::size_t>> into;   // non-identity paths by target
    std::map<Id, std::vector<std::size_t>> out_of;  // non-identity paths by source
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (!paths[i].edges.empty()) {
        into[tgt[i]].push_back(i);
        out_of[src[i]].push_back(i);
      }
    }
    auto lookup = [&](Path const& p) -> std::optional<std::size_t> {
      auto it = index.find(p);
      if (it == index.end()) {
        return std::nullopt;
      }
      return it->second;
    };

    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::pair<std::size_t, std::size_t>> add;
      // symmetric
      for (auto const& [a, b] : rel) {
        add.emplace_back(b, a);
      }
      // transitive
      std::map<std::size_t, std::vector<std::size_t>> succ;
      for (auto const& [a, b] : rel) {
        succ[a].push_back(b);
      }
      for (auto const& [a, b] : rel) {
        for (auto c : succ[b]) {
          add.emplace_back(a, c);
        }
      }
      // bi-closed
      for (auto const& [a, b] : rel) {
        for (auto f : into[src[a]]) {
          auto l = lookup(concat(paths[f], paths[a]));
          auto r = lookup(concat(paths[f], paths[b]));
          if (l && r) {
            add.emplace_back(*l, *r);
          }
        }
        for (auto h : out_of[tgt[a]]) {
          auto l = lookup(concat(paths[a], paths[h]));
          auto r = lookup(concat(paths[b], paths[h]));
          if (l && r) {
            add.emplace_back(*l, *r);
          }
        }
      }
      // compositional
      std::map<Id, std::vector<std::pair<std::size_t, std::size_t>>> by_src;
      for (auto const& [a, b] : rel) {
        by_src[src[a]].push_back({a, b});
      }
      for (auto const& [a, b] : rel) {
        for (auto const& [c, d] : by_src[tgt[a]]) {
          auto l = lookup(concat(paths[a], paths[c]));
          auto r = lookup(concat(paths[b], paths[d]));
          if (l && r) {
            add.emplace_back(*l, *r);
          }
        }
      }
      for (auto const& e : add) {
        changed |= rel.insert(e).second;
      }
    }

    FactSet out;
    for (auto const& [a, b] : rel) {
      out.insert(Fact{paths[a], paths[b]});
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Instances
  ////////////////////////////////////////////////////////////////////////

  inline Key walk(KeyDiagram const& d, Path const& p, Key k) {
    for (auto const& e : p.edges) {
      k = d.funcs.at(e).at(k);
    }
    return k;
  }

  inline bool models(KeyDiagram const& d, Fact const& f) {
    auto it = d.sets.find(f.lhs.source);
    if (it == d.sets.end()) {
      return true;
    }
    for (auto const& k : it->second) {
      if (walk(d, f.lhs, k) != walk(d, f.rhs, k)) {
        return false;
      }
    }
    return true;
  }

  inline std::set<Key> set_of(KeyDiagram const& d, Id const& t) {
    auto it = d.sets.find(t);
    return it == d.sets.end() ? std::set<Key>{} : it->second;
  }

  ////////////////////////////////////////////////////////////////////////
  // Sketch semantics by brute force
  ////////////////////////////////////////////////////////////////////////

  // Cartesian enumeration: every tuple of factor keys, each hit by exactly
  // one target key.
  inline bool is_product(KeyDiagram const& d, olog::ProductDecl const& p) {
    std::vector<std::vector<Key>> tuples{{}};
    for (auto const& leg : p.factors) {
      std::vector<std::vector<Key>> next;
      for (auto const& t : tuples) {
        for (auto const& k : set_of(d, leg.type)) {
          auto u = t;
          u.push_back(k);
          next.push_back(u);
        }
      }
      tuples = next;
    }
    std::multiset<std::vector<Key>> got;
    for (auto const& x : set_of(d, p.target)) {
      std::vector<Key> t;
      for (auto const& leg : p.factors) {
        t.push_back(d.funcs.at(leg.aspect).at(x));
      }
      got.insert(t);
    }
    return got == std::multiset<std::vector<Key>>(tuples.begin(), tuples.end());
  }

  // Pair filtering over B x C.
  inline bool is_pullback(KeyDiagram const& d, olog::PullbackDecl const& p) {
    std::multiset<std::pair<Key, Key>> want;
    for (auto const& b : set_of(d, p.leg_b.type)) {
      for (auto const& c : set_of(d, p.leg_c.type)) {
        if (walk(d, p.cospan_f, b) == walk(d, p.cospan_g, c)) {
          want.insert({b, c});
        }
      }
    }
    std::multiset<std::pair<Key, Key>> got;
    for (auto const& x : set_of(d, p.target)) {
      got.insert({d.funcs.at(p.leg_b.aspect).at(x),
                  d.funcs.at(p.leg_c.aspect).at(x)});
    }
    return got == want;
  }

  // Tagged union: the target is in bijection with the set of
  // (summand index, key) pairs.
  inline bool is_coproduct(KeyDiagram const& d, olog::CoproductDecl const& c) {
    std::map<Key, int> hits;
    for (auto const& x : set_of(d, c.target)) {
      hits[x] = 0;
    }
    for (auto const& leg : c.summands) {
      for (auto const& k : set_of(d, leg.type)) {
        auto const v = d.funcs.at(leg.aspect).at(k);
        if (!hits.contains(v)) {
          return false;
        }
        ++hits[v];
      }
    }
    return std::all_of(hits.begin(), hits.end(),
                       [](auto const& kv) { return kv.second == 1; });
  }

  // Quotient of B + C by repeatedly lowering labels across identified pairs.
  inline std::map<std::pair<int, Key>, std::pair<int, Key>> quotient_labels(
      KeyDiagram const&         d,
      olog::PushoutDecl const& p) {
    std::map<std::pair<int, Key>, std::pair<int, Key>> label;
    for (auto const& b : set_of(d, p.leg_b.type)) {
      label[{0, b}] = {0, b};
    }
    for (auto const& c : set_of(d, p.leg_c.type)) {
      label[{1, c}] = {1, c};
    }
    std::vector<std::pair<std::pair<int, Key>, std::pair<int, Key>>> glue;
    for (auto const& a : set_of(d, p.apex)) {
      glue.push_back({{0, walk(d, p.span_f, a)}, {1, walk(d, p.span_g, a)}});
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto const& [x, y] : glue) {
        auto const m = std::min(label[x], label[y]);
        if (label[x] != m || label[y] != m) {
          label[x] = label[y] = m;
          changed             = true;
        }
      }
    }
    return label;
  }

  inline bool is_pushout(KeyDiagram const& d, olog::PushoutDecl const& p) {
    auto const label = quotient_labels(d, p);
    std::map<std::pair<int, Key>, std::set<Key>> class_values;
    std::map<Key, std::set<std::pair<int, Key>>> value_classes;
    for (auto const& [elem, cls] : label) {
      auto const& leg = elem.first == 0 ? p.leg_b : p.leg_c;
      auto const  v   = d.funcs.at(leg.aspect).at(elem.second);
      class_values[cls].insert(v);
      value_classes[v].insert(cls);
    }
    for (auto const& [_, vs] : class_values) {
      if (vs.size() != 1) {
        return false;
      }
    }
    for (auto const& [_, cs] : value_classes) {
      if (cs.size() != 1) {
        return false;
      }
    }
    for (auto const& x : set_of(d, p.target)) {
      if (!value_classes.contains(x)) {
        return false;
      }
    }
    return true;
  }

  inline bool is_injective(KeyDiagram const& d, olog::Aspect const& a) {
    std::set<Key> seen;
    for (auto const& k : set_of(d, a.src)) {
      if (!seen.insert(d.funcs.at(a.id).at(k)).second) {
        return false;
      }
    }
    return true;
  }

  inline bool is_surjective(KeyDiagram const& d, olog::Aspect const& a) {
    std::set<Key> seen;
    for (auto const& k : set_of(d, a.src)) {
      seen.insert(d.funcs.at(a.id).at(k));
    }
    return seen == set_of(d, a.tgt);
  }

  inline bool is_image(KeyDiagram const& d, olog::ImageDecl const& im) {
    auto const& fs = d.funcs.at(im.surjection);
    auto const& fi = d.funcs.at(im.injection);
    std::set<Key> hit;
    for (auto const& a : set_of(d, im.of.source)) {
      if (fi.at(fs.at(a)) != walk(d, im.of, a)) {
        return false;
      }
      hit.insert(fs.at(a));
    }
    if (hit != set_of(d, im.target)) {
      return false;
    }
    std::set<Key> values;
    for (auto const& t : set_of(d, im.target)) {
      values.insert(fi.at(t));
    }
    return values.size() == set_of(d, im.target).size();
  }

  inline bool holds(KeyDiagram const& d, olog::SketchDecl const& decl) {
    if (auto const* p = std::get_if<olog::ProductDecl>(&decl)) {
      return is_product(d, *p);
    }
    if (auto const* p = std::get_if<olog::PullbackDecl>(&decl)) {
      return is_pullback(d, *p);
    }
    if (auto const* p = std::get_if<olog::CoproductDecl>(&decl)) {
      return is_coproduct(d, *p);
    }
    if (auto const* p = std::get_if<olog::PushoutDecl>(&decl)) {
      return is_pushout(d, *p);
    }
    return is_image(d, std::get<olog::ImageDecl>(decl));
  }

  ////////////////////////////////////////////////////////////////////////
  // Graph pushout by label propagation over tagged items "node.id".
  ////////////////////////////////////////////////////////////////////////

  struct GraphQuotient {
    std::map<std::string, std::string> type_class;    // tag -> least tag
    std::map<std::string, std::string> aspect_class;  // tag -> least tag
  };

  // links: (src node, tgt node, type map, aspect map with single-aspect images)
  struct Link {
    Id                 src;
    Id                 tgt;
    std::map<Id, Id>   types;
    std::map<Id, Id>   aspects;
  };

  inline GraphQuotient glue(std::map<Id, Graph> const& graphs,
                            std::vector<Link> const&   links) {
    GraphQuotient q;
    for (auto const& [n, g] : graphs) {
      for (auto const& t : g.types()) {
        q.type_class[n + "." + t.id] = n + "." + t.id;
      }
      for (auto const& a : g.aspects()) {
        q.aspect_class[n + "." + a.id] = n + "." + a.id;
      }
    }
    auto settle = [](std::map<std::string, std::string>& cls,
                     std::vector<std::pair<std::string, std::string>> const& pairs) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (auto const& [x, y] : pairs) {
          auto const m = std::min(cls[x], cls[y]);
          if (cls[x] != m || cls[y] != m) {
            cls[x] = cls[y] = m;
            changed         = true;
          }
        }
      }
    };
    std::vector<std::pair<std::string, std::string>> tp;
    std::vector<std::pair<std::string, std::string>> ap;
    for (auto const& l : links) {
      for (auto const& [s, t] : l.types) {
        tp.push_back({l.src + "." + s, l.tgt + "." + t});
      }
      for (auto const& [s, t] : l.aspects) {
        ap.push_back({l.src + "." + s, l.tgt + "." + t});
      }
    }
    settle(q.type_class, tp);
    settle(q.aspect_class, ap);
    return q;
  }

  ////////////////////////////////////////////////////////////////////////
  // A toy relational engine: reads CREATE TABLE, INSERT and FOREIGN KEY
  // statements and reports every reference that does not resolve.
  ////////////////////////////////////////////////////////////////////////

  struct FkSimulation {
    std::map<std::string, std::vector<std::string>>              columns;
    std::map<std::string, std::vector<std::vector<std::string>>> rows;
    std::vector<std::string>                                     violations;
    std::size_t                                                  constraints = 0;
  };

  inline std::vector<std::string> quoted_items(std::string const& s, char q) {
    std::vector<std::string> out;
    std::size_t              i = 0;
    while ((i = s.find(q, i)) != std::string::npos) {
      std::string item;
      ++i;
      while (i < s.size()) {
        if (s[i] == q) {
          if (i + 1 < s.size() && s[i + 1] == q) {
            item += q;
            i += 2;
            continue;
          }
          break;
        }
        item += s[i++];
      }
      ++i;
      out.push_back(item);
    }
    return out;
  }

  inline FkSimulation simulate_fks(std::string const& sql) {
    FkSimulation sim;
    std::istringstream in(sql);
    std::string        line;
    std::string        table;
    struct Fk {
      std::string table, column, ref_table, ref_column;
    };
    std::vector<Fk> fks;
    while (std::getline(in, line)) {
      if (line.starts_with("--") || line.empty()) {
        continue;
      }
      if (line.starts_with("CREATE TABLE ")) {
        table = quoted_items(line, '"').at(0);
        sim.columns[table];
        sim.rows[table];
      } else if (line.starts_with("  \"")) {
        sim.columns[table].push_back(quoted_items(line, '"').at(0));
      } else if (line.starts_with("INSERT INTO ")) {
        auto const open   = line.find(") VALUES (");
        auto const names  = quoted_items(line.substr(0, open), '"');
        auto const values = quoted_items(line.substr(open), '\'');
        auto const& cols  = sim.columns.at(names.at(0));
        std::vector<std::string> row(cols.size());
        for (std::size_t i = 1; i < names.size(); ++i) {
          auto at = std::find(cols.begin(), cols.end(), names[i]) - cols.begin();
          row.at(static_cast<std::size_t>(at)) = values.at(i - 1);
        }
        sim.rows[names[0]].push_back(row);
      } else if (line.starts_with("ALTER TABLE ")) {
        auto const q = quoted_items(line, '"');
        // table, constraint name, column, referenced table, referenced column
        fks.push_back({q.at(0), q.at(2), q.at(3), q.at(4)});
      }
    }
    for (auto const& fk : fks) {
      ++sim.constraints;
      auto const& cols = sim.columns.at(fk.table);
      auto const& rcols = sim.columns.at(fk.ref_table);
      auto const  ci   = std::find(cols.begin(), cols.end(), fk.column) - cols.begin();
      auto const  ri = std::find(rcols.begin(), rcols.end(), fk.ref_column) - rcols.begin();
      std::set<std::string> present;
      for (auto const& r : sim.rows.at(fk.ref_table)) {
        present.insert(r.at(static_cast<std::size_t>(ri)));
      }
      for (auto const& r : sim.rows.at(fk.table)) {
        auto const& v = r.at(static_cast<std::size_t>(ci));
        if (!present.contains(v)) {
          sim.violations.push_back(fk.table + "." + fk.column + " = '" + v
                                   + "' has no row in " + fk.ref_table);
        }
      }
    }
    return sim;
  }

}  // namespace oracle
