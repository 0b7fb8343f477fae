#pragma once

// Graph morphisms and the flow of facts and instances along them.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "olog/core.hpp"
#include "olog/entailment.hpp"
#include "olog/error.hpp"
#include "olog/instance.hpp"

namespace olog {

  // Types go to types, aspects go to paths of the target graph.
  struct GraphMorphism {
    std::map<Id, Id>   type_map;
    std::map<Id, Path> aspect_map;

    bool operator==(GraphMorphism const&) const = default;
  };

  inline GraphMorphism identity_morphism(Graph const& g) {
    GraphMorphism h;
    for (auto const& t : g.types()) {
      h.type_map[t.id] = t.id;
    }
    for (auto const& a : g.aspects()) {
      h.aspect_map[a.id] = Path{a.src, {a.id}};
    }
    return h;
  }

  // Everything that keeps `h` from being a graph morphism src -> tgt.
  inline std::vector<std::string> morphism_problems(GraphMorphism const& h,
                                                    Graph const&         src,
                                                    Graph const&         tgt) {
    std::vector<std::string> out;
    for (auto const& t : src.types()) {
      auto it = h.type_map.find(t.id);
      if (it == h.type_map.end()) {
        out.push_back("type '" + t.id + "' is not mapped");
      } else if (!tgt.has_type(it->second)) {
        out.push_back("type '" + t.id + "' maps to unknown type '" + it->second
                      + "'");
      }
    }
    for (auto const& [id, _] : h.type_map) {
      if (!src.has_type(id)) {
        out.push_back("mapping for unknown source type '" + id + "'");
      }
    }
    for (auto const& [id, _] : h.aspect_map) {
      if (!src.has_aspect(id)) {
        out.push_back("mapping for unknown source aspect '" + id + "'");
      }
    }
    for (auto const& a : src.aspects()) {
      auto it = h.aspect_map.find(a.id);
      if (it == h.aspect_map.end()) {
        out.push_back("aspect '" + a.id + "' is not mapped");
        continue;
      }
      auto const s = h.type_map.find(a.src);
      auto const t = h.type_map.find(a.tgt);
      if (s == h.type_map.end() || t == h.type_map.end()) {
        continue;
      }
      auto const end = try_path_target(tgt, it->second);
      if (!end) {
        out.push_back("aspect '" + a.id + "' maps to " + to_string(it->second)
                      + ", which is not a path of the target");
      } else if (it->second.source != s->second || *end != t->second) {
        out.push_back("aspect '" + a.id + "' : " + a.src + " -> " + a.tgt
                      + " maps to " + to_string(it->second) + " : "
                      + it->second.source + " -> " + *end + ", expected "
                      + s->second + " -> " + t->second);
      }
    }
    return out;
  }

  inline void require_morphism(GraphMorphism const& h,
                               Graph const&         src,
                               Graph const&         tgt) {
    auto const problems = morphism_problems(h, src, tgt);
    if (!problems.empty()) {
      throw Error(ErrorKind::ill_typed, "not a graph morphism: " + problems[0]);
    }
  }

  inline Path translate_path(GraphMorphism const& h, Path const& p) {
    auto t = h.type_map.find(p.source);
    if (t == h.type_map.end()) {
      throw Error(ErrorKind::unknown_id,
                  "morphism does not map type '" + p.source + "'");
    }
    Path out{t->second, {}};
    for (auto const& e : p.edges) {
      auto a = h.aspect_map.find(e);
      if (a == h.aspect_map.end()) {
        throw Error(ErrorKind::unknown_id,
                    "morphism does not map aspect '" + e + "'");
      }
      out.edges.insert(out.edges.end(), a->second.edges.begin(),
                       a->second.edges.end());
    }
    return out;
  }

  inline Fact translate_fact(GraphMorphism const& h, Fact const& f) {
    return {translate_path(h, f.lhs), translate_path(h, f.rhs)};
  }

  // First h, then k.
  inline GraphMorphism compose(GraphMorphism const& h, GraphMorphism const& k) {
    GraphMorphism out;
    for (auto const& [s, t] : h.type_map) {
      auto it = k.type_map.find(t);
      if (it == k.type_map.end()) {
        throw Error(ErrorKind::composition,
                    "cannot compose morphisms: type '" + t + "' is not mapped");
      }
      out.type_map[s] = it->second;
    }
    for (auto const& [a, p] : h.aspect_map) {
      out.aspect_map[a] = translate_path(k, p);
    }
    return out;
  }

  // Longest aspect image; identity images count as 0.
  inline std::size_t max_image_length(GraphMorphism const& h) {
    std::size_t m = 0;
    for (auto const& [_, p] : h.aspect_map) {
      m = std::max(m, p.length());
    }
    return m;
  }

  // The bound at which translated source paths of length <= bound still fit.
  inline Bound target_bound(GraphMorphism const& h, Bound bound) {
    Bound b = bound;
    b.max_path_len *= std::max<std::size_t>(1, max_image_length(h));
    return b;
  }

  // Restriction of a target instance along h.
  inline KeyDiagram pullback_instances(GraphMorphism const& h,
                                       KeyDiagram const&    d2,
                                       Graph const&         src) {
    KeyDiagram d;
    for (auto const& t : src.types()) {
      d.sets[t.id] = d2.set(h.type_map.at(t.id));
    }
    for (auto const& a : src.aspects()) {
      auto const& img = h.aspect_map.at(a.id);
      auto&       fn  = d.funcs[a.id];
      for (auto const& k : d.sets[a.src]) {
        fn[k] = eval_path(d2, img, k);
      }
    }
    return d;
  }

  inline FactSet dir_flow(GraphMorphism const& h, FactSet const& e1) {
    FactSet out;
    for (auto const& f : e1) {
      out.insert(translate_fact(h, f));
    }
    return out;
  }

  // Source facts of length <= bound whose translations are entailed in the
  // saturated target congruence `c`.
  inline FactSet inv_flow(GraphMorphism const& h,
                          Graph const&         src,
                          Congruence const&    c,
                          Bound                bound = {}) {
    require_morphism(h, src, c.graph());
    PathUniverse u(src, bound.max_path_len, bound.max_universe);
    std::map<std::uint32_t, std::vector<std::uint32_t>> by_class;
    for (std::uint32_t i = 0; i < u.size(); ++i) {
      auto const j = c.require(translate_path(h, u.path(i)));
      by_class[c.find(j)].push_back(i);
    }
    FactSet out;
    for (auto const& [_, members] : by_class) {
      // A class of the target may receive paths with different source types
      // (h need not be injective on types); only parallel pairs are facts.
      for (auto a : members) {
        for (auto b : members) {
          if (u.source(a) == u.source(b) && u.target(a) == u.target(b)) {
            out.insert(Fact{u.path(a), u.path(b)});
          }
        }
      }
    }
    return out;
  }

  // The target is saturated at target_bound(h, bound) so that every
  // translated path fits.
  inline FactSet inv_flow(GraphMorphism const& h,
                          Graph const&         src,
                          Graph const&         tgt,
                          FactSet const&       e2,
                          Bound                bound = {}) {
    require_morphism(h, src, tgt);
    return inv_flow(h, src, saturate(tgt, e2, target_bound(h, bound)), bound);
  }

  inline FactSet inv_flow(GraphMorphism const& h,
                          Graph const&         src,
                          Specification const& tgt,
                          Bound                bound = {}) {
    return inv_flow(h, src, tgt.graph, tgt.facts, bound);
  }

  struct MorphismCheck {
    bool              ok = true;
    std::vector<Fact> offending;  // declared source facts not preserved
  };

  inline MorphismCheck is_spec_morphism(GraphMorphism const& h,
                                        Specification const& s1,
                                        Specification const& s2,
                                        Bound                bound = {}) {
    require_morphism(h, s1.graph, s2.graph);
    for (auto const& f : s1.facts) {
      detail::require_fits(f, bound);
    }
    auto const    c = saturate(s2, target_bound(h, bound));
    MorphismCheck r;
    for (auto const& f : s1.facts) {
      if (!entails(c, translate_fact(h, f)).entailed()) {
        r.ok = false;
        r.offending.push_back(f);
      }
    }
    return r;
  }

  ////////////////////////////////////////////////////////////////////////
  // Moves in the lattice of theories
  ////////////////////////////////////////////////////////////////////////

  inline Specification lot_contract(Specification s, FactSet const& facts) {
    for (auto const& f : facts) {
      if (s.facts.erase(f) == 0) {
        throw Error(ErrorKind::unknown_id,
                    "cannot contract " + to_string(f) + ": not declared");
      }
    }
    return s;
  }

  inline Specification lot_expand(Specification s, FactSet const& facts) {
    for (auto const& f : facts) {
      check_fact(s.graph, f);
      s.facts.insert(f);
    }
    return s;
  }

  inline Specification lot_revise(Specification const& s,
                                  FactSet const&       del,
                                  FactSet const&       add) {
    return lot_expand(lot_contract(s, del), add);
  }

  // Renames along h: the facts flow onto `target`. Sketch declarations are
  // not carried over.
  inline Specification lot_analogy(GraphMorphism const& h,
                                   Specification const& s,
                                   Graph const&         target) {
    require_morphism(h, s.graph, target);
    return Specification{s.name, target, dir_flow(h, s.facts), {}};
  }

}  // namespace olog
