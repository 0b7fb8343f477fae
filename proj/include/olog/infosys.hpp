#pragma once

// Diagrams of ologs: distributed and information systems, channels over a
// common core, the optimal (colimit) channel, fusion and system consequence.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "olog/core.hpp"
#include "olog/entailment.hpp"
#include "olog/error.hpp"
#include "olog/flow.hpp"

namespace olog {

  struct ShapeEdge {
    Id id;
    Id src;
    Id tgt;

    auto operator<=>(ShapeEdge const&) const = default;
  };

  struct Shape {
    std::set<Id>          nodes;
    std::map<Id, ShapeEdge> edges;

    void add_edge(Id id, Id src, Id tgt) {
      edges.emplace(id, ShapeEdge{id, std::move(src), std::move(tgt)});
    }

    // Nodes with no outgoing edge.
    [[nodiscard]] std::set<Id> final_nodes() const {
      std::set<Id> out = nodes;
      for (auto const& [_, e] : edges) {
        out.erase(e.src);
      }
      return out;
    }
  };

  struct DistributedSystem {
    Shape                        shape;
    std::map<Id, Graph>          graphs;
    std::map<Id, GraphMorphism> links;
  };

  struct InformationSystem {
    Shape                        shape;
    std::map<Id, Specification>  specs;
    std::map<Id, GraphMorphism> constraints;

    [[nodiscard]] DistributedSystem distributed() const {
      DistributedSystem ds{shape, {}, constraints};
      for (auto const& [n, s] : specs) {
        ds.graphs.emplace(n, s.graph);
      }
      return ds;
    }
  };

  struct Channel {
    Graph                        core;
    std::map<Id, GraphMorphism> links;
  };

  struct SystemCheck {
    bool                     ok = true;
    std::vector<std::string> violations;

    void fail(std::string why) {
      ok = false;
      violations.push_back(std::move(why));
    }
  };

  // Shape endpoints resolve and every link is a graph morphism between the
  // graphs at its endpoints.
  inline SystemCheck check_distributed_system(DistributedSystem const& ds) {
    SystemCheck r;
    for (auto const& n : ds.shape.nodes) {
      if (!ds.graphs.contains(n)) {
        r.fail("node '" + n + "' has no graph");
      }
    }
    for (auto const& [id, e] : ds.shape.edges) {
      if (!ds.shape.nodes.contains(e.src) || !ds.shape.nodes.contains(e.tgt)) {
        r.fail("edge '" + id + "' has an unknown endpoint");
        continue;
      }
      auto it = ds.links.find(id);
      if (it == ds.links.end()) {
        r.fail("edge '" + id + "' has no link");
        continue;
      }
      for (auto const& p :
           morphism_problems(it->second, ds.graphs.at(e.src), ds.graphs.at(e.tgt))) {
        r.fail("edge '" + id + "': " + p);
      }
    }
    return r;
  }

  // Additionally, every constraint preserves the facts of its source.
  inline SystemCheck check_information_system(InformationSystem const& sys,
                                              Bound bound = {}) {
    SystemCheck r = check_distributed_system(sys.distributed());
    if (!r.ok) {
      return r;
    }
    for (auto const& [id, e] : sys.shape.edges) {
      auto const m = is_spec_morphism(
          sys.constraints.at(id), sys.specs.at(e.src), sys.specs.at(e.tgt), bound);
      for (auto const& f : m.offending) {
        r.fail("edge '" + id + "' does not preserve " + to_string(f));
      }
    }
    return r;
  }

  namespace detail {
    inline Id tag(Id const& node, Id const& id) {
      return node + "." + id;
    }

    struct TagUnion {
      std::map<Id, Id> parent;

      void add(Id const& t) {
        parent.emplace(t, t);
      }
      Id find(Id t) {
        while (parent.at(t) != t) {
          t = parent.at(t);
        }
        return t;
      }
      // The lexicographically least tag stays the root.
      void unite(Id const& a, Id const& b) {
        Id ra = find(a);
        Id rb = find(b);
        if (ra == rb) {
          return;
        }
        if (rb < ra) {
          std::swap(ra, rb);
        }
        parent[rb] = ra;
      }
    };
  }  // namespace detail

  // The colimit of the graph diagram: tagged disjoint union of all node graphs
  // modulo the identifications made by the links. Core ids are the least
  // "node.id" tag of each class.
  inline Channel optimal_channel(DistributedSystem const& ds) {
    auto const chk = check_distributed_system(ds);
    if (!chk.ok) {
      throw Error(ErrorKind::ill_typed, chk.violations.front());
    }
    detail::TagUnion types;
    detail::TagUnion aspects;
    for (auto const& n : ds.shape.nodes) {
      for (auto const& t : ds.graphs.at(n).types()) {
        types.add(detail::tag(n, t.id));
      }
      for (auto const& a : ds.graphs.at(n).aspects()) {
        aspects.add(detail::tag(n, a.id));
      }
    }
    for (auto const& [id, e] : ds.shape.edges) {
      auto const& h = ds.links.at(id);
      for (auto const& [s, t] : h.type_map) {
        types.unite(detail::tag(e.src, s), detail::tag(e.tgt, t));
      }
      for (auto const& [a, p] : h.aspect_map) {
        if (p.length() != 1) {
          throw Error(ErrorKind::unsupported_link,
                      "edge '" + id + "' maps aspect '" + a + "' to "
                          + to_string(p)
                          + "; the colimit needs single-aspect images");
        }
        aspects.unite(detail::tag(e.src, a), detail::tag(e.tgt, p.edges[0]));
      }
    }

    Channel ch;
    for (auto const& n : ds.shape.nodes) {
      auto const& g = ds.graphs.at(n);
      for (auto const& t : g.types()) {
        auto const tag = detail::tag(n, t.id);
        if (types.find(tag) == tag) {
          ch.core.add_type(tag, t.label);
        }
      }
      for (auto const& a : g.aspects()) {
        auto const tag = detail::tag(n, a.id);
        if (aspects.find(tag) == tag) {
          ch.core.add_aspect(tag, types.find(detail::tag(n, a.src)),
                             types.find(detail::tag(n, a.tgt)), a.label);
        }
      }
    }
    for (auto const& n : ds.shape.nodes) {
      auto const&   g = ds.graphs.at(n);
      GraphMorphism iota;
      for (auto const& t : g.types()) {
        iota.type_map[t.id] = types.find(detail::tag(n, t.id));
      }
      for (auto const& a : g.aspects()) {
        iota.aspect_map[a.id]
            = Path{iota.type_map[a.src], {aspects.find(detail::tag(n, a.id))}};
      }
      ch.links.emplace(n, std::move(iota));
    }
    return ch;
  }

  // Per edge e : n -> m, link_n must equal G_e followed by link_m.
  inline SystemCheck check_channel_cover(DistributedSystem const& ds,
                                         Channel const&           ch) {
    SystemCheck r;
    for (auto const& n : ds.shape.nodes) {
      auto it = ch.links.find(n);
      if (it == ch.links.end()) {
        r.fail("node '" + n + "' has no link into the core");
        continue;
      }
      for (auto const& p : morphism_problems(it->second, ds.graphs.at(n), ch.core)) {
        r.fail("node '" + n + "': " + p);
      }
    }
    if (!r.ok) {
      return r;
    }
    for (auto const& [id, e] : ds.shape.edges) {
      if (compose(ds.links.at(id), ch.links.at(e.tgt)) != ch.links.at(e.src)) {
        r.fail("edge '" + id + "' does not commute with the channel");
      }
    }
    return r;
  }

  // h : from.core -> to.core refines `from` into `to` when from.link_n ; h
  // equals to.link_n at every node.
  inline bool check_refinement(GraphMorphism const& h,
                               Channel const&       from,
                               Channel const&       to) {
    if (!morphism_problems(h, from.core, to.core).empty()) {
      return false;
    }
    for (auto const& [n, link] : from.links) {
      auto it = to.links.find(n);
      if (it == to.links.end() || compose(link, h) != it->second) {
        return false;
      }
    }
    return from.links.size() == to.links.size();
  }

  // The map out of the optimal core into a covering channel, read off the
  // links of `to` through any member of each class.
  inline GraphMorphism induced_refinement(Channel const& optimal,
                                          Channel const& to) {
    GraphMorphism h;
    for (auto const& [n, iota] : optimal.links) {
      auto const& gamma = to.links.at(n);
      for (auto const& [t, core_t] : iota.type_map) {
        auto [it, fresh] = h.type_map.emplace(core_t, gamma.type_map.at(t));
        if (!fresh && it->second != gamma.type_map.at(t)) {
          throw Error(ErrorKind::ill_typed,
                      "channel does not cover: core type '" + core_t
                          + "' has two images");
        }
      }
      for (auto const& [a, core_p] : iota.aspect_map) {
        Id const& core_a = core_p.edges.at(0);
        auto [it, fresh] = h.aspect_map.emplace(core_a, gamma.aspect_map.at(a));
        if (!fresh && it->second != gamma.aspect_map.at(a)) {
          throw Error(ErrorKind::ill_typed,
                      "channel does not cover: core aspect '" + core_a
                          + "' has two images");
        }
      }
    }
    return h;
  }

  // Union of the nodes' facts flowed into the optimal core. `only` restricts
  // the contributing nodes (the core is always the full colimit).
  inline Specification fusion(InformationSystem const&       sys,
                              std::optional<std::set<Id>> const& only = {}) {
    auto const    ch = optimal_channel(sys.distributed());
    Specification out{"fusion", ch.core, {}, {}};
    for (auto const& [n, s] : sys.specs) {
      if (only && !only->contains(n)) {
        continue;
      }
      auto const flowed = dir_flow(ch.links.at(n), s.facts);
      out.facts.insert(flowed.begin(), flowed.end());
    }
    return out;
  }

  // Inverse flow of the fusion back to every node, bounded.
  inline std::map<Id, Specification> system_consequence(
      InformationSystem const& sys,
      Bound                    bound = {}) {
    auto const ch    = optimal_channel(sys.distributed());
    auto const fused = fusion(sys);
    auto const c     = saturate(fused, bound);
    std::map<Id, Specification> out;
    for (auto const& [n, s] : sys.specs) {
      Specification r{s.name, s.graph, {}, s.sketch};
      r.facts = inv_flow(ch.links.at(n), s.graph, c, bound);
      out.emplace(n, std::move(r));
    }
    return out;
  }

  // theta : sys -> sys2 over a shared shape. Naturality at every edge, and at
  // every node the target spec entails the flowed source facts.
  inline SystemCheck check_system_morphism(
      std::map<Id, GraphMorphism> const& theta,
      InformationSystem const&           sys,
      InformationSystem const&           sys2,
      Bound                              bound = {}) {
    SystemCheck r;
    if (sys.shape.nodes != sys2.shape.nodes
        || sys.shape.edges != sys2.shape.edges) {
      r.fail("systems have different shapes");
      return r;
    }
    for (auto const& n : sys.shape.nodes) {
      auto it = theta.find(n);
      if (it == theta.end()) {
        r.fail("no component at node '" + n + "'");
        continue;
      }
      for (auto const& p : morphism_problems(
               it->second, sys.specs.at(n).graph, sys2.specs.at(n).graph)) {
        r.fail("node '" + n + "': " + p);
      }
    }
    if (!r.ok) {
      return r;
    }
    for (auto const& [id, e] : sys.shape.edges) {
      if (compose(sys.constraints.at(id), theta.at(e.tgt))
          != compose(theta.at(e.src), sys2.constraints.at(id))) {
        r.fail("naturality fails at edge '" + id + "'");
      }
    }
    for (auto const& n : sys.shape.nodes) {
      auto const& h = theta.at(n);
      auto const  c = saturate(sys2.specs.at(n), target_bound(h, bound));
      for (auto const& f : sys.specs.at(n).facts) {
        detail::require_fits(f, bound);
        if (!entails(c, translate_fact(h, f)).entailed()) {
          r.fail("node '" + n + "': " + to_string(translate_fact(h, f))
                 + " is not entailed by the target");
        }
      }
    }
    return r;
  }

}  // namespace olog
