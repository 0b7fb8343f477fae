#pragma once

// Types, aspects, graphs, facts and specifications.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "olog/error.hpp"
#include "olog/path.hpp"
#include "olog/sketch_decl.hpp"

namespace olog {

  struct TypeNode {
    Id                    id;
    std::string           label;
    std::set<std::string> lint_flags;

    bool operator==(TypeNode const& other) const {
      return id == other.id && label == other.label;
    }
  };

  struct Aspect {
    Id          id;
    std::string label;
    Id          src;
    Id          tgt;
    bool        injective  = false;
    bool        surjective = false;

    bool operator==(Aspect const&) const = default;
  };

  namespace detail {
    inline bool starts_with_article(std::string_view s) {
      return s.starts_with("a ") || s.starts_with("an ") || s.starts_with("A ")
             || s.starts_with("An ");
    }
  }  // namespace detail

  // Style rules for type labels. These are warnings; nothing is rejected.
  inline std::set<std::string> type_label_lints(std::string_view label) {
    std::set<std::string> out;
    if (!detail::starts_with_article(label)) {
      out.insert("type-article");
    }
    if (!label.empty()
        && std::ispunct(static_cast<unsigned char>(label.back()))
        && label.back() != ')') {
      out.insert("type-punctuation");
    }
    return out;
  }

  // Types and aspects kept sorted by id. Duplicates can be inserted (a
  // hand-built graph may be wrong); validate_specification reports them.
  class Graph {
   public:
    void add_type(TypeNode t) {
      if (t.label.empty()) {
        t.label = t.id;
      }
      t.lint_flags = type_label_lints(t.label);
      auto it      = std::upper_bound(
          types_.begin(), types_.end(), t.id, [](Id const& id, auto const& x) {
            return id < x.id;
          });
      types_.insert(it, std::move(t));
    }

    void add_type(Id id, std::string label = {}) {
      add_type(TypeNode{std::move(id), std::move(label), {}});
    }

    void add_aspect(Aspect a) {
      if (a.label.empty()) {
        a.label = a.id;
      }
      auto it = std::upper_bound(
          aspects_.begin(),
          aspects_.end(),
          a.id,
          [](Id const& id, auto const& x) { return id < x.id; });
      aspects_.insert(it, std::move(a));
    }

    void add_aspect(Id id, Id src, Id tgt, std::string label = {}) {
      add_aspect(Aspect{std::move(id), std::move(label), std::move(src),
                        std::move(tgt)});
    }

    void remove_type(Id const& id) {
      std::erase_if(types_, [&](auto const& t) { return t.id == id; });
    }

    [[nodiscard]] std::vector<TypeNode> const& types() const noexcept {
      return types_;
    }
    [[nodiscard]] std::vector<Aspect> const& aspects() const noexcept {
      return aspects_;
    }

    [[nodiscard]] TypeNode const* find_type(Id const& id) const {
      auto it = std::lower_bound(
          types_.begin(), types_.end(), id, [](auto const& x, Id const& k) {
            return x.id < k;
          });
      return (it != types_.end() && it->id == id) ? &*it : nullptr;
    }

    [[nodiscard]] Aspect const* find_aspect(Id const& id) const {
      auto it = std::lower_bound(
          aspects_.begin(), aspects_.end(), id, [](auto const& x, Id const& k) {
            return x.id < k;
          });
      return (it != aspects_.end() && it->id == id) ? &*it : nullptr;
    }

    [[nodiscard]] bool has_type(Id const& id) const {
      return find_type(id) != nullptr;
    }
    [[nodiscard]] bool has_aspect(Id const& id) const {
      return find_aspect(id) != nullptr;
    }

    [[nodiscard]] TypeNode const& type(Id const& id) const {
      if (auto const* t = find_type(id)) {
        return *t;
      }
      throw Error(ErrorKind::unknown_id, "unknown type '" + id + "'");
    }

    [[nodiscard]] Aspect const& aspect(Id const& id) const {
      if (auto const* a = find_aspect(id)) {
        return *a;
      }
      throw Error(ErrorKind::unknown_id, "unknown aspect '" + id + "'");
    }

    // Aspects leaving `type`, in canonical (id) order.
    [[nodiscard]] std::vector<Aspect const*> outgoing(Id const& type) const {
      std::vector<Aspect const*> out;
      for (auto const& a : aspects_) {
        if (a.src == type) {
          out.push_back(&a);
        }
      }
      return out;
    }

    [[nodiscard]] bool empty() const noexcept {
      return types_.empty() && aspects_.empty();
    }

   private:
    std::vector<TypeNode> types_;
    std::vector<Aspect>   aspects_;
  };

  // Same ids and endpoints; labels and modifiers are ignored.
  inline bool same_shape(Graph const& a, Graph const& b) {
    if (a.types().size() != b.types().size()
        || a.aspects().size() != b.aspects().size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.types().size(); ++i) {
      if (a.types()[i].id != b.types()[i].id) {
        return false;
      }
    }
    for (std::size_t i = 0; i < a.aspects().size(); ++i) {
      auto const& x = a.aspects()[i];
      auto const& y = b.aspects()[i];
      if (x.id != y.id || x.src != y.src || x.tgt != y.tgt) {
        return false;
      }
    }
    return true;
  }

  struct Specification {
    std::string             name;
    Graph                   graph;
    FactSet                 facts;
    std::vector<SketchDecl> sketch;
  };

  ////////////////////////////////////////////////////////////////////////
  // Paths
  ////////////////////////////////////////////////////////////////////////

  // Target type of a path, or nullopt if it references an unknown aspect or
  // does not compose.
  inline std::optional<Id> try_path_target(Graph const& g, Path const& p) {
    if (!g.has_type(p.source)) {
      return std::nullopt;
    }
    Id at = p.source;
    for (auto const& e : p.edges) {
      auto const* a = g.find_aspect(e);
      if (a == nullptr || a->src != at) {
        return std::nullopt;
      }
      at = a->tgt;
    }
    return at;
  }

  inline Id path_target(Graph const& g, Path const& p) {
    if (!g.has_type(p.source)) {
      throw Error(ErrorKind::unknown_id,
                  "path " + to_string(p) + " starts at unknown type '"
                      + p.source + "'");
    }
    Id at = p.source;
    for (auto const& e : p.edges) {
      auto const& a = g.aspect(e);
      if (a.src != at) {
        throw Error(ErrorKind::composition,
                    "path " + to_string(p) + " does not compose: aspect '" + e
                        + "' leaves '" + a.src + "' but the path is at '" + at
                        + "'");
      }
      at = a.tgt;
    }
    return at;
  }

  inline Path compose_paths(Graph const& g, Path const& p, Path const& q) {
    Id const mid = path_target(g, p);
    if (mid != q.source) {
      throw Error(ErrorKind::composition,
                  "cannot compose " + to_string(p) + " (ending at '" + mid
                      + "') with " + to_string(q) + " (starting at '"
                      + q.source + "')");
    }
    path_target(g, q);
    Path out = p;
    out.edges.insert(out.edges.end(), q.edges.begin(), q.edges.end());
    return out;
  }

  // Throws ill_typed if the two sides do not share endpoints.
  inline void check_fact(Graph const& g, Fact const& f) {
    Id const lt = path_target(g, f.lhs);
    Id const rt = path_target(g, f.rhs);
    if (f.lhs.source != f.rhs.source || lt != rt) {
      throw Error(ErrorKind::ill_typed,
                  "fact " + to_string(f) + " is ill-typed: " + f.lhs.source
                      + " -> " + lt + " vs " + f.rhs.source + " -> " + rt);
    }
  }

  ////////////////////////////////////////////////////////////////////////
  // Validation
  ////////////////////////////////////////////////////////////////////////

  enum class Severity { error, warning };

  struct Diagnostic {
    Severity    severity;
    std::string code;
    std::string message;
  };

  namespace detail {
    inline void check_path(Graph const&             g,
                           Path const&              p,
                           std::string const&       where,
                           std::vector<Diagnostic>& out) {
      if (!g.has_type(p.source)) {
        out.push_back({Severity::error, "unknown-type",
                       where + ": path " + to_string(p)
                           + " starts at unknown type '" + p.source + "'"});
        return;
      }
      Id at = p.source;
      for (auto const& e : p.edges) {
        auto const* a = g.find_aspect(e);
        if (a == nullptr) {
          out.push_back({Severity::error, "unknown-aspect",
                         where + ": path " + to_string(p)
                             + " uses unknown aspect '" + e + "'"});
          return;
        }
        if (a->src != at) {
          out.push_back({Severity::error, "non-composable",
                         where + ": path " + to_string(p) + " does not compose at '"
                             + e + "'"});
          return;
        }
        at = a->tgt;
      }
    }

    inline void check_leg(Graph const&             g,
                          std::string const&       where,
                          Id const&                target,
                          Leg const&               leg,
                          bool                     leaves_target,
                          std::vector<Diagnostic>& out) {
      auto const* a = g.find_aspect(leg.aspect);
      if (a == nullptr) {
        out.push_back({Severity::error, "bad-sketch",
                       where + ": unknown aspect '" + leg.aspect + "'"});
        return;
      }
      Id const& near = leaves_target ? a->src : a->tgt;
      Id const& far  = leaves_target ? a->tgt : a->src;
      if (near != target || far != leg.type) {
        out.push_back(
            {Severity::error, "bad-sketch",
             where + ": aspect '" + leg.aspect + "' runs " + a->src + " -> "
                 + a->tgt + ", expected "
                 + (leaves_target ? target + " -> " + leg.type
                                  : leg.type + " -> " + target)});
      }
    }

    inline void expect_path(Graph const&             g,
                            std::string const&       where,
                            Path const&              p,
                            Id const&                from,
                            Id const&                to,
                            std::vector<Diagnostic>& out) {
      auto const t = try_path_target(g, p);
      if (!t || p.source != from || *t != to) {
        out.push_back({Severity::error, "bad-sketch",
                       where + ": path " + to_string(p) + " should run " + from
                           + " -> " + to});
      }
    }

    inline void check_decl(Graph const&             g,
                           SketchDecl const&        decl,
                           std::vector<Diagnostic>& out) {
      std::string const where = decl_name(decl);
      if (!g.has_type(decl_target(decl))) {
        out.push_back({Severity::error, "bad-sketch",
                       where + ": unknown target type '" + decl_target(decl)
                           + "'"});
        return;
      }
      if (auto const* p = std::get_if<ProductDecl>(&decl)) {
        for (auto const& leg : p->factors) {
          check_leg(g, where, p->target, leg, true, out);
        }
      } else if (auto const* pb = std::get_if<PullbackDecl>(&decl)) {
        check_leg(g, where, pb->target, pb->leg_b, true, out);
        check_leg(g, where, pb->target, pb->leg_c, true, out);
        expect_path(g, where, pb->cospan_f, pb->leg_b.type, pb->base, out);
        expect_path(g, where, pb->cospan_g, pb->leg_c.type, pb->base, out);
      } else if (auto const* c = std::get_if<CoproductDecl>(&decl)) {
        for (auto const& leg : c->summands) {
          check_leg(g, where, c->target, leg, false, out);
        }
      } else if (auto const* po = std::get_if<PushoutDecl>(&decl)) {
        check_leg(g, where, po->target, po->leg_b, false, out);
        check_leg(g, where, po->target, po->leg_c, false, out);
        expect_path(g, where, po->span_f, po->apex, po->leg_b.type, out);
        expect_path(g, where, po->span_g, po->apex, po->leg_c.type, out);
      } else if (auto const* im = std::get_if<ImageDecl>(&decl)) {
        auto const* s = g.find_aspect(im->surjection);
        auto const* i = g.find_aspect(im->injection);
        auto const  t = try_path_target(g, im->of);
        if (s == nullptr || i == nullptr || !t) {
          out.push_back({Severity::error, "bad-sketch",
                         where + ": unresolved image factorization"});
          return;
        }
        if (s->src != im->of.source || s->tgt != im->target
            || i->src != im->target || i->tgt != *t) {
          out.push_back({Severity::error, "bad-sketch",
                         where + ": expected " + im->surjection + " : "
                             + im->of.source + " -> " + im->target + " and "
                             + im->injection + " : " + im->target + " -> " + *t});
        }
      }
    }
  }  // namespace detail

  // All broken invariants of the specification. Empty iff well-formed. Style
  // warnings are reported separately by lint_specification.
  inline std::vector<Diagnostic> validate_specification(Specification const& s) {
    std::vector<Diagnostic> out;
    auto const&             g = s.graph;

    std::set<Id> type_ids;
    for (auto const& t : g.types()) {
      if (!type_ids.insert(t.id).second) {
        out.push_back({Severity::error, "duplicate-id",
                       "type id '" + t.id + "' declared more than once"});
      }
      if (t.label.empty()) {
        out.push_back({Severity::error, "empty-label",
                       "type '" + t.id + "' has an empty label"});
      }
    }
    std::set<Id> aspect_ids;
    for (auto const& a : g.aspects()) {
      if (!aspect_ids.insert(a.id).second) {
        out.push_back({Severity::error, "duplicate-id",
                       "aspect id '" + a.id + "' declared more than once"});
      }
      if (type_ids.contains(a.id)) {
        out.push_back({Severity::error, "duplicate-id",
                       "id '" + a.id + "' names both a type and an aspect"});
      }
      if (a.id == "Id") {
        out.push_back({Severity::error, "reserved-id",
                       "aspect id 'Id' clashes with the key column"});
      }
      if (!type_ids.contains(a.src)) {
        out.push_back({Severity::error, "dangling-endpoint",
                       "aspect '" + a.id + "' has unknown source '" + a.src
                           + "'"});
      }
      if (!type_ids.contains(a.tgt)) {
        out.push_back({Severity::error, "dangling-endpoint",
                       "aspect '" + a.id + "' has unknown target '" + a.tgt
                           + "'"});
      }
    }

    for (auto const& f : s.facts) {
      std::string const where = "fact " + to_string(f);
      auto const        n     = out.size();
      detail::check_path(g, f.lhs, where, out);
      detail::check_path(g, f.rhs, where, out);
      if (out.size() != n) {
        continue;
      }
      auto const lt = try_path_target(g, f.lhs);
      auto const rt = try_path_target(g, f.rhs);
      if (f.lhs.source != f.rhs.source || lt != rt) {
        out.push_back({Severity::error, "endpoint-mismatch",
                       where + ": sides run " + f.lhs.source + " -> " + *lt
                           + " and " + f.rhs.source + " -> " + *rt});
      }
    }

    for (auto const& d : s.sketch) {
      detail::check_decl(g, d, out);
    }
    return out;
  }

  namespace detail {
    inline bool has_fact_either_way(Specification const& s,
                                    Path const&          a,
                                    Path const&          b) {
      return a == b || s.facts.contains(Fact{a, b})
             || s.facts.contains(Fact{b, a});
    }
  }  // namespace detail

  // Style-rule warnings, plus sketch declarations whose commuting square (or
  // factorization triangle) is not declared as a fact.
  inline std::vector<Diagnostic> lint_specification(Specification const& s) {
    std::vector<Diagnostic> out;
    for (auto const& t : s.graph.types()) {
      for (auto const& flag : t.lint_flags) {
        std::string const msg
            = flag == "type-article"
                  ? "label of type '" + t.id + "' should begin with 'a' or 'an'"
                  : "label of type '" + t.id
                        + "' should not end in punctuation";
        out.push_back({Severity::warning, flag, msg});
      }
    }
    for (auto const& d : s.sketch) {
      if (auto const* pb = std::get_if<PullbackDecl>(&d)) {
        Path l{pb->target, {pb->leg_b.aspect}};
        l.edges.insert(
            l.edges.end(), pb->cospan_f.edges.begin(), pb->cospan_f.edges.end());
        Path r{pb->target, {pb->leg_c.aspect}};
        r.edges.insert(
            r.edges.end(), pb->cospan_g.edges.begin(), pb->cospan_g.edges.end());
        if (!detail::has_fact_either_way(s, l, r)) {
          out.push_back({Severity::warning, "missing-square",
                         decl_name(d) + ": commuting square " + to_string(l)
                             + " = " + to_string(r) + " is not declared"});
        }
      } else if (auto const* po = std::get_if<PushoutDecl>(&d)) {
        Path l = po->span_f;
        l.edges.push_back(po->leg_b.aspect);
        Path r = po->span_g;
        r.edges.push_back(po->leg_c.aspect);
        if (!detail::has_fact_either_way(s, l, r)) {
          out.push_back({Severity::warning, "missing-square",
                         decl_name(d) + ": commuting square " + to_string(l)
                             + " = " + to_string(r) + " is not declared"});
        }
      } else if (auto const* im = std::get_if<ImageDecl>(&d)) {
        Path r{im->of.source, {im->surjection, im->injection}};
        if (!detail::has_fact_either_way(s, im->of, r)) {
          out.push_back({Severity::warning, "missing-square",
                         decl_name(d) + ": factorization " + to_string(im->of)
                             + " = " + to_string(r) + " is not declared"});
        }
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Relations as spans
  ////////////////////////////////////////////////////////////////////////

  struct RoleLeg {
    std::string role;
    Id          type;
  };

  namespace detail {
    inline std::string identifier_from(std::string_view text) {
      std::string out;
      for (char c : text) {
        auto const u = static_cast<unsigned char>(c);
        out += (std::isalnum(u) || c == '_') ? c : '_';
      }
      if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
        out.insert(out.begin(), '_');
      }
      return out;
    }

    inline Id fresh_id(Graph const& g, Id base) {
      if (!g.has_type(base) && !g.has_aspect(base)) {
        return base;
      }
      for (int i = 2;; ++i) {
        Id candidate = base + "_" + std::to_string(i);
        if (!g.has_type(candidate) && !g.has_aspect(candidate)) {
          return candidate;
        }
      }
    }
  }  // namespace detail

  // Linearizes an n-ary relation: a fresh apex type named after the relation
  // with one aspect per role, apex -> role type. Returns the extended graph.
  inline Graph relation_to_span(Graph                       g,
                                std::string const&          name,
                                std::vector<RoleLeg> const& legs) {
    if (legs.empty()) {
      throw Error(ErrorKind::usage, "relation '" + name + "' has no legs");
    }
    for (auto const& leg : legs) {
      if (!g.has_type(leg.type)) {
        throw Error(ErrorKind::unknown_id,
                    "relation '" + name + "': unknown leg type '" + leg.type
                        + "'");
      }
    }
    Id const apex = detail::fresh_id(g, detail::identifier_from(name));
    g.add_type(apex, name);
    for (auto const& leg : legs) {
      Id const aid
          = detail::fresh_id(g, apex + "_" + detail::identifier_from(leg.role));
      g.add_aspect(aid, apex, leg.type, leg.role);
    }
    return g;
  }

}  // namespace olog
