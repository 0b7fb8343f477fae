#pragma once

// Instance-level semantics of sketch declarations: checks against data,
// canonical synthesis of the declared set, and mediating aspects.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "olog/core.hpp"
#include "olog/entailment.hpp"
#include "olog/error.hpp"
#include "olog/instance.hpp"
#include "olog/sketch_decl.hpp"

namespace olog {

  struct CheckResult {
    std::string name;  // e.g. "pullback:A" or "injective:f"
    bool        passed = true;
    std::string witness;
  };

  // "(k1,k2,...)"; zero components give "()".
  inline Key tuple_key(std::vector<Key> const& parts) {
    Key out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i != 0) {
        out += ',';
      }
      out += parts[i];
    }
    return out + ')';
  }

  namespace detail {
    inline CheckResult pass(std::string name) {
      return {std::move(name), true, {}};
    }
    inline CheckResult fail(std::string name, std::string witness) {
      return {std::move(name), false, std::move(witness)};
    }

    // Checks that `tuple_of` is injective on `target` and that its image is
    // exactly the expected tuple set. `tuple_of` returns the tuple and whether
    // it satisfies the defining equation at all.
    template <typename TupleOf, typename Expected>
    CheckResult check_tupling(std::string const&   name,
                              std::set<Key> const& target,
                              TupleOf&&            tuple_of,
                              Expected&&           for_each_expected) {
      // Compared componentwise: keys may themselves contain commas.
      std::map<std::vector<Key>, Key> hit;
      for (auto const& x : target) {
        auto [t, inside] = tuple_of(x);
        if (!inside) {
          return fail(name, "key '" + x + "' maps to " + tuple_key(t)
                                + ", which violates the defining equation");
        }
        auto [it, fresh] = hit.emplace(t, x);
        if (!fresh) {
          return fail(name, "duplicated tuple " + tuple_key(t) + " from keys '"
                                + it->second + "' and '" + x + "'");
        }
      }
      std::optional<std::vector<Key>> missing;
      for_each_expected([&](std::vector<Key> const& t) {
        if (!missing && !hit.contains(t)) {
          missing = t;
        }
      });
      if (missing) {
        return fail(name, "missing tuple " + tuple_key(*missing));
      }
      return pass(name);
    }

    // Calls f on every tuple of the cartesian product, in lexicographic order.
    template <typename F>
    void for_each_tuple(std::vector<std::vector<Key>> const& factors, F&& f) {
      for (auto const& s : factors) {
        if (s.empty()) {
          return;
        }
      }
      std::vector<std::size_t> at(factors.size(), 0);
      std::vector<Key>         parts(factors.size());
      while (true) {
        for (std::size_t i = 0; i < factors.size(); ++i) {
          parts[i] = factors[i][at[i]];
        }
        f(parts);
        std::size_t i = factors.size();
        while (i > 0) {
          --i;
          if (++at[i] < factors[i].size()) {
            break;
          }
          at[i] = 0;
          if (i == 0) {
            return;
          }
        }
        if (factors.empty()) {
          return;
        }
      }
    }

    inline std::vector<Key> as_vector(std::set<Key> const& s) {
      return {s.begin(), s.end()};
    }

    // Tags for coproduct-like constructions: "in<Type>" unless two legs share
    // a type, in which case the inclusion aspect id disambiguates.
    inline std::vector<std::string> tags_for(std::vector<Leg> const& legs) {
      std::set<Id> seen;
      bool         clash = false;
      for (auto const& l : legs) {
        clash |= !seen.insert(l.type).second;
      }
      std::vector<std::string> out;
      for (auto const& l : legs) {
        out.push_back("in" + (clash ? l.aspect : l.type));
      }
      return out;
    }

    struct UnionFind {
      std::vector<std::size_t> parent;
      explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t(0));
      }
      std::size_t find(std::size_t i) {
        while (parent[i] != i) {
          parent[i] = parent[parent[i]];
          i         = parent[i];
        }
        return i;
      }
      void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
          parent[std::max(a, b)] = std::min(a, b);
        }
      }
    };
  }  // namespace detail

  ////////////////////////////////////////////////////////////////////////
  // Checks
  ////////////////////////////////////////////////////////////////////////

  inline CheckResult check_product(KeyDiagram const& d, ProductDecl const& decl) {
    std::string const name = decl_name(decl);
    std::vector<std::vector<Key>> factors;
    for (auto const& leg : decl.factors) {
      factors.push_back(detail::as_vector(d.set(leg.type)));
    }
    return detail::check_tupling(
        name,
        d.set(decl.target),
        [&](Key const& x) {
          std::vector<Key> parts;
          for (auto const& leg : decl.factors) {
            parts.push_back(d.func(leg.aspect).at(x));
          }
          return std::pair{parts, true};
        },
        [&](auto&& visit) {
          detail::for_each_tuple(
              factors, [&](std::vector<Key> const& t) { visit(t); });
        });
  }

  inline CheckResult check_pullback(KeyDiagram const&   d,
                                    PullbackDecl const& decl) {
    auto const& bs = d.set(decl.leg_b.type);
    auto const& cs = d.set(decl.leg_c.type);
    std::map<Key, std::vector<Key>> c_by_image;
    for (auto const& c : cs) {
      c_by_image[eval_path(d, decl.cospan_g, c)].push_back(c);
    }
    return detail::check_tupling(
        decl_name(decl),
        d.set(decl.target),
        [&](Key const& x) {
          auto const b = d.func(decl.leg_b.aspect).at(x);
          auto const c = d.func(decl.leg_c.aspect).at(x);
          bool const ok
              = eval_path(d, decl.cospan_f, b) == eval_path(d, decl.cospan_g, c);
          return std::pair{std::vector<Key>{b, c}, ok};
        },
        [&](auto&& visit) {
          for (auto const& b : bs) {
            auto it = c_by_image.find(eval_path(d, decl.cospan_f, b));
            if (it != c_by_image.end()) {
              for (auto const& c : it->second) {
                visit(std::vector<Key>{b, c});
              }
            }
          }
        });
  }

  inline CheckResult check_coproduct(KeyDiagram const&    d,
                                     CoproductDecl const& decl) {
    std::string const name = decl_name(decl);
    std::map<Key, std::string> hit;  // target key -> "aspect(key)"
    for (auto const& leg : decl.summands) {
      auto const& fn = d.func(leg.aspect);
      for (auto const& k : d.set(leg.type)) {
        auto const& v    = fn.at(k);
        auto const  from = leg.aspect + "(" + k + ")";
        auto [it, fresh] = hit.emplace(v, from);
        if (!fresh) {
          return detail::fail(name, "target key '" + v + "' is hit by both "
                                        + it->second + " and " + from);
        }
      }
    }
    for (auto const& t : d.set(decl.target)) {
      if (!hit.contains(t)) {
        return detail::fail(name, "target key '" + t + "' is not covered");
      }
    }
    return detail::pass(name);
  }

  inline CheckResult check_pushout(KeyDiagram const& d, PushoutDecl const& decl) {
    std::string const name = decl_name(decl);
    auto const        bs   = detail::as_vector(d.set(decl.leg_b.type));
    auto const        cs   = detail::as_vector(d.set(decl.leg_c.type));
    auto index = [](std::vector<Key> const& v, Key const& k) {
      return static_cast<std::size_t>(
          std::lower_bound(v.begin(), v.end(), k) - v.begin());
    };
    detail::UnionFind uf(bs.size() + cs.size());
    for (auto const& a : d.set(decl.apex)) {
      uf.unite(index(bs, eval_path(d, decl.span_f, a)),
               bs.size() + index(cs, eval_path(d, decl.span_g, a)));
    }
    auto const& ib = d.func(decl.leg_b.aspect);
    auto const& ic = d.func(decl.leg_c.aspect);
    auto        image = [&](std::size_t i) {
      return i < bs.size() ? ib.at(bs[i]) : ic.at(cs[i - bs.size()]);
    };
    auto label = [&](std::size_t i) {
      return i < bs.size() ? decl.leg_b.aspect + "(" + bs[i] + ")"
                           : decl.leg_c.aspect + "(" + cs[i - bs.size()] + ")";
    };
    // Well defined on classes, then injective on classes.
    std::map<std::size_t, std::size_t> class_member;
    std::map<Key, std::size_t>         class_of_value;
    for (std::size_t i = 0; i < bs.size() + cs.size(); ++i) {
      auto const r = uf.find(i);
      auto [cm, fresh_class] = class_member.emplace(r, i);
      if (!fresh_class && image(cm->second) != image(i)) {
        return detail::fail(name, label(cm->second) + " = '" + image(cm->second)
                                      + "' but " + label(i) + " = '" + image(i)
                                      + "' although they are identified");
      }
      auto [cv, fresh_value] = class_of_value.emplace(image(i), r);
      if (!fresh_value && cv->second != r) {
        return detail::fail(name, "target key '" + image(i)
                                      + "' is hit by unidentified elements "
                                      + label(class_member[cv->second])
                                      + " and " + label(i));
      }
    }
    for (auto const& t : d.set(decl.target)) {
      if (!class_of_value.contains(t)) {
        return detail::fail(name, "target key '" + t + "' is not covered");
      }
    }
    return detail::pass(name);
  }

  inline CheckResult check_injective(KeyDiagram const& d, Aspect const& a) {
    std::string const  name = "injective:" + a.id;
    std::map<Key, Key> seen;
    for (auto const& k : d.set(a.src)) {
      auto const& v    = d.func(a.id).at(k);
      auto [it, fresh] = seen.emplace(v, k);
      if (!fresh) {
        return detail::fail(name, "keys '" + it->second + "' and '" + k
                                      + "' both map to '" + v + "'");
      }
    }
    return detail::pass(name);
  }

  inline CheckResult check_surjective(KeyDiagram const& d, Aspect const& a) {
    std::string const name = "surjective:" + a.id;
    std::set<Key>     hit;
    for (auto const& [_, v] : d.func(a.id)) {
      hit.insert(v);
    }
    for (auto const& t : d.set(a.tgt)) {
      if (!hit.contains(t)) {
        return detail::fail(name, "key '" + t + "' is not hit");
      }
    }
    return detail::pass(name);
  }

  inline CheckResult check_image(KeyDiagram const& d, ImageDecl const& decl) {
    std::string const name = decl_name(decl);
    auto const&       fs   = d.func(decl.surjection);
    auto const&       fi   = d.func(decl.injection);
    std::set<Key>     hit;
    for (auto const& x : d.set(decl.of.source)) {
      auto const& m = fs.at(x);
      hit.insert(m);
      auto const via  = fi.at(m);
      auto const want = eval_path(d, decl.of, x);
      if (via != want) {
        return detail::fail(name, "on key '" + x + "' the factorization gives '"
                                      + via + "' but the path gives '" + want
                                      + "'");
      }
    }
    for (auto const& t : d.set(decl.target)) {
      if (!hit.contains(t)) {
        return detail::fail(name, decl.surjection + " misses key '" + t + "'");
      }
    }
    std::map<Key, Key> seen;
    for (auto const& t : d.set(decl.target)) {
      auto [it, fresh] = seen.emplace(fi.at(t), t);
      if (!fresh) {
        return detail::fail(name, decl.injection + " sends '" + it->second
                                      + "' and '" + t + "' to '" + it->first
                                      + "'");
      }
    }
    return detail::pass(name);
  }

  inline CheckResult check_decl(KeyDiagram const& d, SketchDecl const& decl) {
    struct {
      KeyDiagram const& d;
      CheckResult operator()(ProductDecl const& x) const {
        return check_product(d, x);
      }
      CheckResult operator()(PullbackDecl const& x) const {
        return check_pullback(d, x);
      }
      CheckResult operator()(CoproductDecl const& x) const {
        return check_coproduct(d, x);
      }
      CheckResult operator()(PushoutDecl const& x) const {
        return check_pushout(d, x);
      }
      CheckResult operator()(ImageDecl const& x) const {
        return check_image(d, x);
      }
    } v{d};
    return std::visit(v, decl);
  }

  // Every declaration, then every injective/surjective modifier.
  inline std::vector<CheckResult> check_sketch(KeyDiagram const&    d,
                                               Specification const& spec) {
    std::vector<CheckResult> out;
    for (auto const& decl : spec.sketch) {
      out.push_back(check_decl(d, decl));
    }
    for (auto const& a : spec.graph.aspects()) {
      if (a.injective) {
        out.push_back(check_injective(d, a));
      }
      if (a.surjective) {
        out.push_back(check_surjective(d, a));
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Synthesis
  ////////////////////////////////////////////////////////////////////////

  struct Synthesis {
    Id                               target;
    std::set<Key>                    keys;
    std::map<Id, std::map<Key, Key>> functions;
  };

  inline Synthesis synthesize(SketchDecl const& decl, KeyDiagram const& d) {
    Id const& target = decl_target(decl);
    if (!d.set(target).empty()) {
      throw Error(ErrorKind::refused,
                  "type '" + target + "' already has "
                      + std::to_string(d.set(target).size())
                      + " keys; refusing to overwrite");
    }
    Synthesis s{target, {}, {}};
    // Distinct tuples can share a rendering when component keys contain
    // commas or parentheses.
    auto add_tuple_key = [&](Key const& k) {
      if (!s.keys.insert(k).second) {
        throw Error(ErrorKind::refused,
                    "tuple key '" + k + "' would name two different tuples");
      }
    };

    if (auto const* p = std::get_if<ProductDecl>(&decl)) {
      std::vector<std::vector<Key>> factors;
      for (auto const& leg : p->factors) {
        factors.push_back(detail::as_vector(d.set(leg.type)));
        s.functions[leg.aspect];
      }
      detail::for_each_tuple(factors, [&](std::vector<Key> const& t) {
        Key const k = tuple_key(t);
        add_tuple_key(k);
        for (std::size_t i = 0; i < t.size(); ++i) {
          s.functions[p->factors[i].aspect][k] = t[i];
        }
      });
    } else if (auto const* pb = std::get_if<PullbackDecl>(&decl)) {
      auto& fb = s.functions[pb->leg_b.aspect];
      auto& fc = s.functions[pb->leg_c.aspect];
      for (auto const& b : d.set(pb->leg_b.type)) {
        auto const fbv = eval_path(d, pb->cospan_f, b);
        for (auto const& c : d.set(pb->leg_c.type)) {
          if (fbv == eval_path(d, pb->cospan_g, c)) {
            Key const k = tuple_key({b, c});
            add_tuple_key(k);
            fb[k] = b;
            fc[k] = c;
          }
        }
      }
    } else if (auto const* c = std::get_if<CoproductDecl>(&decl)) {
      auto const tags = detail::tags_for(c->summands);
      for (std::size_t i = 0; i < c->summands.size(); ++i) {
        auto& fn = s.functions[c->summands[i].aspect];
        for (auto const& k : d.set(c->summands[i].type)) {
          Key const t = tags[i] + ":" + k;
          s.keys.insert(t);
          fn[k] = t;
        }
      }
    } else if (auto const* po = std::get_if<PushoutDecl>(&decl)) {
      auto const tags = detail::tags_for({po->leg_b, po->leg_c});
      auto const bs   = detail::as_vector(d.set(po->leg_b.type));
      auto const cs   = detail::as_vector(d.set(po->leg_c.type));
      std::vector<Key> tagged;
      for (auto const& b : bs) {
        tagged.push_back(tags[0] + ":" + b);
      }
      for (auto const& c : cs) {
        tagged.push_back(tags[1] + ":" + c);
      }
      auto index = [](std::vector<Key> const& v, Key const& k) {
        return static_cast<std::size_t>(
            std::lower_bound(v.begin(), v.end(), k) - v.begin());
      };
      detail::UnionFind uf(tagged.size());
      for (auto const& a : d.set(po->apex)) {
        uf.unite(index(bs, eval_path(d, po->span_f, a)),
                 bs.size() + index(cs, eval_path(d, po->span_g, a)));
      }
      std::map<std::size_t, Key> rep;
      for (std::size_t i = 0; i < tagged.size(); ++i) {
        auto [it, fresh] = rep.emplace(uf.find(i), tagged[i]);
        if (!fresh) {
          it->second = std::min(it->second, tagged[i]);
        }
      }
      auto& fb = s.functions[po->leg_b.aspect];
      auto& fc = s.functions[po->leg_c.aspect];
      for (std::size_t i = 0; i < tagged.size(); ++i) {
        Key const& r = rep[uf.find(i)];
        s.keys.insert(r);
        if (i < bs.size()) {
          fb[bs[i]] = r;
        } else {
          fc[cs[i - bs.size()]] = r;
        }
      }
    } else if (auto const* im = std::get_if<ImageDecl>(&decl)) {
      auto& fs = s.functions[im->surjection];
      auto& fi = s.functions[im->injection];
      for (auto const& x : d.set(im->of.source)) {
        Key const v = eval_path(d, im->of, x);
        s.keys.insert(v);
        fs[x] = v;
        fi[v] = v;
      }
    }
    return s;
  }

  inline KeyDiagram apply(KeyDiagram d, Synthesis const& s) {
    d.sets[s.target] = s.keys;
    for (auto const& [aspect, fn] : s.functions) {
      d.funcs[aspect] = fn;
    }
    return d;
  }

  ////////////////////////////////////////////////////////////////////////
  // Universal property
  ////////////////////////////////////////////////////////////////////////

  struct Mediator {
    Specification     spec;      // input spec, extended unless identity
    Path              mediator;  // single new aspect, or the identity
    std::vector<Fact> facts;     // cone_i = mediator;leg_i
  };

  namespace detail {
    inline std::vector<Leg> cone_legs(SketchDecl const& decl) {
      if (auto const* p = std::get_if<ProductDecl>(&decl)) {
        return p->factors;
      }
      if (auto const* pb = std::get_if<PullbackDecl>(&decl)) {
        return {pb->leg_b, pb->leg_c};
      }
      throw Error(ErrorKind::usage,
                  decl_name(decl)
                      + ": mediating aspects exist only for products and "
                        "pullbacks");
    }
  }  // namespace detail

  // The unique aspect m : x -> target with cone_i = m;leg_i. For a pullback,
  // the cone must commute with the cospan in `spec` (within `bound`).
  inline Mediator derive_mediating_aspect(Specification const&     spec,
                                          Id const&                x,
                                          std::vector<Path> const& cone,
                                          SketchDecl const&        decl,
                                          Id                       name  = {},
                                          Bound                    bound = {}) {
    auto const  legs   = detail::cone_legs(decl);
    Id const&   target = decl_target(decl);
    auto const& g      = spec.graph;
    if (cone.size() != legs.size()) {
      throw Error(ErrorKind::usage,
                  decl_name(decl) + " needs " + std::to_string(legs.size())
                      + " cone paths, got " + std::to_string(cone.size()));
    }
    if (!g.has_type(x)) {
      throw Error(ErrorKind::unknown_id, "unknown type '" + x + "'");
    }
    for (std::size_t i = 0; i < cone.size(); ++i) {
      auto const t = path_target(g, cone[i]);
      if (cone[i].source != x || t != legs[i].type) {
        throw Error(ErrorKind::ill_typed,
                    "cone path " + to_string(cone[i]) + " should run " + x
                        + " -> " + legs[i].type);
      }
    }
    if (auto const* pb = std::get_if<PullbackDecl>(&decl)) {
      Path const l = compose_paths(g, cone[0], pb->cospan_f);
      Path const r = compose_paths(g, cone[1], pb->cospan_g);
      if (!entails(spec, Fact{l, r}, bound).entailed()) {
        throw Error(ErrorKind::non_commuting,
                    "cone does not commute: " + to_string(l) + " and "
                        + to_string(r) + " are not equal in the specification");
      }
    }

    bool identity = (x == target);
    for (std::size_t i = 0; identity && i < cone.size(); ++i) {
      identity = cone[i] == Path{target, {legs[i].aspect}};
    }
    if (identity) {
      return {spec, Path::identity(target), {}};
    }

    Mediator m{spec, {}, {}};
    if (name.empty()) {
      name = detail::fresh_id(g, x + "_to_" + target);
    }
    if (g.has_aspect(name) || g.has_type(name)) {
      throw Error(ErrorKind::duplicate, "id '" + name + "' is already in use");
    }
    m.spec.graph.add_aspect(name, x, target);
    m.mediator = Path{x, {name}};
    for (std::size_t i = 0; i < cone.size(); ++i) {
      Fact f{cone[i], Path{x, {name, legs[i].aspect}}};
      m.facts.push_back(f);
      m.spec.facts.insert(f);
    }
    return m;
  }

  // Instance semantics of the mediator: x goes to the unique target key whose
  // legs agree with the cone evaluations.
  inline std::map<Key, Key> mediate_instances(KeyDiagram const&        d,
                                              SketchDecl const&        decl,
                                              Id const&                x,
                                              std::vector<Path> const& cone) {
    auto const legs = detail::cone_legs(decl);
    std::map<std::vector<Key>, Key> by_tuple;
    for (auto const& t : d.set(decl_target(decl))) {
      std::vector<Key> parts;
      for (auto const& leg : legs) {
        parts.push_back(d.func(leg.aspect).at(t));
      }
      by_tuple.emplace(std::move(parts), t);
    }
    std::map<Key, Key> out;
    for (auto const& k : d.set(x)) {
      std::vector<Key> parts;
      for (auto const& p : cone) {
        parts.push_back(eval_path(d, p, k));
      }
      auto it = by_tuple.find(parts);
      if (it == by_tuple.end()) {
        throw Error(ErrorKind::instance,
                    "no key of '" + decl_target(decl) + "' has legs "
                        + tuple_key(parts)
                        + " (needed for '" + k + "')");
      }
      out[k] = it->second;
    }
    return out;
  }

}  // namespace olog
