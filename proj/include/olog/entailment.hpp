#pragma once

// Bounded entailment: the least congruence on the paths of length at most L
// that contains the declared facts.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "olog/core.hpp"
#include "olog/error.hpp"
#include "olog/path.hpp"

namespace olog {

  struct Bound {
    std::size_t max_path_len = 6;
    // Refuse to build universes larger than this many paths.
    std::size_t max_universe = std::size_t(1) << 22;
  };

  // Every well-formed path of length <= L, stored as a trie. Paths are numbered
  // by (source, length, edge ids) so that a smaller index is a shorter path, or
  // a lexicographically smaller one of the same length.
  class PathUniverse {
   public:
    PathUniverse(Graph const& g, std::size_t max_len, std::size_t max_size)
        : max_len_(max_len) {
      for (auto const& t : g.types()) {
        type_ids_.push_back(t.id);
      }
      for (auto const& a : g.aspects()) {
        aspect_ids_.push_back(a.id);
      }
      auto type_index = [&](Id const& id) {
        auto it = std::lower_bound(type_ids_.begin(), type_ids_.end(), id);
        return static_cast<std::uint32_t>(it - type_ids_.begin());
      };
      std::vector<std::vector<std::uint32_t>> out(type_ids_.size());
      for (std::uint32_t e = 0; e < g.aspects().size(); ++e) {
        auto const& a = g.aspects()[e];
        aspect_src_.push_back(type_index(a.src));
        aspect_tgt_.push_back(type_index(a.tgt));
        out[aspect_src_.back()].push_back(e);
      }

      for (std::uint32_t t = 0; t < type_ids_.size(); ++t) {
        identity_.push_back(static_cast<std::uint32_t>(nodes_.size()));
        nodes_.push_back({t, t, none, none, 0});
        std::size_t level_begin = nodes_.size() - 1;
        for (std::size_t len = 1; len <= max_len; ++len) {
          std::size_t const level_end = nodes_.size();
          for (std::size_t i = level_begin; i < level_end; ++i) {
            for (auto e : out[nodes_[i].target]) {
              auto const j = static_cast<std::uint32_t>(nodes_.size());
              nodes_.push_back({t, aspect_tgt_[e], static_cast<std::uint32_t>(i),
                                e, static_cast<std::uint32_t>(len)});
              child_.emplace(key(static_cast<std::uint32_t>(i), e), j);
              if (nodes_.size() > max_size) {
                throw Error(ErrorKind::usage,
                            "path universe exceeds "
                                + std::to_string(max_size)
                                + " paths; lower the bound");
              }
            }
          }
          level_begin = level_end;
        }
      }
    }

    static constexpr std::uint32_t none = UINT32_MAX;

    [[nodiscard]] std::size_t size() const noexcept {
      return nodes_.size();
    }
    [[nodiscard]] std::size_t max_len() const noexcept {
      return max_len_;
    }

    [[nodiscard]] std::uint32_t source(std::uint32_t i) const {
      return nodes_[i].source;
    }
    [[nodiscard]] std::uint32_t target(std::uint32_t i) const {
      return nodes_[i].target;
    }
    [[nodiscard]] std::uint32_t length(std::uint32_t i) const {
      return nodes_[i].length;
    }
    [[nodiscard]] std::uint32_t parent(std::uint32_t i) const {
      return nodes_[i].parent;
    }
    [[nodiscard]] std::uint32_t last_edge(std::uint32_t i) const {
      return nodes_[i].last;
    }
    [[nodiscard]] std::uint32_t identity(std::uint32_t type) const {
      return identity_[type];
    }

    // Path i followed by aspect e, or none if that exceeds the bound.
    [[nodiscard]] std::uint32_t extend(std::uint32_t i, std::uint32_t e) const {
      auto it = child_.find(key(i, e));
      return it == child_.end() ? none : it->second;
    }

    [[nodiscard]] std::uint32_t aspect_src(std::uint32_t e) const {
      return aspect_src_[e];
    }
    [[nodiscard]] std::size_t aspect_count() const noexcept {
      return aspect_ids_.size();
    }
    [[nodiscard]] std::size_t type_count() const noexcept {
      return type_ids_.size();
    }

    [[nodiscard]] Path path(std::uint32_t i) const {
      Path p;
      p.source = type_ids_[nodes_[i].source];
      p.edges.resize(nodes_[i].length);
      for (auto k = nodes_[i].length; k > 0; --k) {
        p.edges[k - 1] = aspect_ids_[nodes_[i].last];
        i              = nodes_[i].parent;
      }
      return p;
    }

    // Index of a path, or nullopt if it is ill-formed or longer than the bound.
    [[nodiscard]] std::optional<std::uint32_t> index_of(Path const& p) const {
      auto t = std::lower_bound(type_ids_.begin(), type_ids_.end(), p.source);
      if (t == type_ids_.end() || *t != p.source) {
        return std::nullopt;
      }
      std::uint32_t i = identity_[t - type_ids_.begin()];
      for (auto const& id : p.edges) {
        auto e = std::lower_bound(aspect_ids_.begin(), aspect_ids_.end(), id);
        if (e == aspect_ids_.end() || *e != id) {
          return std::nullopt;
        }
        i = extend(i, static_cast<std::uint32_t>(e - aspect_ids_.begin()));
        if (i == none) {
          return std::nullopt;
        }
      }
      return i;
    }

   private:
    struct Node {
      std::uint32_t source;
      std::uint32_t target;
      std::uint32_t parent;
      std::uint32_t last;
      std::uint32_t length;
    };

    static std::uint64_t key(std::uint32_t i, std::uint32_t e) {
      return (std::uint64_t(i) << 32) | e;
    }

    std::size_t                                       max_len_;
    std::vector<Id>                                   type_ids_;
    std::vector<Id>                                   aspect_ids_;
    std::vector<std::uint32_t>                        aspect_src_;
    std::vector<std::uint32_t>                        aspect_tgt_;
    std::vector<Node>                                 nodes_;
    std::vector<std::uint32_t>                        identity_;
    std::unordered_map<std::uint64_t, std::uint32_t> child_;
  };

  // All ordered pairs of parallel paths of length <= bound, reflexive pairs
  // included.
  inline FactSet enumerate_equations(Graph const& g, Bound bound = {}) {
    PathUniverse u(g, bound.max_path_len, bound.max_universe);
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_ends;
    for (std::uint32_t i = 0; i < u.size(); ++i) {
      by_ends[(std::uint64_t(u.source(i)) << 32) | u.target(i)].push_back(i);
    }
    FactSet out;
    for (auto const& [_, members] : by_ends) {
      std::vector<Path> paths;
      for (auto i : members) {
        paths.push_back(u.path(i));
      }
      for (auto const& p : paths) {
        for (auto const& q : paths) {
          out.insert(Fact{p, q});
        }
      }
    }
    return out;
  }

  class Congruence {
   public:
    Congruence(Graph graph, Bound bound)
        : graph_(std::move(graph)),
          bound_(bound),
          universe_(graph_, bound.max_path_len, bound.max_universe),
          parent_(universe_.size()) {
      std::iota(parent_.begin(), parent_.end(), 0u);
    }

    [[nodiscard]] Graph const& graph() const noexcept {
      return graph_;
    }
    [[nodiscard]] Bound bound() const noexcept {
      return bound_;
    }
    [[nodiscard]] PathUniverse const& universe() const noexcept {
      return universe_;
    }

    [[nodiscard]] std::optional<std::uint32_t> index_of(Path const& p) const {
      return universe_.index_of(p);
    }

    [[nodiscard]] std::uint32_t find(std::uint32_t i) const {
      while (parent_[i] != i) {
        i = parent_[i];
      }
      return i;
    }

    // Both paths must fit the bound.
    [[nodiscard]] bool equivalent(Path const& p, Path const& q) const {
      return find(require(p)) == find(require(q));
    }

    // Shortest member of p's class, ties broken by aspect ids.
    [[nodiscard]] Path representative(Path const& p) const {
      return universe_.path(find(require(p)));
    }

    // Classes ordered by representative; members in universe order.
    [[nodiscard]] std::vector<std::vector<Path>> classes() const {
      std::vector<std::vector<Path>> out;
      std::vector<std::uint32_t>      slot(universe_.size(), PathUniverse::none);
      for (std::uint32_t i = 0; i < universe_.size(); ++i) {
        auto const r = find(i);
        if (slot[r] == PathUniverse::none) {
          slot[r] = static_cast<std::uint32_t>(out.size());
          out.emplace_back();
        }
        out[slot[r]].push_back(universe_.path(i));
      }
      return out;
    }

    // Every entailed equation: all ordered pairs within each class.
    [[nodiscard]] FactSet facts() const {
      FactSet out;
      for (auto const& cls : classes()) {
        for (auto const& p : cls) {
          for (auto const& q : cls) {
            out.insert(Fact{p, q});
          }
        }
      }
      return out;
    }

    // One fact `member = representative` per non-representative member.
    [[nodiscard]] FactSet generators() const {
      FactSet out;
      for (auto const& cls : classes()) {
        for (std::size_t k = 1; k < cls.size(); ++k) {
          out.insert(Fact{cls[k], cls[0]});
        }
      }
      return out;
    }

    // Merges the classes of two indices; the smaller root wins so that the
    // root is always the class minimum.
    bool unite(std::uint32_t a, std::uint32_t b) {
      a = find(a);
      b = find(b);
      if (a == b) {
        return false;
      }
      if (b < a) {
        std::swap(a, b);
      }
      parent_[b] = a;
      return true;
    }

    // Closes under left and right extension by single aspects. Together with
    // transitivity this gives every rule instance that stays in the universe.
    void close() {
      auto const& u = universe_;
      std::unordered_map<std::uint64_t, std::uint32_t> seen;
      bool                                              changed = true;
      while (changed) {
        changed = false;
        compress();
        seen.clear();
        for (std::uint32_t j = 0; j < u.size(); ++j) {
          if (u.length(j) == 0) {
            continue;
          }
          std::uint64_t const k
              = (std::uint64_t(parent_[u.parent(j)]) << 32) | u.last_edge(j);
          auto [it, fresh] = seen.emplace(k, j);
          if (!fresh) {
            changed |= unite(it->second, j);
          }
        }
        compress();
        seen.clear();
        for (std::uint32_t j = 0; j < u.size(); ++j) {
          if (u.length(j) == 0) {
            continue;
          }
          auto [first, rest] = split_first(j);
          std::uint64_t const k = (std::uint64_t(parent_[rest]) << 32) | first;
          auto [it, fresh]      = seen.emplace(k, j);
          if (!fresh) {
            changed |= unite(it->second, j);
          }
        }
      }
      compress();
    }

    std::uint32_t require(Path const& p) const {
      auto i = universe_.index_of(p);
      if (!i) {
        if (!try_path_target(graph_, p)) {
          path_target(graph_, p);  // throws the precise error
        }
        throw Error(ErrorKind::bound_too_small,
                    "path " + to_string(p) + " has length "
                        + std::to_string(p.length()) + " > bound "
                        + std::to_string(bound_.max_path_len));
      }
      return *i;
    }

   private:
    void compress() {
      for (std::uint32_t i = 0; i < parent_.size(); ++i) {
        parent_[i] = parent_[parent_[i]];
      }
    }

    // (first aspect, index of the remaining path).
    std::pair<std::uint32_t, std::uint32_t> split_first(std::uint32_t j) {
      if (rest_.empty()) {
        rest_.assign(universe_.size(), PathUniverse::none);
        first_.assign(universe_.size(), PathUniverse::none);
        for (std::uint32_t i = 0; i < universe_.size(); ++i) {
          auto const len = universe_.length(i);
          if (len == 0) {
            continue;
          }
          auto const p = universe_.parent(i);
          auto const e = universe_.last_edge(i);
          if (len == 1) {
            first_[i] = e;
            rest_[i]  = universe_.identity(universe_.target(i));
          } else {
            first_[i] = first_[p];
            rest_[i]  = universe_.extend(rest_[p], e);
          }
        }
      }
      return {first_[j], rest_[j]};
    }

    Graph                      graph_;
    Bound                      bound_;
    PathUniverse               universe_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> first_;
    std::vector<std::uint32_t> rest_;
  };

  namespace detail {
    inline void require_fits(Fact const& f, Bound bound) {
      if (f.lhs.length() > bound.max_path_len
          || f.rhs.length() > bound.max_path_len) {
        throw Error(ErrorKind::bound_too_small,
                    "fact " + to_string(f) + " does not fit bound "
                        + std::to_string(bound.max_path_len));
      }
    }
  }  // namespace detail

  inline Congruence saturate(Graph const& g, FactSet const& facts, Bound bound) {
    if (bound.max_path_len < 1) {
      throw Error(ErrorKind::usage, "bound must be at least 1");
    }
    for (auto const& f : facts) {
      check_fact(g, f);
      detail::require_fits(f, bound);
    }
    Congruence c(g, bound);
    for (auto const& f : facts) {
      c.unite(c.require(f.lhs), c.require(f.rhs));
    }
    c.close();
    return c;
  }

  inline Congruence saturate(Specification const& spec, Bound bound = {}) {
    return saturate(spec.graph, spec.facts, bound);
  }

  enum class Verdict { entailed, not_derivable_within_bound };

  inline std::string_view to_string(Verdict v) {
    return v == Verdict::entailed ? "entailed" : "not-derivable-within-bound";
  }

  struct EntailmentResult {
    Fact    fact;
    Verdict verdict;
    Path    lhs_representative;
    Path    rhs_representative;

    [[nodiscard]] bool entailed() const noexcept {
      return verdict == Verdict::entailed;
    }
  };

  inline EntailmentResult entails(Congruence const& c, Fact const& fact) {
    check_fact(c.graph(), fact);
    detail::require_fits(fact, c.bound());
    auto const l = c.find(c.require(fact.lhs));
    auto const r = c.find(c.require(fact.rhs));
    return {fact,
            l == r ? Verdict::entailed : Verdict::not_derivable_within_bound,
            c.universe().path(l),
            c.universe().path(r)};
  }

  inline EntailmentResult entails(Specification const& spec,
                                  Fact const&          fact,
                                  Bound                bound = {}) {
    check_fact(spec.graph, fact);
    detail::require_fits(fact, bound);
    return entails(saturate(spec, bound), fact);
  }

  inline FactSet consequence(Specification const& spec, Bound bound = {}) {
    return saturate(spec, bound).facts();
  }

  // e1 <= e2 iff e1 entails every fact of e2.
  inline bool spec_leq(Specification const& e1,
                       Specification const& e2,
                       Bound                bound = {}) {
    if (!same_shape(e1.graph, e2.graph)) {
      throw Error(ErrorKind::differing_graphs,
                  "specifications '" + e1.name + "' and '" + e2.name
                      + "' are over different graphs");
    }
    auto const c = saturate(e1, bound);
    return std::all_of(e2.facts.begin(), e2.facts.end(), [&](Fact const& f) {
      return entails(c, f).entailed();
    });
  }

}  // namespace olog
