#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace olog {

  using Id = std::string;

  // A composable sequence of aspects. The empty sequence is the identity at
  // `source`; composability is checked against a graph, not here.
  struct Path {
    Id              source;
    std::vector<Id> edges;

    static Path identity(Id type) {
      return Path{std::move(type), {}};
    }

    [[nodiscard]] std::size_t length() const noexcept {
      return edges.size();
    }
    [[nodiscard]] bool is_identity() const noexcept {
      return edges.empty();
    }

    auto operator<=>(Path const&) const = default;
  };

  // `a;b;c`, or `id(T)` for an identity.
  inline std::string to_string(Path const& p) {
    if (p.edges.empty()) {
      return "id(" + p.source + ")";
    }
    std::string out;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      if (i != 0) {
        out += ';';
      }
      out += p.edges[i];
    }
    return out;
  }

  struct Fact {
    Path lhs;
    Path rhs;

    [[nodiscard]] bool is_reflexive() const {
      return lhs == rhs;
    }

    auto operator<=>(Fact const&) const = default;
  };

  inline std::string to_string(Fact const& f) {
    return to_string(f.lhs) + " = " + to_string(f.rhs);
  }

  using FactSet = std::set<Fact>;

}  // namespace olog
