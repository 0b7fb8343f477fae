#pragma once

// Limit/colimit annotations attached to a specification. Semantics (checks,
// synthesis) live in sketch.hpp; this header only holds the data.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "olog/path.hpp"

namespace olog {

  // A participant of a cone or cocone: the type at the far end and the aspect
  // that connects it to the declared target.
  struct Leg {
    Id type;
    Id aspect;

    auto operator<=>(Leg const&) const = default;
  };

  // target = X1 * ... * Xn; zero factors is a singleton.
  struct ProductDecl {
    Id               target;
    std::vector<Leg> factors;

    auto operator<=>(ProductDecl const&) const = default;
  };

  // target = B *_D C with cospan f : B -> D, g : C -> D.
  struct PullbackDecl {
    Id   target;
    Leg  leg_b;
    Leg  leg_c;
    Id   base;
    Path cospan_f;
    Path cospan_g;

    auto operator<=>(PullbackDecl const&) const = default;
  };

  // target = X1 + ... + Xn; zero summands is the empty type.
  struct CoproductDecl {
    Id               target;
    std::vector<Leg> summands;

    auto operator<=>(CoproductDecl const&) const = default;
  };

  // target = B +_A C with span f : A -> B, g : A -> C.
  struct PushoutDecl {
    Id   target;
    Leg  leg_b;
    Leg  leg_c;
    Id   apex;
    Path span_f;
    Path span_g;

    auto operator<=>(PushoutDecl const&) const = default;
  };

  // target = Im(of), with of = surjection ; injection.
  struct ImageDecl {
    Id   target;
    Path of;
    Id   surjection;
    Id   injection;

    auto operator<=>(ImageDecl const&) const = default;
  };

  using SketchDecl = std::variant<ProductDecl,
                                  PullbackDecl,
                                  CoproductDecl,
                                  PushoutDecl,
                                  ImageDecl>;

  inline Id const& decl_target(SketchDecl const& d) {
    return std::visit([](auto const& x) -> Id const& { return x.target; }, d);
  }

  // Singleton and empty are reported under their own names even though they
  // are stored as zero-ary products and coproducts.
  inline std::string_view decl_kind(SketchDecl const& d) {
    struct {
      std::string_view operator()(ProductDecl const& p) const {
        return p.factors.empty() ? "singleton" : "product";
      }
      std::string_view operator()(PullbackDecl const&) const {
        return "pullback";
      }
      std::string_view operator()(CoproductDecl const& c) const {
        return c.summands.empty() ? "empty" : "coproduct";
      }
      std::string_view operator()(PushoutDecl const&) const {
        return "pushout";
      }
      std::string_view operator()(ImageDecl const&) const {
        return "image";
      }
    } v;
    return std::visit(v, d);
  }

  inline std::string decl_name(SketchDecl const& d) {
    return std::string(decl_kind(d)) + ":" + decl_target(d);
  }

}  // namespace olog
