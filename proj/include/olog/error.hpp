#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace olog {

  enum class ErrorKind {
    composition,       // paths whose endpoints do not meet
    ill_typed,         // fact or morphism image with mismatched endpoints
    unknown_id,        // reference to an undeclared type or aspect
    duplicate,         // id declared twice
    bound_too_small,   // a path does not fit the entailment bound
    differing_graphs,  // operation needs two specs over one graph
    instance,          // malformed instance data
    refused,           // operation would overwrite existing data
    non_commuting,     // cone or square whose paths are not equal
    unsupported_link,  // link image not handled by the colimit construction
    parse,
    io,
    usage
  };

  inline std::string_view to_string(ErrorKind k) {
    switch (k) {
      case ErrorKind::composition: return "composition";
      case ErrorKind::ill_typed: return "ill-typed";
      case ErrorKind::unknown_id: return "unknown-id";
      case ErrorKind::duplicate: return "duplicate";
      case ErrorKind::bound_too_small: return "bound-too-small";
      case ErrorKind::differing_graphs: return "differing-graphs";
      case ErrorKind::instance: return "instance";
      case ErrorKind::refused: return "refused";
      case ErrorKind::non_commuting: return "non-commuting";
      case ErrorKind::unsupported_link: return "unsupported-link";
      case ErrorKind::parse: return "parse";
      case ErrorKind::io: return "io";
      case ErrorKind::usage: return "usage";
    }
    return "error";
  }

  class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept {
      return kind_;
    }

   private:
    ErrorKind kind_;
  };

}  // namespace olog
