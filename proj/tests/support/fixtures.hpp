#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "olog/cli.hpp"
#include "olog/dsl.hpp"
#include "olog/instance.hpp"
#include "olog/system_io.hpp"

namespace fx {

  inline std::filesystem::path path(std::string const& rel) {
    return std::filesystem::path(OLOG_FIXTURES) / rel;
  }

  inline std::filesystem::path golden(std::string const& rel) {
    return std::filesystem::path(OLOG_GOLDEN) / rel;
  }

  inline olog::Specification olog(std::string const& rel) {
    return olog::load_olog(path(rel));
  }

  inline olog::Specification parse(std::string const& text) {
    return olog::dsl::parse_olog(text).take();
  }

  inline olog::Fact fact(olog::Graph const& g, std::string const& text) {
    return olog::dsl::parse_fact(text, g).take();
  }

  inline olog::Path path_in(olog::Graph const& g, std::string const& text) {
    // "p" is parsed as the fact "p = p".
    return fact(g, text + " = " + text).lhs;
  }

  inline olog::KeyDiagram data(olog::Specification const& s, std::string const& rel,
                               olog::LoadOptions const& opts = {}) {
    return olog::load_instances(path(rel), s, opts);
  }

  struct Run {
    int         code;
    std::string out;
    std::string err;
  };

  inline Run cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    int const          code = olog::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
  }

  // A fresh scratch directory under the build tree.
  inline std::filesystem::path scratch(std::string const& name) {
    auto const p = std::filesystem::path(OLOG_BINARY_DIR) / "scratch" / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
  }

}  // namespace fx
