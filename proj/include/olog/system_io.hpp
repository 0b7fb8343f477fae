#pragma once

// Loading specifications, morphisms and `.osys` system files from disk.
//
//   node C = community.olog
//   edge P : C -> P = community_portal.omap

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "olog/dsl.hpp"
#include "olog/error.hpp"
#include "olog/infosys.hpp"

namespace olog {

  inline std::string read_text(std::filesystem::path const& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      throw Error(ErrorKind::io, "cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  inline Specification load_olog(std::filesystem::path const& p) {
    return dsl::parse_olog(read_text(p), p.string()).take();
  }

  inline GraphMorphism load_morphism(std::filesystem::path const& p,
                                     Graph const&                 src,
                                     Graph const&                 tgt) {
    return dsl::parse_morphism(read_text(p), src, tgt, p.string()).take();
  }

  namespace dsl {

    namespace detail {
      inline std::string trim(std::string_view s) {
        auto const b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) {
          return {};
        }
        auto const e = s.find_last_not_of(" \t\r");
        return std::string(s.substr(b, e - b + 1));
      }
    }  // namespace detail

    // Referenced files are resolved relative to `base`. Every constraint must
    // be a specification morphism at `bound`.
    inline ParseResult<InformationSystem> parse_system(
        std::string_view             text,
        std::filesystem::path const& base,
        std::string                  file  = "<input>",
        Bound                        bound = {}) {
      ParseResult<InformationSystem> res;
      InformationSystem              sys;
      auto error = [&](std::size_t line, std::size_t col, std::string msg) {
        res.diagnostics.push_back(
            {Severity::error, std::move(msg), {file, line, col}});
      };

      struct EdgeLine {
        std::size_t line;
        std::size_t col;
        Id          src;
        Id          tgt;
        std::string path;
      };
      std::map<Id, EdgeLine> edges;

      std::istringstream in{std::string(text)};
      std::string        raw;
      std::size_t        line = 0;
      while (std::getline(in, raw)) {
        ++line;
        auto const hash = raw.find('#');
        std::string const body = raw.substr(0, hash);
        auto const        eq   = body.find('=');
        auto const        lead = body.find_first_not_of(" \t\r");
        if (lead == std::string::npos) {
          continue;
        }
        std::size_t const col = lead + 1;
        if (eq == std::string::npos) {
          error(line, col, "expected 'node <n> = <file>' or 'edge <e> : <n> -> <m> = <file>'");
          continue;
        }
        std::string const lhs  = detail::trim(body.substr(0, eq));
        std::string const path = detail::trim(body.substr(eq + 1));
        auto toks = Lexer(lhs).run();
        toks.pop_back();  // end marker
        auto is = [&](std::size_t i, Tok k, std::string_view t = {}) {
          return i < toks.size() && toks[i].kind == k
                 && (t.empty() || toks[i].text == t);
        };
        if (path.empty()) {
          error(line, eq + 1, "missing file name");
          continue;
        }
        if (toks.size() == 2 && is(0, Tok::ident, "node") && is(1, Tok::ident)) {
          auto const& n = toks[1].text;
          if (!sys.shape.nodes.insert(n).second) {
            error(line, col, "node '" + n + "' declared twice");
            continue;
          }
          auto const p = base / path;
          try {
            auto r = parse_olog(read_text(p), p.string());
            for (auto& d : r.diagnostics) {
              res.diagnostics.push_back(d);
            }
            if (r.ok()) {
              sys.specs.emplace(n, std::move(*r.value));
            }
          } catch (Error const& e) {
            error(line, eq + 2, e.what());
          }
        } else if (toks.size() == 6 && is(0, Tok::ident, "edge")
                   && is(1, Tok::ident) && is(2, Tok::punct, ":")
                   && is(3, Tok::ident) && is(4, Tok::punct, "->")
                   && is(5, Tok::ident)) {
          if (!edges.emplace(toks[1].text,
                             EdgeLine{line, col, toks[3].text, toks[5].text, path})
                   .second) {
            error(line, col, "edge '" + toks[1].text + "' declared twice");
          }
        } else {
          error(line, col, "expected 'node <n> = <file>' or 'edge <e> : <n> -> <m> = <file>'");
        }
      }

      for (auto const& [id, e] : edges) {
        if (!sys.shape.nodes.contains(e.src) || !sys.shape.nodes.contains(e.tgt)) {
          error(e.line, e.col, "edge '" + id + "' refers to an undeclared node");
          continue;
        }
        sys.shape.add_edge(id, e.src, e.tgt);
        if (!sys.specs.contains(e.src) || !sys.specs.contains(e.tgt)) {
          continue;  // already reported
        }
        auto const& s1 = sys.specs.at(e.src);
        auto const& s2 = sys.specs.at(e.tgt);
        auto const  p  = base / e.path;
        try {
          auto r = parse_morphism(read_text(p), s1.graph, s2.graph, p.string());
          for (auto& d : r.diagnostics) {
            res.diagnostics.push_back(d);
          }
          if (!r.ok()) {
            continue;
          }
          auto const chk = is_spec_morphism(*r.value, s1, s2, bound);
          for (auto const& f : chk.offending) {
            error(e.line, e.col,
                  "edge '" + id + "' is not a specification morphism: "
                      + to_string(f) + " becomes "
                      + to_string(translate_fact(*r.value, f))
                      + ", which is not entailed at bound "
                      + std::to_string(bound.max_path_len));
          }
          sys.constraints.emplace(id, std::move(*r.value));
        } catch (Error const& ex) {
          error(e.line, e.col, ex.what());
        }
      }

      if (res.errors().empty()) {
        res.value = std::move(sys);
      }
      return res;
    }

  }  // namespace dsl

  inline InformationSystem load_system(std::filesystem::path const& p,
                                       Bound                        bound = {}) {
    return dsl::parse_system(read_text(p), p.parent_path(), p.string(), bound)
        .take();
  }

}  // namespace olog
