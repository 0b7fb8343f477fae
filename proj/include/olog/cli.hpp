#pragma once

// The `olog` command line. run() is the whole program minus main(), so tests
// can drive it with string streams.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "olog/core.hpp"
#include "olog/dsl.hpp"
#include "olog/entailment.hpp"
#include "olog/error.hpp"
#include "olog/flow.hpp"
#include "olog/infosys.hpp"
#include "olog/instance.hpp"
#include "olog/sketch.hpp"
#include "olog/sqlgen.hpp"
#include "olog/system_io.hpp"

namespace olog::cli {

  enum Exit : int { ok = 0, validation_failure = 1, usage_error = 2 };

  namespace detail {
    using json = nlohmann::ordered_json;

    struct Options {
      std::size_t bound  = 6;
      std::string format = "text";
      bool        quiet  = false;

      [[nodiscard]] bool json_out() const {
        return format == "json";
      }
      [[nodiscard]] Bound as_bound() const {
        return Bound{bound};
      }
    };

    inline Specification read_spec(std::string const& file, std::ostream& err) {
      auto r = dsl::parse_olog(read_text(file), file);
      for (auto const& d : r.diagnostics) {
        if (d.severity == Severity::error) {
          err << dsl::format(d) << '\n';
        }
      }
      return std::move(r).take();
    }

    inline Fact read_fact(std::string const& text, Graph const& g) {
      return dsl::parse_fact(text, g, "<fact>").take();
    }

    inline FactSet read_facts(std::vector<std::string> const& texts,
                              Graph const&                    g) {
      FactSet out;
      for (auto const& t : texts) {
        out.insert(read_fact(t, g));
      }
      return out;
    }

    // Writes `text` to `path`, or to `out` when no path was given.
    inline void emit(std::string const& text,
                     std::string const& path,
                     std::ostream&      out,
                     bool               quiet) {
      if (!path.empty()) {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
          throw Error(ErrorKind::io, "cannot write " + path);
        }
        f << text;
      } else if (!quiet) {
        out << text;
      }
    }

    // The bounded spec with the fewest facts whose saturation gives `facts`:
    // each member of a class equated with the class representative.
    inline Specification reduced(Specification spec, Bound bound) {
      spec.facts = saturate(spec.graph, spec.facts, bound).generators();
      return spec;
    }

    inline json fact_json(Fact const& f) {
      return to_string(f);
    }

    ////////////////////////////////////////////////////////////////////////

    inline int cmd_check(Options const&     o,
                         std::string const& file,
                         std::ostream&      out,
                         std::ostream&      err) {
      auto r = dsl::parse_olog(read_text(file), file);
      for (auto const& d : r.diagnostics) {
        err << dsl::format(d) << '\n';
      }
      if (o.json_out() && !o.quiet) {
        json j{{"command", "check"}, {"file", file}, {"ok", r.ok()}};
        json diags = json::array();
        for (auto const& d : r.diagnostics) {
          diags.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                           {"line", d.at.line},
                           {"column", d.at.column},
                           {"message", d.message}});
        }
        j["diagnostics"] = diags;
        if (r.ok()) {
          j["types"]   = r.value->graph.types().size();
          j["aspects"] = r.value->graph.aspects().size();
          j["facts"]   = r.value->facts.size();
          j["sketch"]  = r.value->sketch.size();
        }
        out << j.dump(2) << '\n';
      } else if (r.ok() && !o.quiet) {
        auto const& s = *r.value;
        out << "ok: " << s.graph.types().size() << " types, "
            << s.graph.aspects().size() << " aspects, " << s.facts.size()
            << " facts, " << s.sketch.size() << " sketch declarations\n";
      }
      return r.ok() ? Exit::ok : Exit::usage_error;
    }

    inline int cmd_entail(Options const&                  o,
                          std::string const&              file,
                          std::vector<std::string> const& facts,
                          bool                            require,
                          std::ostream&                   out,
                          std::ostream&                   err) {
      auto const spec = read_spec(file, err);
      std::vector<Fact> wanted;
      for (auto const& t : facts) {
        wanted.push_back(read_fact(t, spec.graph));
      }
      for (auto const& f : wanted) {
        check_fact(spec.graph, f);
        olog::detail::require_fits(f, o.as_bound());
      }
      auto const c   = saturate(spec, o.as_bound());
      bool       all = true;
      json       results = json::array();
      for (auto const& f : wanted) {
        auto const r = entails(c, f);
        all &= r.entailed();
        results.push_back({{"fact", fact_json(f)},
                           {"verdict", to_string(r.verdict)},
                           {"lhs_representative", to_string(r.lhs_representative)},
                           {"rhs_representative", to_string(r.rhs_representative)}});
        if (!o.json_out() && !o.quiet) {
          out << to_string(r.verdict) << ": " << to_string(f);
          if (r.entailed()) {
            out << "  [class of " << to_string(r.lhs_representative) << "]\n";
          } else {
            out << "  [classes of " << to_string(r.lhs_representative)
                << " and " << to_string(r.rhs_representative) << ", bound "
                << o.bound << "]\n";
          }
        }
      }
      if (o.json_out() && !o.quiet) {
        out << json{{"command", "entail"},
                    {"file", file},
                    {"bound", o.bound},
                    {"results", results}}
                   .dump(2)
            << '\n';
      }
      return (require && !all) ? Exit::validation_failure : Exit::ok;
    }

    inline int cmd_validate(Options const&     o,
                            std::string const& file,
                            std::string const& data,
                            bool               facts_only,
                            std::ostream&      out,
                            std::ostream&      err) {
      auto const spec = read_spec(file, err);
      KeyDiagram d;
      try {
        d = load_instances(data, spec);
      } catch (Error const& e) {
        if (e.kind() != ErrorKind::instance) {
          throw;
        }
        err << "olog: invalid instance data: " << e.what() << '\n';
        if (o.json_out() && !o.quiet) {
          out << json{{"command", "validate"},
                      {"file", file},
                      {"ok", false},
                      {"load_error", e.what()}}
                     .dump(2)
              << '\n';
        }
        return Exit::validation_failure;
      }
      auto const rep    = satisfies_spec(d, spec);
      auto const checks = facts_only ? std::vector<CheckResult>{}
                                     : check_sketch(d, spec);
      bool ok = rep.satisfied();
      for (auto const& c : checks) {
        ok &= c.passed;
      }
      if (o.json_out()) {
        json facts = json::array();
        for (auto const& f : rep.facts) {
          json ces = json::array();
          for (auto const& c : f.counterexamples) {
            ces.push_back({{"key", c.start}, {"lhs", c.lhs_value}, {"rhs", c.rhs_value}});
          }
          facts.push_back({{"fact", fact_json(f.fact)},
                           {"verdict", f.satisfied ? "satisfied" : "violated"},
                           {"counterexamples", ces}});
        }
        json cs = json::array();
        for (auto const& c : checks) {
          cs.push_back({{"name", c.name},
                        {"verdict", c.passed ? "check-passed" : "check-failed"},
                        {"witness", c.witness}});
        }
        if (!o.quiet) {
          out << json{{"command", "validate"},
                      {"file", file},
                      {"ok", ok},
                      {"facts", facts},
                      {"checks", cs}}
                     .dump(2)
              << '\n';
        }
      } else if (!o.quiet) {
        for (auto const& f : rep.facts) {
          out << (f.satisfied ? "satisfied" : "violated") << ": "
              << to_string(f.fact) << '\n';
          for (auto const& c : f.counterexamples) {
            out << "  counterexample: " << c.start << ": "
                << to_string(c.fact.lhs) << " gives " << c.lhs_value << ", "
                << to_string(c.fact.rhs) << " gives " << c.rhs_value << '\n';
          }
        }
        for (auto const& c : checks) {
          out << (c.passed ? "check-passed" : "check-failed") << ": " << c.name;
          if (!c.passed) {
            out << " (" << c.witness << ")";
          }
          out << '\n';
        }
      }
      return ok ? Exit::ok : Exit::validation_failure;
    }

    inline SketchDecl const& find_decl(Specification const& spec,
                                       std::string const&   which) {
      std::vector<SketchDecl const*> hits;
      for (auto const& d : spec.sketch) {
        if (decl_name(d) == which || decl_target(d) == which) {
          hits.push_back(&d);
        }
      }
      if (hits.size() != 1) {
        throw Error(ErrorKind::usage,
                    hits.empty() ? "no sketch declaration '" + which + "'"
                                 : "'" + which
                                       + "' is ambiguous; use <kind>:<target>");
      }
      return *hits[0];
    }

    inline std::set<Id> decl_aspects(SketchDecl const& decl) {
      std::set<Id> out;
      std::visit(
          [&](auto const& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ProductDecl>) {
              for (auto const& l : x.factors) {
                out.insert(l.aspect);
              }
            } else if constexpr (std::is_same_v<T, CoproductDecl>) {
              for (auto const& l : x.summands) {
                out.insert(l.aspect);
              }
            } else if constexpr (std::is_same_v<T, ImageDecl>) {
              out.insert(x.surjection);
              out.insert(x.injection);
            } else {
              out.insert(x.leg_b.aspect);
              out.insert(x.leg_c.aspect);
            }
          },
          decl);
      return out;
    }

    inline int cmd_synth(Options const&     o,
                         std::string const& file,
                         std::string const& data,
                         std::string const& which,
                         std::string const& out_dir,
                         std::ostream&      out,
                         std::ostream&      err) {
      auto const  spec   = read_spec(file, err);
      auto const& decl   = find_decl(spec, which);
      Id const&   target = decl_target(decl);
      auto const  legs   = decl_aspects(decl);
      for (auto const* a : spec.graph.outgoing(target)) {
        if (!legs.contains(a->id)) {
          throw Error(ErrorKind::usage,
                      "aspect '" + a->id + "' leaves '" + target
                          + "' but is not determined by " + decl_name(decl));
        }
      }
      auto const d = load_instances(data, spec, LoadOptions{{target}, legs});
      auto const s = synthesize(decl, d);
      auto const result = apply(d, s);
      auto const check  = check_decl(result, decl);
      if (!out_dir.empty()) {
        write_instances(out_dir, result, spec.graph);
      }
      if (o.json_out() && !o.quiet) {
        out << json{{"command", "synth"},
                    {"decl", decl_name(decl)},
                    {"keys", std::vector<std::string>(s.keys.begin(), s.keys.end())},
                    {"verdict", check.passed ? "check-passed" : "check-failed"}}
                   .dump(2)
            << '\n';
      } else if (!o.quiet) {
        if (out_dir.empty()) {
          write_table(out, result, spec.graph, target);
        }
        out << (check.passed ? "check-passed" : "check-failed") << ": "
            << decl_name(decl) << " (" << s.keys.size() << " keys)\n";
      }
      return check.passed ? Exit::ok : Exit::validation_failure;
    }

    inline int cmd_sqlgen(Options const&     o,
                          std::string const& file,
                          std::string const& out_file,
                          std::string const& inserts,
                          std::ostream&      out,
                          std::ostream&      err) {
      auto const spec = read_spec(file, err);
      std::optional<KeyDiagram> d;
      if (!inserts.empty()) {
        d = load_instances(inserts, spec);
      }
      emit(sql::emit_ddl(spec, d ? &*d : nullptr), out_file, out, o.quiet);
      return Exit::ok;
    }

    inline int cmd_flow(Options const&     o,
                        std::string const& direction,
                        std::string const& morphism,
                        std::string const& from,
                        std::string const& to,
                        std::string const& out_file,
                        std::ostream&      out,
                        std::ostream&      err) {
      auto const s1 = read_spec(from, err);
      auto const s2 = read_spec(to, err);
      auto const h  = load_morphism(morphism, s1.graph, s2.graph);
      Specification result;
      if (direction == "dir") {
        result = Specification{s2.name, s2.graph, dir_flow(h, s1.facts), {}};
      } else {
        result = Specification{s1.name, s1.graph,
                               inv_flow(h, s1.graph, s2, o.as_bound()), {}};
        result = reduced(result, o.as_bound());
      }
      if (o.json_out()) {
        json facts = json::array();
        for (auto const& f : result.facts) {
          facts.push_back(fact_json(f));
        }
        if (!out_file.empty()) {
          emit(dsl::print_olog(result), out_file, out, true);
        }
        if (!o.quiet) {
          out << json{{"command", "flow"},
                      {"direction", direction},
                      {"bound", o.bound},
                      {"facts", facts}}
                     .dump(2)
              << '\n';
        }
      } else {
        emit(dsl::print_olog(result), out_file, out, o.quiet);
      }
      return Exit::ok;
    }

    inline int cmd_morphism_check(Options const&     o,
                                  std::string const& morphism,
                                  std::string const& from,
                                  std::string const& to,
                                  std::ostream&      out,
                                  std::ostream&      err) {
      auto const s1 = read_spec(from, err);
      auto const s2 = read_spec(to, err);
      auto const h  = load_morphism(morphism, s1.graph, s2.graph);
      auto const r  = is_spec_morphism(h, s1, s2, o.as_bound());
      if (o.json_out() && !o.quiet) {
        json off = json::array();
        for (auto const& f : r.offending) {
          off.push_back({{"fact", fact_json(f)},
                         {"translated", fact_json(translate_fact(h, f))}});
        }
        out << json{{"command", "morphism check"},
                    {"verdict", r.ok ? "check-passed" : "check-failed"},
                    {"offending", off}}
                   .dump(2)
            << '\n';
      } else if (!o.quiet) {
        out << (r.ok ? "check-passed" : "check-failed") << ": " << morphism
            << '\n';
        for (auto const& f : r.offending) {
          out << "  not-derivable-within-bound: " << to_string(f) << " becomes "
              << to_string(translate_fact(h, f)) << '\n';
        }
      }
      return r.ok ? Exit::ok : Exit::validation_failure;
    }

    inline int cmd_fuse(Options const&     o,
                        std::string const& file,
                        std::string const& out_file,
                        std::ostream&      out) {
      auto const sys = load_system(file, o.as_bound());
      auto       f   = fusion(sys);
      f.name         = std::filesystem::path(file).stem().string();
      emit(dsl::print_olog(f), out_file, out, o.quiet);
      return Exit::ok;
    }

    inline int cmd_consequence(Options const&     o,
                               std::string const& file,
                               std::string const& out_dir,
                               std::ostream&      out,
                               std::ostream&      err) {
      if (std::filesystem::path(file).extension() == ".osys") {
        auto const sys = load_system(file, o.as_bound());
        auto const res = system_consequence(sys, o.as_bound());
        if (!out_dir.empty()) {
          std::filesystem::create_directories(out_dir);
        }
        for (auto const& [n, s] : res) {
          auto const text = dsl::print_olog(reduced(s, o.as_bound()));
          if (!out_dir.empty()) {
            emit(text, (std::filesystem::path(out_dir) / (n + ".olog")).string(),
                 out, true);
          } else if (!o.quiet) {
            out << "# node " << n << '\n' << text;
          }
        }
        return Exit::ok;
      }
      auto const spec = read_spec(file, err);
      auto const text = dsl::print_olog(reduced(spec, o.as_bound()));
      if (!out_dir.empty()) {
        emit(text, out_dir, out, true);
      } else if (!o.quiet) {
        out << text;
      }
      return Exit::ok;
    }

    inline int cmd_lot(Options const&                  o,
                       std::string const&              move,
                       std::string const&              file,
                       std::vector<std::string> const& facts,
                       std::vector<std::string> const& del,
                       std::vector<std::string> const& add,
                       std::string const&              morphism,
                       std::string const&              to,
                       std::string const&              out_file,
                       std::ostream&                   out,
                       std::ostream&                   err) {
      auto const    spec = read_spec(file, err);
      Specification result;
      if (move == "contract") {
        result = lot_contract(spec, read_facts(facts, spec.graph));
      } else if (move == "expand") {
        result = lot_expand(spec, read_facts(facts, spec.graph));
      } else if (move == "revise") {
        result = lot_revise(spec, read_facts(del, spec.graph),
                            read_facts(add, spec.graph));
      } else {
        if (morphism.empty() || to.empty()) {
          throw Error(ErrorKind::usage, "analogy needs --morphism and --to");
        }
        auto const target = read_spec(to, err);
        result = lot_analogy(load_morphism(morphism, spec.graph, target.graph),
                             spec, target.graph);
        result.name = target.name;
      }
      emit(dsl::print_olog(result), out_file, out, o.quiet);
      return Exit::ok;
    }
  }  // namespace detail

  inline int run(std::vector<std::string> args,
                 std::ostream&            out = std::cout,
                 std::ostream&            err = std::cerr) {
    detail::Options o;
    CLI::App        app{"Author, validate and connect ologs.", "olog"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--bound", o.bound, "Maximum path length for entailment")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--quiet", o.quiet, "Suppress the report; exit code only");

    std::string file, data, decl, out_path, inserts, morphism, from, to, mode;
    std::vector<std::string> facts, del, add;
    bool require_entailed = false, facts_only = false;

    auto* check = app.add_subcommand("check", "Parse and validate an olog");
    check->add_option("olog", file)->required();

    auto* entail = app.add_subcommand("entail", "Decide bounded entailment");
    entail->add_option("olog", file)->required();
    entail->add_option("--fact", facts, "Fact 'p = q' to decide")->required();
    entail->add_flag("--require-entailed", require_entailed,
                     "Exit 1 unless every fact is entailed");

    auto* validate = app.add_subcommand("validate", "Check instance data");
    validate->add_option("olog", file)->required();
    validate->add_option("--data", data, "Instance directory")->required();
    validate->add_flag("--facts-only", facts_only, "Skip sketch checks");

    auto* synth = app.add_subcommand("synth", "Synthesize a declared set");
    synth->add_option("olog", file)->required();
    synth->add_option("--data", data, "Instance directory")->required();
    synth->add_option("--decl", decl, "<target> or <kind>:<target>")->required();
    synth->add_option("-o,--output", out_path, "Write all tables here");

    auto* sqlgen = app.add_subcommand("sqlgen", "Emit SQL DDL");
    sqlgen->add_option("olog", file)->required();
    sqlgen->add_option("-o,--output", out_path, "Output file");
    sqlgen->add_option("--with-inserts", inserts, "Instance directory to export");

    auto* flow = app.add_subcommand("flow", "Direct or inverse flow of facts");
    flow->add_option("direction", mode)->required()->check(CLI::IsMember({"dir", "inv"}));
    flow->add_option("--morphism", morphism)->required();
    flow->add_option("--from", from, "Source olog")->required();
    flow->add_option("--to", to, "Target olog")->required();
    flow->add_option("-o,--output", out_path, "Output file");

    auto* mcheck = app.add_subcommand("morphism", "Check a specification morphism");
    mcheck->add_option("action", mode)->required()->check(CLI::IsMember({"check"}));
    mcheck->add_option("omap", morphism)->required();
    mcheck->add_option("--from", from, "Source olog")->required();
    mcheck->add_option("--to", to, "Target olog")->required();

    auto* fuse = app.add_subcommand("fuse", "Fuse an information system");
    fuse->add_option("osys", file)->required();
    fuse->add_option("-o,--output", out_path, "Output file");

    auto* cons = app.add_subcommand("consequence", "Bounded (system) consequence");
    cons->add_option("file", file, ".olog or .osys")->required();
    cons->add_option("-o,--output", out_path, "Output file or directory");

    auto* lot = app.add_subcommand("lot", "Move in the lattice of theories");
    lot->add_option("move", mode)->required()->check(
        CLI::IsMember({"contract", "expand", "revise", "analogy"}));
    lot->add_option("olog", file)->required();
    lot->add_option("--fact", facts, "Fact to contract or expand by");
    lot->add_option("--del", del, "Fact to delete (revise)");
    lot->add_option("--add", add, "Fact to add (revise)");
    lot->add_option("--morphism", morphism, "Renaming for analogy");
    lot->add_option("--to", to, "Target olog for analogy");
    lot->add_option("-o,--output", out_path, "Output file");

    try {
      std::reverse(args.begin(), args.end());
      app.parse(std::move(args));
    } catch (CLI::CallForHelp const& e) {
      return app.exit(e, out, err);
    } catch (CLI::CallForAllHelp const& e) {
      return app.exit(e, out, err);
    } catch (CLI::ParseError const& e) {
      app.exit(e, out, err);
      err << app.help();
      return Exit::usage_error;
    }

    try {
      if (check->parsed()) {
        return detail::cmd_check(o, file, out, err);
      }
      if (entail->parsed()) {
        return detail::cmd_entail(o, file, facts, require_entailed, out, err);
      }
      if (validate->parsed()) {
        return detail::cmd_validate(o, file, data, facts_only, out, err);
      }
      if (synth->parsed()) {
        return detail::cmd_synth(o, file, data, decl, out_path, out, err);
      }
      if (sqlgen->parsed()) {
        return detail::cmd_sqlgen(o, file, out_path, inserts, out, err);
      }
      if (flow->parsed()) {
        return detail::cmd_flow(o, mode, morphism, from, to, out_path, out, err);
      }
      if (mcheck->parsed()) {
        return detail::cmd_morphism_check(o, morphism, from, to, out, err);
      }
      if (fuse->parsed()) {
        return detail::cmd_fuse(o, file, out_path, out);
      }
      if (cons->parsed()) {
        return detail::cmd_consequence(o, file, out_path, out, err);
      }
      if (lot->parsed()) {
        return detail::cmd_lot(o, mode, file, facts, del, add, morphism, to,
                               out_path, out, err);
      }
    } catch (Error const& e) {
      err << "olog: " << to_string(e.kind()) << ": " << e.what() << '\n';
      return e.kind() == ErrorKind::instance ? Exit::validation_failure
                                             : Exit::usage_error;
    }
    return Exit::usage_error;
  }

  inline int run(int argc, char const* const* argv,
                 std::ostream& out = std::cout,
                 std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
  }

}  // namespace olog::cli
