#pragma once

// Text formats: `.olog` specifications and `.omap` morphism files.
//
//   olog Family {
//     type person "a person"
//     aspect mother : person -> woman "has as mother"
//     fact parents;w = mother
//     pullback A = B *_D C via (f,g) legs (pB,pC)
//   }

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "olog/core.hpp"
#include "olog/error.hpp"
#include "olog/flow.hpp"
#include "olog/path.hpp"
#include "olog/sketch_decl.hpp"

namespace olog::dsl {

  struct SourceSpan {
    std::string file;
    std::size_t line   = 1;
    std::size_t column = 1;
  };

  struct ParseDiagnostic {
    Severity    severity;
    std::string message;
    SourceSpan  at;
  };

  inline std::string format(ParseDiagnostic const& d) {
    return d.at.file + ":" + std::to_string(d.at.line) + ":"
           + std::to_string(d.at.column) + ": "
           + (d.severity == Severity::error ? "error" : "warning") + ": "
           + d.message;
  }

  template <typename T>
  struct ParseResult {
    std::optional<T>             value;
    std::vector<ParseDiagnostic> diagnostics;

    [[nodiscard]] bool ok() const noexcept {
      return value.has_value();
    }

    [[nodiscard]] std::vector<ParseDiagnostic> errors() const {
      std::vector<ParseDiagnostic> out;
      for (auto const& d : diagnostics) {
        if (d.severity == Severity::error) {
          out.push_back(d);
        }
      }
      return out;
    }

    // The value, or an Error carrying the first error diagnostic.
    T take() && {
      if (!value) {
        auto const errs = errors();
        throw Error(ErrorKind::parse,
                    errs.empty() ? std::string("parse failed") : format(errs[0]));
      }
      return std::move(*value);
    }
  };

  ////////////////////////////////////////////////////////////////////////
  // Lexer
  ////////////////////////////////////////////////////////////////////////

  enum class Tok { ident, string, punct, end, bad };

  struct Token {
    Tok         kind;
    std::string text;
    std::size_t line;
    std::size_t column;
  };

  namespace detail {
    inline bool ident_start(char c) {
      return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    inline bool ident_char(char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_'
             || c == '.' || c == '-';
    }
  }  // namespace detail

  class Lexer {
   public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
      std::vector<Token> out;
      while (true) {
        skip_space();
        if (i_ >= text_.size()) {
          out.push_back({Tok::end, "", line_, col_});
          return out;
        }
        out.push_back(next());
      }
    }

   private:
    void advance() {
      if (text_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(text_[i_]) & 0xC0) != 0x80) {
        ++col_;  // count code points, not bytes
      }
      ++i_;
    }

    void skip_space() {
      while (i_ < text_.size()) {
        char const c = text_[i_];
        if (c == '#') {
          while (i_ < text_.size() && text_[i_] != '\n') {
            advance();
          }
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
          advance();
        } else {
          return;
        }
      }
    }

    Token next() {
      std::size_t const line = line_;
      std::size_t const col  = col_;
      char const        c    = text_[i_];
      if (detail::ident_start(c)) {
        std::string s;
        while (i_ < text_.size() && detail::ident_char(text_[i_])) {
          if (text_[i_] == '-' && i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
            break;
          }
          s += text_[i_];
          advance();
        }
        return {Tok::ident, std::move(s), line, col};
      }
      if (c == '"') {
        advance();
        std::string s;
        while (i_ < text_.size() && text_[i_] != '"') {
          if (text_[i_] == '\n') {
            return {Tok::bad, "unterminated string", line, col};
          }
          if (text_[i_] == '\\' && i_ + 1 < text_.size()) {
            advance();
            char const e = text_[i_];
            s += (e == 'n') ? '\n' : (e == 't') ? '\t' : e;
            advance();
            continue;
          }
          s += text_[i_];
          advance();
        }
        if (i_ >= text_.size()) {
          return {Tok::bad, "unterminated string", line, col};
        }
        advance();
        return {Tok::string, std::move(s), line, col};
      }
      for (std::string_view p : {"->", "=>", "*_", "+_"}) {
        if (text_.substr(i_, 2) == p) {
          advance();
          advance();
          return {Tok::punct, std::string(p), line, col};
        }
      }
      if (std::string_view("{}(),;=:*+").find(c) != std::string_view::npos) {
        advance();
        return {Tok::punct, std::string(1, c), line, col};
      }
      advance();
      while (i_ < text_.size()
             && (static_cast<unsigned char>(text_[i_]) & 0xC0) == 0x80) {
        advance();
      }
      return {Tok::bad, "unexpected character", line, col};
    }

    std::string_view text_;
    std::size_t      i_    = 0;
    std::size_t      line_ = 1;
    std::size_t      col_  = 1;
  };

  ////////////////////////////////////////////////////////////////////////
  // Token cursor shared by the parsers
  ////////////////////////////////////////////////////////////////////////

  namespace detail {
    struct Syntax {};  // thrown to abandon the current statement

    struct RawPath {
      bool                identity = false;
      Token               head;  // type (identity) or first aspect
      std::vector<Token> edges;
    };

    class Cursor {
     public:
      Cursor(std::vector<Token> toks,
             std::string        file,
             std::vector<ParseDiagnostic>& diags)
          : toks_(std::move(toks)), file_(std::move(file)), diags_(diags) {
        for (auto const& t : toks_) {
          if (t.kind == Tok::bad) {
            error(t, t.text);
          }
        }
        std::erase_if(toks_, [](Token const& t) { return t.kind == Tok::bad; });
      }

      Token const& peek(std::size_t k = 0) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
      }
      bool at_end() const {
        return peek().kind == Tok::end;
      }
      Token const& take() {
        Token const& t = peek();
        if (pos_ + 1 < toks_.size()) {
          ++pos_;
        }
        return t;
      }

      bool is_punct(std::string_view p, std::size_t k = 0) const {
        return peek(k).kind == Tok::punct && peek(k).text == p;
      }
      bool is_word(std::string_view w, std::size_t k = 0) const {
        return peek(k).kind == Tok::ident && peek(k).text == w;
      }

      Token const& expect_punct(std::string_view p) {
        if (!is_punct(p)) {
          fail(peek(), "expected '" + std::string(p) + "'" + found(peek()));
        }
        return take();
      }
      Token const& expect_word(std::string_view w) {
        if (!is_word(w)) {
          fail(peek(), "expected '" + std::string(w) + "'" + found(peek()));
        }
        return take();
      }
      Token const& expect_ident(std::string_view what) {
        if (peek().kind != Tok::ident) {
          fail(peek(), "expected " + std::string(what) + found(peek()));
        }
        return take();
      }

      RawPath path() {
        RawPath p;
        if (is_word("id") && is_punct("(", 1)) {
          take();
          take();
          p.identity = true;
          p.head     = expect_ident("a type id");
          expect_punct(")");
          return p;
        }
        p.head = expect_ident("a path");
        p.edges.push_back(p.head);
        while (is_punct(";")) {
          take();
          p.edges.push_back(expect_ident("an aspect id"));
        }
        return p;
      }

      SourceSpan span(Token const& t) const {
        return {file_, t.line, t.column};
      }
      void error(Token const& t, std::string msg) {
        diags_.push_back({Severity::error, std::move(msg), span(t)});
      }
      void warning(Token const& t, std::string msg) {
        diags_.push_back({Severity::warning, std::move(msg), span(t)});
      }
      [[noreturn]] void fail(Token const& t, std::string msg) {
        error(t, std::move(msg));
        throw Syntax{};
      }

      // Skips the rest of `line`. Inside an olog block a closing brace is
      // left for the caller.
      void recover(std::size_t line, bool stop_at_brace = true) {
        while (!at_end() && peek().line == line
               && !(stop_at_brace && is_punct("}"))) {
          take();
        }
      }

      static std::string found(Token const& t) {
        switch (t.kind) {
          case Tok::end: return ", found end of input";
          case Tok::string: return ", found a string";
          default: return ", found '" + t.text + "'";
        }
      }

     private:
      std::vector<Token>            toks_;
      std::size_t                   pos_ = 0;
      std::string                   file_;
      std::vector<ParseDiagnostic>& diags_;
    };

    // Resolves a raw path against `g`, reporting at the offending token.
    inline std::optional<Path> resolve(Cursor& cur, Graph const& g, RawPath const& rp) {
      if (rp.identity) {
        if (!g.has_type(rp.head.text)) {
          cur.error(rp.head, "unknown type '" + rp.head.text + "'");
          return std::nullopt;
        }
        return Path::identity(rp.head.text);
      }
      Path p;
      Id   at;
      for (std::size_t i = 0; i < rp.edges.size(); ++i) {
        auto const& tok = rp.edges[i];
        auto const* a   = g.find_aspect(tok.text);
        if (a == nullptr) {
          cur.error(tok, "unknown aspect '" + tok.text + "'");
          return std::nullopt;
        }
        if (i == 0) {
          p.source = a->src;
        } else if (a->src != at) {
          cur.error(tok, "path does not compose: '" + tok.text + "' leaves '"
                             + a->src + "' but the path is at '" + at + "'");
          return std::nullopt;
        }
        p.edges.push_back(a->id);
        at = a->tgt;
      }
      return p;
    }

    inline std::optional<Id> resolve_aspect(Cursor& cur, Graph const& g, Token const& t) {
      if (!g.has_aspect(t.text)) {
        cur.error(t, "unknown aspect '" + t.text + "'");
        return std::nullopt;
      }
      return t.text;
    }

    inline std::optional<Id> resolve_type(Cursor& cur, Graph const& g, Token const& t) {
      if (!g.has_type(t.text)) {
        cur.error(t, "unknown type '" + t.text + "'");
        return std::nullopt;
      }
      return t.text;
    }

    inline std::string quoted(std::string const& s) {
      std::string out = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') {
          out += '\\';
          out += c;
        } else if (c == '\n') {
          out += "\\n";
        } else if (c == '\t') {
          out += "\\t";
        } else {
          out += c;
        }
      }
      return out + '"';
    }
  }  // namespace detail

  inline void canonical_sort(std::vector<SketchDecl>& decls) {
    std::sort(decls.begin(), decls.end(), [](auto const& a, auto const& b) {
      auto const ka = std::tuple(decl_target(a), decl_kind(a));
      auto const kb = std::tuple(decl_target(b), decl_kind(b));
      return ka != kb ? ka < kb : a < b;
    });
  }

  ////////////////////////////////////////////////////////////////////////
  // .olog
  ////////////////////////////////////////////////////////////////////////

  namespace detail {
    struct RawType {
      Token       id;
      std::string label;
    };
    struct RawAspect {
      Token       id;
      Token       src;
      Token       tgt;
      std::string label;
      bool        injective  = false;
      bool        surjective = false;
    };
    struct RawFact {
      Token   keyword;
      RawPath lhs;
      RawPath rhs;
    };
    struct RawDecl {
      Token              keyword;  // product, pullback, ...
      Token              target;
      std::vector<Token> types;    // factors / summands / B, C
      Token              base;     // D of a pullback, A of a pushout
      std::vector<RawPath> paths;  // cospan / span / image source path
      std::vector<Token>   aspects;  // projections / inclusions / fs, fi
    };

    class OlogParser {
     public:
      OlogParser(std::string_view text, std::string file)
          : cur_(Lexer(text).run(), std::move(file), diags_) {}

      ParseResult<Specification> run() {
        Specification spec;
        if (!cur_.at_end()) {
          try {
            cur_.expect_word("olog");
            spec.name = cur_.expect_ident("an olog name").text;
            cur_.expect_punct("{");
          } catch (Syntax const&) {
            return {std::nullopt, std::move(diags_)};
          }
          while (!cur_.at_end() && !cur_.is_punct("}")) {
            std::size_t const line = cur_.peek().line;
            try {
              statement();
            } catch (Syntax const&) {
              cur_.recover(line);
            }
          }
          try {
            cur_.expect_punct("}");
            if (!cur_.at_end()) {
              cur_.fail(cur_.peek(), "unexpected input after the olog block");
            }
          } catch (Syntax const&) {
          }
        }
        build(spec);
        bool const failed
            = std::any_of(diags_.begin(), diags_.end(), [](auto const& d) {
                return d.severity == Severity::error;
              });
        if (failed) {
          return {std::nullopt, std::move(diags_)};
        }
        return {std::move(spec), std::move(diags_)};
      }

     private:
      std::string label_opt() {
        if (cur_.peek().kind == Tok::string) {
          return cur_.take().text;
        }
        return {};
      }

      void statement() {
        Token const kw = cur_.expect_ident("a declaration");
        auto const& w  = kw.text;
        if (w == "type") {
          Token id = cur_.expect_ident("a type id");
          types_.push_back({id, label_opt()});
        } else if (w == "aspect") {
          RawAspect a;
          a.id = cur_.expect_ident("an aspect id");
          cur_.expect_punct(":");
          a.src = cur_.expect_ident("a source type");
          cur_.expect_punct("->");
          a.tgt   = cur_.expect_ident("a target type");
          a.label = label_opt();
          while (cur_.is_word("injective") || cur_.is_word("surjective")) {
            (cur_.take().text == "injective" ? a.injective : a.surjective) = true;
          }
          aspects_.push_back(std::move(a));
        } else if (w == "fact") {
          RawFact f{kw, cur_.path(), {}};
          cur_.expect_punct("=");
          f.rhs = cur_.path();
          facts_.push_back(std::move(f));
        } else if (w == "singleton" || w == "empty") {
          RawDecl d{kw, cur_.expect_ident("a type id"), {}, {}, {}, {}};
          decls_.push_back(std::move(d));
        } else if (w == "product" || w == "coproduct") {
          std::string const op = w == "product" ? "*" : "+";
          RawDecl           d{kw, cur_.expect_ident("a type id"), {}, {}, {}, {}};
          cur_.expect_punct("=");
          d.types.push_back(cur_.expect_ident("a type id"));
          while (cur_.is_punct(op)) {
            cur_.take();
            d.types.push_back(cur_.expect_ident("a type id"));
          }
          cur_.expect_word("via");
          cur_.expect_punct("(");
          d.aspects.push_back(cur_.expect_ident("an aspect id"));
          while (cur_.is_punct(",")) {
            cur_.take();
            d.aspects.push_back(cur_.expect_ident("an aspect id"));
          }
          cur_.expect_punct(")");
          if (d.aspects.size() != d.types.size()) {
            cur_.fail(d.keyword, std::to_string(d.types.size()) + " types but "
                                     + std::to_string(d.aspects.size())
                                     + " aspects");
          }
          decls_.push_back(std::move(d));
        } else if (w == "pullback" || w == "pushout") {
          std::string const op = w == "pullback" ? "*_" : "+_";
          RawDecl           d{kw, cur_.expect_ident("a type id"), {}, {}, {}, {}};
          cur_.expect_punct("=");
          d.types.push_back(cur_.expect_ident("a type id"));
          cur_.expect_punct(op);
          d.base = cur_.expect_ident("a type id");
          d.types.push_back(cur_.expect_ident("a type id"));
          cur_.expect_word("via");
          cur_.expect_punct("(");
          d.paths.push_back(cur_.path());
          cur_.expect_punct(",");
          d.paths.push_back(cur_.path());
          cur_.expect_punct(")");
          cur_.expect_word("legs");
          cur_.expect_punct("(");
          d.aspects.push_back(cur_.expect_ident("an aspect id"));
          cur_.expect_punct(",");
          d.aspects.push_back(cur_.expect_ident("an aspect id"));
          cur_.expect_punct(")");
          decls_.push_back(std::move(d));
        } else if (w == "image") {
          RawDecl d{kw, cur_.expect_ident("a type id"), {}, {}, {}, {}};
          cur_.expect_word("of");
          d.paths.push_back(cur_.path());
          cur_.expect_word("via");
          cur_.expect_punct("(");
          d.aspects.push_back(cur_.expect_ident("an aspect id"));
          cur_.expect_punct(",");
          d.aspects.push_back(cur_.expect_ident("an aspect id"));
          cur_.expect_punct(")");
          decls_.push_back(std::move(d));
        } else {
          cur_.fail(kw, "unknown declaration '" + w + "'");
        }
      }

      void build(Specification& spec) {
        auto& g = spec.graph;
        std::map<Id, Token> seen;
        auto claim = [&](Token const& t, std::string_view what) {
          auto [it, fresh] = seen.emplace(t.text, t);
          if (!fresh) {
            cur_.error(t, "duplicate declaration of " + std::string(what) + " '"
                              + t.text + "' (first declared at line "
                              + std::to_string(it->second.line) + ")");
          }
          return fresh;
        };
        for (auto const& t : types_) {
          if (claim(t.id, "type")) {
            g.add_type(t.id.text, t.label);
          }
        }
        for (auto const& a : aspects_) {
          if (a.id.text == "Id") {
            cur_.error(a.id, "aspect id 'Id' is reserved for the key column");
            continue;
          }
          bool ok = claim(a.id, "aspect");
          ok &= resolve_type(cur_, g, a.src).has_value();
          ok &= resolve_type(cur_, g, a.tgt).has_value();
          if (ok) {
            g.add_aspect(Aspect{a.id.text, a.label, a.src.text, a.tgt.text,
                                a.injective, a.surjective});
          }
        }
        for (auto const& f : facts_) {
          auto l = resolve(cur_, g, f.lhs);
          auto r = resolve(cur_, g, f.rhs);
          if (!l || !r) {
            continue;
          }
          auto const lt = path_target(g, *l);
          auto const rt = path_target(g, *r);
          if (l->source != r->source || lt != rt) {
            cur_.error(f.keyword, "endpoint mismatch: " + to_string(*l) + " : "
                                      + l->source + " -> " + lt + " but "
                                      + to_string(*r) + " : " + r->source
                                      + " -> " + rt);
            continue;
          }
          spec.facts.insert(Fact{*l, *r});
        }
        std::set<std::string> decl_names;
        for (auto const& d : decls_) {
          auto decl = resolve_decl(g, d);
          if (!decl) {
            continue;
          }
          std::vector<Diagnostic> problems;
          olog::detail::check_decl(g, *decl, problems);
          for (auto const& p : problems) {
            cur_.error(d.keyword, p.message);
          }
          if (!decl_names.insert(decl_name(*decl)).second) {
            cur_.error(d.keyword, "duplicate declaration " + decl_name(*decl));
            continue;
          }
          if (problems.empty()) {
            spec.sketch.push_back(*decl);
          }
        }
        canonical_sort(spec.sketch);

        // Style lints become warnings at the declaring token.
        std::map<Id, Token> type_tok;
        for (auto const& t : types_) {
          type_tok.emplace(t.id.text, t.id);
        }
        std::map<std::string, Token> decl_tok;
        for (auto const& d : decls_) {
          decl_tok.emplace(d.keyword.text + ":" + d.target.text, d.target);
        }
        decl_tok.emplace("", Token{Tok::end, "", 1, 1});
        for (auto const& w : lint_specification(spec)) {
          Token at = decl_tok.at("");
          for (auto const& [id, tok] : type_tok) {
            if (w.message.find("'" + id + "'") != std::string::npos
                && w.code != "missing-square") {
              at = tok;
            }
          }
          for (auto const& [name, tok] : decl_tok) {
            if (!name.empty() && w.message.starts_with(name + ":")) {
              at = tok;
            }
          }
          cur_.warning(at, w.message);
        }
      }

      std::optional<SketchDecl> resolve_decl(Graph const& g, RawDecl const& d) {
        auto const& w = d.keyword.text;
        auto target   = resolve_type(cur_, g, d.target);
        bool ok       = target.has_value();
        std::vector<Leg> legs;
        for (std::size_t i = 0; i < d.aspects.size(); ++i) {
          auto a = resolve_aspect(cur_, g, d.aspects[i]);
          ok &= a.has_value();
          if (i < d.types.size()) {
            auto t = resolve_type(cur_, g, d.types[i]);
            ok &= t.has_value();
            legs.push_back({t.value_or(""), a.value_or("")});
          }
        }
        std::vector<Path> paths;
        for (auto const& rp : d.paths) {
          auto p = resolve(cur_, g, rp);
          ok &= p.has_value();
          paths.push_back(p.value_or(Path{}));
        }
        if (w == "pullback" || w == "pushout") {
          ok &= resolve_type(cur_, g, d.base).has_value();
        }
        if (!ok) {
          return std::nullopt;
        }
        if (w == "singleton") {
          return ProductDecl{*target, {}};
        }
        if (w == "empty") {
          return CoproductDecl{*target, {}};
        }
        if (w == "product") {
          return ProductDecl{*target, legs};
        }
        if (w == "coproduct") {
          return CoproductDecl{*target, legs};
        }
        if (w == "pullback") {
          return PullbackDecl{*target, legs[0], legs[1], d.base.text, paths[0],
                              paths[1]};
        }
        if (w == "pushout") {
          return PushoutDecl{*target, legs[0], legs[1], d.base.text, paths[0],
                             paths[1]};
        }
        return ImageDecl{*target, paths[0], d.aspects[0].text, d.aspects[1].text};
      }

      std::vector<ParseDiagnostic> diags_;
      Cursor                       cur_;
      std::vector<RawType>         types_;
      std::vector<RawAspect>       aspects_;
      std::vector<RawFact>         facts_;
      std::vector<RawDecl>         decls_;
    };
  }  // namespace detail

  inline ParseResult<Specification> parse_olog(std::string_view text,
                                               std::string      file = "<input>") {
    return detail::OlogParser(text, std::move(file)).run();
  }

  namespace detail {
    inline std::string legs_text(std::vector<Leg> const& legs, char op) {
      std::string types, aspects;
      for (std::size_t i = 0; i < legs.size(); ++i) {
        if (i != 0) {
          types += std::string(" ") + op + " ";
          aspects += ",";
        }
        types += legs[i].type;
        aspects += legs[i].aspect;
      }
      return types + " via (" + aspects + ")";
    }

    inline std::string decl_text(SketchDecl const& decl) {
      if (auto const* p = std::get_if<ProductDecl>(&decl)) {
        return p->factors.empty()
                   ? "singleton " + p->target
                   : "product " + p->target + " = " + legs_text(p->factors, '*');
      }
      if (auto const* c = std::get_if<CoproductDecl>(&decl)) {
        return c->summands.empty()
                   ? "empty " + c->target
                   : "coproduct " + c->target + " = "
                         + legs_text(c->summands, '+');
      }
      if (auto const* pb = std::get_if<PullbackDecl>(&decl)) {
        return "pullback " + pb->target + " = " + pb->leg_b.type + " *_"
               + pb->base + " " + pb->leg_c.type + " via ("
               + to_string(pb->cospan_f) + "," + to_string(pb->cospan_g)
               + ") legs (" + pb->leg_b.aspect + "," + pb->leg_c.aspect + ")";
      }
      if (auto const* po = std::get_if<PushoutDecl>(&decl)) {
        return "pushout " + po->target + " = " + po->leg_b.type + " +_"
               + po->apex + " " + po->leg_c.type + " via ("
               + to_string(po->span_f) + "," + to_string(po->span_g)
               + ") legs (" + po->leg_b.aspect + "," + po->leg_c.aspect + ")";
      }
      auto const& im = std::get<ImageDecl>(decl);
      return "image " + im.target + " of " + to_string(im.of) + " via ("
             + im.surjection + "," + im.injection + ")";
    }
  }  // namespace detail

  // Canonical text: sections for types, aspects, facts and sketch, each
  // sorted. A nameless empty specification prints as nothing.
  inline std::string print_olog(Specification const& spec) {
    auto const& g = spec.graph;
    if (spec.name.empty() && g.empty() && spec.facts.empty()
        && spec.sketch.empty()) {
      return "";
    }
    std::vector<std::vector<std::string>> sections(4);
    for (auto const& t : g.types()) {
      std::string line = "type " + t.id;
      if (t.label != t.id) {
        line += " " + detail::quoted(t.label);
      }
      sections[0].push_back(line);
    }
    for (auto const& a : g.aspects()) {
      std::string line = "aspect " + a.id + " : " + a.src + " -> " + a.tgt;
      if (a.label != a.id) {
        line += " " + detail::quoted(a.label);
      }
      if (a.injective) {
        line += " injective";
      }
      if (a.surjective) {
        line += " surjective";
      }
      sections[1].push_back(line);
    }
    for (auto const& f : spec.facts) {
      sections[2].push_back("fact " + to_string(f));
    }
    auto decls = spec.sketch;
    canonical_sort(decls);
    for (auto const& d : decls) {
      sections[3].push_back(detail::decl_text(d));
    }

    std::string out = "olog " + (spec.name.empty() ? "unnamed" : spec.name) + " {\n";
    bool first = true;
    for (auto const& s : sections) {
      if (s.empty()) {
        continue;
      }
      if (!first) {
        out += "\n";
      }
      first = false;
      for (auto const& line : s) {
        out += "  " + line + "\n";
      }
    }
    return out + "}\n";
  }

  // A single `p = q` over `g`, as accepted by the command line.
  inline ParseResult<Fact> parse_fact(std::string_view text,
                                      Graph const&     g,
                                      std::string      file = "<fact>") {
    ParseResult<Fact>    res;
    detail::Cursor       cur(Lexer(text).run(), std::move(file), res.diagnostics);
    try {
      auto lhs = cur.path();
      cur.expect_punct("=");
      auto rhs = cur.path();
      if (!cur.at_end()) {
        cur.fail(cur.peek(), "unexpected input after the fact");
      }
      auto l = detail::resolve(cur, g, lhs);
      auto r = detail::resolve(cur, g, rhs);
      if (l && r) {
        auto const lt = path_target(g, *l);
        auto const rt = path_target(g, *r);
        if (l->source != r->source || lt != rt) {
          cur.fail(lhs.head, "endpoint mismatch: " + l->source + " -> " + lt
                                 + " vs " + r->source + " -> " + rt);
        }
        res.value = Fact{*l, *r};
      }
    } catch (detail::Syntax const&) {
    }
    return res;
  }

  ////////////////////////////////////////////////////////////////////////
  // .omap
  ////////////////////////////////////////////////////////////////////////

  inline ParseResult<GraphMorphism> parse_morphism(std::string_view text,
                                                   Graph const&     src,
                                                   Graph const&     tgt,
                                                   std::string file = "<input>") {
    ParseResult<GraphMorphism> res;
    detail::Cursor cur(Lexer(text).run(), std::move(file), res.diagnostics);
    GraphMorphism  h;
    std::map<Id, Token>              aspect_line;
    std::map<Id, detail::RawPath>    raw_images;
    while (!cur.at_end()) {
      std::size_t const line = cur.peek().line;
      try {
        Token const kw = cur.expect_ident("'type' or 'aspect'");
        if (kw.text == "type") {
          Token const s = cur.expect_ident("a source type");
          cur.expect_punct("=>");
          Token const t = cur.expect_ident("a target type");
          if (!src.has_type(s.text)) {
            cur.fail(s, "unknown source type '" + s.text + "'");
          }
          if (!tgt.has_type(t.text)) {
            cur.fail(t, "unknown target type '" + t.text + "'");
          }
          if (!h.type_map.emplace(s.text, t.text).second) {
            cur.fail(s, "type '" + s.text + "' mapped twice");
          }
        } else if (kw.text == "aspect") {
          Token const s = cur.expect_ident("a source aspect");
          cur.expect_punct("=>");
          auto rp = cur.path();
          if (!src.has_aspect(s.text)) {
            cur.fail(s, "unknown source aspect '" + s.text + "'");
          }
          if (!aspect_line.emplace(s.text, s).second) {
            cur.fail(s, "aspect '" + s.text + "' mapped twice");
          }
          raw_images.emplace(s.text, std::move(rp));
        } else {
          cur.fail(kw, "expected 'type' or 'aspect'" + detail::Cursor::found(kw));
        }
      } catch (detail::Syntax const&) {
        cur.recover(line, false);
      }
    }
    Token const eof = cur.peek();
    for (auto const& t : src.types()) {
      if (!h.type_map.contains(t.id)) {
        cur.error(eof, "type '" + t.id + "' is not mapped");
      }
    }
    for (auto const& a : src.aspects()) {
      auto it = raw_images.find(a.id);
      if (it == raw_images.end()) {
        cur.error(eof, "aspect '" + a.id + "' is not mapped");
        continue;
      }
      auto const s = h.type_map.find(a.src);
      auto const t = h.type_map.find(a.tgt);
      // An identity image can only be written as id(T); a bare path's source
      // comes from its first aspect.
      auto p = detail::resolve(cur, tgt, it->second);
      if (!p) {
        continue;
      }
      if (s == h.type_map.end() || t == h.type_map.end()) {
        continue;
      }
      auto const end = path_target(tgt, *p);
      if (p->source != s->second || end != t->second) {
        cur.error(aspect_line.at(a.id),
                  "endpoint mismatch: '" + a.id + "' : " + a.src + " -> "
                      + a.tgt + " needs an image " + s->second + " -> "
                      + t->second + ", but " + to_string(*p) + " runs "
                      + p->source + " -> " + end);
        continue;
      }
      h.aspect_map.emplace(a.id, *p);
    }
    if (res.errors().empty()) {
      res.value = std::move(h);
    }
    return res;
  }

  inline std::string print_morphism(GraphMorphism const& h) {
    std::string out;
    for (auto const& [s, t] : h.type_map) {
      out += "type " + s + " => " + t + "\n";
    }
    for (auto const& [a, p] : h.aspect_map) {
      out += "aspect " + a + " => " + to_string(p) + "\n";
    }
    return out;
  }

}  // namespace olog::dsl
