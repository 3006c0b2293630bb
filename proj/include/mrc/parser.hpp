#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/error.hpp"
#include "mrc/lexer.hpp"
#include "mrc/meter.hpp"

namespace mrc {

namespace detail {

class TokenCursor {
public:
  TokenCursor(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {
    end_.kind = TokenKind::end;
    end_.file = file_;
    end_.offset = tokens_.empty() ? 0 : tokens_.back().offset + tokens_.back().text.size();
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : end_;
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return pos_ >= tokens_.size(); }

  bool accept_punct(std::string_view p) {
    if (peek().is_punct(p)) {
      next();
      return true;
    }
    return false;
  }

  const Token& expect_punct(std::string_view p, std::string_view what) {
    if (!peek().is_punct(p)) error(std::string("expected '") + std::string(p) + "' " + std::string(what));
    return next();
  }

  std::string expect_identifier(std::string_view what) {
    if (peek().kind != TokenKind::identifier)
      error(std::string("expected identifier ") + std::string(what));
    return next().text;
  }

  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = peek();
    fail(ErrorKind::parse_error,
         file_ + ": offset " + std::to_string(t.offset) + ": " + msg +
             (t.kind == TokenKind::end ? " (at end of input)" : " (got '" + t.text + "')"));
  }

private:
  std::vector<Token> tokens_;
  std::string file_;
  Token end_;
  std::size_t pos_ = 0;
};

// qname := IDENT ('::' IDENT)*
inline QualName parse_qname(TokenCursor& c, std::string_view what) {
  QualName q;
  q.segments.push_back(c.expect_identifier(what));
  while (c.peek().is_punct("::")) {
    c.next();
    q.segments.push_back(c.expect_identifier("after '::'"));
  }
  return q;
}

// type-ref := 'int' | qname
inline std::string parse_type_ref(TokenCursor& c, std::string_view what) {
  if (c.peek().is_keyword("int")) {
    c.next();
    return "int";
  }
  return parse_qname(c, what).str();
}

// file-name := IDENT '.' IDENT
inline std::string parse_file_name(TokenCursor& c) {
  std::string name = c.expect_identifier("in file name");
  c.expect_punct(".", "in file name");
  name += "." + c.expect_identifier("after '.' in file name");
  return name;
}

}  // namespace detail

namespace detail {

/// Accumulates flat declarations with first-occurrence order and
/// upgrade-in-place merging.
class DeclSink {
public:
  void add(Declaration d) {
    auto it = index_.find(d.name.str());
    if (it == index_.end()) {
      index_.emplace(d.name.str(), decls_.size());
      decls_.push_back(std::move(d));
      return;
    }
    Declaration& old = decls_[it->second];
    if (old.kind != d.kind)
      fail(ErrorKind::kind_conflict, "conflicting kinds for '" + d.name.str() + "' (" +
                                          std::string(to_string(old.kind)) + " vs " +
                                          std::string(to_string(d.kind)) + ")");
    switch (d.kind) {
      case DeclKind::name_space:
        return;  // reopened
      case DeclKind::record:
        if (d.defined && old.defined)
          fail(ErrorKind::duplicate_definition, "redefinition of '" + d.name.str() + "'");
        if (d.defined) {
          old.defined = true;
          old.members = std::move(d.members);
        }
        return;
      default:
        if (!old.same_structure(d)) {
          fail(ErrorKind::duplicate_definition,
               "conflicting redeclaration of '" + d.name.str() + "'");
        }
        return;
    }
  }

  std::vector<Declaration> take() { return std::move(decls_); }

private:
  std::vector<Declaration> decls_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace detail

/// Parses a single header's text into a flat AST. Include directives are
/// recorded in HeaderFile::includes but not resolved; use HeaderSet for a
/// corpus with includes.
inline HeaderFile parse_header_text(std::string_view text, const std::string& name) {
  HeaderFile hf;
  hf.name = name;
  detail::TokenCursor c(tokenize(text, name), name);
  detail::DeclSink sink;

  // item parser; depth 0 is file scope, where includes are allowed
  auto parse_items = [&](auto&& self, const QualName& scope, int depth) -> void {
    while (true) {
      const Token& t = c.peek();
      if (t.kind == TokenKind::end) {
        if (depth > 0) c.error("unterminated namespace (expected '}')");
        return;
      }
      if (depth > 0 && t.is_punct("}")) return;

      if (t.is_punct("#")) {
        if (depth > 0) c.error("includes are only allowed at file scope");
        c.next();
        std::string word = c.expect_identifier("after '#'");
        if (word != "include") c.error("unknown directive '#" + word + "'");
        c.expect_punct("<", "before header name");
        std::string file = detail::parse_file_name(c);
        c.expect_punct(">", "after header name");
        if (!valid_header_name(file))
          fail(ErrorKind::invalid_header_name, name + ": included file '" + file +
                                                    "' is not a valid .mrh header name");
        hf.includes.push_back(file);
        continue;
      }
      if (t.is_keyword("namespace")) {
        c.next();
        std::string ns = c.expect_identifier("after 'namespace'");
        QualName qn = scope.empty() ? QualName(std::vector<std::string>{ns}) : scope.child(ns);
        Declaration d;
        d.kind = DeclKind::name_space;
        d.name = qn;
        d.defined = true;
        sink.add(std::move(d));
        c.expect_punct("{", "after namespace name");
        self(self, qn, depth + 1);
        c.expect_punct("}", "to close namespace");
        c.accept_punct(";");  // optional
        continue;
      }
      if (t.is_keyword("struct")) {
        c.next();
        std::string sn = c.expect_identifier("after 'struct'");
        Declaration d;
        d.kind = DeclKind::record;
        d.name = scope.empty() ? QualName(std::vector<std::string>{sn}) : scope.child(sn);
        if (c.accept_punct(";")) {
          d.defined = false;
          sink.add(std::move(d));
          continue;
        }
        c.expect_punct("{", "after struct name");
        d.defined = true;
        while (!c.peek().is_punct("}")) {
          Member m;
          m.type_ref = detail::parse_type_ref(c, "as member type");
          m.name = c.expect_identifier("as member name");
          c.expect_punct(";", "after member");
          d.members.push_back(std::move(m));
        }
        c.expect_punct("}", "to close struct");
        c.expect_punct(";", "after struct definition");
        sink.add(std::move(d));
        continue;
      }
      if (t.is_keyword("extern")) {
        c.next();
        Declaration d;
        d.kind = DeclKind::extern_global;
        d.underlying = detail::parse_type_ref(c, "as extern type");
        std::string gn = c.expect_identifier("as extern name");
        d.name = scope.empty() ? QualName(std::vector<std::string>{gn}) : scope.child(gn);
        d.defined = false;  // the definition is a symbol in some library
        c.expect_punct(";", "after extern declaration");
        sink.add(std::move(d));
        continue;
      }
      if (t.is_keyword("using")) {
        c.next();
        Declaration d;
        d.kind = DeclKind::alias;
        std::string an = c.expect_identifier("after 'using'");
        d.name = scope.empty() ? QualName(std::vector<std::string>{an}) : scope.child(an);
        c.expect_punct("=", "in alias");
        d.underlying = detail::parse_type_ref(c, "as alias target");
        d.defined = true;
        c.expect_punct(";", "after alias");
        sink.add(std::move(d));
        continue;
      }
      if (t.is_keyword("int") || t.kind == TokenKind::identifier) {
        // function-decl := type-ref IDENT '(' params ')' ';'
        Declaration d;
        d.kind = DeclKind::function;
        d.underlying = detail::parse_type_ref(c, "as return type");
        std::string fn = c.expect_identifier("as function name");
        d.name = scope.empty() ? QualName(std::vector<std::string>{fn}) : scope.child(fn);
        c.expect_punct("(", "in function declaration");
        if (!c.peek().is_punct(")")) {
          d.params.push_back(detail::parse_type_ref(c, "as parameter type"));
          while (c.accept_punct(","))
            d.params.push_back(detail::parse_type_ref(c, "as parameter type"));
        }
        c.expect_punct(")", "after parameters");
        d.defined = false;  // as with externs, the body lives in a library
        c.expect_punct(";", "after function declaration");
        sink.add(std::move(d));
        continue;
      }
      c.error("expected a declaration");
    }
  };
  parse_items(parse_items, QualName{}, 0);
  hf.declarations = sink.take();
  return hf;
}

/// Canonical source form of a flat AST; re-parses to a structurally equal
/// declaration list.
inline std::string pretty_print(const HeaderFile& hf) {
  std::ostringstream out;
  for (const auto& inc : hf.includes) out << "#include <" << inc << ">\n";
  std::vector<std::string> open;  // open namespace segments

  auto indent = [&]() {
    for (std::size_t i = 0; i < open.size(); ++i) out << "  ";
  };
  auto close_to = [&](std::size_t depth) {
    while (open.size() > depth) {
      open.pop_back();
      indent();
      out << "}\n";
    }
  };
  auto open_parents = [&](const QualName& parent) {
    // close namespaces that are not a prefix of parent, then open the rest
    std::size_t common = 0;
    while (common < open.size() && common < parent.depth() &&
           open[common] == parent.segments[common])
      ++common;
    close_to(common);
    for (std::size_t i = common; i < parent.depth(); ++i) {
      indent();
      out << "namespace " << parent.segments[i] << " {\n";
      open.push_back(parent.segments[i]);
    }
  };

  for (const auto& d : hf.declarations) {
    if (d.kind == DeclKind::name_space) {
      open_parents(d.name);  // open the namespace itself; children follow
      continue;
    }
    open_parents(d.name.parent());
    indent();
    switch (d.kind) {
      case DeclKind::record:
        if (!d.defined) {
          out << "struct " << d.name.back() << ";\n";
        } else {
          out << "struct " << d.name.back() << " {";
          for (const auto& m : d.members) out << " " << m.type_ref << " " << m.name << ";";
          out << (d.members.empty() ? "};\n" : " };\n");
        }
        break;
      case DeclKind::extern_global:
        out << "extern " << d.underlying << " " << d.name.back() << ";\n";
        break;
      case DeclKind::alias:
        out << "using " << d.name.back() << " = " << d.underlying << ";\n";
        break;
      case DeclKind::function: {
        out << d.underlying << " " << d.name.back() << "(";
        for (std::size_t i = 0; i < d.params.size(); ++i)
          out << (i ? ", " : "") << d.params[i];
        out << ");\n";
        break;
      }
      case DeclKind::name_space:
        break;
    }
  }
  close_to(0);
  return out.str();
}

/// A parse session over a corpus of headers: resolves includes through the
/// configured directories, keeps an idempotent include guard, charges the
/// meter per newly parsed file, and detects include cycles.
class HeaderSet {
public:
  HeaderSet(std::vector<std::filesystem::path> include_dirs, CostMeter& meter)
      : include_dirs_(std::move(include_dirs)), meter_(&meter) {}

  /// Optional nesting gauge shared with the resolution engine.
  void set_depth_gauge(DepthGauge* gauge) { gauge_ = gauge; }

  bool parsed(const std::string& name) const { return parsed_.count(name) != 0; }

  /// Parses `name` and its not-yet-parsed transitive includes.
  /// Newly parsed header names (depth-first order) are appended to
  /// `*newly` when given.
  const HeaderFile& parse(const std::string& name, std::vector<std::string>* newly = nullptr) {
    if (auto it = parsed_.find(name); it != parsed_.end()) return it->second;
    if (!valid_header_name(name))
      fail(ErrorKind::invalid_header_name, "'" + name + "' is not a valid .mrh header name");
    for (const auto& on_stack : stack_)
      if (on_stack == name) {
        std::string cycle;
        bool in = false;
        for (const auto& s : stack_) {
          if (s == name) in = true;
          if (in) cycle += s + " -> ";
        }
        fail(ErrorKind::include_cycle, "include cycle: " + cycle + name);
      }

    std::filesystem::path path = locate(name);
    std::string text = read_file(path, name);
    auto tokens = tokenize(text, name);
    meter_->tokens_parsed += tokens.size();

    stack_.push_back(name);
    if (gauge_) gauge_->push();
    HeaderFile hf = parse_header_text(text, name);
    // resolve includes depth-first, in source order
    for (const auto& inc : hf.includes) parse(inc, newly);
    if (gauge_) gauge_->pop();
    stack_.pop_back();

    auto [it, _] = parsed_.emplace(name, std::move(hf));
    if (newly) newly->push_back(name);
    order_.push_back(name);
    return it->second;
  }

  /// All parsed headers in completion order (includes before includers).
  const std::vector<std::string>& order() const { return order_; }
  const HeaderFile& get(const std::string& name) const { return parsed_.at(name); }

private:
  std::filesystem::path locate(const std::string& name) const {
    for (const auto& dir : include_dirs_) {
      std::filesystem::path p = dir / name;
      std::error_code ec;
      if (std::filesystem::exists(p, ec)) return p;
    }
    fail(ErrorKind::missing_include, "cannot find header '" + name + "' on the include path");
  }

  static std::string read_file(const std::filesystem::path& p, const std::string& name) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot read '" + name + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::vector<std::filesystem::path> include_dirs_;
  CostMeter* meter_;
  DepthGauge* gauge_ = nullptr;
  std::map<std::string, HeaderFile> parsed_;
  std::vector<std::string> stack_;
  std::vector<std::string> order_;
};

/// Classifies one script line. Trailing ';' is optional; extra tokens are
/// an error.
inline Statement parse_statement(std::string_view line, const std::string& file = "<stmt>") {
  Statement st;
  // trim for the echo text
  std::size_t b = line.find_first_not_of(" \t\r\n");
  std::size_t e = line.find_last_not_of(" \t\r\n");
  st.text = (b == std::string_view::npos) ? "" : std::string(line.substr(b, e - b + 1));

  detail::TokenCursor c(tokenize(line, file), file);
  if (c.at_end()) c.error("empty statement");

  auto finish = [&]() {
    c.accept_punct(";");
    if (!c.at_end()) c.error("trailing tokens after statement");
  };

  const Token& t = c.peek();
  if (t.is_punct("#")) {
    c.next();
    std::string word = c.expect_identifier("after '#'");
    if (word != "include") c.error("unknown directive '#" + word + "'");
    c.expect_punct("<", "before header name");
    st.payload = detail::parse_file_name(c);
    c.expect_punct(">", "after header name");
    if (!valid_header_name(st.payload))
      fail(ErrorKind::invalid_header_name,
           file + ": included file '" + st.payload + "' is not a valid .mrh header name");
    st.form = StatementForm::include;
    finish();
    return st;
  }
  if (t.kind == TokenKind::identifier && t.text == "load" && c.peek(1).is_punct("\"")) {
    c.next();
    c.expect_punct("\"", "before library name");
    st.payload = c.expect_identifier("as library name");
    c.expect_punct("\"", "after library name");
    st.form = StatementForm::load_lib;
    finish();
    return st;
  }
  if (t.is_keyword("int")) {
    c.next();
    st.target = QualName(std::vector<std::string>{"int"});
    if (c.accept_punct("*")) {
      st.variable = c.expect_identifier("as variable name");
      st.form = StatementForm::pointer_decl;
    } else if (c.peek().kind == TokenKind::identifier) {
      st.variable = c.next().text;
      st.form = StatementForm::value_decl;
    } else {
      st.form = StatementForm::expr_use;
    }
    finish();
    return st;
  }
  if (t.kind != TokenKind::identifier) c.error("expected a statement");

  st.target = detail::parse_qname(c, "as statement target");
  if (c.accept_punct("*")) {
    st.variable = c.expect_identifier("as variable name");
    st.form = StatementForm::pointer_decl;
  } else if (c.peek().kind == TokenKind::identifier) {
    st.variable = c.next().text;
    st.form = StatementForm::value_decl;
  } else if (c.accept_punct(".")) {
    st.field = c.expect_identifier("as member name");
    st.form = StatementForm::member_access;
  } else {
    st.form = StatementForm::expr_use;
  }
  finish();
  return st;
}

/// Splits a script into statements: one per non-blank line.
inline std::vector<Statement> parse_script(std::string_view text, const std::string& file = "<script>") {
  std::vector<Statement> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos)
      out.push_back(parse_statement(line, file));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace mrc
