#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mrc/error.hpp"
#include "mrc/lexer.hpp"

namespace mrc {

/// A qualified name as an ordered list of scope segments.
struct QualName {
  std::vector<std::string> segments;

  QualName() = default;
  explicit QualName(std::vector<std::string> segs) : segments(std::move(segs)) {}

  static QualName parse(std::string_view joined) {
    QualName q;
    std::size_t pos = 0;
    while (true) {
      std::size_t sep = joined.find("::", pos);
      if (sep == std::string_view::npos) {
        q.segments.emplace_back(joined.substr(pos));
        break;
      }
      q.segments.emplace_back(joined.substr(pos, sep - pos));
      pos = sep + 2;
    }
    return q;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i) out += "::";
      out += segments[i];
    }
    return out;
  }

  bool empty() const { return segments.empty(); }
  std::size_t depth() const { return segments.size(); }
  const std::string& back() const { return segments.back(); }

  QualName parent() const {
    QualName p;
    if (segments.size() > 1)
      p.segments.assign(segments.begin(), segments.end() - 1);
    return p;
  }

  QualName child(const std::string& seg) const {
    QualName c = *this;
    c.segments.push_back(seg);
    return c;
  }

  bool valid() const {
    if (segments.empty()) return false;
    for (const auto& s : segments) {
      if (s.empty() || !detail::is_ident_start(s[0])) return false;
      for (char ch : s)
        if (!detail::is_ident_char(ch)) return false;
      if (is_keyword_text(s)) return false;
    }
    return true;
  }

  friend bool operator==(const QualName&, const QualName&) = default;
  friend auto operator<=>(const QualName& a, const QualName& b) {
    return a.segments <=> b.segments;
  }
};

enum class DeclKind { name_space, record, function, extern_global, alias };

inline std::string_view to_string(DeclKind k) {
  switch (k) {
    case DeclKind::name_space: return "namespace";
    case DeclKind::record: return "record";
    case DeclKind::function: return "function";
    case DeclKind::extern_global: return "extern-global";
    case DeclKind::alias: return "alias";
  }
  return "?";
}

/// Where a resolved declaration came from. Set at load/parse time, never
/// serialized.
enum class DeclOrigin { textual, injected_dictionary, pch, pcm };

inline std::string origin_string(DeclOrigin o, const std::string& module_name) {
  switch (o) {
    case DeclOrigin::textual: return "textual";
    case DeclOrigin::injected_dictionary: return "injected-dictionary";
    case DeclOrigin::pch: return "pch";
    case DeclOrigin::pcm: return "pcm:" + module_name;
  }
  return "?";
}

struct Member {
  std::string name;
  std::string type_ref;  // "int" or a qualified name
  friend bool operator==(const Member&, const Member&) = default;
};

/// One entity of the modeled language, flat: nesting lives in the
/// qualified name, not in child lists.
struct Declaration {
  DeclKind kind = DeclKind::record;
  QualName name;
  bool defined = false;
  std::vector<Member> members;      // records only, definition only
  std::string annotation;           // autoload header name; set iff injected
  std::string underlying;           // alias target / extern type / fn return type
  std::vector<std::string> params;  // function parameter type-refs
  DeclOrigin origin = DeclOrigin::textual;
  std::string origin_module;        // module name when origin == pcm

  std::size_t arity() const { return params.size(); }

  /// Structural identity: everything except provenance.
  bool same_structure(const Declaration& o) const {
    return kind == o.kind && name == o.name && defined == o.defined &&
           members == o.members && underlying == o.underlying && params == o.params;
  }
};

/// Forward view of a declaration: definition stripped, annotation cleared.
inline Declaration forward_of(const Declaration& d) {
  Declaration f = d;
  f.defined = false;
  f.members.clear();
  f.annotation.clear();
  if (f.kind == DeclKind::name_space) f.defined = true;  // namespaces have no forward form
  return f;
}

struct HeaderFile {
  std::string name;                    // "Foo.mrh"
  std::vector<std::string> includes;   // header names, in source order
  std::vector<Declaration> declarations;  // flat, first-occurrence order

  const Declaration* find(const QualName& q) const {
    for (const auto& d : declarations)
      if (d.name == q) return &d;
    return nullptr;
  }
};

inline bool valid_header_name(std::string_view name) {
  if (name.size() < 5 || name.substr(name.size() - 4) != ".mrh") return false;
  std::string_view stem = name.substr(0, name.size() - 4);
  if (stem.empty() || !detail::is_ident_start(stem[0])) return false;
  for (char c : stem)
    if (!detail::is_ident_char(c)) return false;
  return true;
}

enum class StatementForm {
  pointer_decl,
  value_decl,
  expr_use,
  include,
  load_lib,
  member_access,
};

inline std::string_view to_string(StatementForm f) {
  switch (f) {
    case StatementForm::pointer_decl: return "pointer-decl";
    case StatementForm::value_decl: return "value-decl";
    case StatementForm::expr_use: return "expr-use";
    case StatementForm::include: return "include";
    case StatementForm::load_lib: return "load-lib";
    case StatementForm::member_access: return "member-access";
  }
  return "?";
}

struct Statement {
  StatementForm form = StatementForm::expr_use;
  QualName target;       // type or entity name (empty for include/load)
  std::string variable;  // pointer-decl / value-decl variable name
  std::string field;     // member-access field name
  std::string payload;   // header or library name for include/load
  std::string text;      // original source line, trimmed
};

}  // namespace mrc
