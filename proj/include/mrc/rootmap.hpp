#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/error.hpp"
#include "mrc/parser.hpp"

namespace mrc {

struct RootmapSection {
  std::string library;  // "Foo" (the file on disk is libFoo.mrlib)
  std::vector<std::pair<DeclKind, QualName>> entries;  // record or name_space only
};

/// One .rootmap file: a forward-declaration preamble consumed at startup
/// plus identifier -> library sections.
struct RootmapFile {
  std::vector<Declaration> preamble;  // forward records and empty namespaces, flat
  std::vector<RootmapSection> sections;
};

namespace detail {

// A namespace chain prints as one nested line: `namespace a { namespace b { } }`
inline std::string namespace_chain_line(const QualName& q) {
  std::string line;
  for (const auto& seg : q.segments) line += "namespace " + seg + " { ";
  for (std::size_t i = 0; i < q.depth(); ++i) line += "} ";
  if (!line.empty()) line.pop_back();
  return line;
}

}  // namespace detail

/// Deterministic text form, mirroring the classic dictionary layout.
inline std::string emit_rootmap(const RootmapFile& rm) {
  std::ostringstream out;
  out << "{ decls }\n";
  // namespaces print as maximal chains; a namespace that prefixes another
  // preamble namespace is covered by the longer chain
  std::vector<const Declaration*> spaces;
  for (const auto& d : rm.preamble)
    if (d.kind == DeclKind::name_space) spaces.push_back(&d);
  for (const auto& d : rm.preamble) {
    if (d.kind == DeclKind::name_space) {
      bool prefixed = false;
      for (const auto* other : spaces) {
        if (other == &d || other->name.depth() <= d.name.depth()) continue;
        if (std::equal(d.name.segments.begin(), d.name.segments.end(),
                       other->name.segments.begin()))
          prefixed = true;
      }
      if (!prefixed) out << detail::namespace_chain_line(d.name) << "\n";
    } else {
      out << "struct " << d.name.str() << ";\n";
    }
  }
  for (const auto& sec : rm.sections) {
    out << "\n[ lib" << sec.library << ".mrlib ]\n";
    out << "# List of selected classes\n";
    for (const auto& [kind, name] : sec.entries)
      out << (kind == DeclKind::name_space ? "namespace " : "struct ") << name.str() << "\n";
  }
  return out.str();
}

inline RootmapFile parse_rootmap(const std::string& text, const std::string& file) {
  RootmapFile rm;
  std::istringstream in(text);
  std::string line;
  bool saw_decls = false;
  std::string preamble_text;
  RootmapSection* current = nullptr;

  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };

  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "{ decls }") {
      saw_decls = true;
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') fail(ErrorKind::corrupt_rootmap, file + ": malformed section header");
      std::string name = trim(t.substr(1, t.size() - 2));
      if (name.size() < 10 || name.substr(0, 3) != "lib" ||
          name.substr(name.size() - 6) != ".mrlib")
        fail(ErrorKind::corrupt_rootmap, file + ": section must name a lib<Name>.mrlib");
      std::string lib = name.substr(3, name.size() - 9);
      QualName libq = QualName::parse(lib);
      if (libq.depth() != 1 || !libq.valid())
        fail(ErrorKind::corrupt_rootmap, file + ": bad library name '" + lib + "'");
      rm.sections.push_back({std::move(lib), {}});
      current = &rm.sections.back();
      continue;
    }
    if (current == nullptr) {
      if (!saw_decls)
        fail(ErrorKind::corrupt_rootmap, file + ": content before '{ decls }'");
      preamble_text += t + "\n";
      continue;
    }
    std::istringstream ls(t);
    std::string kind_word, qname;
    ls >> kind_word >> qname;
    DeclKind kind;
    if (kind_word == "struct" || kind_word == "class")
      kind = DeclKind::record;
    else if (kind_word == "namespace")
      kind = DeclKind::name_space;
    else
      fail(ErrorKind::corrupt_rootmap, file + ": bad section entry '" + t + "'");
    QualName q = QualName::parse(qname);
    if (!q.valid())
      fail(ErrorKind::corrupt_rootmap, file + ": bad identifier in section entry '" + t + "'");
    current->entries.emplace_back(kind, std::move(q));
  }

  HeaderFile pre = parse_header_text(preamble_text, file + " (decls)");
  for (const auto& d : pre.declarations) {
    bool ok = d.kind == DeclKind::name_space || (d.kind == DeclKind::record && !d.defined);
    if (!ok)
      fail(ErrorKind::corrupt_rootmap,
           file + ": preamble may contain only forward declarations and empty namespaces ('" +
               d.name.str() + "')");
  }
  rm.preamble = pre.declarations;
  return rm;
}

/// Identifier -> defining library index over every consumed rootmap.
class RootmapDb {
public:
  void add(const RootmapFile& rm, const std::string& file) {
    for (const auto& sec : rm.sections)
      for (const auto& [kind, name] : sec.entries) {
        auto [it, inserted] = map_.emplace(name.str(), sec.library);
        if (!inserted && it->second != sec.library)
          fail(ErrorKind::duplicate_rootmap_entry,
               file + ": identifier '" + name.str() + "' already maps to lib" + it->second);
        (void)kind;
      }
  }

  const std::string* find(const std::string& qname) const {
    auto it = map_.find(qname);
    return it == map_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return map_.size(); }

private:
  std::map<std::string, std::string> map_;
};

}  // namespace mrc
