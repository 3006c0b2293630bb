#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/error.hpp"
#include "mrc/meter.hpp"
#include "mrc/parser.hpp"
#include "mrc/pcm.hpp"
#include "mrc/rootmap.hpp"

namespace mrc {

/// Entities a dictionary exposes for autoloading: qualified names of
/// records or namespaces, one per line, '#' comments allowed.
struct SelectionList {
  std::vector<QualName> entries;
};

inline SelectionList parse_selection(const std::string& text, const std::string& file) {
  SelectionList sel;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string t = line.substr(b, e - b + 1);
    if (t[0] == '#') continue;
    QualName q = QualName::parse(t);
    if (!q.valid()) fail(ErrorKind::unknown_selection_entry, file + ": bad entry '" + t + "'");
    if (!seen.insert(q.str()).second)
      fail(ErrorKind::duplicate_selection_entry, file + ": duplicate entry '" + q.str() + "'");
    sel.entries.push_back(std::move(q));
  }
  return sel;
}

/// What a dictionary build produces: the rootmap consumed at startup and
/// the payload of annotated forward declarations the library injects when
/// it is loaded. The annotation names the header that fully declares the
/// entity, so a later definition demand knows what to parse.
struct Dictionary {
  RootmapFile rootmap;
  std::vector<Declaration> payload;
};

inline Dictionary gen_dictionary(const std::string& library,
                                 const std::vector<HeaderFile>& headers,
                                 const SelectionList& selection) {
  if (headers.empty())
    fail(ErrorKind::empty_header_list, "lib" + library + ": no headers to generate from");

  // first header that defines the entity; falls back to first declaring it
  auto defining_header = [&](const QualName& q) -> const std::string& {
    const std::string* first = nullptr;
    for (const auto& hf : headers) {
      if (const Declaration* d = hf.find(q)) {
        if (d->defined || d->kind == DeclKind::name_space) return hf.name;
        if (!first) first = &hf.name;
      }
    }
    if (!first) fail(ErrorKind::unknown_selection_entry,
                     "lib" + library + ": selected '" + q.str() + "' not declared in any header");
    return *first;
  };

  Dictionary dict;
  RootmapSection section;
  section.library = library;
  std::set<std::string> preamble_seen, payload_seen;

  auto add_preamble = [&](Declaration d) {
    if (preamble_seen.insert(d.name.str()).second) dict.rootmap.preamble.push_back(std::move(d));
  };
  auto add_payload = [&](Declaration d) {
    if (payload_seen.insert(d.name.str()).second) dict.payload.push_back(std::move(d));
  };

  for (const auto& q : selection.entries) {
    const Declaration* found = nullptr;
    for (const auto& hf : headers)
      if ((found = hf.find(q)) != nullptr) break;
    if (!found)
      fail(ErrorKind::unknown_selection_entry,
           "lib" + library + ": selected '" + q.str() + "' not declared in any header");
    if (found->kind != DeclKind::record && found->kind != DeclKind::name_space)
      fail(ErrorKind::unknown_selection_entry,
           "lib" + library + ": selected '" + q.str() + "' is not a record or namespace");

    section.entries.emplace_back(found->kind, q);

    // enclosing namespaces come along in both preamble and payload
    for (std::size_t depth = 1; depth < q.depth(); ++depth) {
      QualName ns;
      ns.segments.assign(q.segments.begin(), q.segments.begin() + depth);
      Declaration d;
      d.kind = DeclKind::name_space;
      d.name = ns;
      d.origin = DeclOrigin::injected_dictionary;
      add_preamble(d);
      Declaration p = d;
      add_payload(std::move(p));
    }
    if (found->kind == DeclKind::name_space) {
      Declaration d;
      d.kind = DeclKind::name_space;
      d.name = q;
      d.origin = DeclOrigin::injected_dictionary;
      add_preamble(d);
      add_payload(d);
    } else {
      // nested records stay out of the preamble: only their emptied
      // namespaces appear there, so resolving them forces a library load
      if (q.depth() == 1) add_preamble(forward_of(*found));
      Declaration p = forward_of(*found);
      p.annotation = defining_header(q);
      p.origin = DeclOrigin::injected_dictionary;
      add_payload(std::move(p));
    }
  }

  dict.rootmap.sections.push_back(std::move(section));
  return dict;
}

/// Module map: a module name plus the headers it claims.
struct ModuleMap {
  std::string module;
  std::vector<std::string> headers;
};

inline std::string emit_module_map(const ModuleMap& mm) {
  std::string out = "module " + mm.module + "\n";
  for (const auto& h : mm.headers) out += "header " + h + "\n";
  return out;
}

inline ModuleMap parse_module_map(const std::string& text, const std::string& file) {
  ModuleMap mm;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string t = line.substr(b, e - b + 1);
    std::istringstream ls(t);
    std::string word, rest;
    ls >> word >> rest;
    if (word == "module" && mm.module.empty() && !rest.empty())
      mm.module = rest;
    else if (word == "header" && !mm.module.empty() && !rest.empty())
      mm.headers.push_back(rest);
    else
      fail(ErrorKind::bad_spec, file + ": malformed module map line '" + t + "'");
  }
  if (mm.module.empty()) fail(ErrorKind::bad_spec, file + ": no module stanza");
  return mm;
}

/// Builds a module file from a module map. Direct includes of headers
/// claimed by another map become module dependencies; includes of headers
/// no map claims are an error — a module cannot be built on top of
/// unmodularized headers. Build-time parsing is not charged to any run.
inline PcmData build_pcm(const ModuleMap& map,
                         const std::vector<std::filesystem::path>& include_dirs,
                         const std::vector<ModuleMap>& all_maps) {
  if (map.headers.empty()) fail(ErrorKind::empty_header_list, "module " + map.module);

  std::map<std::string, const ModuleMap*> claimed;
  for (const auto& mm : all_maps)
    for (const auto& h : mm.headers) {
      auto [it, inserted] = claimed.emplace(h, &mm);
      if (!inserted && it->second->module != mm.module)
        fail(ErrorKind::duplicate_module, "header '" + h + "' claimed by modules " +
                                              it->second->module + " and " + mm.module);
    }

  CostMeter build_meter;  // discarded
  HeaderSet set(include_dirs, build_meter);
  std::set<std::string> own(map.headers.begin(), map.headers.end());
  std::vector<std::string> deps;
  detail::DeclSink sink;
  std::set<std::string> collected;

  for (const auto& name : map.headers) {
    if (is_absolute_path(name))
      fail(ErrorKind::absolute_source_path,
           "module " + map.module + ": source path '" + name + "' is absolute");
    std::vector<std::string> newly;
    set.parse(name, &newly);
    for (const auto& h : newly) {
      if (!own.count(h)) continue;
      const HeaderFile& hf = set.get(h);
      for (const auto& inc : hf.includes) {
        if (own.count(inc)) continue;
        auto it = claimed.find(inc);
        if (it == claimed.end() || it->second->module == map.module)
          fail(ErrorKind::dependency_unmodularized,
               "module " + map.module + ": header '" + h + "' includes unmodularized '" + inc +
                   "'");
        deps.push_back(it->second->module);
      }
      if (collected.insert(h).second)
        for (const auto& d : hf.declarations) sink.add(d);
    }
  }
  return make_pcm(map.module, map.headers, std::move(deps), sink.take());
}

}  // namespace mrc
