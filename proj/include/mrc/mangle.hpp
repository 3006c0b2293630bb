#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "mrc/ast.hpp"
#include "mrc/error.hpp"

namespace mrc {

/// An encoded entity name used for symbol-table lookup.
struct MangledName {
  std::string text;
  friend auto operator<=>(const MangledName&, const MangledName&) = default;
};

/// `_M` + `<len><segment>`... + `F<arity>` for functions, `V` for globals.
/// Injective over the language: segment lengths delimit unambiguously.
inline MangledName mangle_global(const QualName& name) {
  std::string out = "_M";
  for (const auto& seg : name.segments) out += std::to_string(seg.size()) + seg;
  out += 'V';
  return {out};
}

inline MangledName mangle_function(const QualName& name, std::size_t arity) {
  std::string out = "_M";
  for (const auto& seg : name.segments) out += std::to_string(seg.size()) + seg;
  out += 'F' + std::to_string(arity);
  return {out};
}

/// Records and namespaces contribute a constructor-analog symbol so that
/// library symbol tables look populated; mangled as a zero-arg function.
inline MangledName mangle_ctor(const QualName& name) { return mangle_function(name, 0); }

inline MangledName mangle_decl(const Declaration& d) {
  switch (d.kind) {
    case DeclKind::extern_global: return mangle_global(d.name);
    case DeclKind::function: return mangle_function(d.name, d.arity());
    default: return mangle_ctor(d.name);
  }
}

/// Shape check used when building library artifacts.
inline bool valid_mangled_name(std::string_view s) {
  if (s.size() < 4 || s[0] != '_' || s[1] != 'M') return false;
  std::size_t i = 2;
  std::size_t segments = 0;
  while (i < s.size() && s[i] >= '1' && s[i] <= '9') {
    std::size_t len = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      len = len * 10 + static_cast<std::size_t>(s[i] - '0');
      ++i;
    }
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t j = 0; j < len; ++j) {
      char c = s[i + j];
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
                (j > 0 && c >= '0' && c <= '9');
      if (!ok) return false;
    }
    i += len;
    ++segments;
  }
  if (segments == 0 || i >= s.size()) return false;
  if (s[i] == 'V') return i + 1 == s.size();
  if (s[i] != 'F') return false;
  ++i;
  if (i == s.size()) return false;
  while (i < s.size())
    if (s[i] < '0' || s[i++] > '9') return false;
  return true;
}

}  // namespace mrc
