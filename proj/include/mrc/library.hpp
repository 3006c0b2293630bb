#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/binio.hpp"
#include "mrc/bloom.hpp"
#include "mrc/error.hpp"
#include "mrc/mangle.hpp"
#include "mrc/serial.hpp"

namespace mrc {

inline constexpr std::string_view k_mrlib_magic{"MRLIB\x01", 6};

/// A linkable library analog: two mangled-symbol tables (the dynamic table
/// mirrors .dynsym), a 512-bit bloom filter over their union, and an
/// optional dictionary payload of annotated forward declarations injected
/// when the library is loaded.
struct LibraryArtifact {
  std::string name;    // "Foo"; lives on disk as libFoo.mrlib
  std::string module;  // module this library provides, empty = none
  BloomFilter bloom;
  std::vector<std::string> static_syms;   // sorted, unique
  std::vector<std::string> dynamic_syms;  // sorted, unique
  bool has_payload = false;
  std::vector<std::vector<std::uint8_t>> payload_blobs;

  bool in_static(const std::string& sym) const {
    return std::binary_search(static_syms.begin(), static_syms.end(), sym);
  }
  bool in_dynamic(const std::string& sym) const {
    return std::binary_search(dynamic_syms.begin(), dynamic_syms.end(), sym);
  }
  bool defines(const std::string& sym) const { return in_static(sym) || in_dynamic(sym); }

  std::vector<Declaration> payload_decls() const {
    std::vector<Declaration> decls;
    decls.reserve(payload_blobs.size());
    for (std::size_t i = 0; i < payload_blobs.size(); ++i)
      decls.push_back(decode_decl_bytes(payload_blobs[i], ErrorKind::corrupt_mrlib,
                                        "lib" + name + " payload " + std::to_string(i)));
    return decls;
  }
};

inline std::string library_file_name(const std::string& name) { return "lib" + name + ".mrlib"; }

namespace detail {

inline std::vector<std::string> normalize_symbols(std::vector<std::string> syms,
                                                  const std::string& lib) {
  for (const auto& s : syms)
    if (!valid_mangled_name(s))
      fail(ErrorKind::invalid_mangled_name, "lib" + lib + ": bad mangled name '" + s + "'");
  std::sort(syms.begin(), syms.end());
  syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
  return syms;
}

}  // namespace detail

inline LibraryArtifact make_library(std::string name, std::string module,
                                    std::vector<std::string> static_syms,
                                    std::vector<std::string> dynamic_syms,
                                    const std::vector<Declaration>& payload) {
  LibraryArtifact lib;
  lib.name = std::move(name);
  lib.module = std::move(module);
  lib.static_syms = detail::normalize_symbols(std::move(static_syms), lib.name);
  lib.dynamic_syms = detail::normalize_symbols(std::move(dynamic_syms), lib.name);
  for (const auto& s : lib.static_syms) lib.bloom.insert(s);
  for (const auto& s : lib.dynamic_syms) lib.bloom.insert(s);
  lib.has_payload = !payload.empty();
  for (const auto& d : payload) lib.payload_blobs.push_back(encode_decl_bytes(d));
  return lib;
}

inline std::vector<std::uint8_t> write_library(const LibraryArtifact& lib) {
  ByteWriter w;
  w.raw(k_mrlib_magic.data(), k_mrlib_magic.size());
  w.lp_string(lib.name);
  w.lp_string(lib.module);
  w.raw(lib.bloom.bytes.data(), lib.bloom.bytes.size());
  auto table = [&](const std::vector<std::string>& syms) {
    w.u32(static_cast<std::uint32_t>(syms.size()));
    for (const auto& s : syms) w.lp_string(s);
  };
  table(lib.static_syms);
  table(lib.dynamic_syms);
  w.u8(lib.has_payload ? 1 : 0);
  if (lib.has_payload) {
    w.u32(static_cast<std::uint32_t>(lib.payload_blobs.size()));
    for (const auto& blob : lib.payload_blobs) {
      w.u32(static_cast<std::uint32_t>(blob.size()));
      w.raw(blob.data(), blob.size());
    }
  }
  return w.take();
}

inline LibraryArtifact read_library(std::span<const std::uint8_t> bytes, const std::string& file) {
  ByteReader r(bytes, ErrorKind::corrupt_mrlib, file);
  r.expect_magic(k_mrlib_magic);
  LibraryArtifact lib;
  lib.name = r.lp_string();
  lib.module = r.lp_string();
  auto raw = r.raw(64);
  std::copy(raw.begin(), raw.end(), lib.bloom.bytes.begin());
  auto table = [&](const char* which) {
    std::vector<std::string> syms;
    std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      std::string s = r.lp_string();
      if (!valid_mangled_name(s))
        fail(ErrorKind::corrupt_mrlib, file + ": bad mangled name '" + s + "'");
      syms.push_back(std::move(s));
    }
    if (!std::is_sorted(syms.begin(), syms.end()))
      fail(ErrorKind::corrupt_mrlib, file + ": " + which + " symbol table not sorted");
    return syms;
  };
  lib.static_syms = table("static");
  lib.dynamic_syms = table("dynamic");
  if (r.u8() != 0) {
    lib.has_payload = true;
    std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint32_t len = r.u32();
      auto span = r.raw(len);
      lib.payload_blobs.emplace_back(span.begin(), span.end());
    }
  }
  r.require_end();
  return lib;
}

}  // namespace mrc
