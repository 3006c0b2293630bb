#pragma once

#include "mrc/ast.hpp"
#include "mrc/binio.hpp"
#include "mrc/error.hpp"

namespace mrc {

// Declaration record codec, shared by .pcm declaration tables and .mrlib
// dictionary payloads. Origin is runtime provenance and is not serialized.

inline void encode_decl(ByteWriter& w, const Declaration& d) {
  w.u8(static_cast<std::uint8_t>(d.kind));
  w.u8(d.defined ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(d.name.depth()));
  for (const auto& seg : d.name.segments) w.lp_string(seg);
  w.lp_string(d.annotation);
  w.lp_string(d.underlying);
  w.u32(static_cast<std::uint32_t>(d.params.size()));
  for (const auto& p : d.params) w.lp_string(p);
  w.u32(static_cast<std::uint32_t>(d.members.size()));
  for (const auto& m : d.members) {
    w.lp_string(m.name);
    w.lp_string(m.type_ref);
  }
}

inline Declaration decode_decl(ByteReader& r) {
  Declaration d;
  std::uint8_t kind = r.u8();
  if (kind > 4) fail(ErrorKind::corrupt_pcm, "declaration record: bad kind byte");
  d.kind = static_cast<DeclKind>(kind);
  d.defined = r.u8() != 0;
  std::uint32_t nsegs = r.u32();
  for (std::uint32_t i = 0; i < nsegs; ++i) d.name.segments.push_back(r.lp_string());
  d.annotation = r.lp_string();
  d.underlying = r.lp_string();
  std::uint32_t nparams = r.u32();
  for (std::uint32_t i = 0; i < nparams; ++i) d.params.push_back(r.lp_string());
  std::uint32_t nmembers = r.u32();
  for (std::uint32_t i = 0; i < nmembers; ++i) {
    Member m;
    m.name = r.lp_string();
    m.type_ref = r.lp_string();
    d.members.push_back(std::move(m));
  }
  if (!d.name.valid())
    fail(ErrorKind::corrupt_pcm, "declaration record: invalid qualified name");
  return d;
}

inline std::vector<std::uint8_t> encode_decl_bytes(const Declaration& d) {
  ByteWriter w;
  encode_decl(w, d);
  return w.take();
}

inline Declaration decode_decl_bytes(std::span<const std::uint8_t> bytes, ErrorKind kind,
                                     const std::string& what) {
  ByteReader r(bytes, kind, what);
  Declaration d = decode_decl(r);
  r.require_end();
  return d;
}

}  // namespace mrc
