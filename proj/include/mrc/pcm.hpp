#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/binio.hpp"
#include "mrc/error.hpp"
#include "mrc/serial.hpp"

namespace mrc {

inline constexpr std::string_view k_pcm_magic{"MRPCM\x01", 6};

inline bool is_absolute_path(std::string_view p) { return !p.empty() && p.front() == '/'; }

/// A module file. Declarations stay encoded until materialized; the index
/// maps every top-level qualified name to its slot in the decl table.
struct PcmData {
  std::string name;
  std::vector<std::string> sources;
  std::vector<std::string> dependencies;                      // sorted, unique
  std::vector<std::vector<std::uint8_t>> decl_blobs;          // one encoded record per slot
  std::vector<std::pair<std::string, std::uint32_t>> index;   // sorted qname -> slot
  std::vector<std::pair<std::string, std::vector<Member>>> schema;  // defined records, sorted

  Declaration decode_slot(std::uint32_t slot) const {
    if (slot >= decl_blobs.size()) fail(ErrorKind::corrupt_pcm, name + ": decl slot out of range");
    return decode_decl_bytes(decl_blobs[slot], ErrorKind::corrupt_pcm,
                             name + " decl " + std::to_string(slot));
  }

  const std::uint32_t* find_slot(const std::string& qname) const {
    auto it = std::lower_bound(index.begin(), index.end(), qname,
                               [](const auto& e, const std::string& k) { return e.first < k; });
    if (it == index.end() || it->first != qname) return nullptr;
    return &it->second;
  }
};

inline PcmData make_pcm(std::string name, std::vector<std::string> sources,
                        std::vector<std::string> dependencies,
                        const std::vector<Declaration>& decls) {
  PcmData pcm;
  pcm.name = std::move(name);
  for (const auto& s : sources)
    if (is_absolute_path(s))
      fail(ErrorKind::absolute_source_path,
           "module " + pcm.name + ": source path '" + s + "' is absolute");
  pcm.sources = std::move(sources);
  std::sort(dependencies.begin(), dependencies.end());
  dependencies.erase(std::unique(dependencies.begin(), dependencies.end()), dependencies.end());
  pcm.dependencies = std::move(dependencies);
  for (const auto& d : decls) {
    std::uint32_t slot = static_cast<std::uint32_t>(pcm.decl_blobs.size());
    pcm.decl_blobs.push_back(encode_decl_bytes(d));
    pcm.index.emplace_back(d.name.str(), slot);
    if (d.kind == DeclKind::record && d.defined) pcm.schema.emplace_back(d.name.str(), d.members);
  }
  std::sort(pcm.index.begin(), pcm.index.end());
  std::sort(pcm.schema.begin(), pcm.schema.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return pcm;
}

inline std::vector<std::uint8_t> write_pcm(const PcmData& pcm) {
  ByteWriter w;
  w.raw(k_pcm_magic.data(), k_pcm_magic.size());
  w.lp_string(pcm.name);
  w.u32(static_cast<std::uint32_t>(pcm.sources.size()));
  for (const auto& s : pcm.sources) {
    if (is_absolute_path(s))
      fail(ErrorKind::absolute_source_path,
           "module " + pcm.name + ": source path '" + s + "' is absolute");
    w.lp_string(s);
  }
  w.u32(static_cast<std::uint32_t>(pcm.dependencies.size()));
  for (const auto& d : pcm.dependencies) w.lp_string(d);
  w.u32(static_cast<std::uint32_t>(pcm.decl_blobs.size()));
  for (const auto& blob : pcm.decl_blobs) {
    w.u32(static_cast<std::uint32_t>(blob.size()));
    w.raw(blob.data(), blob.size());
  }
  w.u32(static_cast<std::uint32_t>(pcm.index.size()));
  for (const auto& [qname, slot] : pcm.index) {
    w.lp_string(qname);
    w.u32(slot);
  }
  w.u8(pcm.schema.empty() ? 0 : 1);
  if (!pcm.schema.empty()) {
    w.u32(static_cast<std::uint32_t>(pcm.schema.size()));
    for (const auto& [qname, members] : pcm.schema) {
      w.lp_string(qname);
      w.u32(static_cast<std::uint32_t>(members.size()));
      for (const auto& m : members) {
        w.lp_string(m.name);
        w.lp_string(m.type_ref);
      }
    }
  }
  return w.take();
}

inline PcmData read_pcm(std::span<const std::uint8_t> bytes, const std::string& file) {
  ByteReader r(bytes, ErrorKind::corrupt_pcm, file);
  r.expect_magic(k_pcm_magic);
  PcmData pcm;
  pcm.name = r.lp_string();
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string s = r.lp_string();
    if (is_absolute_path(s))
      fail(ErrorKind::absolute_source_path,
           file + ": module source path '" + s + "' is absolute");
    pcm.sources.push_back(std::move(s));
  }
  n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) pcm.dependencies.push_back(r.lp_string());
  if (!std::is_sorted(pcm.dependencies.begin(), pcm.dependencies.end()))
    fail(ErrorKind::corrupt_pcm, file + ": dependency list not sorted");
  n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t len = r.u32();
    auto span = r.raw(len);
    pcm.decl_blobs.emplace_back(span.begin(), span.end());
  }
  n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string qname = r.lp_string();
    std::uint32_t slot = r.u32();
    if (slot >= pcm.decl_blobs.size())
      fail(ErrorKind::corrupt_pcm, file + ": index slot out of range");
    pcm.index.emplace_back(std::move(qname), slot);
  }
  if (!std::is_sorted(pcm.index.begin(), pcm.index.end()))
    fail(ErrorKind::corrupt_pcm, file + ": identifier index not sorted");
  if (r.u8() != 0) {
    n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      std::string qname = r.lp_string();
      std::uint32_t k = r.u32();
      std::vector<Member> members;
      for (std::uint32_t j = 0; j < k; ++j) {
        Member m;
        m.name = r.lp_string();
        m.type_ref = r.lp_string();
        members.push_back(std::move(m));
      }
      pcm.schema.emplace_back(std::move(qname), std::move(members));
    }
  }
  r.require_end();
  return pcm;
}

inline std::string describe_decl(const Declaration& d) {
  std::string line;
  switch (d.kind) {
    case DeclKind::name_space:
      line = "namespace " + d.name.str();
      break;
    case DeclKind::record:
      line = "struct " + d.name.str();
      if (d.defined) line += " defined";
      break;
    case DeclKind::function: {
      line = "function " + d.name.str() + "(";
      for (std::size_t i = 0; i < d.params.size(); ++i) line += (i ? "," : "") + d.params[i];
      line += ") " + d.underlying;
      break;
    }
    case DeclKind::extern_global:
      line = "extern " + d.name.str() + " " + d.underlying;
      break;
    case DeclKind::alias:
      line = "using " + d.name.str() + " = " + d.underlying;
      break;
  }
  if (!d.annotation.empty()) line += " [" + d.annotation + "]";
  return line;
}

/// Stable human-readable dump; decodes the whole decl table.
inline std::string dump_pcm(const PcmData& pcm) {
  std::ostringstream out;
  out << "module " << pcm.name << "\n";
  for (const auto& s : pcm.sources) out << "source " << s << "\n";
  for (const auto& d : pcm.dependencies) out << "dependency " << d << "\n";
  out << "index " << pcm.index.size() << "\n";
  for (std::uint32_t slot = 0; slot < pcm.decl_blobs.size(); ++slot) {
    Declaration d = pcm.decode_slot(slot);
    out << describe_decl(d) << "\n";
    for (const auto& m : d.members) out << "  member " << m.name << " " << m.type_ref << "\n";
  }
  return out.str();
}

}  // namespace mrc
