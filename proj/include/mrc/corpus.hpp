#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrc/binio.hpp"
#include "mrc/error.hpp"
#include "mrc/library.hpp"
#include "mrc/meter.hpp"
#include "mrc/parser.hpp"
#include "mrc/pcm.hpp"
#include "mrc/rootmap.hpp"

namespace mrc {

/// Fixed on-disk layout of a corpus rooted at some directory.
struct CorpusPaths {
  std::filesystem::path root;

  std::filesystem::path headers_dir() const { return root / "headers"; }
  std::filesystem::path rootmaps_dir() const { return root / "rootmaps"; }
  std::filesystem::path libs_dir() const { return root / "libs"; }
  std::filesystem::path syslibs_dir() const { return root / "syslibs"; }
  std::filesystem::path pcms_dir() const { return root / "pcms"; }
  std::filesystem::path modulemaps_dir() const { return root / "modulemaps"; }
  std::filesystem::path pch_file() const { return root / "pch" / "PCH.pcm"; }
  std::filesystem::path manifest_file() const { return root / "corpus.json"; }
};

struct LibraryInfo {
  std::string name;    // "Foo"
  std::string header;  // "Foo.mrh"
  bool pch = false;    // member of the precompiled-header set
};

struct CorpusManifest {
  std::vector<LibraryInfo> libraries;
  std::string script = "script.mrs";
  std::string textual_script = "script.textual.mrs";
  std::uint64_t seed = 0;

  const LibraryInfo* find_library(const std::string& name) const {
    for (const auto& lib : libraries)
      if (lib.name == name) return &lib;
    return nullptr;
  }
};

inline void save_manifest(const CorpusPaths& paths, const CorpusManifest& m) {
  nlohmann::ordered_json j;
  j["libraries"] = nlohmann::ordered_json::array();
  for (const auto& lib : m.libraries)
    j["libraries"].push_back({{"name", lib.name}, {"header", lib.header}, {"pch", lib.pch}});
  j["script"] = m.script;
  j["textual_script"] = m.textual_script;
  j["seed"] = m.seed;
  write_file_text(paths.manifest_file(), j.dump(2) + "\n");
}

inline CorpusManifest load_manifest(const CorpusPaths& paths) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_text(paths.manifest_file()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::bad_spec, paths.manifest_file().string() + ": " + e.what());
  }
  CorpusManifest m;
  try {
    for (const auto& lj : j.at("libraries")) {
      LibraryInfo lib;
      lib.name = lj.at("name").get<std::string>();
      lib.header = lj.at("header").get<std::string>();
      lib.pch = lj.value("pch", false);
      m.libraries.push_back(std::move(lib));
    }
    m.script = j.value("script", m.script);
    m.textual_script = j.value("textual_script", m.textual_script);
    m.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::bad_spec, paths.manifest_file().string() + ": " + e.what());
  }
  return m;
}

/// Sorted file names with a given extension directly under `dir`.
inline std::vector<std::string> list_files(const std::filesystem::path& dir,
                                           const std::string& extension) {
  std::vector<std::string> names;
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string f = entry.path().filename().string();
    if (f.size() > extension.size() && f.substr(f.size() - extension.size()) == extension)
      names.push_back(f);
  }
  std::sort(names.begin(), names.end());
  return names;
}

struct CorpusStats {
  std::size_t libraries = 0;
  std::size_t headers = 0;
  std::size_t records = 0;
  std::size_t pcm_modules = 0;
  std::size_t rootmap_files = 0;
  std::size_t artifacts = 0;
  std::size_t script_statements = 0;
  std::size_t textual_script_statements = 0;
};

/// Full structural check of a corpus; throws on the first inconsistency.
inline CorpusStats validate_corpus(const CorpusPaths& paths) {
  CorpusStats stats;
  CorpusManifest manifest = load_manifest(paths);
  stats.libraries = manifest.libraries.size();

  std::set<std::string> lib_names;
  CostMeter meter;
  HeaderSet headers({paths.headers_dir()}, meter);
  for (const auto& lib : manifest.libraries) {
    if (!lib_names.insert(lib.name).second)
      fail(ErrorKind::bad_spec, "manifest lists library '" + lib.name + "' twice");
    const HeaderFile& hf = headers.parse(lib.header);
    for (const auto& d : hf.declarations)
      if (d.kind == DeclKind::record && d.defined) ++stats.records;
    ++stats.headers;
    std::filesystem::path artifact = paths.libs_dir() / library_file_name(lib.name);
    if (!std::filesystem::exists(artifact))
      fail(ErrorKind::missing_library, "missing artifact " + artifact.string());
    LibraryArtifact la = read_library(read_file_bytes(artifact), library_file_name(lib.name));
    if (la.name != lib.name)
      fail(ErrorKind::bad_spec, artifact.string() + ": artifact name '" + la.name +
                                    "' does not match manifest '" + lib.name + "'");
    ++stats.artifacts;
  }

  RootmapDb db;
  for (const auto& f : list_files(paths.rootmaps_dir(), ".rootmap")) {
    RootmapFile rm = parse_rootmap(read_file_text(paths.rootmaps_dir() / f), f);
    for (const auto& sec : rm.sections)
      if (!lib_names.count(sec.library))
        fail(ErrorKind::bad_spec, f + ": section names unknown library '" + sec.library + "'");
    db.add(rm, f);
    ++stats.rootmap_files;
  }

  for (const auto& f : list_files(paths.pcms_dir(), ".pcm")) {
    PcmData pcm = read_pcm(read_file_bytes(paths.pcms_dir() / f), f);
    if (f != pcm.name + ".pcm")
      fail(ErrorKind::bad_spec, f + ": module is named '" + pcm.name + "'");
    if (!lib_names.count(pcm.name))
      fail(ErrorKind::bad_spec, f + ": module does not match any library");
    ++stats.pcm_modules;
  }

  if (std::filesystem::exists(paths.pch_file())) {
    PcmData pch = read_pcm(read_file_bytes(paths.pch_file()), "PCH.pcm");
    if (pch.name != "PCH") fail(ErrorKind::bad_spec, "PCH.pcm: module is named '" + pch.name + "'");
    std::set<std::string> known_headers;
    for (const auto& lib : manifest.libraries) known_headers.insert(lib.header);
    for (const auto& s : pch.sources)
      if (!known_headers.count(s))
        fail(ErrorKind::bad_spec, "PCH.pcm: source '" + s + "' is not a manifest header");
  }

  stats.script_statements =
      parse_script(read_file_text(paths.root / manifest.script), manifest.script).size();
  stats.textual_script_statements =
      parse_script(read_file_text(paths.root / manifest.textual_script), manifest.textual_script)
          .size();
  return stats;
}

}  // namespace mrc
