#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrc/binio.hpp"
#include "mrc/error.hpp"
#include "mrc/library.hpp"
#include "mrc/meter.hpp"

namespace mrc {

/// Where the scanner looks for library artifacts. Prebuilt directories are
/// always consulted before the system library path.
struct SearchConfig {
  std::vector<std::filesystem::path> prebuilt_dirs;
  std::vector<std::filesystem::path> libpath_dirs;
};

inline bool is_library_file(const std::filesystem::path& p) {
  std::string f = p.filename().string();
  return f.size() > 9 && f.rfind("lib", 0) == 0 && f.substr(f.size() - 6) == ".mrlib";
}

/// Deterministic artifact listing: directories in configured order,
/// files within a directory sorted bytewise.
inline std::vector<std::filesystem::path> list_artifacts(const SearchConfig& cfg) {
  std::vector<std::filesystem::path> out;
  auto scan = [&](const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) return;
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && is_library_file(entry.path()))
        names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& n : names) out.push_back(dir / n);
  };
  for (const auto& d : cfg.prebuilt_dirs) scan(d);
  for (const auto& d : cfg.libpath_dirs) scan(d);
  return out;
}

/// Scans artifacts for mangled symbols. Every candidate costs one bloom
/// probe; only a positive probe pays for a symbol-table scan. The first
/// artifact that actually defines the symbol wins. Artifacts that cannot
/// be read are skipped with a warning, never an error.
class SymbolScanner {
public:
  explicit SymbolScanner(SearchConfig cfg) : cfg_(std::move(cfg)) {}

  struct Found {
    std::string library;
    std::string file;  // artifact file name, no directory
    const LibraryArtifact* artifact;
  };

  std::optional<Found> find(const std::string& mangled, CostMeter& meter,
                            std::vector<std::string>& warnings) {
    for (const auto& path : list_artifacts(cfg_)) {
      const LibraryArtifact* lib = load(path, warnings);
      if (!lib) continue;
      meter.bloom_probes += 1;
      if (!lib->bloom.probe(mangled)) continue;
      meter.symtab_scans += 1;
      if (lib->in_static(mangled) || lib->in_dynamic(mangled))
        return Found{lib->name, path.filename().string(), lib};
    }
    return std::nullopt;
  }

  const LibraryArtifact* load(const std::filesystem::path& path,
                              std::vector<std::string>& warnings) {
    auto it = cache_.find(path.string());
    if (it != cache_.end()) return it->second ? &*it->second : nullptr;
    std::optional<LibraryArtifact> lib;
    try {
      lib = read_library(read_file_bytes(path.string()), path.filename().string());
    } catch (const Error& e) {
      warnings.push_back("warning: skipping " + path.filename().string() + ": " + e.what());
    }
    auto [pos, inserted] = cache_.emplace(path.string(), std::move(lib));
    return pos->second ? &*pos->second : nullptr;
  }

  const SearchConfig& config() const { return cfg_; }

private:
  SearchConfig cfg_;
  std::map<std::string, std::optional<LibraryArtifact>> cache_;
};

/// One line per artifact in scan order, for `sym index`.
inline std::string describe_artifacts(const SearchConfig& cfg, std::vector<std::string>& warnings) {
  SymbolScanner scanner(cfg);
  std::string out;
  for (const auto& path : list_artifacts(cfg)) {
    const LibraryArtifact* lib = scanner.load(path, warnings);
    if (!lib) continue;
    out += path.filename().string() + " name=" + lib->name + " module=" +
           (lib->module.empty() ? "-" : lib->module) +
           " static=" + std::to_string(lib->static_syms.size()) +
           " dynamic=" + std::to_string(lib->dynamic_syms.size()) +
           " payload=" + std::to_string(lib->payload_blobs.size()) + "\n";
  }
  return out;
}

}  // namespace mrc
