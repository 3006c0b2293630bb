#pragma once

// Shared fixtures for the test suites: fresh temp directories, the one-library
// demo corpus, and a hand-built two-library corpus exercising the symbol
// autoloader (one modularized library with static symbols, one unmodularized
// system library exporting only dynamic symbols).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrc/bench.hpp"

namespace testsupport {

inline std::filesystem::path fresh_dir(const std::string& name) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / "mrc-tests" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline mrc::CorpusPaths demo_corpus(const std::string& name) {
  mrc::WorkloadSpec spec;
  spec.profile = "demo";
  mrc::CorpusPaths paths{fresh_dir(name)};
  mrc::gen_workload(spec, paths);
  return paths;
}

/// Minuit: modularized, rootmap + payload + module, symbols in the static
/// table, artifact under libs/. M17n: plain header, no rootmap, no module,
/// artifact under syslibs/ exporting only dynamic symbols.
inline mrc::CorpusPaths autoload_corpus(const std::string& name) {
  mrc::CorpusPaths paths{fresh_dir(name)};
  std::filesystem::create_directories(paths.headers_dir());
  std::filesystem::create_directories(paths.rootmaps_dir());
  std::filesystem::create_directories(paths.libs_dir());
  std::filesystem::create_directories(paths.syslibs_dir());
  std::filesystem::create_directories(paths.pcms_dir());
  std::filesystem::create_directories(paths.modulemaps_dir());

  mrc::write_file_text(paths.headers_dir() / "Minuit.mrh",
                       "struct Minuit{};\nextern Minuit gMinuit;\n");
  mrc::write_file_text(paths.headers_dir() / "M17n.mrh", "int m17n_init_core();\n");

  mrc::CostMeter meter;
  mrc::HeaderSet set({paths.headers_dir()}, meter);
  std::vector<mrc::HeaderFile> headers = {set.parse("Minuit.mrh")};
  mrc::SelectionList sel;
  sel.entries.push_back(mrc::QualName::parse("Minuit"));
  mrc::Dictionary dict = mrc::gen_dictionary("Minuit", headers, sel);
  mrc::write_file_text(paths.rootmaps_dir() / "Minuit.rootmap", mrc::emit_rootmap(dict.rootmap));

  std::vector<std::string> minuit_syms = {
      mrc::mangle_ctor(mrc::QualName::parse("Minuit")).text,
      mrc::mangle_global(mrc::QualName::parse("gMinuit")).text};
  mrc::LibraryArtifact minuit =
      mrc::make_library("Minuit", "Minuit", minuit_syms, minuit_syms, dict.payload);
  mrc::write_file_bytes(paths.libs_dir() / mrc::library_file_name("Minuit"),
                        mrc::write_library(minuit));

  mrc::ModuleMap mm{"Minuit", {"Minuit.mrh"}};
  mrc::write_file_text(paths.modulemaps_dir() / "Minuit.modulemap", mrc::emit_module_map(mm));
  mrc::PcmData pcm = mrc::build_pcm(mm, {paths.headers_dir()}, {mm});
  mrc::write_file_bytes(paths.pcms_dir() / "Minuit.pcm", mrc::write_pcm(pcm));

  // dynamic-only system library, reachable solely through the symbol scanner
  std::vector<std::string> m17n_syms = {
      mrc::mangle_function(mrc::QualName::parse("m17n_init_core"), 0).text};
  mrc::LibraryArtifact m17n = mrc::make_library("M17n", "", {}, m17n_syms, {});
  mrc::write_file_bytes(paths.syslibs_dir() / mrc::library_file_name("M17n"),
                        mrc::write_library(m17n));

  mrc::CorpusManifest manifest;
  manifest.libraries.push_back({"Minuit", "Minuit.mrh", false});
  manifest.libraries.push_back({"M17n", "M17n.mrh", false});
  mrc::write_file_text(paths.root / manifest.script, "");
  mrc::write_file_text(paths.root / manifest.textual_script, "");
  mrc::save_manifest(paths, manifest);
  return paths;
}

/// Runs `fn` and reports the error kind it threw, if any.
template <class F>
std::optional<mrc::ErrorKind> catch_kind(F&& fn) {
  try {
    fn();
  } catch (const mrc::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace testsupport
