#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrc/corpus.hpp"
#include "mrc/dictgen.hpp"
#include "mrc/error.hpp"
#include "mrc/library.hpp"
#include "mrc/pcm.hpp"
#include "mrc/rootmap.hpp"

namespace mrc {

/// Deterministic 64-bit generator; the same seed yields the same corpus on
/// every platform, which std::uniform_int_distribution would not promise.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  bool chance(std::uint64_t percent) { return below(100) < percent; }
};

struct WorkloadSpec {
  std::string profile = "uniform";  // "uniform" or "demo"
  std::size_t libraries = 10;
  std::size_t records_per_library = 4;
  double pch_fraction = 0.5;
  std::size_t script_statements = 40;
  std::uint64_t seed = 1;
};

/// `key = value` lines, '#' comments.
inline WorkloadSpec parse_workload_spec(const std::string& text, const std::string& file) {
  WorkloadSpec spec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::bad_spec, file + ": expected 'key = value'");
    auto trim = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t\r");
      std::size_t y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "profile")
        spec.profile = value;
      else if (key == "libraries")
        spec.libraries = std::stoul(value);
      else if (key == "records_per_library")
        spec.records_per_library = std::stoul(value);
      else if (key == "pch_fraction")
        spec.pch_fraction = std::stod(value);
      else if (key == "script_statements")
        spec.script_statements = std::stoul(value);
      else if (key == "seed")
        spec.seed = std::stoull(value);
      else
        fail(ErrorKind::bad_spec, file + ": unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      fail(ErrorKind::bad_spec, file + ": bad value for '" + key + "'");
    }
  }
  if (spec.profile != "uniform" && spec.profile != "demo")
    fail(ErrorKind::bad_spec, file + ": unknown profile '" + spec.profile + "'");
  if (spec.pch_fraction < 0.0 || spec.pch_fraction > 1.0)
    fail(ErrorKind::bad_spec, file + ": pch_fraction must be within [0, 1]");
  return spec;
}

namespace detail {

struct GenRecord {
  std::string leaf;   // "R0"
  QualName qname;     // lib000::R0
  std::vector<Member> members;
};

struct GenLib {
  std::string name;        // "Lib000"
  std::string header;      // "Lib000.mrh"
  std::string ns;          // "lib000"
  std::vector<GenRecord> records;   // nested records, in order
  std::string top_record;  // "T000"
  std::string extern_name; // "g000"
  std::string fn_name;     // "f000"
  std::string alias_name;  // "A000"
  bool pch = false;
};

inline std::string pad3(std::size_t i) {
  std::string s = std::to_string(i);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

inline std::string gen_header_text(const GenLib& lib) {
  std::ostringstream out;
  out << "namespace " << lib.ns << " {\n";
  for (const auto& r : lib.records) {
    out << "  struct " << r.leaf << " {";
    for (const auto& m : r.members) out << " " << m.type_ref << " " << m.name << ";";
    out << (r.members.empty() ? "};\n" : " };\n");
  }
  out << "};\n";
  out << "struct " << lib.top_record << "{};\n";
  out << "extern int " << lib.extern_name << ";\n";
  out << "int " << lib.fn_name << "(int);\n";
  out << "using " << lib.alias_name << " = " << lib.ns << "::R0;\n";
  return out.str();
}

inline std::vector<std::string> library_symbols(const GenLib& lib) {
  std::vector<std::string> syms;
  syms.push_back(mangle_ctor(QualName::parse(lib.ns)).text);
  for (const auto& r : lib.records) syms.push_back(mangle_ctor(r.qname).text);
  syms.push_back(mangle_ctor(QualName::parse(lib.top_record)).text);
  syms.push_back(mangle_global(QualName::parse(lib.extern_name)).text);
  syms.push_back(mangle_function(QualName::parse(lib.fn_name), 1).text);
  return syms;
}

}  // namespace detail

/// Generates a complete corpus under `paths.root`: headers, rootmaps,
/// library artifacts, per-library modules, module maps, the precompiled
/// header over the configured fraction of libraries, both scripts, and the
/// manifest. Same spec -> byte-identical tree.
inline CorpusManifest gen_workload(const WorkloadSpec& spec, const CorpusPaths& paths) {
  if (spec.profile != "demo" && spec.profile != "uniform")
    fail(ErrorKind::bad_spec, "unknown profile '" + spec.profile + "'");
  if (spec.profile != "demo") {
    if (spec.libraries == 0) fail(ErrorKind::bad_spec, "libraries must be at least 1");
    if (spec.records_per_library == 0)
      fail(ErrorKind::bad_spec, "records_per_library must be at least 1");
  }
  std::filesystem::create_directories(paths.root);
  std::filesystem::create_directories(paths.headers_dir());
  std::filesystem::create_directories(paths.rootmaps_dir());
  std::filesystem::create_directories(paths.libs_dir());
  std::filesystem::create_directories(paths.syslibs_dir());
  std::filesystem::create_directories(paths.pcms_dir());
  std::filesystem::create_directories(paths.modulemaps_dir());
  std::filesystem::create_directories(paths.pch_file().parent_path());

  CorpusManifest manifest;
  manifest.seed = spec.seed;

  if (spec.profile == "demo") {
    // the fixture used throughout the docs: one library, two selected
    // records, the classic three-line prompt session
    write_file_text(paths.headers_dir() / "Foo.mrh",
                    "namespace foo { struct bar{}; };\nstruct S{};\n");
    CostMeter meter;
    HeaderSet set({paths.headers_dir()}, meter);
    std::vector<HeaderFile> headers = {set.parse("Foo.mrh")};
    SelectionList sel;
    sel.entries.push_back(QualName::parse("foo::bar"));
    sel.entries.push_back(QualName::parse("S"));
    Dictionary dict = gen_dictionary("Foo", headers, sel);
    write_file_text(paths.rootmaps_dir() / "Foo.rootmap", emit_rootmap(dict.rootmap));

    std::vector<std::string> syms = {mangle_ctor(QualName::parse("foo")).text,
                                     mangle_ctor(QualName::parse("foo::bar")).text,
                                     mangle_ctor(QualName::parse("S")).text};
    LibraryArtifact lib = make_library("Foo", "Foo", syms, syms, dict.payload);
    write_file_bytes(paths.libs_dir() / library_file_name("Foo"), write_library(lib));

    ModuleMap mm{"Foo", {"Foo.mrh"}};
    write_file_text(paths.modulemaps_dir() / "Foo.modulemap", emit_module_map(mm));
    PcmData pcm = build_pcm(mm, {paths.headers_dir()}, {mm});
    write_file_bytes(paths.pcms_dir() / "Foo.pcm", write_pcm(pcm));

    ModuleMap pch_map{"PCH", {"Foo.mrh"}};
    PcmData pch = build_pcm(pch_map, {paths.headers_dir()}, {pch_map});
    write_file_bytes(paths.pch_file(), write_pcm(pch));

    write_file_text(paths.root / manifest.script, "S *s;\nfoo::bar *baz1;\nfoo::bar baz2;\n");
    write_file_text(paths.root / manifest.textual_script,
                    "#include <Foo.mrh>\nS *s;\nfoo::bar *baz1;\nfoo::bar baz2;\n");
    manifest.libraries.push_back({"Foo", "Foo.mrh", true});
    save_manifest(paths, manifest);
    return manifest;
  }

  SplitMix64 rng(spec.seed);
  std::vector<detail::GenLib> libs;
  std::size_t pch_count = static_cast<std::size_t>(spec.pch_fraction * double(spec.libraries) + 0.5);

  for (std::size_t i = 0; i < spec.libraries; ++i) {
    detail::GenLib lib;
    std::string id = detail::pad3(i);
    lib.name = "Lib" + id;
    lib.header = lib.name + ".mrh";
    lib.ns = "lib" + id;
    lib.top_record = "T" + id;
    lib.extern_name = "g" + id;
    lib.fn_name = "f" + id;
    lib.alias_name = "A" + id;
    lib.pch = i < pch_count;
    for (std::size_t k = 0; k < spec.records_per_library; ++k) {
      detail::GenRecord rec;
      rec.leaf = "R" + std::to_string(k);
      rec.qname = QualName::parse(lib.ns + "::" + rec.leaf);
      std::size_t nmembers = rng.below(3);
      for (std::size_t m = 0; m < nmembers; ++m) {
        Member mem;
        mem.name = "m" + std::to_string(m);
        // ~70% int, else an earlier record of the same library
        if (k == 0 || rng.chance(70))
          mem.type_ref = "int";
        else
          mem.type_ref = lib.ns + "::R" + std::to_string(rng.below(k));
        rec.members.push_back(std::move(mem));
      }
      lib.records.push_back(std::move(rec));
    }
    libs.push_back(std::move(lib));
  }

  std::vector<ModuleMap> all_maps;
  for (const auto& lib : libs) all_maps.push_back({lib.name, {lib.header}});

  for (const auto& lib : libs) {
    write_file_text(paths.headers_dir() / lib.header, detail::gen_header_text(lib));
  }

  CostMeter meter;
  HeaderSet set({paths.headers_dir()}, meter);
  std::vector<std::string> pch_headers;
  for (std::size_t i = 0; i < libs.size(); ++i) {
    const auto& lib = libs[i];
    std::vector<HeaderFile> headers = {set.parse(lib.header)};
    SelectionList sel;
    for (const auto& r : lib.records) sel.entries.push_back(r.qname);
    sel.entries.push_back(QualName::parse(lib.top_record));
    Dictionary dict = gen_dictionary(lib.name, headers, sel);
    write_file_text(paths.rootmaps_dir() / (lib.name + ".rootmap"), emit_rootmap(dict.rootmap));

    std::vector<std::string> syms = detail::library_symbols(lib);
    LibraryArtifact artifact = make_library(lib.name, lib.name, syms, syms, dict.payload);
    write_file_bytes(paths.libs_dir() / library_file_name(lib.name), write_library(artifact));

    write_file_text(paths.modulemaps_dir() / (lib.name + ".modulemap"),
                    emit_module_map(all_maps[i]));
    PcmData pcm = build_pcm(all_maps[i], {paths.headers_dir()}, all_maps);
    write_file_bytes(paths.pcms_dir() / (lib.name + ".pcm"), write_pcm(pcm));

    if (lib.pch) pch_headers.push_back(lib.header);
    manifest.libraries.push_back({lib.name, lib.header, lib.pch});
  }

  if (!pch_headers.empty()) {
    ModuleMap pch_map{"PCH", pch_headers};
    PcmData pch = build_pcm(pch_map, {paths.headers_dir()}, {pch_map});
    write_file_bytes(paths.pch_file(), write_pcm(pch));
  }

  // ---- script ------------------------------------------------------------
  // Every statement must converge across all modes: types resolve through
  // any strategy; aliases and values appear only after their header was
  // included, values additionally after their library was loaded.
  std::ostringstream script;
  std::vector<std::string> statements;
  std::set<std::size_t> included, loaded;
  std::size_t var_count = 0;
  struct VarInfo {
    std::string name;    // "v3"
    std::size_t lib;
    std::size_t record;  // index into the library's records
  };
  std::vector<VarInfo> record_vars;

  auto record_name = [&](std::size_t li, std::size_t ri) {
    return libs[li].ns + "::" + libs[li].records[ri].leaf;
  };

  std::size_t emitted = 0;
  while (emitted < spec.script_statements) {
    std::size_t li = rng.below(libs.size());
    const auto& lib = libs[li];
    std::uint64_t roll = rng.below(100);
    if (roll < 30) {  // pointer declaration
      std::size_t ri = rng.below(lib.records.size());
      statements.push_back(record_name(li, ri) + " *v" + std::to_string(var_count++) + ";");
      ++emitted;
    } else if (roll < 55) {  // value declaration
      std::size_t ri = rng.below(lib.records.size());
      std::string vn = "v" + std::to_string(var_count++);
      statements.push_back(record_name(li, ri) + " " + vn + ";");
      record_vars.push_back({vn, li, ri});
      ++emitted;
    } else if (roll < 70) {  // member access on an existing record variable
      if (record_vars.empty()) continue;
      const VarInfo& v = record_vars[rng.below(record_vars.size())];
      const auto& members = libs[v.lib].records[v.record].members;
      if (members.empty()) continue;
      const Member& m = members[rng.below(members.size())];
      statements.push_back(v.name + "." + m.name);
      ++emitted;
    } else if (roll < 85) {  // top-level record pointer
      statements.push_back(lib.top_record + " *v" + std::to_string(var_count++) + ";");
      ++emitted;
    } else if (roll < 93) {  // alias use after include
      if (!included.count(li)) {
        statements.push_back("#include <" + lib.header + ">");
        included.insert(li);
        ++emitted;
        if (emitted >= spec.script_statements) break;
      }
      statements.push_back(lib.alias_name + " v" + std::to_string(var_count++) + ";");
      ++emitted;
    } else {  // extern / function use after include + load
      if (!included.count(li)) {
        statements.push_back("#include <" + lib.header + ">");
        included.insert(li);
        ++emitted;
        if (emitted >= spec.script_statements) break;
      }
      if (!loaded.count(li)) {
        statements.push_back("load \"" + lib.name + "\"");
        loaded.insert(li);
        ++emitted;
        if (emitted >= spec.script_statements) break;
      }
      statements.push_back(rng.chance(60) ? lib.extern_name : lib.fn_name);
      ++emitted;
    }
  }
  for (const auto& s : statements) script << s << "\n";
  write_file_text(paths.root / manifest.script, script.str());

  // textual variant: include everything the script touches, up front
  std::ostringstream textual;
  std::set<std::string> preamble;
  for (const auto& s : statements) {
    Statement st = parse_statement(s);
    std::size_t li = libs.size();
    if (st.form == StatementForm::include) continue;
    if (st.form == StatementForm::load_lib) continue;
    if (st.target.empty()) continue;  // member access names a variable, not a library entity
    std::string head = st.target.segments.front();
    for (std::size_t i = 0; i < libs.size(); ++i) {
      const auto& lib = libs[i];
      if (head == lib.ns || head == lib.top_record || head == lib.alias_name ||
          head == lib.extern_name || head == lib.fn_name)
        li = i;
    }
    if (li < libs.size()) preamble.insert(libs[li].header);
  }
  for (const auto& h : preamble) textual << "#include <" << h << ">\n";
  for (const auto& s : statements) textual << s << "\n";
  write_file_text(paths.root / manifest.textual_script, textual.str());

  save_manifest(paths, manifest);
  return manifest;
}

}  // namespace mrc
