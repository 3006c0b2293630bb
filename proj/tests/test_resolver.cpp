#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "mrc/resolver.hpp"
#include "mrc/trace.hpp"
#include "support.hpp"

using namespace mrc;
using testsupport::catch_kind;

namespace {

/// Two-library corpus where a::A0 has a member of type b::B0, so demanding
/// a definition of A0 chases into library B.
CorpusPaths chain_corpus(const std::string& name) {
  CorpusPaths paths{testsupport::fresh_dir(name)};
  std::filesystem::create_directories(paths.headers_dir());
  std::filesystem::create_directories(paths.rootmaps_dir());
  std::filesystem::create_directories(paths.libs_dir());
  std::filesystem::create_directories(paths.syslibs_dir());
  std::filesystem::create_directories(paths.pcms_dir());
  std::filesystem::create_directories(paths.modulemaps_dir());

  write_file_text(paths.headers_dir() / "A.mrh", "namespace a { struct A0 { b::B0 m; }; };\n");
  write_file_text(paths.headers_dir() / "B.mrh", "namespace b { struct B0 { int n; }; };\n");

  CostMeter meter;
  HeaderSet set({paths.headers_dir()}, meter);
  for (const auto& [lib, header, entity] :
       {std::tuple{"A", "A.mrh", "a::A0"}, std::tuple{"B", "B.mrh", "b::B0"}}) {
    std::vector<HeaderFile> headers = {set.parse(header)};
    SelectionList sel;
    sel.entries.push_back(QualName::parse(entity));
    Dictionary dict = gen_dictionary(lib, headers, sel);
    write_file_text(paths.rootmaps_dir() / (std::string(lib) + ".rootmap"),
                    emit_rootmap(dict.rootmap));
    std::vector<std::string> syms = {mangle_ctor(QualName::parse(entity)).text};
    LibraryArtifact artifact = make_library(lib, lib, syms, syms, dict.payload);
    write_file_bytes(paths.libs_dir() / library_file_name(lib), write_library(artifact));
    ModuleMap mm{lib, {header}};
    write_file_text(paths.modulemaps_dir() / (std::string(lib) + ".modulemap"),
                    emit_module_map(mm));
  }
  // modules know each other: A.mrh references b::B0 only by name, so the
  // module graph stays independent
  for (const auto& [lib, header] : {std::pair{"A", "A.mrh"}, std::pair{"B", "B.mrh"}}) {
    ModuleMap mm{lib, {header}};
    PcmData pcm = build_pcm(mm, {paths.headers_dir()}, {mm});
    write_file_bytes(paths.pcms_dir() / (std::string(lib) + ".pcm"), write_pcm(pcm));
  }

  CorpusManifest manifest;
  manifest.libraries.push_back({"A", "A.mrh", false});
  manifest.libraries.push_back({"B", "B.mrh", false});
  write_file_text(paths.root / manifest.script, "");
  write_file_text(paths.root / manifest.textual_script, "");
  save_manifest(paths, manifest);
  return paths;
}

std::vector<Statement> demo_script() {
  return parse_script("S *s;\nfoo::bar *baz1;\nfoo::bar baz2;\n", "demo");
}

}  // namespace

TEST_CASE("demo corpus, rootmap mode: lazy injection then one header parse") {
  CorpusPaths paths = testsupport::demo_corpus("res-rootmap");
  ResolutionSession session(Mode::rootmap, paths);

  CHECK(session.startup().rootmaps_consumed == std::vector<std::string>{"Foo.rootmap"});
  CHECK(session.startup().rootmap_entries == 2);
  CHECK(session.startup().meter.memory_units == 4);
  CHECK(session.startup().meter.cpu_units() == 0);

  RunTrace trace = session.run_script(demo_script());
  REQUIRE(trace.ok);
  REQUIRE(trace.statements.size() == 3);

  const StatementResult& s0 = trace.statements[0];
  CHECK(s0.libraries_loaded.empty());
  CHECK(s0.headers_parsed.empty());
  CHECK(s0.delta.tokens_parsed == 4);
  CHECK(s0.delta.memory_units == 1);
  CHECK(s0.lookups == 1);

  const StatementResult& s1 = trace.statements[1];
  CHECK(s1.libraries_loaded == std::vector<std::string>{"Foo"});
  CHECK(s1.headers_parsed.empty());
  CHECK(s1.delta.tokens_parsed == 6);
  CHECK(s1.delta.memory_units == 2);  // injected foo::bar plus the variable
  CHECK(s1.lookups == 2);             // miss, then re-lookup after injection

  const StatementResult& s2 = trace.statements[2];
  CHECK(s2.libraries_loaded.empty());
  CHECK(s2.headers_parsed == std::vector<std::string>{"Foo.mrh"});
  CHECK(s2.delta.tokens_parsed == 20);  // 5 for the line, 15 for Foo.mrh
  CHECK(s2.max_parse_depth == 2);       // definition frame + header file

  CHECK(trace.final_meter.cpu_units() == 30);
  CHECK(trace.final_meter.memory_units == 8);
  CHECK(trace.final_meter.libraries_loaded == 1);
  CHECK(trace.final_meter.decls_deserialized == 0);
}

TEST_CASE("demo corpus, store modes: deserialization instead of parsing") {
  CorpusPaths paths = testsupport::demo_corpus("res-store");

  for (Mode mode : {Mode::pch, Mode::modules_preload}) {
    ResolutionSession session(mode, paths);
    CHECK(session.startup().meter.memory_units == 53);  // attach 50 + 3 index entries
    CHECK(session.startup().meter.modules_loaded == 1);
    CHECK(session.startup().rootmaps_consumed.empty());  // store covers the corpus

    RunTrace trace = session.run_script(demo_script());
    REQUIRE(trace.ok);
    CHECK(trace.statements[0].declarations_materialized == std::vector<std::string>{"S"});
    CHECK(trace.statements[1].declarations_materialized ==
          std::vector<std::string>{"foo::bar"});
    CHECK(trace.statements[2].declarations_materialized.empty());  // cached
    for (const auto& st : trace.statements) {
      CHECK(st.headers_parsed.empty());
      CHECK(st.max_parse_depth == 0);
    }
    CHECK(trace.final_meter.decls_deserialized == 2);
    CHECK(trace.final_meter.cpu_units() == 17);  // 15 tokens + 2 deserializations
    CHECK(trace.final_meter.memory_units == 59);
  }
}

TEST_CASE("demo corpus, deferred modules: import happens at first lookup") {
  CorpusPaths paths = testsupport::demo_corpus("res-gmi");
  ResolutionSession session(Mode::modules_gmi, paths);
  CHECK(session.startup().gmi_built);
  CHECK(session.startup().gmi_entries == 3);
  CHECK(session.startup().meter.memory_units == 3);  // index only, no attach
  CHECK(session.startup().meter.modules_loaded == 0);

  RunTrace trace = session.run_script(demo_script());
  REQUIRE(trace.ok);
  CHECK(trace.statements[0].modules_imported == std::vector<std::string>{"Foo"});
  CHECK(trace.statements[0].delta.memory_units == 55);  // attach 53 + cell + variable
  CHECK(trace.statements[1].modules_imported.empty());
  CHECK(trace.final_meter.cpu_units() == 17);
}

TEST_CASE("demo corpus, textual mode: everything is parsed up front") {
  CorpusPaths paths = testsupport::demo_corpus("res-textual");
  ResolutionSession session(Mode::textual, paths);
  CHECK(session.startup().meter == CostMeter{});

  std::vector<Statement> script =
      parse_script(read_file_text(paths.root / "script.textual.mrs"), "script.textual.mrs");
  RunTrace trace = session.run_script(script);
  REQUIRE(trace.ok);
  REQUIRE(trace.statements.size() == 4);
  CHECK(trace.statements[0].headers_parsed == std::vector<std::string>{"Foo.mrh"});
  CHECK(trace.statements[0].delta.tokens_parsed == 22);  // 7 for the line, 15 for the header
  CHECK(trace.statements[0].max_parse_depth == 1);
  CHECK(trace.final_meter.cpu_units() == 37);
  CHECK(trace.final_meter.memory_units == 6);
  CHECK(trace.final_meter.libraries_loaded == 0);
}

TEST_CASE("final scopes agree across modes on names and kinds") {
  CorpusPaths paths = testsupport::demo_corpus("res-scope");
  std::vector<std::vector<std::pair<std::string, ScopeEntry>>> scopes;
  for (Mode mode : all_modes()) {
    ResolutionSession session(mode, paths);
    std::vector<Statement> script = parse_script(
        read_file_text(paths.root /
                       (mode == Mode::textual ? "script.textual.mrs" : "script.mrs")),
        "script");
    RunTrace trace = session.run_script(script);
    REQUIRE(trace.ok);
    scopes.push_back(session.scope_snapshot());
  }
  for (const auto& scope : scopes) {
    REQUIRE(scope.size() == 3);
    for (std::size_t i = 0; i < scope.size(); ++i) {
      CHECK(scope[i].first == scopes[0][i].first);
      CHECK(scope[i].second.kind == scopes[0][i].second.kind);
      CHECK(scope[i].second.defined == scopes[0][i].second.defined);
    }
  }
}

TEST_CASE("definition demand suspends statements across libraries") {
  CorpusPaths paths = chain_corpus("res-chain");

  SECTION("rootmap mode parses both headers inside nested frames") {
    ResolutionSession session(Mode::rootmap, paths);
    StatementResult res = session.execute_line("a::A0 v;");
    REQUIRE(res.ok);
    CHECK(res.libraries_loaded == std::vector<std::string>{"A", "B"});
    CHECK(res.headers_parsed == std::vector<std::string>{"A.mrh", "B.mrh"});
    CHECK(res.max_parse_depth == 3);  // A0 frame -> A.mrh; B0 frame -> B.mrh
    CHECK(session.depth_gauge().current == 0);
  }

  SECTION("module stores satisfy the same chain without parsing") {
    ResolutionSession session(Mode::modules_preload, paths);
    StatementResult res = session.execute_line("a::A0 v;");
    REQUIRE(res.ok);
    CHECK(res.headers_parsed.empty());
    CHECK(res.max_parse_depth == 0);
    CHECK(res.delta.decls_deserialized == 2);  // a::A0 and b::B0
    CHECK(session.depth_gauge().current == 0);
  }
}

TEST_CASE("include statements depend on what the store covers") {
  CorpusPaths paths = testsupport::demo_corpus("res-include");

  SECTION("preload: covered include is a no-op") {
    ResolutionSession session(Mode::modules_preload, paths);
    StatementResult res = session.execute_line("#include <Foo.mrh>");
    REQUIRE(res.ok);
    CHECK(res.headers_parsed.empty());
    CHECK(res.modules_imported.empty());
    CHECK(res.delta.tokens_parsed == 7);  // only the line itself
  }

  SECTION("deferred modules: the include performs the import") {
    ResolutionSession session(Mode::modules_gmi, paths);
    StatementResult res = session.execute_line("#include <Foo.mrh>");
    REQUIRE(res.ok);
    CHECK(res.modules_imported == std::vector<std::string>{"Foo"});
    CHECK(res.delta.memory_units == 53);
  }

  SECTION("rootmap: nothing claims the header, so it parses textually") {
    ResolutionSession session(Mode::rootmap, paths);
    StatementResult res = session.execute_line("#include <Foo.mrh>");
    REQUIRE(res.ok);
    CHECK(res.headers_parsed == std::vector<std::string>{"Foo.mrh"});
  }
}

TEST_CASE("variables evaluate to their canonical representations") {
  CorpusPaths paths = testsupport::demo_corpus("res-values");
  ResolutionSession session(Mode::modules_preload, paths);
  CHECK(session.execute_line("S *s;").value.empty());  // declarations print nothing
  CHECK(session.execute_line("s").value == "(S *) nullptr");
  session.execute_line("foo::bar b;");
  CHECK(session.execute_line("b").value == "(foo::bar) {}");
  session.execute_line("int n;");
  CHECK(session.execute_line("n").value == "(int) 0");
  session.execute_line("int *pn;");
  CHECK(session.execute_line("pn").value == "(int *) nullptr");
}

TEST_CASE("member access demands the definition and types the member") {
  CorpusPaths paths = chain_corpus("res-members");
  ResolutionSession session(Mode::rootmap, paths);
  REQUIRE(session.execute_line("a::A0 v;").ok);
  StatementResult res = session.execute_line("v.m");
  REQUIRE(res.ok);
  CHECK(res.value == "(b::B0) {}");

  StatementResult missing = session.execute_line("v.nope");
  CHECK_FALSE(missing.ok);
  CHECK(missing.error_kind == ErrorKind::unknown_member);
  CHECK(missing.error_message == "no member named 'nope' in 'a::A0'");

  StatementResult novar = session.execute_line("w.m");
  CHECK(novar.error_kind == ErrorKind::unknown_identifier);
  CHECK(novar.error_message == "no variable named 'w'");

  session.execute_line("int k;");
  StatementResult intvar = session.execute_line("k.m");
  CHECK(intvar.error_kind == ErrorKind::wrong_kind);
}

TEST_CASE("kind errors carry precise messages") {
  CorpusPaths paths = testsupport::demo_corpus("res-kinds");
  ResolutionSession session(Mode::textual, paths);
  REQUIRE(session.execute_line("#include <Foo.mrh>").ok);

  StatementResult ns_type = session.execute_line("foo x;");
  CHECK(ns_type.error_kind == ErrorKind::wrong_kind);
  CHECK(ns_type.error_message == "'foo' is a namespace, not a type");

  StatementResult ns_value = session.execute_line("foo");
  CHECK(ns_value.error_message == "'foo' is a namespace, not a value");

  StatementResult type_value = session.execute_line("S");
  CHECK(type_value.error_message == "'S' is a type, not a value");

  StatementResult int_value = session.execute_line("int");
  CHECK(int_value.error_message == "'int' is a type, not a value");

  StatementResult undeclared = session.execute_line("mystery x;");
  CHECK(undeclared.error_kind == ErrorKind::unresolved_identifier);
  CHECK(undeclared.error_message ==
        "'mystery' was not declared in this scope (include the header that declares it)");

  REQUIRE(session.execute_line("S *dup;").ok);
  StatementResult dup = session.execute_line("S *dup;");
  CHECK(dup.error_kind == ErrorKind::duplicate_definition);
  CHECK(dup.error_message == "variable 'dup' already declared");
}

TEST_CASE("alias cycles are reported, aliases otherwise chase to records") {
  CorpusPaths paths{testsupport::fresh_dir("res-alias")};
  std::filesystem::create_directories(paths.headers_dir());
  std::filesystem::create_directories(paths.rootmaps_dir());
  std::filesystem::create_directories(paths.libs_dir());
  std::filesystem::create_directories(paths.syslibs_dir());
  std::filesystem::create_directories(paths.pcms_dir());
  write_file_text(paths.headers_dir() / "Alias.mrh",
                  "struct R{};\nusing Good = R;\nusing A = B;\nusing B = A;\n");
  CorpusManifest manifest;
  manifest.libraries.push_back({"Alias", "Alias.mrh", false});
  write_file_text(paths.root / manifest.script, "");
  write_file_text(paths.root / manifest.textual_script, "");
  save_manifest(paths, manifest);

  ResolutionSession session(Mode::textual, paths);
  REQUIRE(session.execute_line("#include <Alias.mrh>").ok);
  CHECK(session.execute_line("Good g;").ok);
  StatementResult cyc = session.execute_line("A x;");
  CHECK_FALSE(cyc.ok);
  CHECK(cyc.error_kind == ErrorKind::alias_cycle);
  StatementResult pcyc = session.execute_line("A *p;");
  CHECK(pcyc.error_kind == ErrorKind::alias_cycle);
}

TEST_CASE("load statements search libs then syslibs and are idempotent") {
  CorpusPaths paths = testsupport::autoload_corpus("res-load");
  ResolutionSession session(Mode::rootmap, paths);
  StatementResult first = session.execute_line("load \"Minuit\"");
  REQUIRE(first.ok);
  CHECK(first.libraries_loaded == std::vector<std::string>{"Minuit"});
  StatementResult again = session.execute_line("load \"Minuit\"");
  REQUIRE(again.ok);
  CHECK(again.libraries_loaded.empty());
  CHECK(again.delta.libraries_loaded == 0);

  StatementResult sys = session.execute_line("load \"M17n\"");
  REQUIRE(sys.ok);  // found under syslibs/

  StatementResult missing = session.execute_line("load \"Ghost\"");
  CHECK(missing.error_kind == ErrorKind::missing_library);
  CHECK(missing.error_message == "cannot load library 'Ghost'");
}

TEST_CASE("extern globals resolve only against loaded or discoverable libraries") {
  CorpusPaths paths = testsupport::autoload_corpus("res-minuit");

  SECTION("rootmap mode cannot see the symbol before its library loads") {
    ResolutionSession session(Mode::rootmap, paths);
    StatementResult res = session.execute_line("gMinuit");
    CHECK_FALSE(res.ok);
    CHECK(res.error_kind == ErrorKind::unresolved_symbol);
    CHECK(res.error_message == "symbol 'gMinuit' unresolved while linking");

    // the classic workaround: load the library and include its header, since
    // the dictionary only covers the selected records
    REQUIRE(session.execute_line("load \"Minuit\"").ok);
    REQUIRE(session.execute_line("#include <Minuit.mrh>").ok);
    StatementResult after = session.execute_line("gMinuit");
    REQUIRE(after.ok);
    CHECK(after.value == "(Minuit *) nullptr");
  }

  SECTION("module modes autoload the defining library") {
    ResolutionSession session(Mode::modules_preload, paths);
    StatementResult res = session.execute_line("gMinuit");
    REQUIRE(res.ok);
    CHECK(res.value == "(Minuit *) nullptr");
    CHECK(res.libraries_loaded == std::vector<std::string>{"Minuit"});
    CHECK(res.delta.bloom_probes >= 1);
  }

  SECTION("dynamic-only system libraries are discovered the same way") {
    ResolutionSession session(Mode::modules_preload, paths);
    REQUIRE(session.execute_line("#include <M17n.mrh>").ok);
    StatementResult res = session.execute_line("m17n_init_core");
    REQUIRE(res.ok);
    CHECK(res.value == "(int (*)()) m17n_init_core");
    CHECK(res.libraries_loaded == std::vector<std::string>{"M17n"});

    ResolutionSession rm(Mode::rootmap, paths);
    REQUIRE(rm.execute_line("#include <M17n.mrh>").ok);
    StatementResult fail_res = rm.execute_line("m17n_init_core");
    CHECK_FALSE(fail_res.ok);
    CHECK(fail_res.error_message == "symbol 'm17n_init_core' unresolved while linking");
  }
}

TEST_CASE("scripts abort at the first error but sessions continue") {
  CorpusPaths paths = testsupport::demo_corpus("res-abort");
  ResolutionSession session(Mode::rootmap, paths);
  RunTrace trace = session.run_script(parse_script("S *s;\nmystery x;\nS *t;\n", "bad.mrs"));
  CHECK_FALSE(trace.ok);
  REQUIRE(trace.statements.size() == 2);  // the failing statement is recorded, the rest not run
  CHECK(trace.statements[1].error_kind == ErrorKind::unresolved_identifier);

  // interactive path keeps accepting lines after an error
  StatementResult bad = session.execute_line("also mystery lines;");
  CHECK_FALSE(bad.ok);
  CHECK(bad.error_kind == ErrorKind::parse_error);
  CHECK(session.execute_line("S *t;").ok);
  CHECK(session.depth_gauge().current == 0);
}

TEST_CASE("pch mode refuses to start without its precompiled header") {
  CorpusPaths paths = testsupport::demo_corpus("res-nopch");
  std::filesystem::remove(paths.pch_file());
  CHECK(catch_kind([&] { ResolutionSession session(Mode::pch, paths); }) ==
        ErrorKind::missing_dependency);
}

TEST_CASE("traces serialize without absolute paths") {
  CorpusPaths paths = testsupport::demo_corpus("res-json");
  ResolutionSession session(Mode::rootmap, paths);
  RunTrace trace = session.run_script(demo_script());
  std::string text = trace_text(trace);
  CHECK(text.find(paths.root.string()) == std::string::npos);
  CHECK(text.find("/tmp") == std::string::npos);
  CHECK(text.find("\"mode\": \"rootmap\"") != std::string::npos);
  CHECK(text.find("\"ok\": true") != std::string::npos);
}
