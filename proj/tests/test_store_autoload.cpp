#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "mrc/autoload.hpp"
#include "mrc/library.hpp"
#include "support.hpp"

using namespace mrc;
using testsupport::catch_kind;

namespace {

Declaration fwd(const std::string& q, const std::string& annotation) {
  Declaration d;
  d.kind = DeclKind::record;
  d.name = QualName::parse(q);
  d.annotation = annotation;
  return d;
}

void write_lib(const std::filesystem::path& dir, const std::string& name,
               std::vector<std::string> statics, std::vector<std::string> dynamics,
               std::vector<Declaration> payload = {}, const std::string& module = "") {
  LibraryArtifact lib = make_library(name, module, std::move(statics), std::move(dynamics),
                                     std::move(payload));
  write_file_bytes(dir / library_file_name(name), write_library(lib));
}

}  // namespace

TEST_CASE("library artifacts round-trip through their binary form") {
  LibraryArtifact lib = make_library("Foo", "Foo", {"_M3fooF0", "_M3foo3barF0"},
                                     {"_M3foo3barF0", "_M1SF0"},
                                     {fwd("foo::bar", "Foo.mrh")});
  auto bytes = write_library(lib);
  LibraryArtifact back = read_library(bytes, "libFoo.mrlib");
  CHECK(back.name == "Foo");
  CHECK(back.module == "Foo");
  CHECK(back.in_static("_M3fooF0"));
  CHECK(back.in_dynamic("_M1SF0"));
  CHECK_FALSE(back.in_static("_M1SF0"));
  CHECK(back.defines("_M3foo3barF0"));
  CHECK(back.bloom == lib.bloom);
  REQUIRE(back.has_payload);
  auto decls = back.payload_decls();
  REQUIRE(decls.size() == 1);
  CHECK(decls[0].annotation == "Foo.mrh");
  CHECK(write_library(back) == bytes);

  CHECK(library_file_name("Foo") == "libFoo.mrlib");
  CHECK(catch_kind([] { make_library("Bad", "", {"not mangled"}, {}, {}); }) ==
        ErrorKind::invalid_mangled_name);

  auto bad = bytes;
  bad[1] = 'X';
  CHECK(catch_kind([&] { read_library(bad, "libFoo.mrlib"); }) == ErrorKind::corrupt_mrlib);
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + bytes.size() / 2);
  CHECK(catch_kind([&] { read_library(cut, "libFoo.mrlib"); }) == ErrorKind::corrupt_mrlib);
}

TEST_CASE("scanner searches prebuilt directories before the library path") {
  auto prebuilt = testsupport::fresh_dir("scan-prebuilt");
  auto syslib = testsupport::fresh_dir("scan-syslib");
  const std::string sym = mangle_global(QualName::parse("shared")).text;
  write_lib(prebuilt, "Pre", {sym}, {});
  write_lib(syslib, "Sys", {sym}, {});

  SearchConfig cfg{{prebuilt}, {syslib}};
  SymbolScanner scanner(cfg);
  CostMeter meter;
  std::vector<std::string> warnings;
  auto found = scanner.find(sym, meter, warnings);
  REQUIRE(found.has_value());
  CHECK(found->library == "Pre");

  // removing the prebuilt copy falls back to the library path
  std::filesystem::remove(prebuilt / library_file_name("Pre"));
  SymbolScanner fresh(cfg);
  auto fallback = fresh.find(sym, meter, warnings);
  REQUIRE(fallback.has_value());
  CHECK(fallback->library == "Sys");
  CHECK(warnings.empty());
}

TEST_CASE("scanner charges one probe per artifact and scans only on positives") {
  auto dir = testsupport::fresh_dir("scan-count");
  const std::string wanted = mangle_global(QualName::parse("wanted")).text;
  const std::string other = mangle_global(QualName::parse("other")).text;
  write_lib(dir, "Aaa", {other}, {});
  write_lib(dir, "Bbb", {wanted}, {});

  SymbolScanner scanner({{dir}, {}});
  CostMeter meter;
  std::vector<std::string> warnings;
  auto found = scanner.find(wanted, meter, warnings);
  REQUIRE(found.has_value());
  CHECK(found->library == "Bbb");
  CHECK(found->file == "libBbb.mrlib");
  CHECK(meter.bloom_probes == 2);   // both artifacts probed (sorted order)
  CHECK(meter.symtab_scans == 1);   // only the positive probe pays a scan
}

TEST_CASE("dynamic-only symbols resolve like static ones") {
  auto dir = testsupport::fresh_dir("scan-dynamic");
  const std::string sym = mangle_function(QualName::parse("init"), 0).text;
  write_lib(dir, "Dyn", {}, {sym});
  SymbolScanner scanner({{dir}, {}});
  CostMeter meter;
  std::vector<std::string> warnings;
  auto found = scanner.find(sym, meter, warnings);
  REQUIRE(found.has_value());
  CHECK(found->library == "Dyn");
  CHECK(found->artifact->in_dynamic(sym));
  CHECK_FALSE(found->artifact->in_static(sym));
}

TEST_CASE("a positive probe without a definition moves on to the next artifact") {
  auto dir = testsupport::fresh_dir("scan-fp");
  const std::string sym = mangle_global(QualName::parse("hit")).text;
  // Aaa advertises everything (saturated filter) but defines nothing.
  LibraryArtifact noisy = make_library("Aaa", "", {}, {}, {});
  noisy.bloom.bytes.fill(0xFF);
  write_file_bytes(dir / library_file_name("Aaa"), write_library(noisy));
  write_lib(dir, "Bbb", {sym}, {});

  SymbolScanner scanner({{dir}, {}});
  CostMeter meter;
  std::vector<std::string> warnings;
  auto found = scanner.find(sym, meter, warnings);
  REQUIRE(found.has_value());
  CHECK(found->library == "Bbb");
  CHECK(meter.bloom_probes == 2);
  CHECK(meter.symtab_scans == 2);  // false positive paid a wasted scan
}

TEST_CASE("unreadable artifacts are skipped with a warning") {
  auto dir = testsupport::fresh_dir("scan-bad");
  write_file_text(dir / "libJunk.mrlib", "this is not a library");
  const std::string sym = mangle_global(QualName::parse("ok")).text;
  write_lib(dir, "Ok", {sym}, {});

  SymbolScanner scanner({{dir}, {}});
  CostMeter meter;
  std::vector<std::string> warnings;
  auto found = scanner.find(sym, meter, warnings);
  REQUIRE(found.has_value());
  CHECK(found->library == "Ok");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("warning: skipping libJunk.mrlib") == 0);

  // the warning is emitted once; the bad artifact stays cached as unreadable
  scanner.find(sym, meter, warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("artifact listings are deterministic and descriptive") {
  auto prebuilt = testsupport::fresh_dir("index-prebuilt");
  auto syslib = testsupport::fresh_dir("index-syslib");
  write_lib(prebuilt, "Zed", {"_M1zV"}, {}, {}, "Zed");
  write_lib(prebuilt, "Ace", {"_M1aV"}, {"_M1aV", "_M1bV"}, {fwd("A", "A.mrh")}, "Ace");
  write_lib(syslib, "Sys", {}, {"_M1sV"});

  std::vector<std::string> warnings;
  std::string listing = describe_artifacts({{prebuilt}, {syslib}}, warnings);
  CHECK(listing ==
        "libAce.mrlib name=Ace module=Ace static=1 dynamic=2 payload=1\n"
        "libZed.mrlib name=Zed module=Zed static=1 dynamic=0 payload=0\n"
        "libSys.mrlib name=Sys module=- static=0 dynamic=1 payload=0\n");
}
