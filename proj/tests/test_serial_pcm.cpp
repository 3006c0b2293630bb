#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mrc/pcm.hpp"
#include "mrc/serial.hpp"
#include "mrc/store.hpp"
#include "support.hpp"

using namespace mrc;
using testsupport::catch_kind;

namespace {

Declaration record(const std::string& q, bool defined,
                   std::vector<Member> members = {}, std::string annotation = {}) {
  Declaration d;
  d.kind = DeclKind::record;
  d.name = QualName::parse(q);
  d.defined = defined;
  d.members = std::move(members);
  d.annotation = std::move(annotation);
  return d;
}

Declaration name_space(const std::string& q) {
  Declaration d;
  d.kind = DeclKind::name_space;
  d.name = QualName::parse(q);
  d.defined = true;
  return d;
}

Declaration extern_global(const std::string& q, const std::string& type) {
  Declaration d;
  d.kind = DeclKind::extern_global;
  d.name = QualName::parse(q);
  d.underlying = type;
  return d;
}

Declaration function(const std::string& q, std::vector<std::string> params,
                     const std::string& ret = "int") {
  Declaration d;
  d.kind = DeclKind::function;
  d.name = QualName::parse(q);
  d.underlying = ret;
  d.params = std::move(params);
  return d;
}

Declaration alias(const std::string& q, const std::string& target) {
  Declaration d;
  d.kind = DeclKind::alias;
  d.name = QualName::parse(q);
  d.underlying = target;
  d.defined = true;
  return d;
}

}  // namespace

TEST_CASE("declaration encoding round-trips every kind") {
  std::vector<Declaration> decls = {
      name_space("a"),
      record("a::B", true, {{"n", "int"}, {"c", "a::C"}}, "A.mrh"),
      record("a::C", false),
      extern_global("gB", "a::B"),
      function("run", {"int", "a::B"}, "int"),
      alias("AB", "a::B"),
  };
  for (const auto& d : decls) {
    auto bytes = encode_decl_bytes(d);
    Declaration back = decode_decl_bytes(bytes, ErrorKind::corrupt_pcm, "test");
    CHECK(back.same_structure(d));
    CHECK(back.annotation == d.annotation);
  }
}

TEST_CASE("truncated or corrupt declaration blobs are rejected") {
  auto bytes = encode_decl_bytes(record("a::B", true, {{"n", "int"}}));
  for (std::size_t cut : {std::size_t(0), std::size_t(1), bytes.size() - 1}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + cut);
    CHECK(catch_kind([&] { decode_decl_bytes(t, ErrorKind::corrupt_pcm, "t"); }) ==
          ErrorKind::corrupt_pcm);
  }
  auto bad_kind = bytes;
  bad_kind[0] = 0x77;
  CHECK(catch_kind([&] { decode_decl_bytes(bad_kind, ErrorKind::corrupt_pcm, "t"); }) ==
        ErrorKind::corrupt_pcm);
}

TEST_CASE("module files round-trip and validate on read") {
  PcmData pcm = make_pcm("Demo", {"Demo.mrh"}, {"Base"},
                         {name_space("d"), record("d::R", true, {{"n", "int"}}),
                          extern_global("gD", "d::R")});
  auto bytes = write_pcm(pcm);

  PcmData back = read_pcm(bytes, "Demo.pcm");
  CHECK(back.name == "Demo");
  CHECK(back.sources == std::vector<std::string>{"Demo.mrh"});
  CHECK(back.dependencies == std::vector<std::string>{"Base"});
  REQUIRE(back.index.size() == 3);
  REQUIRE(back.find_slot("d::R") != nullptr);
  Declaration r = back.decode_slot(*back.find_slot("d::R"));
  CHECK(r.defined);
  REQUIRE(r.members.size() == 1);
  // field schema for defined records rides along
  REQUIRE(back.schema.size() == 1);
  CHECK(back.schema[0].first == "d::R");

  SECTION("byte-identical re-serialization") { CHECK(write_pcm(back) == bytes); }

  SECTION("bad magic") {
    auto bad = bytes;
    bad[0] = 'X';
    CHECK(catch_kind([&] { read_pcm(bad, "Demo.pcm"); }) == ErrorKind::corrupt_pcm);
  }

  SECTION("truncation at every boundary fails cleanly") {
    for (std::size_t cut = 0; cut < bytes.size(); cut += 7) {
      std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + cut);
      CHECK(catch_kind([&] { read_pcm(t, "Demo.pcm"); }) == ErrorKind::corrupt_pcm);
    }
  }

  SECTION("trailing bytes rejected") {
    auto extra = bytes;
    extra.push_back(0);
    CHECK(catch_kind([&] { read_pcm(extra, "Demo.pcm"); }) == ErrorKind::corrupt_pcm);
  }
}

TEST_CASE("absolute source paths are rejected when building modules") {
  CHECK(catch_kind([&] { make_pcm("Abs", {"/tmp/Abs.mrh"}, {}, {}); }) ==
        ErrorKind::absolute_source_path);
}

TEST_CASE("module dump lists sources, dependencies, and declarations") {
  PcmData pcm = make_pcm("Foo", {"Foo.mrh"}, {},
                         {name_space("foo"), record("foo::bar", true), record("S", true)});
  CHECK(dump_pcm(pcm) ==
        "module Foo\n"
        "source Foo.mrh\n"
        "index 3\n"
        "namespace foo\n"
        "struct foo::bar defined\n"
        "struct S defined\n");
}

TEST_CASE("module store attaches lazily and materializes once") {
  ModuleStore store(50);
  store.add_available(make_pcm("B", {"B.mrh"}, {},
                               {record("B0", true, {{"n", "int"}})}));
  store.add_available(make_pcm("A", {"A.mrh"}, {},
                               {name_space("a"), record("a::R", true), record("a::Q", true)}));
  CHECK(catch_kind([&] {
          store.add_available(make_pcm("A", {"A2.mrh"}, {}, {}));
        }) == ErrorKind::duplicate_module);

  CostMeter meter;
  CHECK_FALSE(store.lookup("a::R").has_value());  // nothing attached yet

  auto attached = store.attach("A", meter);
  CHECK(attached == std::vector<std::string>{"A"});
  CHECK(meter.modules_loaded == 1);
  CHECK(meter.memory_units == 53);  // overhead 50 + three index entries
  CHECK(meter.decls_deserialized == 0);  // attach reads nothing

  auto hit = store.lookup("a::R");
  REQUIRE(hit.has_value());
  const Declaration& d1 = store.materialize(*hit, meter);
  CHECK(d1.name.str() == "a::R");
  CHECK(meter.decls_deserialized == 1);
  CHECK(meter.memory_units == 54);
  const Declaration& d2 = store.materialize(*hit, meter);
  CHECK(&d1 == &d2);                     // cached
  CHECK(meter.decls_deserialized == 1);  // no recharge
  CHECK(meter.memory_units == 54);
}

TEST_CASE("module attach pulls dependencies first") {
  ModuleStore store(10);
  store.add_available(make_pcm("Top", {"Top.mrh"}, {"Mid"}, {record("T", true)}));
  store.add_available(make_pcm("Mid", {"Mid.mrh"}, {"Base"}, {record("M", true)}));
  store.add_available(make_pcm("Base", {"Base.mrh"}, {}, {record("B", true)}));
  CostMeter meter;
  auto attached = store.attach("Top", meter);
  CHECK(attached == std::vector<std::string>{"Base", "Mid", "Top"});
  CHECK(meter.modules_loaded == 3);

  ModuleStore broken(10);
  broken.add_available(make_pcm("Solo", {"Solo.mrh"}, {"Ghost"}, {}));
  CostMeter m2;
  CHECK(catch_kind([&] { broken.attach("Solo", m2); }) == ErrorKind::missing_dependency);
}

TEST_CASE("preload attaches every module in name order") {
  ModuleStore store(50);
  store.add_available(make_pcm("Zeta", {"Z.mrh"}, {}, {record("Z0", true)}));
  store.add_available(make_pcm("Alpha", {"A.mrh"}, {}, {record("A0", true)}));
  CostMeter meter;
  store.preload_all(meter);
  CHECK(store.attached_modules() == std::vector<std::string>{"Alpha", "Zeta"});
  CHECK(meter.modules_loaded == 2);
}

TEST_CASE("global module index maps identifiers without attaching") {
  ModuleStore store(50);
  store.add_available(make_pcm("B", {"B.mrh"}, {}, {record("Shared", true), record("B1", true)}));
  store.add_available(make_pcm("A", {"A.mrh"}, {}, {record("Shared", true), record("A1", true)}));
  CostMeter meter;
  GlobalModuleIndex gmi = GlobalModuleIndex::build(store, meter);
  CHECK(meter.memory_units == 4);   // one unit per index entry
  CHECK(meter.modules_loaded == 0);
  CHECK(gmi.size() == 3);           // Shared collapses to one entry
  REQUIRE(gmi.find("A1") != nullptr);
  CHECK(*gmi.find("A1") == "A");
  REQUIRE(gmi.find("Shared") != nullptr);
  CHECK(*gmi.find("Shared") == "A");  // lexicographically first module wins
  CHECK(gmi.find("Nope") == nullptr);
  CHECK(store.attached_modules().empty());
}
