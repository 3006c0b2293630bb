#pragma once

#include <cstdint>

namespace mrc {

/// Deterministic counters standing in for CPU time and resident memory.
/// cpu_units is derived (tokens parsed + declarations deserialized) and is
/// never stored. All counters are monotone within a session.
struct CostMeter {
  std::uint64_t tokens_parsed = 0;
  std::uint64_t decls_deserialized = 0;
  std::uint64_t modules_loaded = 0;
  std::uint64_t libraries_loaded = 0;
  std::uint64_t memory_units = 0;
  std::uint64_t bloom_probes = 0;
  std::uint64_t symtab_scans = 0;

  std::uint64_t cpu_units() const { return tokens_parsed + decls_deserialized; }

  friend bool operator==(const CostMeter&, const CostMeter&) = default;

  CostMeter delta_since(const CostMeter& base) const {
    CostMeter d;
    d.tokens_parsed = tokens_parsed - base.tokens_parsed;
    d.decls_deserialized = decls_deserialized - base.decls_deserialized;
    d.modules_loaded = modules_loaded - base.modules_loaded;
    d.libraries_loaded = libraries_loaded - base.libraries_loaded;
    d.memory_units = memory_units - base.memory_units;
    d.bloom_probes = bloom_probes - base.bloom_probes;
    d.symtab_scans = symtab_scans - base.symtab_scans;
    return d;
  }
};

/// Tracks how deeply parses nest: every file actively being parsed and
/// every suspended definition demand counts one level. `high` is the
/// high-water mark since the last reset.
struct DepthGauge {
  std::size_t current = 0;
  std::size_t high = 0;

  void push() {
    if (++current > high) high = current;
  }
  void pop() {
    if (current > 0) --current;
  }
  void reset() { current = high = 0; }
};

}  // namespace mrc
