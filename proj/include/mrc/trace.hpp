#pragma once

#include <string>

#include <json.hpp>

#include "mrc/meter.hpp"
#include "mrc/resolver.hpp"

namespace mrc {

using ordered_json = nlohmann::ordered_json;

inline ordered_json meter_json(const CostMeter& m) {
  ordered_json j;
  j["cpu_units"] = m.cpu_units();
  j["memory_units"] = m.memory_units;
  j["tokens_parsed"] = m.tokens_parsed;
  j["decls_deserialized"] = m.decls_deserialized;
  j["modules_loaded"] = m.modules_loaded;
  j["libraries_loaded"] = m.libraries_loaded;
  j["bloom_probes"] = m.bloom_probes;
  j["symtab_scans"] = m.symtab_scans;
  return j;
}

inline ordered_json statement_json(const StatementResult& r) {
  ordered_json j;
  j["index"] = r.index;
  j["text"] = r.text;
  j["form"] = std::string(to_string(r.form));
  j["target"] = r.target;
  j["outcome"] = r.ok ? "ok" : "error";
  if (!r.ok) {
    j["error"] = std::string(to_string(r.error_kind));
    j["error_message"] = r.error_message;
  }
  j["lookups"] = r.lookups;
  j["libraries_loaded"] = r.libraries_loaded;
  j["headers_parsed"] = r.headers_parsed;
  j["modules_imported"] = r.modules_imported;
  j["declarations_materialized"] = r.declarations_materialized;
  j["max_parse_depth"] = r.max_parse_depth;
  j["meter_delta"] = meter_json(r.delta);
  if (!r.value.empty()) j["value"] = r.value;
  return j;
}

/// The whole trace as one relocation-safe JSON object: only corpus-relative
/// names appear, so byte-identical traces replay from any corpus location.
inline ordered_json trace_json(const RunTrace& t) {
  ordered_json j;
  j["mode"] = std::string(to_string(t.mode));
  ordered_json s;
  s["rootmaps_consumed"] = t.startup.rootmaps_consumed;
  s["modules_preloaded"] = t.startup.modules_preloaded;
  s["gmi_built"] = t.startup.gmi_built;
  s["gmi_entries"] = t.startup.gmi_entries;
  s["rootmap_entries"] = t.startup.rootmap_entries;
  s["meter"] = meter_json(t.startup.meter);
  j["startup"] = std::move(s);
  j["statements"] = ordered_json::array();
  for (const auto& r : t.statements) j["statements"].push_back(statement_json(r));
  j["ok"] = t.ok;
  j["final_meter"] = meter_json(t.final_meter);
  ordered_json scope = ordered_json::array();
  for (const auto& [name, e] : t.scope) {
    ordered_json se;
    se["name"] = name;
    se["kind"] = e.kind;
    se["defined"] = e.defined;
    se["origin"] = e.origin;
    scope.push_back(std::move(se));
  }
  j["scope"] = std::move(scope);
  return j;
}

inline std::string trace_text(const RunTrace& t) { return trace_json(t).dump(2) + "\n"; }

}  // namespace mrc
