#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/error.hpp"
#include "mrc/meter.hpp"
#include "mrc/pcm.hpp"

namespace mrc {

inline constexpr std::uint64_t k_default_attach_overhead = 50;

/// Holds module files and tracks which are attached. Attaching charges a
/// fixed overhead plus one memory unit per index entry; declaration bodies
/// stay encoded until someone asks for them.
class ModuleStore {
public:
  explicit ModuleStore(std::uint64_t attach_overhead = k_default_attach_overhead)
      : attach_overhead_(attach_overhead) {}

  void add_available(PcmData pcm) {
    std::string name = pcm.name;
    auto [it, inserted] = modules_.emplace(std::move(name), Entry{std::move(pcm), false, {}});
    if (!inserted) fail(ErrorKind::duplicate_module, "module '" + it->first + "' added twice");
    it->second.materialized.resize(it->second.pcm.decl_blobs.size());
  }

  bool has_module(const std::string& name) const { return modules_.count(name) != 0; }

  bool is_attached(const std::string& name) const {
    auto it = modules_.find(name);
    return it != modules_.end() && it->second.attached;
  }

  /// Attaches `name` and, first, any of its unattached dependencies.
  /// Returns the modules attached, dependency-first.
  std::vector<std::string> attach(const std::string& name, CostMeter& meter) {
    std::vector<std::string> attached;
    std::set<std::string> visiting;
    attach_inner(name, meter, attached, visiting);
    return attached;
  }

  void preload_all(CostMeter& meter) {
    for (auto& [name, entry] : modules_)
      if (!entry.attached) {
        std::vector<std::string> attached;
        std::set<std::string> visiting;
        attach_inner(name, meter, attached, visiting);
      }
  }

  struct Hit {
    std::string module;
    std::uint32_t slot;
  };

  /// Searches attached modules in lexicographic name order.
  std::optional<Hit> lookup(const std::string& qname) const {
    for (const auto& [name, entry] : modules_) {
      if (!entry.attached) continue;
      if (const std::uint32_t* slot = entry.pcm.find_slot(qname)) return Hit{name, *slot};
    }
    return std::nullopt;
  }

  /// Decodes one declaration. First touch charges one deserialization and
  /// one memory unit; later touches are free.
  const Declaration& materialize(const Hit& hit, CostMeter& meter) {
    auto it = modules_.find(hit.module);
    if (it == modules_.end())
      fail(ErrorKind::missing_dependency, "module '" + hit.module + "' not in store");
    Entry& entry = it->second;
    if (hit.slot >= entry.materialized.size())
      fail(ErrorKind::corrupt_pcm, hit.module + ": decl slot out of range");
    std::optional<Declaration>& cell = entry.materialized[hit.slot];
    if (!cell) {
      cell = entry.pcm.decode_slot(hit.slot);
      meter.decls_deserialized += 1;
      meter.memory_units += 1;
    }
    return *cell;
  }

  const PcmData& pcm(const std::string& name) const {
    auto it = modules_.find(name);
    if (it == modules_.end())
      fail(ErrorKind::missing_dependency, "module '" + name + "' not in store");
    return it->second.pcm;
  }

  std::vector<std::string> available_modules() const {
    std::vector<std::string> names;
    for (const auto& [name, entry] : modules_) names.push_back(name);
    return names;
  }

  std::vector<std::string> attached_modules() const {
    std::vector<std::string> names;
    for (const auto& [name, entry] : modules_)
      if (entry.attached) names.push_back(name);
    return names;
  }

  std::uint64_t attach_overhead() const { return attach_overhead_; }

private:
  struct Entry {
    PcmData pcm;
    bool attached = false;
    std::vector<std::optional<Declaration>> materialized;
  };

  void attach_inner(const std::string& name, CostMeter& meter, std::vector<std::string>& attached,
                    std::set<std::string>& visiting) {
    auto it = modules_.find(name);
    if (it == modules_.end())
      fail(ErrorKind::missing_dependency, "module '" + name + "' is required but not present");
    if (it->second.attached) return;
    if (!visiting.insert(name).second)
      fail(ErrorKind::missing_dependency, "module dependency cycle through '" + name + "'");
    for (const auto& dep : it->second.pcm.dependencies)
      attach_inner(dep, meter, attached, visiting);
    it->second.attached = true;
    meter.modules_loaded += 1;
    meter.memory_units += attach_overhead_ + it->second.pcm.index.size();
    attached.push_back(name);
  }

  std::uint64_t attach_overhead_;
  std::map<std::string, Entry> modules_;
};

/// Identifier -> providing module, built over every module file without
/// attaching any of them. Building charges one memory unit per index entry
/// across all modules; lookups are free.
class GlobalModuleIndex {
public:
  static GlobalModuleIndex build(const ModuleStore& store, CostMeter& meter) {
    GlobalModuleIndex gmi;
    for (const auto& name : store.available_modules()) {
      const PcmData& pcm = store.pcm(name);
      meter.memory_units += pcm.index.size();
      for (const auto& [qname, slot] : pcm.index) gmi.map_.emplace(qname, name);
    }
    return gmi;
  }

  /// Lexicographically first providing module, or null.
  const std::string* find(const std::string& qname) const {
    auto it = map_.find(qname);
    return it == map_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return map_.size(); }

private:
  std::map<std::string, std::string> map_;  // emplace keeps the first (smallest) module
};

}  // namespace mrc
