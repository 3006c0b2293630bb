#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mrc/ast.hpp"
#include "mrc/autoload.hpp"
#include "mrc/corpus.hpp"
#include "mrc/error.hpp"
#include "mrc/library.hpp"
#include "mrc/mangle.hpp"
#include "mrc/meter.hpp"
#include "mrc/parser.hpp"
#include "mrc/pcm.hpp"
#include "mrc/rootmap.hpp"
#include "mrc/store.hpp"

namespace mrc {

/// The five header-provisioning strategies under comparison.
enum class Mode { textual, pch, rootmap, modules_preload, modules_gmi };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::textual: return "textual";
    case Mode::pch: return "pch";
    case Mode::rootmap: return "rootmap";
    case Mode::modules_preload: return "modules-preload";
    case Mode::modules_gmi: return "modules-gmi";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "textual") return Mode::textual;
  if (s == "pch") return Mode::pch;
  if (s == "rootmap") return Mode::rootmap;
  if (s == "modules-preload") return Mode::modules_preload;
  if (s == "modules-gmi") return Mode::modules_gmi;
  fail(ErrorKind::bad_spec, "unknown mode '" + std::string(s) + "'");
}

inline const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes = {Mode::textual, Mode::pch, Mode::rootmap,
                                          Mode::modules_preload, Mode::modules_gmi};
  return modes;
}

struct SessionOptions {
  std::uint64_t attach_overhead = k_default_attach_overhead;
};

struct StartupInfo {
  std::vector<std::string> rootmaps_consumed;  // rootmap file names
  std::vector<std::string> modules_preloaded;  // module names, attach order
  bool gmi_built = false;
  std::size_t gmi_entries = 0;
  std::size_t rootmap_entries = 0;
  CostMeter meter;  // snapshot at end of startup
};

struct StatementResult {
  std::size_t index = 0;
  std::string text;
  StatementForm form = StatementForm::expr_use;
  std::string target;
  bool ok = true;
  ErrorKind error_kind = ErrorKind::bad_spec;
  std::string error_message;
  std::uint64_t lookups = 0;  // scope-table probes
  std::vector<std::string> libraries_loaded;
  std::vector<std::string> headers_parsed;
  std::vector<std::string> modules_imported;
  std::vector<std::string> declarations_materialized;
  std::size_t max_parse_depth = 0;
  CostMeter delta;
  std::string value;  // printed value for expression statements
};

struct ScopeEntry {
  std::string kind;
  bool defined = false;
  std::string origin;
};

struct RunTrace {
  Mode mode = Mode::textual;
  StartupInfo startup;
  std::vector<StatementResult> statements;
  CostMeter final_meter;
  bool ok = true;
  std::vector<std::pair<std::string, ScopeEntry>> scope;  // sorted by name
};

/// One interpreter session over a corpus: performs the mode's startup in
/// the constructor, then resolves statements one at a time.
class ResolutionSession {
public:
  ResolutionSession(Mode mode, CorpusPaths paths, SessionOptions opts = {})
      : mode_(mode),
        paths_(std::move(paths)),
        opts_(opts),
        manifest_(load_manifest(paths_)),
        headers_({paths_.headers_dir()}, meter_),
        store_(opts.attach_overhead),
        scanner_(SearchConfig{{paths_.libs_dir()}, {paths_.syslibs_dir()}}) {
    headers_.set_depth_gauge(&depth_);
    run_startup();
  }

  Mode mode() const { return mode_; }
  const CostMeter& meter() const { return meter_; }
  const StartupInfo& startup() const { return startup_; }
  const CorpusManifest& manifest() const { return manifest_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const DepthGauge& depth_gauge() const { return depth_; }

  const Declaration* scope_find(const std::string& qname) const {
    auto it = scope_.find(qname);
    return it == scope_.end() ? nullptr : &it->second;
  }

  std::vector<std::pair<std::string, ScopeEntry>> scope_snapshot() const {
    std::vector<std::pair<std::string, ScopeEntry>> out;
    for (const auto& [name, d] : scope_)
      out.emplace_back(name, ScopeEntry{std::string(to_string(d.kind)), d.defined,
                                        origin_string(d.origin, d.origin_module)});
    return out;
  }

  /// Executes one parsed statement. Never throws: failures are reported in
  /// the result, and the session survives them (REPL behavior).
  StatementResult execute(const Statement& st) {
    StatementResult res;
    res.index = stmt_index_++;
    res.text = st.text;
    res.form = st.form;
    res.target = (st.form == StatementForm::include || st.form == StatementForm::load_lib)
                     ? st.payload
                     : st.target.str();
    depth_.reset();
    CostMeter before = meter_;
    cur_ = &res;
    try {
      meter_.tokens_parsed += token_count(st.text);
      dispatch(st, res);
    } catch (const Error& e) {
      res.ok = false;
      res.error_kind = e.kind();
      res.error_message = e.what();
    }
    cur_ = nullptr;
    res.max_parse_depth = depth_.high;
    res.delta = meter_.delta_since(before);
    return res;
  }

  /// REPL entry: parse errors surface as a failed result, not an exception.
  StatementResult execute_line(const std::string& line) {
    Statement st;
    try {
      st = parse_statement(line);
    } catch (const Error& e) {
      StatementResult res;
      res.index = stmt_index_++;
      std::size_t b = line.find_first_not_of(" \t\r\n");
      std::size_t e2 = line.find_last_not_of(" \t\r\n");
      res.text = b == std::string::npos ? "" : line.substr(b, e2 - b + 1);
      res.ok = false;
      res.error_kind = e.kind();
      res.error_message = e.what();
      return res;
    }
    return execute(st);
  }

  /// Script runs stop at the first failing statement; the trace keeps what
  /// already ran plus the failure itself.
  RunTrace run_script(const std::vector<Statement>& script) {
    RunTrace trace;
    trace.mode = mode_;
    trace.startup = startup_;
    for (const auto& st : script) {
      StatementResult res = execute(st);
      bool ok = res.ok;
      trace.statements.push_back(std::move(res));
      if (!ok) {
        trace.ok = false;
        break;
      }
    }
    trace.final_meter = meter_;
    trace.scope = scope_snapshot();
    return trace;
  }

private:
  // ---- startup -----------------------------------------------------------

  void run_startup() {
    std::set<std::string> covered;  // libraries whose rootmaps the store replaces
    switch (mode_) {
      case Mode::textual:
        break;
      case Mode::rootmap:
        consume_rootmaps(covered);
        break;
      case Mode::pch: {
        if (!std::filesystem::exists(paths_.pch_file()))
          fail(ErrorKind::missing_dependency,
               "mode pch needs a precompiled header at pch/PCH.pcm");
        PcmData pch = read_pcm(read_file_bytes(paths_.pch_file()), "PCH.pcm");
        register_module_headers(pch);
        store_.add_available(std::move(pch));
        startup_.modules_preloaded = store_.attach("PCH", meter_);
        for (const auto& lib : manifest_.libraries)
          if (header_to_module_.count(lib.header)) covered.insert(lib.name);
        consume_rootmaps(covered);
        break;
      }
      case Mode::modules_preload:
      case Mode::modules_gmi: {
        for (const auto& f : list_files(paths_.pcms_dir(), ".pcm")) {
          PcmData pcm = read_pcm(read_file_bytes(paths_.pcms_dir() / f), f);
          register_module_headers(pcm);
          covered.insert(pcm.name);
          store_.add_available(std::move(pcm));
        }
        if (mode_ == Mode::modules_preload) {
          store_.preload_all(meter_);
          startup_.modules_preloaded = store_.attached_modules();
        } else {
          gmi_ = GlobalModuleIndex::build(store_, meter_);
          startup_.gmi_built = true;
          startup_.gmi_entries = gmi_->size();
        }
        consume_rootmaps(covered);
        break;
      }
    }
    startup_.meter = meter_;
  }

  void register_module_headers(const PcmData& pcm) {
    for (const auto& s : pcm.sources) header_to_module_.emplace(s, pcm.name);
  }

  void consume_rootmaps(const std::set<std::string>& covered) {
    for (const auto& f : list_files(paths_.rootmaps_dir(), ".rootmap")) {
      RootmapFile rm = parse_rootmap(read_file_text(paths_.rootmaps_dir() / f), f);
      bool skip = !rm.sections.empty();
      for (const auto& sec : rm.sections)
        if (!covered.count(sec.library)) skip = false;
      if (skip) continue;
      for (const auto& d : rm.preamble) {
        Declaration pd = d;
        pd.origin = DeclOrigin::injected_dictionary;
        insert_decl(std::move(pd), true);
      }
      std::size_t before = rootmap_db_.size();
      rootmap_db_.add(rm, f);
      meter_.memory_units += rootmap_db_.size() - before;
      startup_.rootmaps_consumed.push_back(f);
    }
    startup_.rootmap_entries = rootmap_db_.size();
  }

  // ---- scope -------------------------------------------------------------

  const Declaration* find_scope(const std::string& qname) {
    if (cur_) cur_->lookups += 1;
    auto it = scope_.find(qname);
    return it == scope_.end() ? nullptr : &it->second;
  }

  /// Inserts or merges. New names cost one memory unit when `charge` is
  /// set (store materializations pre-pay through the store instead).
  Declaration& insert_decl(Declaration d, bool charge) {
    auto it = scope_.find(d.name.str());
    if (it == scope_.end()) {
      if (charge) meter_.memory_units += 1;
      return scope_.emplace(d.name.str(), std::move(d)).first->second;
    }
    Declaration& old = it->second;
    if (old.kind != d.kind)
      fail(ErrorKind::kind_conflict,
           "conflicting kinds for '" + d.name.str() + "' (" + std::string(to_string(old.kind)) +
               " vs " + std::string(to_string(d.kind)) + ")");
    switch (d.kind) {
      case DeclKind::name_space:
        return old;
      case DeclKind::record:
        if (d.defined && old.defined)
          fail(ErrorKind::duplicate_definition, "redefinition of '" + d.name.str() + "'");
        if (d.defined) {
          old.defined = true;
          old.members = std::move(d.members);
          old.origin = d.origin;
          old.origin_module = d.origin_module;
          old.annotation.clear();
        } else if (old.annotation.empty() && !d.annotation.empty()) {
          old.annotation = d.annotation;  // a forward decl may teach us where
        }                                 // the definition lives
        return old;
      default:
        if (!old.same_structure(d))
          fail(ErrorKind::duplicate_definition,
               "conflicting redeclaration of '" + d.name.str() + "'");
        return old;
    }
  }

  // ---- demand paths ------------------------------------------------------

  void load_library(const std::string& name) {
    if (loaded_.count(name)) return;
    const LibraryArtifact* lib = nullptr;
    for (const auto& dir : {paths_.libs_dir(), paths_.syslibs_dir()}) {
      std::filesystem::path p = dir / library_file_name(name);
      std::error_code ec;
      if (std::filesystem::exists(p, ec)) {
        lib = scanner_.load(p, warnings_);
        if (lib) break;
      }
    }
    if (!lib) fail(ErrorKind::missing_library, "cannot load library '" + name + "'");
    loaded_.emplace(name, lib);
    load_order_.push_back(name);
    meter_.libraries_loaded += 1;
    if (cur_) cur_->libraries_loaded.push_back(name);
    for (auto& d : lib->payload_decls()) {
      d.origin = DeclOrigin::injected_dictionary;
      insert_decl(std::move(d), true);
    }
  }

  /// Rootmap path: identifier -> defining library -> load it -> re-look.
  const Declaration* rootmap_demand(const std::string& qname) {
    const std::string* lib = rootmap_db_.find(qname);
    if (!lib) return nullptr;
    load_library(*lib);
    return find_scope(qname);
  }

  const Declaration* materialize(const ModuleStore::Hit& hit) {
    Declaration d = store_.materialize(hit, meter_);
    // enclosing namespaces become resident synthetically: no
    // deserialization, one memory unit each as new names
    for (std::size_t depth = 1; depth < d.name.depth(); ++depth) {
      QualName ns(std::vector<std::string>(d.name.segments.begin(),
                                           d.name.segments.begin() + depth));
      if (!scope_.count(ns.str())) {
        Declaration nsd;
        nsd.kind = DeclKind::name_space;
        nsd.name = ns;
        nsd.defined = true;
        nsd.origin = hit.module == "PCH" ? DeclOrigin::pch : DeclOrigin::pcm;
        nsd.origin_module = hit.module;
        insert_decl(std::move(nsd), true);
      }
    }
    d.origin = hit.module == "PCH" ? DeclOrigin::pch : DeclOrigin::pcm;
    d.origin_module = hit.module;
    if (cur_) cur_->declarations_materialized.push_back(d.name.str());
    return &insert_decl(std::move(d), false);
  }

  void attach_module(const std::string& name) {
    for (const auto& m : store_.attach(name, meter_))
      if (cur_) cur_->modules_imported.push_back(m);
  }

  /// Mode-specific search once the scope table came up empty.
  const Declaration* demand(const std::string& qname) {
    switch (mode_) {
      case Mode::textual:
        return nullptr;
      case Mode::rootmap:
        return rootmap_demand(qname);
      case Mode::pch:
      case Mode::modules_preload: {
        if (auto hit = store_.lookup(qname)) return materialize(*hit);
        return rootmap_demand(qname);
      }
      case Mode::modules_gmi: {
        if (auto hit = store_.lookup(qname)) return materialize(*hit);
        if (gmi_)
          if (const std::string* m = gmi_->find(qname)) {
            attach_module(*m);
            if (auto hit = store_.lookup(qname)) return materialize(*hit);
          }
        return rootmap_demand(qname);
      }
    }
    return nullptr;
  }

  const Declaration* resolve_decl(const QualName& q) {
    if (const Declaration* d = find_scope(q.str())) return d;
    return demand(q.str());
  }

  /// Store-backed modes can upgrade a forward declaration that is already in
  /// scope (for example one injected by a dictionary payload) to its full
  /// definition without touching a header. Returns true when they did.
  bool store_define(const std::string& qname) {
    if (mode_ != Mode::pch && mode_ != Mode::modules_preload && mode_ != Mode::modules_gmi)
      return false;
    if (auto hit = store_.lookup(qname)) {
      materialize(*hit);
      return true;
    }
    if (mode_ == Mode::modules_gmi && gmi_) {
      if (const std::string* m = gmi_->find(qname)) {
        attach_module(*m);
        if (auto hit = store_.lookup(qname)) {
          materialize(*hit);
          return true;
        }
      }
    }
    return false;
  }

  const Declaration& require_decl(const QualName& q) {
    const Declaration* d = resolve_decl(q);
    if (!d) {
      std::string hint =
          mode_ == Mode::textual ? " (include the header that declares it)" : "";
      fail(ErrorKind::unresolved_identifier,
           "'" + q.str() + "' was not declared in this scope" + hint);
    }
    return *d;
  }

  // ---- definedness -------------------------------------------------------

  void require_type_kind(const Declaration& d) {
    if (d.kind == DeclKind::name_space)
      fail(ErrorKind::wrong_kind, "'" + d.name.str() + "' is a namespace, not a type");
    if (d.kind == DeclKind::function || d.kind == DeclKind::extern_global)
      fail(ErrorKind::wrong_kind, "'" + d.name.str() + "' does not name a type");
  }

  /// Ensures a full definition, chasing alias targets and member record
  /// types; returns the terminal record. `dref` must live in scope_.
  const Declaration* ensure_defined(const Declaration& dref, std::set<std::string>& guard) {
    const std::string qs = dref.name.str();
    if (!guard.insert(qs).second) {
      if (dref.kind == DeclKind::alias) fail(ErrorKind::alias_cycle, "alias cycle through '" + qs + "'");
      return &dref;
    }
    switch (dref.kind) {
      case DeclKind::alias: {
        if (dref.underlying == "int") return &dref;
        const Declaration& target = require_decl(QualName::parse(dref.underlying));
        if (target.kind != DeclKind::record && target.kind != DeclKind::alias)
          fail(ErrorKind::wrong_kind,
               "alias target '" + dref.underlying + "' does not name a type");
        return ensure_defined(target, guard);
      }
      case DeclKind::record: {
        bool framed = false;
        if (!dref.defined) store_define(qs);  // definitions live in the store first
        if (!dref.defined && dref.annotation.empty())
          rootmap_demand(qs);  // loading the defining library may teach us more
        if (!dref.defined && !dref.annotation.empty()) {
          depth_.push();
          framed = true;
          parse_header_textually(dref.annotation);
        }
        if (!dref.defined) {
          if (framed) depth_.pop();
          fail(ErrorKind::unresolved_identifier,
               "no definition of '" + qs + "' is available");
        }
        for (const auto& m : dref.members)
          if (m.type_ref != "int") {
            const Declaration& md = require_decl(QualName::parse(m.type_ref));
            require_type_kind(md);
            ensure_defined(md, guard);
          }
        if (framed) depth_.pop();
        return &dref;
      }
      default:
        return &dref;
    }
  }

  void parse_header_textually(const std::string& name) {
    std::vector<std::string> newly;
    headers_.parse(name, &newly);
    for (const auto& h : newly) {
      if (cur_) cur_->headers_parsed.push_back(h);
      for (const auto& d : headers_.get(h).declarations) insert_decl(d, true);
    }
  }

  // ---- values ------------------------------------------------------------

  void resolve_symbol(const Declaration& d) {
    const std::string mangled = mangle_decl(d).text;
    for (const auto& name : load_order_)
      if (loaded_.at(name)->defines(mangled)) return;
    if (mode_ == Mode::modules_preload || mode_ == Mode::modules_gmi) {
      if (auto found = scanner_.find(mangled, meter_, warnings_)) {
        load_library(found->library);
        return;
      }
    }
    fail(ErrorKind::unresolved_symbol,
         "symbol '" + d.name.str() + "' unresolved while linking");
  }

  struct Variable {
    std::string type_ref;
    bool pointer = false;
  };

  void declare_variable(const std::string& name, std::string type_ref, bool pointer) {
    auto [it, inserted] = variables_.emplace(name, Variable{std::move(type_ref), pointer});
    if (!inserted)
      fail(ErrorKind::duplicate_definition, "variable '" + name + "' already declared");
    meter_.memory_units += 1;
  }

  std::string variable_value(const Variable& v) const {
    if (v.pointer) return "(" + v.type_ref + " *) nullptr";
    if (v.type_ref == "int") return "(int) 0";
    return "(" + v.type_ref + ") {}";
  }

  // ---- statement forms ---------------------------------------------------

  void dispatch(const Statement& st, StatementResult& res) {
    switch (st.form) {
      case StatementForm::include: {
        auto it = header_to_module_.find(st.payload);
        if (it != header_to_module_.end()) {
          // the attached store covers this header; in the deferred mode the
          // include is what triggers the module import
          if (mode_ == Mode::modules_gmi) attach_module(it->second);
        } else {
          parse_header_textually(st.payload);
        }
        return;
      }
      case StatementForm::load_lib:
        load_library(st.payload);
        return;
      case StatementForm::pointer_decl: {
        if (st.target.str() != "int") {
          const Declaration* d = &require_decl(st.target);
          require_type_kind(*d);
          std::set<std::string> guard;
          while (d->kind == DeclKind::alias && d->underlying != "int") {
            if (!guard.insert(d->name.str()).second)
              fail(ErrorKind::alias_cycle, "alias cycle through '" + d->name.str() + "'");
            d = &require_decl(QualName::parse(d->underlying));
            require_type_kind(*d);
          }
        }
        declare_variable(st.variable, st.target.str(), true);
        return;
      }
      case StatementForm::value_decl: {
        if (st.target.str() != "int") {
          const Declaration& d = require_decl(st.target);
          require_type_kind(d);
          std::set<std::string> guard;
          ensure_defined(d, guard);
        }
        declare_variable(st.variable, st.target.str(), false);
        return;
      }
      case StatementForm::member_access: {
        auto vit = variables_.find(st.target.str());
        if (vit == variables_.end())
          fail(ErrorKind::unknown_identifier, "no variable named '" + st.target.str() + "'");
        const Variable& v = vit->second;
        if (v.type_ref == "int")
          fail(ErrorKind::wrong_kind,
               "variable '" + st.target.str() + "' has type int, which has no members");
        const Declaration& d = require_decl(QualName::parse(v.type_ref));
        require_type_kind(d);
        std::set<std::string> guard;
        const Declaration* rec = ensure_defined(d, guard);
        const Member* found = nullptr;
        for (const auto& m : rec->members)
          if (m.name == st.field) found = &m;
        if (!found)
          fail(ErrorKind::unknown_member,
               "no member named '" + st.field + "' in '" + rec->name.str() + "'");
        res.value = found->type_ref == "int" ? "(int) 0" : "(" + found->type_ref + ") {}";
        return;
      }
      case StatementForm::expr_use: {
        if (st.target.str() == "int")
          fail(ErrorKind::wrong_kind, "'int' is a type, not a value");
        if (st.target.depth() == 1) {
          auto vit = variables_.find(st.target.str());
          if (vit != variables_.end()) {
            res.value = variable_value(vit->second);
            return;
          }
        }
        const Declaration* d = resolve_decl(st.target);
        if (!d)
          fail(ErrorKind::unresolved_symbol,
               "symbol '" + st.target.str() + "' unresolved while linking");
        switch (d->kind) {
          case DeclKind::name_space:
            fail(ErrorKind::wrong_kind, "'" + d->name.str() + "' is a namespace, not a value");
          case DeclKind::record:
          case DeclKind::alias:
            fail(ErrorKind::wrong_kind, "'" + d->name.str() + "' is a type, not a value");
          case DeclKind::extern_global: {
            resolve_symbol(*d);
            res.value = d->underlying == "int" ? "(int) 0"
                                               : "(" + d->underlying + " *) nullptr";
            return;
          }
          case DeclKind::function: {
            resolve_symbol(*d);
            std::string params;
            for (std::size_t i = 0; i < d->params.size(); ++i)
              params += (i ? ", " : "") + d->params[i];
            res.value = "(" + d->underlying + " (*)(" + params + ")) " + d->name.str();
            return;
          }
        }
        return;
      }
    }
  }

  Mode mode_;
  CorpusPaths paths_;
  SessionOptions opts_;
  CorpusManifest manifest_;
  CostMeter meter_;
  DepthGauge depth_;
  HeaderSet headers_;
  ModuleStore store_;
  std::optional<GlobalModuleIndex> gmi_;
  RootmapDb rootmap_db_;
  SymbolScanner scanner_;
  std::map<std::string, Declaration> scope_;
  std::map<std::string, Variable> variables_;
  std::map<std::string, const LibraryArtifact*> loaded_;
  std::vector<std::string> load_order_;
  std::map<std::string, std::string> header_to_module_;
  StartupInfo startup_;
  std::vector<std::string> warnings_;
  StatementResult* cur_ = nullptr;
  std::size_t stmt_index_ = 0;
};

}  // namespace mrc
