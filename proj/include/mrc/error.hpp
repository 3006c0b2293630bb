#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mrc {

enum class ErrorKind {
  lex_error,
  parse_error,
  missing_include,
  include_cycle,
  invalid_header_name,
  duplicate_definition,
  kind_conflict,
  unknown_selection_entry,
  duplicate_selection_entry,
  empty_header_list,
  dependency_unmodularized,
  corrupt_pcm,
  corrupt_mrlib,
  corrupt_rootmap,
  duplicate_module,
  duplicate_rootmap_entry,
  absolute_source_path,
  unknown_identifier,
  invalid_mangled_name,
  missing_library,
  missing_dependency,
  unresolved_identifier,
  unresolved_symbol,
  wrong_kind,
  unknown_member,
  alias_cycle,
  io_error,
  bad_spec,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::lex_error: return "lex-error";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::missing_include: return "missing-include";
    case ErrorKind::include_cycle: return "include-cycle";
    case ErrorKind::invalid_header_name: return "invalid-header-name";
    case ErrorKind::duplicate_definition: return "duplicate-definition";
    case ErrorKind::kind_conflict: return "kind-conflict";
    case ErrorKind::unknown_selection_entry: return "unknown-selection-entry";
    case ErrorKind::duplicate_selection_entry: return "duplicate-selection-entry";
    case ErrorKind::empty_header_list: return "empty-header-list";
    case ErrorKind::dependency_unmodularized: return "dependency-on-unmodularized-header";
    case ErrorKind::corrupt_pcm: return "corrupt-pcm";
    case ErrorKind::corrupt_mrlib: return "corrupt-mrlib";
    case ErrorKind::corrupt_rootmap: return "corrupt-rootmap";
    case ErrorKind::duplicate_module: return "duplicate-module-name";
    case ErrorKind::duplicate_rootmap_entry: return "duplicate-rootmap-entry";
    case ErrorKind::absolute_source_path: return "absolute-source-path";
    case ErrorKind::unknown_identifier: return "unknown-identifier";
    case ErrorKind::invalid_mangled_name: return "invalid-mangled-name";
    case ErrorKind::missing_library: return "missing-library";
    case ErrorKind::missing_dependency: return "missing-dependency";
    case ErrorKind::unresolved_identifier: return "unresolved-identifier";
    case ErrorKind::unresolved_symbol: return "unresolved-symbol";
    case ErrorKind::wrong_kind: return "wrong-kind-for-statement";
    case ErrorKind::unknown_member: return "unknown-member";
    case ErrorKind::alias_cycle: return "alias-cycle";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::bad_spec: return "bad-spec";
  }
  return "unknown";
}

/// Every failure in the engine is reported as an Error carrying a stable
/// machine-readable kind plus a human-readable message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace mrc
