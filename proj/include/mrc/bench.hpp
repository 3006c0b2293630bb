#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mrc/corpus.hpp"
#include "mrc/resolver.hpp"
#include "mrc/trace.hpp"
#include "mrc/workload.hpp"

namespace mrc {

struct BenchRow {
  Mode mode = Mode::textual;
  bool ok = false;
  CostMeter startup;
  CostMeter workload;
  CostMeter total;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  bool repetitions_identical = true;
  std::vector<std::string> errors;  // one message per failed mode
};

/// Runs the corpus script under each mode `repetitions` times. The first
/// repetition supplies the numbers; later ones only verify the run is
/// reproducible (their full traces must match byte for byte).
inline BenchReport run_bench(const CorpusPaths& paths, const std::vector<Mode>& modes,
                             std::size_t repetitions = 1, const SessionOptions& opts = {}) {
  BenchReport report;
  CorpusManifest manifest = load_manifest(paths);
  for (Mode mode : modes) {
    BenchRow row;
    row.mode = mode;
    std::string first_trace;
    bool constructed = true;
    for (std::size_t rep = 0; rep < repetitions && constructed; ++rep) {
      try {
        ResolutionSession session(mode, paths, opts);
        const std::string& script_name =
            mode == Mode::textual ? manifest.textual_script : manifest.script;
        std::vector<Statement> script =
            parse_script(read_file_text(paths.root / script_name), script_name);
        RunTrace trace = session.run_script(script);
        std::string text = trace_text(trace);
        if (rep == 0) {
          first_trace = text;
          row.ok = trace.ok;
          row.startup = trace.startup.meter;
          row.total = trace.final_meter;
          row.workload = trace.final_meter.delta_since(trace.startup.meter);
          if (!trace.ok && !trace.statements.empty()) {
            const StatementResult& last = trace.statements.back();
            report.errors.push_back(std::string(to_string(mode)) + ": statement " +
                                    std::to_string(last.index) + " failed: " +
                                    last.error_message);
          }
        } else if (text != first_trace) {
          report.repetitions_identical = false;
        }
      } catch (const Error& e) {
        constructed = false;
        row.ok = false;
        report.errors.push_back(std::string(to_string(mode)) + ": " + e.what());
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

inline std::vector<std::pair<std::string, std::uint64_t>> meter_rows(const CostMeter& m) {
  return {{"cpu_units", m.cpu_units()},
          {"memory_units", m.memory_units},
          {"tokens_parsed", m.tokens_parsed},
          {"decls_deserialized", m.decls_deserialized},
          {"modules_loaded", m.modules_loaded},
          {"libraries_loaded", m.libraries_loaded},
          {"bloom_probes", m.bloom_probes},
          {"symtab_scans", m.symtab_scans}};
}

/// One row per metric and phase; a failed mode contributes only its ok row.
inline std::string csv_report(const BenchReport& report) {
  std::ostringstream out;
  out << "mode,metric,phase,value\n";
  for (const BenchRow& row : report.rows) {
    std::string mode(to_string(row.mode));
    out << mode << ",ok,," << (row.ok ? 1 : 0) << "\n";
    if (!row.ok) continue;
    const std::pair<const char*, const CostMeter*> phases[] = {
        {"startup", &row.startup}, {"workload", &row.workload}, {"total", &row.total}};
    auto names = meter_rows(row.total);
    for (std::size_t mi = 0; mi < names.size(); ++mi) {
      for (const auto& [phase, meter] : phases) {
        out << mode << "," << names[mi].first << "," << phase << ","
            << meter_rows(*meter)[mi].second << "\n";
      }
    }
  }
  return out.str();
}

inline std::string table_report(const BenchReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "mode" << std::setw(10) << "phase" << std::right
      << std::setw(10) << "cpu" << std::setw(10) << "memory" << std::setw(10) << "tokens"
      << std::setw(10) << "deser" << std::setw(9) << "modules" << std::setw(9) << "libs"
      << std::setw(9) << "bloom" << std::setw(9) << "symtab" << "\n";
  for (const BenchRow& row : report.rows) {
    if (!row.ok) {
      out << std::left << std::setw(16) << to_string(row.mode) << "failed\n";
      continue;
    }
    const std::pair<const char*, const CostMeter*> phases[] = {
        {"startup", &row.startup}, {"workload", &row.workload}, {"total", &row.total}};
    for (const auto& [phase, meter] : phases) {
      out << std::left << std::setw(16) << to_string(row.mode) << std::setw(10) << phase
          << std::right << std::setw(10) << meter->cpu_units() << std::setw(10)
          << meter->memory_units << std::setw(10) << meter->tokens_parsed << std::setw(10)
          << meter->decls_deserialized << std::setw(9) << meter->modules_loaded << std::setw(9)
          << meter->libraries_loaded << std::setw(9) << meter->bloom_probes << std::setw(9)
          << meter->symtab_scans << "\n";
    }
  }
  return out.str();
}

// ---- scaling over corpus size ---------------------------------------------

struct ScalingPoint {
  std::size_t libraries = 0;
  CostMeter startup;
  CostMeter total;
};

/// Generates one corpus per library count under `work_dir` and runs `mode`
/// over each. Corpora are regenerated from the same base spec, so points are
/// comparable and deterministic.
inline std::vector<ScalingPoint> run_scaling(WorkloadSpec base, Mode mode,
                                             const std::vector<std::size_t>& lib_counts,
                                             const std::filesystem::path& work_dir,
                                             const SessionOptions& opts = {}) {
  std::vector<ScalingPoint> points;
  for (std::size_t count : lib_counts) {
    WorkloadSpec spec = base;
    spec.libraries = count;
    CorpusPaths paths{work_dir / ("L" + std::to_string(count))};
    if (!std::filesystem::exists(paths.manifest_file())) gen_workload(spec, paths);
    CorpusManifest manifest = load_manifest(paths);
    ResolutionSession session(mode, paths, opts);
    const std::string& script_name =
        mode == Mode::textual ? manifest.textual_script : manifest.script;
    std::vector<Statement> script =
        parse_script(read_file_text(paths.root / script_name), script_name);
    RunTrace trace = session.run_script(script);
    points.push_back({count, trace.startup.meter, trace.final_meter});
  }
  return points;
}

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline AffineFit fit_affine(const std::vector<std::pair<double, double>>& pts) {
  AffineFit fit;
  if (pts.size() < 2) return fit;
  double n = double(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& [x, y] : pts) {
    double e = y - (fit.slope * x + fit.intercept);
    ss_res += e * e;
    ss_tot += (y - mean) * (y - mean);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

struct CrossoverReport {
  Mode baseline = Mode::pch;
  Mode candidate = Mode::modules_preload;
  std::vector<std::size_t> lib_counts;
  std::vector<std::uint64_t> baseline_cpu;
  std::vector<std::uint64_t> candidate_cpu;
  /// Smallest tested library count where the candidate's total cpu does not
  /// exceed the baseline's; empty when the candidate never catches up.
  std::optional<std::size_t> crossover;
};

inline CrossoverReport find_crossover(const WorkloadSpec& base, Mode baseline, Mode candidate,
                                      const std::vector<std::size_t>& lib_counts,
                                      const std::filesystem::path& work_dir,
                                      const SessionOptions& opts = {}) {
  CrossoverReport report;
  report.baseline = baseline;
  report.candidate = candidate;
  report.lib_counts = lib_counts;
  std::vector<ScalingPoint> a = run_scaling(base, baseline, lib_counts, work_dir, opts);
  std::vector<ScalingPoint> b = run_scaling(base, candidate, lib_counts, work_dir, opts);
  for (std::size_t i = 0; i < lib_counts.size(); ++i) {
    report.baseline_cpu.push_back(a[i].total.cpu_units());
    report.candidate_cpu.push_back(b[i].total.cpu_units());
    if (!report.crossover && report.candidate_cpu.back() <= report.baseline_cpu.back())
      report.crossover = lib_counts[i];
  }
  return report;
}

inline std::string crossover_text(const CrossoverReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "libraries" << std::right << std::setw(16)
      << to_string(report.baseline) << std::setw(16) << to_string(report.candidate) << "\n";
  for (std::size_t i = 0; i < report.lib_counts.size(); ++i) {
    out << std::left << std::setw(12) << report.lib_counts[i] << std::right << std::setw(16)
        << report.baseline_cpu[i] << std::setw(16) << report.candidate_cpu[i] << "\n";
  }
  if (report.crossover)
    out << "crossover: " << to_string(report.candidate) << " total cpu <= "
        << to_string(report.baseline) << " from " << *report.crossover << " libraries\n";
  else
    out << "crossover: not reached within the tested range\n";
  return out.str();
}

}  // namespace mrc
