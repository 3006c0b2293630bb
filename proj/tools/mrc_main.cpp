// mrc — declaration resolution engine and benchmark harness for the
// miniature "mr" language. See README.md for the command reference.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mrc/bench.hpp"

namespace {

std::vector<mrc::Mode> parse_mode_list(const std::string& list) {
  std::vector<mrc::Mode> modes;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) modes.push_back(mrc::parse_mode(item));
  }
  if (modes.empty()) mrc::fail(mrc::ErrorKind::bad_spec, "no modes given");
  return modes;
}

std::vector<std::size_t> parse_count_list(const std::string& list) {
  std::vector<std::size_t> counts;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    counts.push_back(std::stoul(item));
  }
  if (counts.empty()) mrc::fail(mrc::ErrorKind::bad_spec, "no library counts given");
  return counts;
}

void print_warnings(const std::vector<std::string>& warnings, std::size_t& seen) {
  for (; seen < warnings.size(); ++seen) std::cerr << warnings[seen] << "\n";
}

int cmd_run(const std::string& mode_name, const std::filesystem::path& corpus,
            const std::string& trace_path, std::uint64_t attach_overhead) {
  mrc::Mode mode = mrc::parse_mode(mode_name);
  mrc::CorpusPaths paths{corpus};
  mrc::SessionOptions opts;
  opts.attach_overhead = attach_overhead;
  mrc::ResolutionSession session(mode, paths, opts);
  const std::string& script_name = mode == mrc::Mode::textual ? session.manifest().textual_script
                                                              : session.manifest().script;
  std::vector<mrc::Statement> script =
      mrc::parse_script(mrc::read_file_text(paths.root / script_name), script_name);
  mrc::RunTrace trace = session.run_script(script);
  std::size_t seen = 0;
  print_warnings(session.warnings(), seen);
  std::string text = mrc::trace_text(trace);
  if (trace_path.empty())
    std::cout << text;
  else
    mrc::write_file_text(trace_path, text);
  return trace.ok ? 0 : 1;
}

int cmd_repl(const std::string& mode_name, const std::filesystem::path& corpus,
             std::uint64_t attach_overhead) {
  mrc::Mode mode = mrc::parse_mode(mode_name);
  mrc::SessionOptions opts;
  opts.attach_overhead = attach_overhead;
  mrc::ResolutionSession session(mode, mrc::CorpusPaths{corpus}, opts);
  std::size_t seen = 0;
  print_warnings(session.warnings(), seen);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    mrc::StatementResult res = session.execute_line(line);
    print_warnings(session.warnings(), seen);
    if (!res.ok)
      std::cout << "error: " << res.error_message << "\n";
    else if (!res.value.empty())
      std::cout << res.value << "\n";
  }
  return 0;
}

int cmd_pcm_dump(const std::filesystem::path& file) {
  std::vector<std::uint8_t> bytes = mrc::read_file_bytes(file);
  mrc::PcmData pcm = mrc::read_pcm(bytes, file.filename().string());
  std::cout << mrc::dump_pcm(pcm);
  return 0;
}

int cmd_sym_index(const std::vector<std::filesystem::path>& prebuilt,
                  const std::vector<std::filesystem::path>& libpath) {
  mrc::SearchConfig cfg{prebuilt, libpath};
  std::vector<std::string> warnings;
  std::cout << mrc::describe_artifacts(cfg, warnings);
  for (const auto& w : warnings) std::cerr << w << "\n";
  return 0;
}

int cmd_sym_query(const std::string& name, const std::vector<std::filesystem::path>& prebuilt,
                  const std::vector<std::filesystem::path>& libpath) {
  if (!mrc::valid_mangled_name(name))
    mrc::fail(mrc::ErrorKind::invalid_mangled_name, "not a mangled name: '" + name + "'");
  mrc::SearchConfig cfg{prebuilt, libpath};
  mrc::SymbolScanner scanner(cfg);
  mrc::CostMeter meter;
  std::vector<std::string> warnings;
  auto found = scanner.find(name, meter, warnings);
  for (const auto& w : warnings) std::cerr << w << "\n";
  if (found) {
    std::cout << name << " -> " << std::filesystem::path(found->file).filename().string()
              << " (library " << found->library << ")\n";
  } else {
    std::cout << name << ": not found\n";
  }
  std::cout << "bloom probes: " << meter.bloom_probes
            << ", symbol table scans: " << meter.symtab_scans << "\n";
  return found ? 0 : 1;
}

int cmd_validate(const std::filesystem::path& corpus) {
  mrc::CorpusStats stats = mrc::validate_corpus(mrc::CorpusPaths{corpus});
  std::cout << "libraries: " << stats.libraries << "\n"
            << "headers: " << stats.headers << "\n"
            << "records: " << stats.records << "\n"
            << "modules: " << stats.pcm_modules << "\n"
            << "rootmaps: " << stats.rootmap_files << "\n"
            << "artifacts: " << stats.artifacts << "\n"
            << "script statements: " << stats.script_statements << "\n"
            << "textual script statements: " << stats.textual_script_statements << "\n"
            << "corpus ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrc — declaration resolution engine for the mr language"};
  app.require_subcommand(1);

  // run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run a corpus script under one mode and emit a trace");
  std::string run_mode, run_trace;
  std::filesystem::path run_corpus;
  std::uint64_t run_overhead = mrc::k_default_attach_overhead;
  run->add_option("--mode", run_mode, "textual|pch|rootmap|modules-preload|modules-gmi")
      ->required();
  run->add_option("--corpus", run_corpus, "corpus directory")->required();
  run->add_option("--trace", run_trace, "write the JSON trace here instead of stdout");
  run->add_option("--attach-overhead,--c-mod", run_overhead,
                  "fixed memory cost charged per module attach");

  // repl ---------------------------------------------------------------
  auto* repl = app.add_subcommand("repl", "interactive session; reads statements from stdin");
  std::string repl_mode;
  std::filesystem::path repl_corpus;
  std::uint64_t repl_overhead = mrc::k_default_attach_overhead;
  repl->add_option("--mode", repl_mode, "resolution mode")->required();
  repl->add_option("--corpus", repl_corpus, "corpus directory")->required();
  repl->add_option("--attach-overhead,--c-mod", repl_overhead,
                   "fixed memory cost charged per module attach");

  // pcm ----------------------------------------------------------------
  auto* pcm = app.add_subcommand("pcm", "inspect serialized module files");
  pcm->require_subcommand(1);
  auto* pcm_dump = pcm->add_subcommand("dump", "print the contents of a .pcm file");
  std::filesystem::path pcm_file;
  pcm_dump->add_option("file", pcm_file, "path to a .pcm file")->required();

  // sym ----------------------------------------------------------------
  auto* sym = app.add_subcommand("sym", "symbol search across library artifacts");
  sym->require_subcommand(1);
  std::vector<std::filesystem::path> sym_prebuilt, sym_libpath;
  auto* sym_index = sym->add_subcommand("index", "list artifacts and their symbol counts");
  sym_index->add_option("--prebuilt", sym_prebuilt, "prebuilt library directories");
  sym_index->add_option("--libpath", sym_libpath, "system library directories");
  auto* sym_query = sym->add_subcommand("query", "locate the library defining a mangled name");
  std::string sym_name;
  sym_query->add_option("name", sym_name, "mangled symbol name")->required();
  sym_query->add_option("--prebuilt", sym_prebuilt, "prebuilt library directories");
  sym_query->add_option("--libpath", sym_libpath, "system library directories");

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a corpus from a workload spec");
  std::filesystem::path gen_spec_file, gen_out;
  std::string gen_profile;
  std::size_t gen_libraries = 0, gen_records = 0, gen_statements = 0;
  double gen_pch_fraction = 0.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--spec", gen_spec_file, "workload spec file (key = value lines)");
  gen->add_option("--out", gen_out, "output corpus directory")->required();
  auto* o_profile = gen->add_option("--profile", gen_profile, "uniform|demo");
  auto* o_libraries = gen->add_option("--libraries", gen_libraries, "library count");
  auto* o_records = gen->add_option("--records-per-library", gen_records, "records per library");
  auto* o_pch = gen->add_option("--pch-fraction", gen_pch_fraction,
                                "fraction of libraries covered by the precompiled header");
  auto* o_stmts = gen->add_option("--script-statements", gen_statements, "script length");
  auto* o_seed = gen->add_option("--seed", gen_seed, "generator seed");

  // bench --------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "compare modes over a corpus");
  std::filesystem::path bench_corpus, bench_spec_file, bench_work;
  std::string bench_modes = "textual,pch,rootmap,modules-preload,modules-gmi";
  std::string bench_out, bench_counts = "1,2,5,10,20,50";
  std::string bench_baseline = "pch", bench_candidate = "modules-preload";
  std::size_t bench_reps = 1;
  std::uint64_t bench_overhead = mrc::k_default_attach_overhead;
  bool bench_crossover = false;
  bench->add_option("--corpus", bench_corpus, "existing corpus directory");
  bench->add_option("--spec", bench_spec_file, "workload spec to generate from");
  bench->add_option("--work", bench_work, "working directory for generated corpora");
  bench->add_option("--modes", bench_modes, "comma-separated mode list");
  bench->add_option("--repetitions", bench_reps, "repeat runs and verify identical traces");
  bench->add_option("--out", bench_out, "write CSV report here");
  bench->add_option("--attach-overhead,--c-mod", bench_overhead,
                    "fixed memory cost charged per module attach");
  bench->add_flag("--find-crossover", bench_crossover,
                  "scan library counts for the point where the candidate beats the baseline");
  bench->add_option("--counts", bench_counts, "library counts for --find-crossover");
  bench->add_option("--baseline", bench_baseline, "baseline mode for --find-crossover");
  bench->add_option("--candidate", bench_candidate, "candidate mode for --find-crossover");

  // validate -----------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "check a corpus for structural consistency");
  std::filesystem::path validate_corpus_dir;
  validate->add_option("--corpus", validate_corpus_dir, "corpus directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_mode, run_corpus, run_trace, run_overhead);
    if (repl->parsed()) return cmd_repl(repl_mode, repl_corpus, repl_overhead);
    if (pcm->parsed()) return cmd_pcm_dump(pcm_file);
    if (sym->parsed()) {
      if (sym_index->parsed()) return cmd_sym_index(sym_prebuilt, sym_libpath);
      return cmd_sym_query(sym_name, sym_prebuilt, sym_libpath);
    }
    if (validate->parsed()) return cmd_validate(validate_corpus_dir);

    if (gen->parsed()) {
      mrc::WorkloadSpec spec;
      if (!gen_spec_file.empty())
        spec = mrc::parse_workload_spec(mrc::read_file_text(gen_spec_file),
                                        gen_spec_file.string());
      if (*o_profile) spec.profile = gen_profile;
      if (*o_libraries) spec.libraries = gen_libraries;
      if (*o_records) spec.records_per_library = gen_records;
      if (*o_pch) spec.pch_fraction = gen_pch_fraction;
      if (*o_stmts) spec.script_statements = gen_statements;
      if (*o_seed) spec.seed = gen_seed;
      mrc::CorpusManifest manifest = mrc::gen_workload(spec, mrc::CorpusPaths{gen_out});
      std::cout << "generated " << manifest.libraries.size() << " libraries in "
                << gen_out.string() << "\n";
      return 0;
    }

    // bench
    mrc::SessionOptions opts;
    opts.attach_overhead = bench_overhead;
    if (bench_crossover) {
      if (bench_work.empty())
        mrc::fail(mrc::ErrorKind::bad_spec, "--find-crossover needs --work");
      mrc::WorkloadSpec spec;
      if (!bench_spec_file.empty())
        spec = mrc::parse_workload_spec(mrc::read_file_text(bench_spec_file),
                                        bench_spec_file.string());
      mrc::CrossoverReport report =
          mrc::find_crossover(spec, mrc::parse_mode(bench_baseline),
                              mrc::parse_mode(bench_candidate),
                              parse_count_list(bench_counts), bench_work, opts);
      std::cout << mrc::crossover_text(report);
      return 0;
    }
    mrc::CorpusPaths paths{bench_corpus};
    if (bench_corpus.empty()) {
      if (bench_work.empty())
        mrc::fail(mrc::ErrorKind::bad_spec, "bench needs --corpus, or --spec with --work");
      mrc::WorkloadSpec spec;
      if (!bench_spec_file.empty())
        spec = mrc::parse_workload_spec(mrc::read_file_text(bench_spec_file),
                                        bench_spec_file.string());
      paths.root = bench_work;
      mrc::gen_workload(spec, paths);
    }
    mrc::BenchReport report =
        mrc::run_bench(paths, parse_mode_list(bench_modes), bench_reps, opts);
    for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
    if (!report.repetitions_identical)
      std::cerr << "error: repetitions produced different traces\n";
    std::cout << mrc::table_report(report);
    if (!bench_out.empty()) mrc::write_file_text(bench_out, mrc::csv_report(report));
    bool all_ok = report.repetitions_identical;
    for (const auto& row : report.rows) all_ok = all_ok && row.ok;
    return all_ok ? 0 : 1;
  } catch (const mrc::Error& e) {
    std::cerr << "error: " << e.what() << " [" << mrc::to_string(e.kind()) << "]\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
