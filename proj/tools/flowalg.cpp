// flowalg: command-line front end for dataflow programs.
//
//   flowalg check   PROGRAM
//   flowalg run     PROGRAM --input place=file ... [--out DIR] [--seed N] [--n loop=k] [--unfolded]
//   flowalg unfold  PROGRAM --n loop=k [--out FILE] [--dot FILE]
//   flowalg dot     PROGRAM [--out FILE]
//   flowalg mutants PROGRAM [--emit DIR]
//   flowalg mtest   PROGRAM --tests FILE [--report FILE] [--float-tol X] [--jobs N]
//
// Exit status: 0 success, 1 program diagnostics, 2 runtime or file errors.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "flowalg/codec.hpp"
#include "flowalg/dataflow.hpp"
#include "flowalg/error.hpp"
#include "flowalg/mutation.hpp"

namespace fs = std::filesystem;
using namespace flowalg;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kRuntime = 2;

// Raised after diagnostics have been printed.
struct Rejected {};

bool useColor() {
  const char* env = std::getenv("FLOWALG_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(STDOUT_FILENO) != 0;
}

std::pair<std::string, std::string> splitBinding(const std::string& text, const char* what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw CLI::ValidationError(std::string(what) + " must look like name=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::map<std::string, std::int64_t> loopCounts(const std::vector<std::string>& specs) {
  std::map<std::string, std::int64_t> out;
  for (const auto& s : specs) {
    auto [loop, n] = splitBinding(s, "--n");
    try {
      std::size_t used = 0;
      out[loop] = std::stoll(n, &used);
      if (used != n.size()) throw std::invalid_argument(n);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--n " + s + ": iteration count must be an integer");
    }
  }
  return out;
}

void printDiagnostics(const std::vector<Diagnostic>& ds, bool color) {
  for (const auto& d : ds) {
    const bool err = d.severity == Diagnostic::Severity::Error;
    if (color) std::cerr << (err ? "\x1b[31m" : "\x1b[33m");
    std::cerr << d.str();
    if (color) std::cerr << "\x1b[0m";
    std::cerr << "\n";
  }
}

// Loads, validates and type-checks; prints diagnostics and throws Rejected
// if the program has errors.
ProgramGraph loadChecked(const std::string& path, const std::map<std::string, std::int64_t>& overrides = {}) {
  ProgramGraph g;
  try {
    g = loadProgram(path);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    std::cerr << "error: " << e.what() << "\n";
    throw Rejected{};
  }
  auto diagnostics = validate(g);
  if (!hasErrors(diagnostics)) {
    auto tc = typecheckProgram(g);
    diagnostics.insert(diagnostics.end(), tc.diagnostics.begin(), tc.diagnostics.end());
  }
  for (const auto& [loop, n] : overrides) {
    if (!g.loops.count(loop)) {
      diagnostics.push_back({Diagnostic::Severity::Error, loop, "--n names a loop the program does not have"});
    }
  }
  printDiagnostics(diagnostics, useColor());
  if (hasErrors(diagnostics)) throw Rejected{};
  return g;
}

std::string summary(const ProgramGraph& g) {
  return std::to_string(g.places.size()) + " places, " + std::to_string(g.transitions.size()) +
         " transitions, " + std::to_string(g.edges.size()) + " edges";
}

int cmdCheck(const std::string& program) {
  const ProgramGraph g = loadChecked(program);
  std::cout << summary(g) << "\n";
  return kOk;
}

int cmdRun(const std::string& program, const std::vector<std::string>& inputSpecs, const std::string& outDir,
           const std::optional<std::uint64_t>& seed, const std::vector<std::string>& nSpecs, bool unfolded) {
  ExecOptions options;
  options.loopOverrides = loopCounts(nSpecs);
  options.schedulerSeed = seed;
  options.viaUnfold = unfolded;
  const ProgramGraph g = loadChecked(program, options.loopOverrides);
  std::map<std::string, fs::path> files;
  for (const auto& s : inputSpecs) {
    auto [place, file] = splitBinding(s, "--input");
    files[place] = file;
  }
  const auto inputs = loadInputs(g, files);
  const ExecResult r = execute(g, inputs, options);
  fs::create_directories(outDir);
  for (const auto& [place, value] : r.outputs) {
    const fs::path file = fs::path(outDir) / (place + ".json");
    writeTextFile(file, encodeDataset(value).dump() + "\n");
    std::cout << place << ": " << value.size() << " element(s) -> " << file.string() << "\n";
  }
  std::string trace;
  for (std::size_t i = 0; i < r.trace.size(); ++i) trace += std::to_string(i + 1) + ". " + r.trace[i] + "\n";
  writeTextFile(fs::path(outDir) / "trace.txt", trace);
  return kOk;
}

int cmdUnfold(const std::string& program, const std::vector<std::string>& nSpecs, std::string out,
              std::string dot) {
  const auto overrides = loopCounts(nSpecs);
  const ProgramGraph g = loadChecked(program, overrides);
  const ProgramGraph u = unfold(g, overrides);
  const auto diagnostics = validate(u);
  if (hasErrors(diagnostics)) {
    printDiagnostics(diagnostics, useColor());
    return kRuntime;
  }
  const fs::path stem = fs::path(program).replace_extension();
  if (out.empty()) out = stem.string() + ".unfolded.flow";
  if (dot.empty()) dot = stem.string() + ".unfolded.dot";
  writeTextFile(out, programToJson(u).dump(2) + "\n");
  writeTextFile(dot, toDot(u));
  std::cout << summary(u) << " (" << u.transformationCount() << " transformations)\n"
            << "program -> " << out << "\n"
            << "dot -> " << dot << "\n";
  return kOk;
}

int cmdDot(const std::string& program, const std::string& out) {
  const ProgramGraph g = loadChecked(program);
  if (out.empty()) {
    std::cout << toDot(g);
  } else {
    writeTextFile(out, toDot(g));
  }
  return kOk;
}

int cmdMutants(const std::string& program, const std::string& emit) {
  const ProgramGraph g = loadChecked(program);
  const auto mutants = generateMutants(g);
  if (!emit.empty()) fs::create_directories(emit);
  for (const auto& m : mutants) {
    std::cout << m.id << "  " << operatorName(m.op) << "  " << m.description
              << (isExtendedOperator(m.op) ? " [extended operator]" : "") << "\n";
    if (!emit.empty()) writeTextFile(fs::path(emit) / (m.id + ".flow"), programToJson(m.graph).dump(2) + "\n");
  }
  std::cout << mutants.size() << " mutant(s)\n";
  return kOk;
}

int cmdMtest(const std::string& program, const std::string& testsPath, const std::string& reportPath,
             double floatTol, unsigned jobs) {
  const ProgramGraph g = loadChecked(program);
  const auto tests = loadTestSuite(testsPath, g);
  AnalysisOptions options;
  options.floatTol = floatTol;
  options.jobs = jobs;
  const MutationReport report = runMutationAnalysis(g, tests, options);
  std::cout << report.table(useColor());
  if (!reportPath.empty()) {
    nlohmann::json j = report.toJson();
    j["program"] = program;
    j["tests"] = tests.size();
    writeTextFile(reportPath, j.dump(2) + "\n");
    std::cout << "report -> " << reportPath << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowalg: model, run, unfold and mutate dataflow programs"};
  app.require_subcommand(1);

  std::string program;
  auto* check = app.add_subcommand("check", "validate and type-check a program");
  check->add_option("program", program, "program file")->required();

  std::vector<std::string> inputs, nSpecs;
  std::string outDir = "out";
  std::optional<std::uint64_t> seed;
  bool unfolded = false;
  auto* run = app.add_subcommand("run", "execute a program, writing outputs and a firing trace");
  run->add_option("program", program, "program file")->required();
  run->add_option("--input,-i", inputs, "bind an input dataset: place=file");
  run->add_option("--out,-o", outDir, "output directory")->capture_default_str();
  run->add_option("--seed", seed, "fire enabled transitions in a seeded random order");
  run->add_option("--n", nSpecs, "override a loop's iteration count: loop=k");
  run->add_flag("--unfolded", unfolded, "execute the unfolded DAG instead of looping");

  std::string out, dot;
  auto* unfoldCmd = app.add_subcommand("unfold", "replace loops by copies of their body");
  unfoldCmd->add_option("program", program, "program file")->required();
  unfoldCmd->add_option("--n", nSpecs, "iteration count for a loop: loop=k");
  unfoldCmd->add_option("--out,-o", out, "unfolded program file (default: <program>.unfolded.flow)");
  unfoldCmd->add_option("--dot", dot, "DOT file (default: <program>.unfolded.dot)");

  auto* dotCmd = app.add_subcommand("dot", "render a program as Graphviz DOT");
  dotCmd->add_option("program", program, "program file")->required();
  dotCmd->add_option("--out,-o", out, "DOT file (default: standard output)");

  std::string emit;
  auto* mutantsCmd = app.add_subcommand("mutants", "list the mutants of a program");
  mutantsCmd->add_option("program", program, "program file")->required();
  mutantsCmd->add_option("--emit", emit, "write each mutant program into this directory");

  std::string testsPath, reportPath;
  double floatTol = 0.0;
  unsigned jobs = 0;
  auto* mtest = app.add_subcommand("mtest", "mutation analysis against a test suite");
  mtest->add_option("program", program, "program file")->required();
  mtest->add_option("--tests,-t", testsPath, "test-suite file")->required();
  mtest->add_option("--report,-r", reportPath, "write the JSON report here");
  mtest->add_option("--float-tol", floatTol, "absolute tolerance for float comparison")->check(CLI::NonNegativeNumber);
  mtest->add_option("--jobs,-j", jobs, "worker threads (0: one per core)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kDiagnostics;
  }

  try {
    if (*check) return cmdCheck(program);
    if (*run) return cmdRun(program, inputs, outDir, seed, nSpecs, unfolded);
    if (*unfoldCmd) return cmdUnfold(program, nSpecs, out, dot);
    if (*dotCmd) return cmdDot(program, out);
    if (*mutantsCmd) return cmdMutants(program, emit);
    if (*mtest) return cmdMtest(program, testsPath, reportPath, floatTol, jobs);
  } catch (const Rejected&) {
    return kDiagnostics;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const Error& e) {
    std::cerr << "error: " << errorKindName(e.kind()) << ": " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kDiagnostics;
}
