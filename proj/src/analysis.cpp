#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include "flowalg/codec.hpp"
#include "flowalg/error.hpp"
#include "flowalg/mutation.hpp"

namespace flowalg {

using nlohmann::json;

std::string_view statusName(MutantStatus s) {
  switch (s) {
    case MutantStatus::Killed: return "killed";
    case MutantStatus::Survived: return "survived";
    case MutantStatus::ErrorKilled: return "error-killed";
  }
  return "?";
}

namespace {

Value datasetFrom(const json& j, const ElemType& type, const std::filesystem::path& baseDir) {
  if (j.is_string()) {
    const auto path = baseDir / j.get<std::string>();
    try {
      return decodeDataset(readJsonFile(path), type);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Io) throw;
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
  }
  return decodeDataset(j, type);
}

std::string clip(std::string s) {
  constexpr std::size_t kMax = 160;
  if (s.size() > kMax) s = s.substr(0, kMax) + "...";
  return s;
}

}  // namespace

std::vector<TestCase> testSuiteFromJson(const json& j, const ProgramGraph& g,
                                        const std::filesystem::path& baseDir) {
  const json& list = j.is_object() && j.contains("tests") ? j.at("tests") : j;
  if (!list.is_array()) throw Error(ErrorKind::InvalidProgram, "test suite must be a list of test cases");
  const auto types = typecheckProgram(g).types;
  std::vector<TestCase> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& t = list[i];
    TestCase tc;
    tc.id = t.contains("id") && t.at("id").is_string() ? t.at("id").get<std::string>()
                                                       : "test" + std::to_string(i + 1);
    if (!seen.insert(tc.id).second) throw Error(ErrorKind::InvalidProgram, "duplicate test id " + tc.id);
    const auto section = [&](const char* key, PlaceRole role, std::map<std::string, Value>& into) {
      if (!t.contains(key) || !t.at(key).is_object()) {
        throw Error(ErrorKind::InvalidProgram, "test " + tc.id + ": \"" + key + "\" must be an object");
      }
      for (const auto& [place, data] : t.at(key).items()) {
        auto p = g.places.find(place);
        if (p == g.places.end() || p->second.role != role) {
          throw Error(ErrorKind::InvalidProgram, "test " + tc.id + ": " + place + " is not an " +
                                                     std::string(roleName(role)) + " dataset");
        }
        auto ty = types.find(place);
        if (ty == types.end()) {
          throw Error(ErrorKind::InvalidProgram, "test " + tc.id + ": type of " + place + " is unknown");
        }
        try {
          into.insert_or_assign(place, datasetFrom(data, ty->second, baseDir));
        } catch (const Error& e) {
          throw Error(e.kind(), "test " + tc.id + ", " + place + ": " + e.what());
        }
      }
    };
    section("inputs", PlaceRole::Input, tc.inputs);
    section("expected", PlaceRole::Output, tc.expected);
    out.push_back(std::move(tc));
  }
  return out;
}

std::vector<TestCase> loadTestSuite(const std::filesystem::path& path, const ProgramGraph& g) {
  try {
    return testSuiteFromJson(readJsonFile(path), g, path.parent_path());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::optional<std::string> compareOutputs(const std::map<std::string, Value>& actual,
                                          const std::map<std::string, Value>& expected, double floatTol) {
  for (const auto& [place, want] : expected) {
    auto it = actual.find(place);
    if (it == actual.end()) return place + ": no output produced";
    const bool same = floatTol > 0 ? approxEqual(it->second, want, floatTol) : it->second == want;
    if (!same) return clip(place + ": expected " + want.str() + ", got " + it->second.str());
  }
  return std::nullopt;
}

namespace {

MutantOutcome analyse(const Mutant& m, const std::vector<TestCase>& tests, const AnalysisOptions& options) {
  MutantOutcome o{m.id, m.op, m.sites, m.description, MutantStatus::Survived, "", ""};
  for (const auto& t : tests) {
    try {
      const ExecResult r = execute(m.graph, t.inputs, options.exec);
      if (auto diff = compareOutputs(r.outputs, t.expected, options.floatTol)) {
        o.status = MutantStatus::Killed;
        o.killedBy = t.id;
        o.detail = *diff;
        return o;
      }
    } catch (const std::exception& e) {
      o.status = MutantStatus::ErrorKilled;
      o.killedBy = t.id;
      o.detail = clip(e.what());
      return o;
    }
  }
  return o;
}

}  // namespace

MutationReport runMutationAnalysis(const ProgramGraph& g, const std::vector<Mutant>& mutants,
                                   const std::vector<TestCase>& tests, const AnalysisOptions& options) {
  for (const auto& t : tests) {
    std::optional<std::string> problem;
    try {
      problem = compareOutputs(execute(g, t.inputs, options.exec).outputs, t.expected, options.floatTol);
    } catch (const Error& e) {
      problem = e.what();
    }
    if (problem) {
      throw Error(ErrorKind::BaselineFailure, "the original program fails test " + t.id + ": " + *problem);
    }
  }

  MutationReport report;
  report.outcomes.resize(mutants.size());
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, mutants.size())));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < mutants.size(); i = next++) {
      report.outcomes[i] = analyse(mutants[i], tests, options);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return report;
}

MutationReport runMutationAnalysis(const ProgramGraph& g, const std::vector<TestCase>& tests,
                                   const AnalysisOptions& options) {
  return runMutationAnalysis(g, generateMutants(g), tests, options);
}

std::size_t MutationReport::killed() const {
  return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const MutantOutcome& o) {
    return o.status != MutantStatus::Survived;
  }));
}

double MutationReport::score() const {
  return outcomes.empty() ? 0.0 : static_cast<double>(killed()) / static_cast<double>(outcomes.size());
}

std::string MutationReport::table(bool color) const {
  const auto paint = [&](MutantStatus s) {
    const std::string name(statusName(s));
    if (!color) return name;
    const char* code = s == MutantStatus::Survived ? "\x1b[31m" : (s == MutantStatus::Killed ? "\x1b[32m" : "\x1b[33m");
    return code + name + "\x1b[0m";
  };
  std::size_t idWidth = 2, opWidth = 8;
  for (const auto& o : outcomes) {
    idWidth = std::max(idWidth, o.id.size());
    opWidth = std::max(opWidth, operatorName(o.op).size());
  }
  std::ostringstream out;
  const std::size_t errors = static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [](const MutantOutcome& o) { return o.status == MutantStatus::ErrorKilled; }));
  out << "mutants: " << generated() << ", killed: " << killed() << " (" << errors
      << " by runtime errors), survived: " << generated() - killed() << ", score: " << std::fixed
      << std::setprecision(3) << score() << "\n\n";
  out << std::left << std::setw(static_cast<int>(idWidth)) << "ID" << "  " << std::setw(static_cast<int>(opWidth))
      << "OPERATOR" << "  " << std::setw(12) << "STATUS" << "  " << std::setw(8) << "TEST" << "  DESCRIPTION\n";
  for (const auto& o : outcomes) {
    const std::string status = paint(o.status);
    const int pad = 12 + static_cast<int>(status.size() - statusName(o.status).size());
    out << std::setw(static_cast<int>(idWidth)) << o.id << "  " << std::setw(static_cast<int>(opWidth))
        << operatorName(o.op) << "  " << std::setw(pad) << status << "  " << std::setw(8)
        << (o.killedBy.empty() ? "-" : o.killedBy) << "  " << o.description
        << (isExtendedOperator(o.op) ? " [extended operator]" : "") << "\n";
  }
  const bool anySurvivor = killed() < generated();
  if (anySurvivor) {
    out << "\nsurvivors (possibly equivalent, review by hand):\n";
    for (const auto& o : outcomes) {
      if (o.status != MutantStatus::Survived) continue;
      out << "  " << o.id << "  " << operatorName(o.op) << " at ";
      for (std::size_t i = 0; i < o.sites.size(); ++i) out << (i ? "+" : "") << o.sites[i];
      out << "\n";
    }
  }
  return out.str();
}

json MutationReport::toJson() const {
  json mutants = json::array();
  for (const auto& o : outcomes) {
    json m{{"id", o.id},
           {"operator", std::string(operatorName(o.op))},
           {"family", isDataflowOperator(o.op) ? "dataflow" : "transformation"},
           {"extended", isExtendedOperator(o.op)},
           {"sites", o.sites},
           {"description", o.description},
           {"status", std::string(statusName(o.status))}};
    m["killedBy"] = o.killedBy.empty() ? json(nullptr) : json(o.killedBy);
    if (!o.detail.empty()) m["detail"] = o.detail;
    mutants.push_back(std::move(m));
  }
  return json{{"generated", generated()}, {"killed", killed()}, {"score", score()}, {"mutants", std::move(mutants)}};
}

}  // namespace flowalg
