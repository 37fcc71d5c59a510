#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowalg/dataflow.hpp"

namespace flowalg {

enum class MutationOperator {
  // Dataflow level: the program's edges change.
  TransformationReplacement,
  TransformationsSwap,
  TransformationDeletion,
  // Transformation level: one site's parameters change.
  AggregationFunctionSubstitution,
  SetOperatorReplacement,
  JoinInputSwap,
  OrderFlagFlip,
  FilterPredicateSubstitution,
  MappingFunctionSubstitution,
};

std::string_view operatorName(MutationOperator op);
bool isDataflowOperator(MutationOperator op);
/// True for operators whose substitutions this library chose itself
/// (reported as "extended operator").
bool isExtendedOperator(MutationOperator op);

struct Mutant {
  std::string id;
  MutationOperator op;
  std::vector<std::string> sites;  // transition ids
  std::string description;
  ProgramGraph graph;
};

// Each generator returns only mutants that validate and type-check.
std::vector<Mutant> mutateDataflow(const ProgramGraph& g);
/// The five substitutions of a reduce/reduceByKey function f:
/// x; y; f(x, x); f(y, y); f(y, x).
std::vector<Mutant> mutateAggregation(const ProgramGraph& g, const std::string& site);
/// The two other set operators, identity of each input, swapped inputs.
std::vector<Mutant> mutateSetLike(const ProgramGraph& g, const std::string& site);
/// Filter predicates, map/flatMap identities, join input swap, order flag.
std::vector<Mutant> mutateOther(const ProgramGraph& g, const std::string& site);

/// Every mutant of the program in a fixed order: dataflow operators first,
/// then transformation operators site by site.
std::vector<Mutant> generateMutants(const ProgramGraph& g);

struct TestCase {
  std::string id;
  std::map<std::string, Value> inputs;
  std::map<std::string, Value> expected;  // a subset of the output places
};

/// Test-suite JSON: a list of {id, inputs, expected}; each dataset is an
/// inline array or a path (relative to `baseDir`) to a dataset file.
std::vector<TestCase> testSuiteFromJson(const nlohmann::json& j, const ProgramGraph& g,
                                        const std::filesystem::path& baseDir);
std::vector<TestCase> loadTestSuite(const std::filesystem::path& path, const ProgramGraph& g);

enum class MutantStatus { Killed, Survived, ErrorKilled };

std::string_view statusName(MutantStatus s);

struct MutantOutcome {
  std::string id;
  MutationOperator op;
  std::vector<std::string> sites;
  std::string description;
  MutantStatus status = MutantStatus::Survived;
  std::string killedBy;  // test id
  std::string detail;    // mismatch or error message
};

struct AnalysisOptions {
  double floatTol = 0.0;  // 0: floats must match bit for bit
  unsigned jobs = 0;      // 0: one worker per hardware thread
  ExecOptions exec;
};

struct MutationReport {
  std::vector<MutantOutcome> outcomes;  // in generation order

  std::size_t generated() const { return outcomes.size(); }
  std::size_t killed() const;  // including error-killed
  double score() const;        // killed / generated, 0 when nothing was generated

  std::string table(bool color = false) const;
  nlohmann::json toJson() const;
};

/// Compares actual outputs against a test's expectations; returns a
/// description of the first difference.
std::optional<std::string> compareOutputs(const std::map<std::string, Value>& actual,
                                          const std::map<std::string, Value>& expected,
                                          double floatTol);

/// Runs the original (BaselineFailure unless it passes every test), then
/// every mutant until one test kills it.
MutationReport runMutationAnalysis(const ProgramGraph& g, const std::vector<Mutant>& mutants,
                                   const std::vector<TestCase>& tests, const AnalysisOptions& options = {});
MutationReport runMutationAnalysis(const ProgramGraph& g, const std::vector<TestCase>& tests,
                                   const AnalysisOptions& options = {});

}  // namespace flowalg
