#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "flowalg/expr.hpp"
#include "flowalg/transforms.hpp"
#include "flowalg/types.hpp"
#include "flowalg/value.hpp"

namespace flowalg {

enum class PlaceRole { Input, Intermediate, Output };

std::string_view roleName(PlaceRole role);

struct DatasetNode {
  std::string id;
  // Place type such as Bag<Str>. Required for inputs; inferred otherwise.
  std::optional<ElemType> type;
  PlaceRole role = PlaceRole::Intermediate;
};

enum class ControlKind { Start, Iterative, End };

std::string_view controlName(ControlKind kind);

/// Auxiliary identity transition that delimits an iterative subnet.
struct IterControl {
  ControlKind kind = ControlKind::Start;
  std::string loopId;
};

struct TransitionNode {
  std::string id;
  std::variant<Transformation, IterControl> op;

  bool isControl() const { return std::holds_alternative<IterControl>(op); }
  const Transformation& transformation() const { return std::get<Transformation>(op); }
  const IterControl& control() const { return std::get<IterControl>(op); }
};

/// Directed edge between a place and a transition. `port` orders the inputs
/// of binary transformations (0 = left, 1 = right) and is 0 otherwise.
struct Edge {
  std::string from;
  std::string to;
  int port = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// An iterative subnet: t_start moves d0 into `stepIn`, the body maps
/// `stepIn` to `stepOut`, t_iterative feeds `stepOut` back into `stepIn`,
/// t_end moves the final `stepOut` into dn.
struct LoopSpec {
  std::string id;
  std::string d0;
  std::string dn;
  std::string stepIn;
  std::string stepOut;
  std::vector<std::string> body;  // transformation transition ids
  std::int64_t n = 0;
  std::optional<FuncDef> predicate;  // present for iterateWithCondition

  std::string startId() const { return id + "_start"; }
  std::string iterativeId() const { return id + "_iterative"; }
  std::string endId() const { return id + "_end"; }
};

/// The Petri-net program P = <D u T, E> with its loops. Weights and the
/// initial marking are not stored: they follow from the edges.
struct ProgramGraph {
  std::map<std::string, DatasetNode> places;
  std::map<std::string, TransitionNode> transitions;
  std::vector<Edge> edges;
  std::map<std::string, LoopSpec> loops;

  void addPlace(std::string id, PlaceRole role, std::optional<ElemType> type = std::nullopt);
  void addTransformation(std::string id, Transformation t, const std::vector<std::string>& inputs,
                         const std::string& output);
  /// Registers the loop and generates its three control transitions.
  /// Empty stepIn/stepOut are derived from the body.
  void addLoop(LoopSpec loop);

  /// Input edges of `transition` ordered by port.
  std::vector<const Edge*> inputsOf(const std::string& transition) const;
  const Edge* outputOf(const std::string& transition) const;
  std::vector<std::string> consumers(const std::string& place) const;
  std::vector<std::string> producers(const std::string& place) const;

  /// |O(d)|: the number of times d is read. The iterative and end controls
  /// leaving a loop's stepOut are alternatives, so together they count once.
  int uses(const std::string& place) const;

  /// Tokens one firing leaves on `place`: |O(d)|, except that a terminal
  /// output gets 1 so that its completion is visible in the marking.
  int tokensProduced(const std::string& place) const;

  /// W(d,t) = 1; W(t,d) = tokensProduced(d).
  int weight(const Edge& e) const;

  /// Loop whose body contains the transition, if any.
  const LoopSpec* loopOfTransition(const std::string& transition) const;

  /// Number of transformation transitions (controls excluded).
  std::size_t transformationCount() const;
  bool isPlace(const std::string& id) const { return places.count(id) != 0; }
  bool isTransition(const std::string& id) const { return transitions.count(id) != 0; }
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string where;  // node id, or empty for whole-program problems
  std::string message;

  std::string str() const;
};

bool hasErrors(const std::vector<Diagnostic>& diagnostics);

std::vector<Diagnostic> validate(const ProgramGraph& g);

struct TypecheckResult {
  std::map<std::string, ElemType> types;  // every place that could be typed
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !hasErrors(diagnostics); }
};

TypecheckResult typecheckProgram(const ProgramGraph& g);

/// Copy of `g` with each place's type filled in from `types`.
ProgramGraph withInferredTypes(const ProgramGraph& g, const std::map<std::string, ElemType>& types);

using Marking = std::map<std::string, std::int64_t>;

Marking initialMarking(const ProgramGraph& g);
std::set<std::string> enabledTransitions(const ProgramGraph& g, const Marking& m);
Marking fireTransition(const ProgramGraph& g, const Marking& m, const std::string& transition);

/// Topologically ordered transitions, ignoring loop-back edges. Throws
/// InvalidProgram on a cycle.
std::vector<std::string> topologicalOrder(const ProgramGraph& g);

struct ExecOptions {
  // Unset: always fire the enabled unit with the smallest id.
  std::optional<std::uint64_t> schedulerSeed;
  std::map<std::string, std::int64_t> loopOverrides;
  // Run the unfolded DAG instead of driving loops through repeat.
  bool viaUnfold = false;
};

struct ExecResult {
  std::map<std::string, Value> outputs;
  std::vector<std::string> trace;
  Marking finalMarking;
};

/// Plays the token game: a loop is fired as one unit that runs its body
/// through repeat. `inputs` binds every input place.
ExecResult execute(const ProgramGraph& g, const std::map<std::string, Value>& inputs,
                   const ExecOptions& options = {});

/// Replaces every loop by n copies of its body. Iteration-indexed ids are
/// `<id>_<i>`. Conditional loops get a guard and a select per copy.
ProgramGraph unfold(const ProgramGraph& g, const std::map<std::string, std::int64_t>& overrides = {});

/// Graphviz rendering; tokens from `marking`, or M0 when omitted.
std::string toDot(const ProgramGraph& g, const std::optional<Marking>& marking = std::nullopt);

/// Program files. Loading throws Error(InvalidProgram) or SyntaxError naming
/// the offending entry; structural problems are left to validate().
ProgramGraph programFromJson(const nlohmann::json& j);
nlohmann::json programToJson(const ProgramGraph& g);
ProgramGraph loadProgram(const std::filesystem::path& path);

/// Reads dataset files for the given bindings and decodes them with the
/// declared (or inferred) place types.
std::map<std::string, Value> loadInputs(const ProgramGraph& g,
                                        const std::map<std::string, std::filesystem::path>& files);

}  // namespace flowalg
