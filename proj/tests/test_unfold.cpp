#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowalg/error.hpp"
#include "oracles.hpp"

using namespace flowalg;

namespace {

std::size_t controls(const ProgramGraph& g) {
  return static_cast<std::size_t>(std::count_if(g.transitions.begin(), g.transitions.end(),
                                                [](const auto& kv) { return kv.second.isControl(); }));
}

bool acyclic(const ProgramGraph& g) {
  try {
    (void)topologicalOrder(g);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::map<std::string, Value> halvingInputs(const ProgramGraph& g) {
  return loadInputs(g, {{"nums", oracle::kPrograms / "data/nums.json"}});
}

}  // namespace

TEST_CASE("unfolding PageRank three times gives the straight-line DAG") {
  const ProgramGraph g = oracle::program("pagerank.flow");
  const ProgramGraph u = unfold(g, {{"loop1", 3}});
  CHECK(u.transformationCount() == 16);
  CHECK(u.transitions.size() == 16);
  CHECK(controls(u) == 0);
  CHECK(u.loops.empty());
  CHECK(acyclic(u));
  CHECK_FALSE(hasErrors(validate(u)));
  CHECK(typecheckProgram(u).ok());
  // Every copy of the body exists under its iteration index.
  for (int i = 1; i <= 3; ++i) {
    for (const char* t : {"t2", "t3", "t4", "t5", "t6"}) CHECK(u.isTransition(std::string(t) + "_" + std::to_string(i)));
  }
  // links feeds t1 and the three joins.
  CHECK(u.uses("links") == 4);
  CHECK(initialMarking(u).at("links") == 4);
  CHECK(u.places.at("ranks_n").role == PlaceRole::Output);
}

TEST_CASE("looped and unfolded PageRank agree bit for bit") {
  const ProgramGraph g = oracle::program("pagerank.flow");
  const std::map<std::string, Value> inputs{{"links", oracle::linksValue(oracle::fourNodeGraph())}};
  for (std::int64_t n : {0, 1, 2, 3, 6}) {
    ExecOptions looped;
    looped.loopOverrides = {{"loop1", n}};
    ExecOptions viaDag = looped;
    viaDag.viaUnfold = true;
    const auto a = execute(g, inputs, looped).outputs;
    const auto b = execute(g, inputs, viaDag).outputs;
    const auto c = execute(unfold(g, {{"loop1", n}}), inputs).outputs;
    INFO("n = " << n);
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("unfolding with zero iterations fuses the loop entry and exit") {
  const ProgramGraph g = oracle::program("pagerank.flow");
  const ProgramGraph u = unfold(g, {{"loop1", 0}});
  CHECK(u.transformationCount() == 1);
  CHECK_FALSE(hasErrors(validate(u)));
  CHECK(acyclic(u));
  const auto r = execute(u, {{"links", oracle::linksValue(oracle::fourNodeGraph())}});
  CHECK(r.outputs.at("ranks_n").size() == 4);
}

TEST_CASE("a zero-iteration loop reading an input gets an identity transition") {
  const ProgramGraph g = programFromJson(nlohmann::json::parse(R"({
    "datasets": [{"id": "xs", "type": "Bag<Int>", "role": "input"}, {"id": "cur"}, {"id": "ys"},
                 {"id": "out", "role": "output"}],
    "transformations": [{"id": "t1", "kind": "map", "inputs": ["cur"], "output": "ys", "params": {"f": "x -> x + 1"}}],
    "loops": [{"id": "inc", "d0": "xs", "dn": "out", "body": ["t1"], "n": 2}]})"));
  REQUIRE_FALSE(hasErrors(validate(g)));
  const ProgramGraph u = unfold(g, {{"inc", 0}});
  CHECK(u.isTransition("inc_identity"));
  CHECK_FALSE(hasErrors(validate(u)));
  const Value xs = oracle::ints({1, 5});
  CHECK(execute(u, {{"xs", xs}}).outputs.at("out") == xs);
  CHECK(execute(unfold(g), {{"xs", xs}}).outputs.at("out") == oracle::ints({3, 7}));
  CHECK(execute(g, {{"xs", xs}}).outputs.at("out") == oracle::ints({3, 7}));
}

TEST_CASE("conditional loops unfold into guarded copies") {
  const ProgramGraph g = oracle::program("halving.flow");
  const ProgramGraph u = unfold(g);
  CHECK(controls(u) == 0);
  CHECK(acyclic(u));
  CHECK_FALSE(hasErrors(validate(u)));
  CHECK(typecheckProgram(u).ok());
  // distinct + 10 copies of (guard, filter, map, select)
  CHECK(u.transformationCount() == 1 + 10 * 4);
  CHECK(u.transitions.at("shrink_guard_1").transformation().kind == TransformKind::LoopGuard);
  CHECK(u.transitions.at("shrink_select_10").transformation().kind == TransformKind::LoopSelect);

  const auto inputs = halvingInputs(g);
  const auto looped = execute(g, inputs).outputs;
  CHECK(execute(u, inputs).outputs == looped);
  for (std::int64_t n : {0, 1, 2, 3, 20}) {
    INFO("n = " << n);
    ExecOptions o;
    o.loopOverrides = {{"shrink", n}};
    const auto a = execute(g, inputs, o).outputs;
    o.viaUnfold = true;
    CHECK(execute(g, inputs, o).outputs == a);
  }
}

TEST_CASE("unfolded programs are deterministic and keep fresh ids") {
  const ProgramGraph g = oracle::program("pagerank.flow");
  CHECK(programToJson(unfold(g, {{"loop1", 2}})) == programToJson(unfold(g, {{"loop1", 2}})));
  const ProgramGraph u = unfold(g, {{"loop1", 2}});
  std::set<std::string> ids;
  for (const auto& [id, p] : u.places) CHECK(ids.insert(id).second);
  for (const auto& [id, t] : u.transitions) CHECK(ids.insert(id).second);
}

TEST_CASE("negative iteration counts are rejected") {
  const ProgramGraph g = oracle::program("pagerank.flow");
  try {
    (void)unfold(g, {{"loop1", -1}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeIterations);
  }
  ExecOptions o;
  o.loopOverrides = {{"loop1", -2}};
  try {
    (void)execute(g, {{"links", oracle::linksValue(oracle::fourNodeGraph())}}, o);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeIterations);
  }
}
