#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowalg/codec.hpp"
#include "flowalg/error.hpp"
#include "oracles.hpp"

using namespace flowalg;
using oracle::strs;

namespace {

ProgramGraph fromText(const char* text) { return programFromJson(nlohmann::json::parse(text)); }

bool hasMessage(const std::vector<Diagnostic>& ds, const std::string& fragment, Diagnostic::Severity sev) {
  for (const auto& d : ds) {
    if (d.severity == sev && d.str().find(fragment) != std::string::npos) return true;
  }
  return false;
}

bool hasError(const std::vector<Diagnostic>& ds, const std::string& fragment) {
  return hasMessage(ds, fragment, Diagnostic::Severity::Error);
}

const char* kSelfJoin = R"({
  "datasets": [
    {"id": "d1", "type": "Bag<Tuple<Int,Str>>", "role": "input"},
    {"id": "d2", "role": "output"}
  ],
  "transformations": [{"id": "t1", "kind": "innerJoin", "inputs": ["d1", "d1"], "output": "d2"}]
})";

}  // namespace

TEST_CASE("the union-logs program as a Petri net") {
  const ProgramGraph g = oracle::program("union_logs.flow");
  CHECK(g.places.size() == 5);
  CHECK(g.transitions.size() == 3);
  CHECK(g.edges.size() == 7);
  const std::vector<Edge> want = {{"d1", "t1", 0}, {"d2", "t1", 1}, {"t1", "d3", 0}, {"d3", "t2", 0},
                                  {"t2", "d4", 0}, {"d4", "t3", 0}, {"t3", "d5", 0}};
  for (const auto& e : want) CHECK(std::find(g.edges.begin(), g.edges.end(), e) != g.edges.end());
  for (const auto& e : g.edges) CHECK(g.weight(e) == 1);
  CHECK(initialMarking(g) == Marking{{"d1", 1}, {"d2", 1}, {"d3", 0}, {"d4", 0}, {"d5", 0}});
  const auto diagnostics = validate(g);
  CHECK(diagnostics.empty());
}

TEST_CASE("firing moves tokens along the chain") {
  const ProgramGraph g = oracle::program("union_logs.flow");
  Marking m = initialMarking(g);
  CHECK(enabledTransitions(g, m) == std::set<std::string>{"t1"});
  m = fireTransition(g, m, "t1");
  CHECK(m.at("d1") == 0);
  CHECK(m.at("d3") == 1);
  CHECK(enabledTransitions(g, m) == std::set<std::string>{"t2"});
  try {
    (void)fireTransition(g, m, "t3");
    FAIL("t3 fired without tokens");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotEnabled);
  }
  m = fireTransition(g, fireTransition(g, m, "t2"), "t3");
  CHECK(m.at("d5") == 1);
  CHECK(enabledTransitions(g, m).empty());
}

TEST_CASE("a dataset read twice starts with two tokens") {
  const ProgramGraph g = fromText(kSelfJoin);
  CHECK(g.uses("d1") == 2);
  CHECK(initialMarking(g).at("d1") == 2);
  Marking m = fireTransition(g, initialMarking(g), "t1");
  CHECK(m.at("d1") == 0);
}

TEST_CASE("fan-out weights equal the number of readers") {
  const ProgramGraph g = oracle::program("sales.flow");
  CHECK(g.uses("orders") == 3);
  CHECK(initialMarking(g).at("orders") == 3);
  const ProgramGraph p = oracle::program("pagerank.flow");
  for (const auto& e : p.edges) {
    if (e.from == "t1") CHECK(p.weight(e) == 1);
  }
}

TEST_CASE("validation catches structural problems") {
  SUBCASE("edges between two places") {
    ProgramGraph g = oracle::program("union_logs.flow");
    g.edges.push_back({"d1", "d2", 0});
    CHECK(hasError(validate(g), "not bipartite"));
  }
  SUBCASE("a loop missing its end control") {
    ProgramGraph g = oracle::program("pagerank.flow");
    g.transitions.erase("loop1_end");
    std::erase_if(g.edges, [](const Edge& e) { return e.from == "loop1_end" || e.to == "loop1_end"; });
    CHECK(hasError(validate(g), "malformed iterative subnet"));
  }
  SUBCASE("a cycle outside a loop") {
    ProgramGraph g = fromText(R"({
      "datasets": [{"id": "a", "type": "Bag<Int>", "role": "input"}, {"id": "b"}, {"id": "c", "role": "output"}],
      "transformations": [
        {"id": "t1", "kind": "union", "inputs": ["a", "b"], "output": "b"},
        {"id": "t2", "kind": "distinct", "inputs": ["b"], "output": "c"}]})");
    CHECK(hasErrors(validate(g)));
  }
  SUBCASE("no input") {
    ProgramGraph g;
    g.addPlace("x", PlaceRole::Output);
    CHECK(hasError(validate(g), "program has no input dataset"));
  }
  SUBCASE("unused inputs and unread intermediates are only warnings") {
    ProgramGraph g = fromText(R"({
      "datasets": [{"id": "a", "type": "Bag<Int>", "role": "input"},
                   {"id": "spare", "type": "Bag<Int>", "role": "input"},
                   {"id": "dead"}, {"id": "out", "role": "output"}],
      "transformations": [
        {"id": "t1", "kind": "distinct", "inputs": ["a"], "output": "out"},
        {"id": "t2", "kind": "distinct", "inputs": ["a"], "output": "dead"}]})");
    const auto ds = validate(g);
    CHECK_FALSE(hasErrors(ds));
    CHECK(hasMessage(ds, "spare: input dataset is never used", Diagnostic::Severity::Warning));
    CHECK(hasMessage(ds, "dead: intermediate dataset is never read", Diagnostic::Severity::Warning));
    const auto r = execute(g, {{"a", oracle::ints({1, 1})}, {"spare", Value::emptyBag()}});
    CHECK(r.outputs.at("out") == oracle::ints({1}));
  }
}

TEST_CASE("unknown transformation kinds and bad functions are load errors") {
  CHECK_THROWS_AS(fromText(R"({"datasets": [], "transformations": [{"id": "t", "kind": "zip", "inputs": [], "output": "x"}]})"),
                  Error);
  CHECK_THROWS_AS(fromText(R"({"datasets": [{"id": "a", "type": "Bag<Int>", "role": "input"}, {"id": "b", "role": "output"}],
      "transformations": [{"id": "t", "kind": "map", "inputs": ["a"], "output": "b", "params": {"f": "x -> (x"}}]})"),
                  Error);
}

TEST_CASE("type inference fills in intermediate datasets") {
  ProgramGraph g = oracle::program("pagerank.flow");
  for (auto& [id, p] : g.places) {
    if (p.role != PlaceRole::Input) p.type.reset();
  }
  const auto r = typecheckProgram(g);
  CHECK(r.ok());
  CHECK(r.types.at("linksRanks") == parseType("Bag<Tuple<Str,Tuple<Bag<Str>,Float>>>"));
  CHECK(r.types.at("ranks_n") == parseType("Bag<Tuple<Str,Float>>"));
  CHECK(typecheckProgram(oracle::program("union_logs.flow")).types.at("d4") == parseType("Bag<Str>"));
}

TEST_CASE("type errors name the transformation") {
  const ProgramGraph g = fromText(R"({
    "datasets": [{"id": "a", "type": "Bag<Int>", "role": "input"}, {"id": "b", "type": "Bag<Str>", "role": "input"},
                 {"id": "c", "role": "output"}],
    "transformations": [{"id": "t1", "kind": "union", "inputs": ["a", "b"], "output": "c"}]})");
  const auto r = typecheckProgram(g);
  CHECK_FALSE(r.ok());
  CHECK(hasError(r.diagnostics, "t1"));

  ProgramGraph declared = oracle::program("union_logs.flow");
  declared.places.at("d5").type = parseType("Bag<Int>");
  CHECK_FALSE(typecheckProgram(declared).ok());

  ProgramGraph loop = oracle::program("pagerank.flow");
  loop.places.at("ranks").type.reset();
  loop.transitions.at("t6").op = Transformation::withFn(TransformKind::Map, parseFunc("rank -> rank.2"));
  CHECK(hasError(typecheckProgram(loop).diagnostics, "loop1"));
}

TEST_CASE("executing union-logs on two three-line logs") {
  const ProgramGraph g = oracle::program("union_logs.flow");
  const auto inputs = loadInputs(g, {{"d1", oracle::kPrograms / "data/logs1.json"},
                                     {"d2", oracle::kPrograms / "data/logs2.json"}});
  REQUIRE(inputs.at("d1").size() + inputs.at("d2").size() == 6);
  const ExecResult r = execute(g, inputs);
  // d3: six lines, d4: five after removing the repeated "GET /index",
  // d5: the two "host ... bytes" headers dropped.
  CHECK(r.outputs.at("d5") == strs({"GET /about", "GET /index", "POST /form"}));
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[0].find("-> d3: 6 elements") != std::string::npos);
  CHECK(r.trace[1].find("-> d4: 5 elements") != std::string::npos);
  CHECK(r.finalMarking == Marking{{"d1", 0}, {"d2", 0}, {"d3", 0}, {"d4", 0}, {"d5", 1}});
}

TEST_CASE("missing or ill-typed inputs are rejected") {
  const ProgramGraph g = oracle::program("union_logs.flow");
  CHECK_THROWS_AS(execute(g, {{"d1", strs({"a"})}}), Error);
  CHECK_THROWS_AS(execute(g, {{"d1", strs({"a"})}, {"d2", oracle::ints({1})}}), Error);
  CHECK_THROWS_AS(loadInputs(g, {{"d1", "/nonexistent/file.json"}}), Error);
}

TEST_CASE("PageRank matches a straight-line oracle") {
  const ProgramGraph g = oracle::program("pagerank.flow");
  const auto& links = oracle::fourNodeGraph();
  const ExecResult r = execute(g, {{"links", oracle::linksValue(links)}});
  const auto want = oracle::pageRank(links, 3);
  const Value& ranks = r.outputs.at("ranks_n");
  REQUIRE(ranks.size() == want.size());
  for (const auto& entry : ranks.items()) {
    CHECK(std::abs(entry[1].asFloat() - want.at(entry[0].asStr())) <= 1e-12);
  }
  for (std::int64_t n : {0, 1, 5}) {
    const ExecResult rn = execute(g, {{"links", oracle::linksValue(links)}}, ExecOptions{{}, {{"loop1", n}}, false});
    const auto wn = oracle::pageRank(links, static_cast<int>(n));
    REQUIRE(rn.outputs.at("ranks_n").size() == wn.size());
    for (const auto& entry : rn.outputs.at("ranks_n").items()) {
      CHECK(std::abs(entry[1].asFloat() - wn.at(entry[0].asStr())) <= 1e-12);
    }
  }
}

TEST_CASE("conditional loops stop when the predicate fails") {
  const ProgramGraph g = oracle::program("halving.flow");
  const auto inputs = loadInputs(g, {{"nums", oracle::kPrograms / "data/nums.json"}});
  // Plain C++: distinct, then filter/halve while more than two remain.
  std::set<std::int64_t> start;
  for (const auto& v : inputs.at("nums").items()) start.insert(v.asInt());
  std::vector<std::int64_t> cur(start.begin(), start.end());
  for (int i = 0; i < 10 && cur.size() > 2; ++i) {
    std::vector<std::int64_t> next;
    for (auto x : cur) {
      if (x > 1) next.push_back(x / 2);
    }
    cur = next;
  }
  std::vector<Value> want;
  for (auto x : cur) want.push_back(Value::integer(x));
  CHECK(execute(g, inputs).outputs.at("result") == Value::bag(want));
}

TEST_CASE("runtime errors name the transformation") {
  const ProgramGraph g = fromText(R"({
    "datasets": [{"id": "a", "type": "Bag<Int>", "role": "input"}, {"id": "b", "role": "output"}],
    "transformations": [{"id": "t9", "kind": "map", "inputs": ["a"], "output": "b", "params": {"f": "x -> 10 / x"}}]})");
  try {
    (void)execute(g, {{"a", oracle::ints({1, 0})}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivisionByZero);
    CHECK(std::string(e.what()).find("t9") != std::string::npos);
  }
}

TEST_CASE("random firing orders reach the same outputs and final marking") {
  const std::vector<std::pair<std::string, std::map<std::string, std::filesystem::path>>> programs = {
      {"union_logs.flow", {{"d1", "data/logs1.json"}, {"d2", "data/logs2.json"}}},
      {"pagerank.flow", {{"links", "data/links.json"}}},
      {"sales.flow", {{"orders", "data/orders.json"}, {"customers", "data/customers.json"}}},
      {"halving.flow", {{"nums", "data/nums.json"}}},
  };
  for (const auto& [name, files] : programs) {
    const ProgramGraph g = oracle::program(name);
    std::map<std::string, std::filesystem::path> resolved;
    for (const auto& [place, file] : files) resolved[place] = oracle::kPrograms / file;
    const auto inputs = loadInputs(g, resolved);
    const ExecResult reference = execute(g, inputs);
    std::set<std::vector<std::string>> orders;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      ExecOptions options;
      options.schedulerSeed = seed;
      const ExecResult r = execute(g, inputs, options);
      INFO(name << " seed " << seed);
      CHECK(r.outputs == reference.outputs);
      CHECK(r.finalMarking == reference.finalMarking);
      orders.insert(r.trace);
    }
    if (name == "sales.flow") CHECK(orders.size() > 1);
  }
}

TEST_CASE("DOT rendering has one node per place and transition and one arrow per edge") {
  for (const char* name : {"union_logs.flow", "pagerank.flow", "sales.flow"}) {
    const ProgramGraph g = oracle::program(name);
    const std::string dot = toDot(g);
    std::size_t circles = 0, boxes = 0, arrows = 0;
    for (std::size_t at = 0; (at = dot.find("shape=circle", at)) != std::string::npos; ++at) ++circles;
    for (std::size_t at = 0; (at = dot.find("shape=box", at)) != std::string::npos; ++at) ++boxes;
    for (std::size_t at = 0; (at = dot.find(" -> ", at)) != std::string::npos; ++at) ++arrows;
    CHECK(circles == g.places.size());
    CHECK(boxes == g.transitions.size());
    CHECK(arrows == g.edges.size());
  }
  const std::string sales = toDot(oracle::program("sales.flow"));
  CHECK(sales.find("label=\"orders\\n3\"") != std::string::npos);
  CHECK(sales.find("\"t1\" -> \"totals\";") != std::string::npos);
}

TEST_CASE("program files round-trip") {
  for (const char* name : {"union_logs.flow", "pagerank.flow", "sales.flow", "halving.flow"}) {
    const ProgramGraph g = oracle::program(name);
    const auto j = programToJson(g);
    const ProgramGraph back = programFromJson(j);
    CHECK(programToJson(back) == j);
    CHECK(back.edges.size() == g.edges.size());
    CHECK(back.loops.size() == g.loops.size());
  }
}
