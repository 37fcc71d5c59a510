#include "flowalg/codec.hpp"
#include "flowalg/dataflow.hpp"
#include "flowalg/error.hpp"

namespace flowalg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InvalidProgram, where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) bad(where, std::string("missing \"") + key + "\"");
  return obj.at(key);
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) bad(where, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

void onlyKeys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      bad(where, "unexpected field \"" + k + "\"");
    }
  }
}

// The parameter naming the UDF: f for functions, p for predicates, k for keys.
const char* functionKey(TransformKind kind) {
  switch (kind) {
    case TransformKind::Map:
    case TransformKind::FlatMap:
    case TransformKind::Reduce:
    case TransformKind::ReduceByKey: return "f";
    case TransformKind::Filter:
    case TransformKind::LoopGuard: return "p";
    case TransformKind::GroupBy: return "k";
    default: return nullptr;
  }
}

FuncDef udf(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where, "function must be given as source text");
  try {
    return parseFunc(v.get<std::string>());
  } catch (const Error& e) {
    throw Error(e.kind(), where + ": " + e.what());
  }
}

PlaceRole roleFrom(const std::string& s, const std::string& where) {
  if (s == "input") return PlaceRole::Input;
  if (s == "intermediate") return PlaceRole::Intermediate;
  if (s == "output") return PlaceRole::Output;
  bad(where, "role must be input, intermediate or output, got \"" + s + "\"");
}

Transformation transformationFrom(const json& t, const std::string& where) {
  const std::string kindText = text(t, "kind", where);
  const json params = t.contains("params") ? t.at("params") : json::object();
  if (!params.is_object()) bad(where, "\"params\" must be an object");

  // max, min and sum are reduce with a fixed function.
  for (auto [name, agg] : {std::pair{"max", AggregationKind::Max}, std::pair{"min", AggregationKind::Min},
                           std::pair{"sum", AggregationKind::Sum}}) {
    if (kindText == name) {
      onlyKeys(params, {}, where);
      return Transformation::withFn(TransformKind::Reduce, aggregationFunction(agg));
    }
  }
  auto kind = kindFromName(kindText);
  if (!kind) bad(where, "unknown transformation kind \"" + kindText + "\"");
  Transformation tr = Transformation::of(*kind);
  if (const char* key = functionKey(*kind)) {
    onlyKeys(params, {key}, where);
    if (params.contains(key)) tr.fn = udf(params.at(key), where + ", parameter " + key);
  } else if (*kind == TransformKind::OrderBy || *kind == TransformKind::OrderByKey) {
    onlyKeys(params, {"desc"}, where);
    if (params.contains("desc")) {
      if (!params.at("desc").is_boolean()) bad(where, "\"desc\" must be true or false");
      tr.descending = params.at("desc").get<bool>();
    }
  } else {
    onlyKeys(params, {}, where);
  }
  return tr;
}

std::vector<std::string> idList(const json& v, const std::string& where, const char* what) {
  if (!v.is_array()) bad(where, std::string("\"") + what + "\" must be a list of ids");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) bad(where, std::string("\"") + what + "\" must be a list of ids");
    out.push_back(x.get<std::string>());
  }
  return out;
}

}  // namespace

ProgramGraph programFromJson(const json& j) {
  if (!j.is_object()) bad("program", "expected a JSON object");
  onlyKeys(j, {"name", "description", "datasets", "transformations", "loops"}, "program");
  ProgramGraph g;
  const json& datasets = field(j, "datasets", "program");
  if (!datasets.is_array()) bad("program", "\"datasets\" must be a list");
  for (const auto& d : datasets) {
    const std::string id = text(d, "id", "dataset");
    const std::string where = "dataset " + id;
    onlyKeys(d, {"id", "type", "role", "description"}, where);
    if (g.isPlace(id)) bad(where, "declared twice");
    std::optional<ElemType> type;
    if (d.contains("type")) {
      try {
        type = parseType(text(d, "type", where));
      } catch (const Error& e) {
        throw Error(e.kind(), where + ": " + e.what());
      }
    }
    const PlaceRole role = d.contains("role") ? roleFrom(text(d, "role", where), where) : PlaceRole::Intermediate;
    g.addPlace(id, role, std::move(type));
  }

  const json& transformations = field(j, "transformations", "program");
  if (!transformations.is_array()) bad("program", "\"transformations\" must be a list");
  for (const auto& t : transformations) {
    const std::string id = text(t, "id", "transformation");
    const std::string where = "transformation " + id;
    onlyKeys(t, {"id", "kind", "params", "inputs", "output", "description"}, where);
    if (g.isTransition(id)) bad(where, "declared twice");
    Transformation tr = transformationFrom(t, where);
    g.addTransformation(id, std::move(tr), idList(field(t, "inputs", where), where, "inputs"),
                        text(t, "output", where));
  }

  if (j.contains("loops")) {
    if (!j.at("loops").is_array()) bad("program", "\"loops\" must be a list");
    for (const auto& l : j.at("loops")) {
      LoopSpec loop;
      loop.id = text(l, "id", "loop");
      const std::string where = "loop " + loop.id;
      onlyKeys(l, {"id", "d0", "dn", "body", "n", "predicate", "stepIn", "stepOut", "description"}, where);
      if (g.loops.count(loop.id)) bad(where, "declared twice");
      loop.d0 = text(l, "d0", where);
      loop.dn = text(l, "dn", where);
      loop.body = idList(field(l, "body", where), where, "body");
      const json& n = field(l, "n", where);
      if (!n.is_number_integer()) bad(where, "\"n\" must be an integer");
      loop.n = n.get<std::int64_t>();
      if (l.contains("predicate")) loop.predicate = udf(l.at("predicate"), where + ", predicate");
      if (l.contains("stepIn")) loop.stepIn = text(l, "stepIn", where);
      if (l.contains("stepOut")) loop.stepOut = text(l, "stepOut", where);
      g.addLoop(std::move(loop));
    }
  }
  return g;
}

json programToJson(const ProgramGraph& g) {
  json datasets = json::array();
  for (const auto& [id, p] : g.places) {
    json d{{"id", id}, {"role", std::string(roleName(p.role))}};
    if (p.type) d["type"] = p.type->str();
    datasets.push_back(std::move(d));
  }
  json transformations = json::array();
  for (const auto& [id, t] : g.transitions) {
    if (t.isControl()) continue;
    const Transformation& tr = t.transformation();
    json params = json::object();
    if (tr.fn) params[functionKey(tr.kind) ? functionKey(tr.kind) : "f"] = print(*tr.fn);
    if (tr.kind == TransformKind::OrderBy || tr.kind == TransformKind::OrderByKey) {
      params["desc"] = tr.descending;
    }
    json inputs = json::array();
    for (const auto* e : g.inputsOf(id)) inputs.push_back(e->from);
    const Edge* out = g.outputOf(id);
    json entry{{"id", id}, {"kind", std::string(kindName(tr.kind))}, {"inputs", std::move(inputs)},
               {"output", out ? out->to : std::string()}};
    if (!params.empty()) entry["params"] = std::move(params);
    transformations.push_back(std::move(entry));
  }
  json out{{"datasets", std::move(datasets)}, {"transformations", std::move(transformations)}};
  if (!g.loops.empty()) {
    json loops = json::array();
    for (const auto& [id, l] : g.loops) {
      json entry{{"id", id},         {"d0", l.d0},           {"dn", l.dn}, {"stepIn", l.stepIn},
                 {"stepOut", l.stepOut}, {"body", l.body}, {"n", l.n}};
      if (l.predicate) entry["predicate"] = print(*l.predicate);
      loops.push_back(std::move(entry));
    }
    out["loops"] = std::move(loops);
  }
  return out;
}

ProgramGraph loadProgram(const std::filesystem::path& path) {
  const json j = readJsonFile(path);
  try {
    return programFromJson(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::map<std::string, Value> loadInputs(const ProgramGraph& g,
                                        const std::map<std::string, std::filesystem::path>& files) {
  std::map<std::string, Value> out;
  for (const auto& [place, path] : files) {
    auto it = g.places.find(place);
    if (it == g.places.end() || it->second.role != PlaceRole::Input) {
      throw Error(ErrorKind::InvalidProgram, place + " is not an input dataset of the program");
    }
    if (!it->second.type) throw Error(ErrorKind::InvalidProgram, "input " + place + " has no declared type");
    try {
      out.insert_or_assign(place, decodeDataset(readJsonFile(path), *it->second.type));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Io) throw;
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace flowalg
