#include <algorithm>

#include "flowalg/dataflow.hpp"
#include "flowalg/error.hpp"

namespace flowalg {

namespace {

class Unfolder {
 public:
  explicit Unfolder(ProgramGraph g) : g_(std::move(g)) {}

  ProgramGraph run(const std::map<std::string, std::int64_t>& overrides) {
    const auto loops = g_.loops;
    for (const auto& [id, loop] : loops) {
      auto it = overrides.find(id);
      const std::int64_t n = it != overrides.end() ? it->second : loop.n;
      if (n < 0) throw Error(ErrorKind::NegativeIterations, id + ": cannot unfold " + std::to_string(n) + " times");
      expand(loop, n);
      g_.loops.erase(id);
    }
    return std::move(g_);
  }

 private:
  std::string fresh(const std::string& base, std::int64_t i) {
    std::string id = base + "_" + std::to_string(i);
    while (g_.isPlace(id) || g_.isTransition(id)) id += "_";
    return id;
  }

  std::string fresh(const std::string& base) {
    std::string id = base;
    while (g_.isPlace(id) || g_.isTransition(id)) id += "_";
    return id;
  }

  void dropTransition(const std::string& id) {
    g_.transitions.erase(id);
    std::erase_if(g_.edges, [&](const Edge& e) { return e.from == id || e.to == id; });
  }

  void expand(const LoopSpec& loop, std::int64_t n) {
    for (const auto& c : {loop.startId(), loop.iterativeId(), loop.endId()}) dropTransition(c);

    // Remember the body before removing it.
    struct BodyTransition {
      std::string id;
      Transformation op;
      std::vector<std::string> inputs;
      std::string output;
    };
    std::vector<BodyTransition> body;
    std::vector<std::string> bodyPlaces{loop.stepIn};
    for (const auto& t : topologicalOrder(g_)) {
      if (std::find(loop.body.begin(), loop.body.end(), t) == loop.body.end()) continue;
      BodyTransition bt{t, g_.transitions.at(t).transformation(), {}, g_.outputOf(t)->to};
      for (const auto* e : g_.inputsOf(t)) bt.inputs.push_back(e->from);
      bodyPlaces.push_back(bt.output);
      body.push_back(std::move(bt));
    }
    std::map<std::string, DatasetNode> saved;
    for (const auto& p : bodyPlaces) saved.emplace(p, g_.places.at(p));
    for (const auto& t : body) dropTransition(t.id);
    for (const auto& p : bodyPlaces) g_.places.erase(p);

    if (n == 0) {
      fuse(loop);
      return;
    }
    const auto typeOfSaved = [&](const std::string& p) { return saved.at(p).type; };

    std::string entry = loop.d0;
    for (std::int64_t i = 1; i <= n; ++i) {
      std::map<std::string, std::string> rename;
      if (loop.predicate) {
        const std::string guarded = fresh(loop.stepIn, i);
        g_.addPlace(guarded, PlaceRole::Intermediate, typeOfSaved(loop.stepIn));
        g_.addTransformation(fresh(loop.id + "_guard", i),
                             Transformation::withFn(TransformKind::LoopGuard, *loop.predicate), {entry},
                             guarded);
        rename[loop.stepIn] = guarded;
      } else {
        rename[loop.stepIn] = entry;
      }
      for (const auto& p : bodyPlaces) {
        if (p == loop.stepIn) continue;
        if (!loop.predicate && p == loop.stepOut && i == n) {
          rename[p] = loop.dn;
          continue;
        }
        rename[p] = fresh(p, i);
        g_.addPlace(rename[p], PlaceRole::Intermediate, typeOfSaved(p));
      }
      for (const auto& t : body) {
        std::vector<std::string> inputs;
        for (const auto& in : t.inputs) inputs.push_back(rename.count(in) ? rename.at(in) : in);
        g_.addTransformation(fresh(t.id, i), t.op, inputs, rename.at(t.output));
      }
      std::string exit = rename.at(loop.stepOut);
      if (loop.predicate) {
        exit = i == n ? loop.dn : fresh(loop.id + "_exit", i);
        if (exit != loop.dn) g_.addPlace(exit, PlaceRole::Intermediate, typeOfSaved(loop.stepIn));
        g_.addTransformation(fresh(loop.id + "_select", i), Transformation::of(TransformKind::LoopSelect),
                             {entry, rename.at(loop.stepOut)}, exit);
      }
      entry = exit;
    }
  }

  // Zero iterations: d0 and dn denote the same dataset.
  void fuse(const LoopSpec& loop) {
    const DatasetNode& d0 = g_.places.at(loop.d0);
    const DatasetNode& dn = g_.places.at(loop.dn);
    // An output must stay terminal, so it cannot absorb a dataset that is
    // read elsewhere or bound by the caller.
    if (dn.role == PlaceRole::Output &&
        (d0.role == PlaceRole::Input || !g_.consumers(loop.d0).empty())) {
      g_.addTransformation(fresh(loop.id + "_identity"), Transformation::of(TransformKind::Identity),
                           {loop.d0}, loop.dn);
      return;
    }
    // Keep the input id (it is what data gets bound to); otherwise keep dn.
    const std::string keep = d0.role == PlaceRole::Input ? loop.d0 : loop.dn;
    const std::string drop = keep == loop.d0 ? loop.dn : loop.d0;
    for (auto& e : g_.edges) {
      if (e.from == drop) e.from = keep;
      if (e.to == drop) e.to = keep;
    }
    g_.places.erase(drop);
  }

  ProgramGraph g_;
};

}  // namespace

ProgramGraph unfold(const ProgramGraph& g, const std::map<std::string, std::int64_t>& overrides) {
  return Unfolder(g).run(overrides);
}

}  // namespace flowalg
