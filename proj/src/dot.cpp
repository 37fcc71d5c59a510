#include <algorithm>
#include <sstream>

#include "flowalg/dataflow.hpp"

namespace flowalg {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string caption(const TransitionNode& t) {
  if (t.isControl()) return "t_" + std::string(controlName(t.control().kind));
  return std::string(kindName(t.transformation().kind));
}

}  // namespace

std::string toDot(const ProgramGraph& g, const std::optional<Marking>& marking) {
  const Marking m = marking ? *marking : initialMarking(g);
  std::ostringstream out;
  out << "digraph program {\n"
      << "  rankdir=LR;\n"
      << "  node [fontname=\"Helvetica\", fontsize=11];\n";
  for (const auto& [id, p] : g.places) {
    auto it = m.find(id);
    const std::int64_t tokens = it == m.end() ? 0 : it->second;
    out << "  " << quoted(id) << " [shape=circle, label="
        << quoted(id + "\n" + std::to_string(tokens)) << "];\n";
  }
  for (const auto& [id, t] : g.transitions) {
    out << "  " << quoted(id)
        << " [shape=box, style=filled, fillcolor=black, fixedsize=true, width=0.08, height=0.6, "
           "label=\"\", xlabel="
        << quoted(id + "\n" + caption(t)) << "];\n";
  }
  std::vector<const Edge*> edges;
  for (const auto& e : g.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) {
    return std::tie(a->from, a->to, a->port) < std::tie(b->from, b->to, b->port);
  });
  for (const Edge* e : edges) {
    std::vector<std::string> attrs;
    const int w = g.weight(*e);
    if (w > 1) attrs.push_back("label=\"" + std::to_string(w) + "\"");
    auto t = g.transitions.find(e->from);
    if (t != g.transitions.end() && t->second.isControl() &&
        t->second.control().kind == ControlKind::Iterative) {
      attrs.push_back("style=dashed");
    }
    out << "  " << quoted(e->from) << " -> " << quoted(e->to);
    if (!attrs.empty()) {
      out << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) out << (i ? ", " : "") << attrs[i];
      out << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace flowalg
