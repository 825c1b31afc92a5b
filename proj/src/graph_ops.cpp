#include "noirkg/graph_ops.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "noirkg/error.hpp"

namespace noirkg {

std::size_t UndirectedGraph::edge_count() const {
  std::size_t twice = 0, loops = 0;
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    for (const auto& e : adjacency[v]) (e.neighbor == v ? loops : twice)++;
  }
  return twice / 2 + loops;
}

UndirectedGraph underlying_graph(const KnowledgeGraph& kg, bool include_derived) {
  UndirectedGraph g;
  g.vertices = kg.entities();
  g.relations = kg.relations();
  g.adjacency.resize(g.vertices.size());

  // (u, v) -> position of v in adjacency[u]
  std::vector<std::unordered_map<std::size_t, std::size_t>> slot(g.vertices.size());
  auto link = [&](std::size_t u, std::size_t v, FactRef ref) {
    auto [it, fresh] = slot[u].try_emplace(v, g.adjacency[u].size());
    if (fresh) g.adjacency[u].push_back(Edge{v, {}});
    g.adjacency[u][it->second].support.push_back(ref);
  };

  const auto& facts = kg.facts();
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const Fact& f = facts[i];
    if (f.derived && !include_derived) continue;
    const std::size_t s = *kg.entity_index(f.subject);
    const std::size_t o = *kg.entity_index(f.object);
    const FactRef ref{i, *kg.relation_index(f.predicate)};
    link(s, o, ref);
    if (s != o) link(o, s, ref);
  }
  return g;
}

KnowledgeGraph character_subgraph(const KnowledgeGraph& kg, const std::string& who, bool subject_only) {
  if (!kg.entity_index(who)) throw Error("unknown entity '" + who + "'");
  KnowledgeGraph sub(kg.ontology());
  sub.add_entity(who);
  for (const auto& f : kg.facts()) {
    if (f.subject == who || (!subject_only && f.object == who)) sub.add_fact(f);
  }
  for (const auto& [key, stmt] : kg.reified()) {
    if (sub.entity_index(stmt)) {
      Fact k;
      std::size_t a = key.find(' '), b = key.find(' ', a + 1);
      k.subject = key.substr(0, a);
      k.predicate = key.substr(a + 1, b - a - 1);
      k.object = key.substr(b + 1);
      sub.record_reified(k, stmt);
    }
  }
  return sub;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string export_dot(const KnowledgeGraph& kg, bool suppress_temporal) {
  std::set<std::string> time_tokens;
  if (suppress_temporal) {
    for (const auto& f : kg.facts()) {
      if (f.predicate == kOccursAt) time_tokens.insert(f.object);
    }
  }
  std::string out = "digraph knowledge_graph {\n";
  for (const auto& e : kg.entities()) {
    if (time_tokens.count(e)) continue;
    out += "  " + quote(e) + ";\n";
  }
  for (const auto& f : kg.facts()) {
    if (suppress_temporal && (f.predicate == kOccursAt || time_tokens.count(f.subject) || time_tokens.count(f.object)))
      continue;
    out += "  " + quote(f.subject) + " -> " + quote(f.object) + " [label=" + quote(f.predicate) + "];\n";
  }
  out += "}\n";
  return out;
}

std::vector<std::vector<std::size_t>> connected_components(const UndirectedGraph& g) {
  std::vector<std::vector<std::size_t>> components;
  std::vector<bool> seen(g.size(), false);
  for (std::size_t root = 0; root < g.size(); ++root) {
    if (seen[root]) continue;
    std::vector<std::size_t> comp{root};
    seen[root] = true;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (const auto& e : g.adjacency[comp[head]]) {
        if (!seen[e.neighbor]) {
          seen[e.neighbor] = true;
          comp.push_back(e.neighbor);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

}  // namespace noirkg
