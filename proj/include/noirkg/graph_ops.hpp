#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "noirkg/knowledge_graph.hpp"

namespace noirkg {

// Reference to a fact supporting an undirected edge.
struct FactRef {
  std::size_t fact;      // index into KnowledgeGraph::facts()
  std::size_t relation;  // index into UndirectedGraph::relations
};

struct Edge {
  std::size_t neighbor;
  std::vector<FactRef> support;  // never empty
};

// Undirected, untyped projection of a knowledge graph. Parallel facts
// between a pair collapse into one edge that keeps all of them as support,
// so relation labels stay recoverable. A fact (A, r, A) becomes a self-loop.
struct UndirectedGraph {
  std::vector<std::string> vertices;   // same order as KnowledgeGraph::entities()
  std::vector<std::string> relations;  // same order as KnowledgeGraph::relations()
  std::vector<std::vector<Edge>> adjacency;

  std::size_t size() const { return vertices.size(); }
  std::size_t degree(std::size_t v) const { return adjacency[v].size(); }
  std::size_t edge_count() const;
};

UndirectedGraph underlying_graph(const KnowledgeGraph& kg, bool include_derived);

// Facts with `who` as subject (or in either position when !subject_only).
// Entities are those of the kept facts plus `who` itself.
KnowledgeGraph character_subgraph(const KnowledgeGraph& kg, const std::string& who, bool subject_only = true);

// DOT digraph with one labeled edge per fact. With suppress_temporal,
// occurs_at facts and the time-token vertices they point to are omitted.
std::string export_dot(const KnowledgeGraph& kg, bool suppress_temporal);

// Connected components ordered by their smallest vertex index; each
// component lists its vertices ascending.
std::vector<std::vector<std::size_t>> connected_components(const UndirectedGraph& g);

}  // namespace noirkg
