#pragma once

#include <string>

#include "noirkg/knowledge_graph.hpp"
#include "noirkg/text.hpp"

namespace noirkg::test {

inline std::string fixture_path(const std::string& name) { return std::string(NOIRKG_FIXTURE_DIR) + "/" + name; }

inline Ontology fixture_ontology() { return parse_ontology(read_file(fixture_path("ontology.txt"))); }

inline KnowledgeGraph fixture_graph() {
  KnowledgeGraph kg(fixture_ontology());
  ingest_facts_csv(kg, read_file(fixture_path("facts.csv")));
  return kg;
}

}  // namespace noirkg::test
