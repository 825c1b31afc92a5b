#pragma once

#include <string>
#include <string_view>

#include "noirkg/knowledge_graph.hpp"

namespace noirkg {

// Self-contained line-based graph archive:
//
//   # noirkg graph archive v1
//   [ontology]
//   <ontology declarations>
//   [entities]
//   <one label per line, insertion order>
//   [relations]
//   <one label per line, insertion order>
//   [facts]
//   subject,predicate,object,episode,timestamp,revealed_by,derived
//   [reified]
//   subject,predicate,object,statement
//
// Loading an archive reproduces the graph exactly, including entity,
// relation and fact order.
std::string write_archive(const KnowledgeGraph& graph);
KnowledgeGraph read_archive(std::string_view text);

}  // namespace noirkg
