#include <doctest.h>

#include "../support/fixture.hpp"
#include "noirkg/error.hpp"
#include "noirkg/graph_ops.hpp"

using namespace noirkg;

TEST_CASE("underlying graph keeps supporting facts") {
  KnowledgeGraph kg(parse_ontology("relation friend_of symmetric\n"));
  kg.add_fact({"A", "friend_of", "B"});
  kg.add_fact({"A", "knows", "B"});
  kg.add_fact({"B", "knows", "C"});
  kg.add_fact({"D", "likes", "D"});
  kg.add_entity("E");
  kg.apply_ontology_closure();

  const UndirectedGraph g = underlying_graph(kg, false);
  CHECK(g.size() == 5);
  CHECK(g.edge_count() == 3);
  CHECK(g.degree(0) == 1);
  CHECK(g.adjacency[0][0].support.size() == 2);
  CHECK(g.degree(3) == 1);  // self-loop
  CHECK(g.degree(4) == 0);

  const UndirectedGraph with_derived = underlying_graph(kg, true);
  CHECK(with_derived.adjacency[0][0].support.size() == 3);

  const auto comps = connected_components(g);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == std::vector<std::size_t>{0, 1, 2});
  CHECK(comps[1] == std::vector<std::size_t>{3});
  CHECK(comps[2] == std::vector<std::size_t>{4});
}

TEST_CASE("character subgraph") {
  KnowledgeGraph kg = test::fixture_graph();
  kg.add_fact({"Keith_Mars", "employee_of", "Sheriff_Department"});
  const KnowledgeGraph sub = character_subgraph(kg, "Keith_Mars");
  CHECK(sub.facts().size() == 1);
  CHECK(sub.entities().size() == 2);

  const KnowledgeGraph any = character_subgraph(kg, "Keith_Mars", false);
  CHECK(any.facts().size() == 3);

  const KnowledgeGraph lonely = character_subgraph(kg, "lower_class");
  CHECK(lonely.facts().empty());
  CHECK(lonely.entities() == std::vector<std::string>{"lower_class"});

  CHECK_THROWS_AS(character_subgraph(kg, "Logan_Echolls"), Error);
}

TEST_CASE("dot export") {
  KnowledgeGraph kg = test::fixture_graph();
  kg.reify(*std::find_if(kg.facts().begin(), kg.facts().end(),
                         [](const Fact& f) { return f.subject == "Weevil_Navarro"; }),
           {"E01", std::nullopt});
  const std::string full = export_dot(kg, false);
  CHECK(full.rfind("digraph knowledge_graph {", 0) == 0);
  CHECK(full.find("\"Lilly_Kane's_room\"") != std::string::npos);
  CHECK(full.find("[label=\"occurs_at\"]") != std::string::npos);
  CHECK(full.find("\"E01\"") != std::string::npos);

  const std::string quiet = export_dot(kg, true);
  CHECK(quiet.find("occurs_at") == std::string::npos);
  CHECK(quiet.find("\"E01\"") == std::string::npos);
  CHECK(quiet.find("rdf_subject") != std::string::npos);
}

TEST_CASE("identifiers that would break dot quoting are rejected") {
  KnowledgeGraph kg;
  CHECK_THROWS_AS(kg.add_fact({"a\"b", "r", "c"}), Error);
  CHECK_THROWS_AS(kg.add_fact({"a", "r", "c\\d"}), Error);
}
