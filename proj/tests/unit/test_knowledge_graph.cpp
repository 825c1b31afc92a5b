#include <doctest.h>

#include "../support/fixture.hpp"
#include "noirkg/archive.hpp"
#include "noirkg/error.hpp"
#include "noirkg/knowledge_graph.hpp"

using namespace noirkg;

TEST_CASE("identifier normalization") {
  CHECK(normalize_identifier("  Lilly Kane  ") == "Lilly_Kane");
  CHECK(normalize_identifier("a \t b") == "a_b");
  CHECK(is_valid_identifier("Lilly_Kane's_room"));
  CHECK_FALSE(is_valid_identifier(""));
  CHECK_FALSE(is_valid_identifier("a,b"));
}

TEST_CASE("ontology parsing") {
  const Ontology o = parse_ontology(
      "# c\nrelation child_of inverse parent_of\nrelation friend_of symmetric\n"
      "relation child_of domain Character range Character\nentity Keith_Mars type Character\n");
  REQUIRE(o.relation("child_of"));
  CHECK(o.relation("child_of")->inverse == "parent_of");
  CHECK(o.relation("parent_of")->inverse == "child_of");
  CHECK(o.relation("friend_of")->symmetric);
  CHECK(o.relation("child_of")->domain == "Character");
  CHECK(o.entity_type("Keith_Mars") == "Character");
  CHECK_FALSE(o.entity_type("nobody"));

  SUBCASE("text round trip") { CHECK(parse_ontology(o.to_text()) == o); }

  SUBCASE("errors carry the line") {
    try {
      parse_ontology("relation a\nrelation b frobnicate\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  SUBCASE("self inverse means symmetric") {
    Ontology s;
    s.set_inverse("sibling_of", "sibling_of");
    CHECK(s.relation("sibling_of")->symmetric);
  }

  SUBCASE("symmetric relation cannot take a distinct inverse") {
    Ontology s;
    s.set_symmetric("friend_of");
    CHECK_THROWS_AS(s.set_inverse("friend_of", "befriended_by"), Error);
  }
}

TEST_CASE("fact rows") {
  const Fact f = parse_fact_row({"Veronica Mars", "child_of", "Keith_Mars", "1", "3", "Keith_Mars"});
  CHECK(f.subject == "Veronica_Mars");
  CHECK(f.episode == 1);
  CHECK(f.timestamp == 3);
  CHECK(f.revealed_by == "Keith_Mars");
  CHECK(format_fact_row(f) == "Veronica_Mars,child_of,Keith_Mars,1,3,Keith_Mars");

  CHECK_THROWS_AS(parse_fact_row({"a", "b"}), Error);
  CHECK_THROWS_AS(parse_fact_row({"a", "b", "c", "0"}), Error);
  CHECK_THROWS_AS(parse_fact_row({"a", "b", "c", "1", "-1"}), Error);
  CHECK_THROWS_AS(parse_fact_row({"a", "b", "c", "x"}), Error);
}

TEST_CASE("csv errors carry the line number") {
  const std::string csv = "subject,predicate,object\nA,r,B\n\n# note\nA,r\n";
  try {
    parse_facts_csv(csv);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

TEST_CASE("fixture ingest") {
  const KnowledgeGraph kg = test::fixture_graph();
  const GraphStats s = kg.stats();
  CHECK(s.asserted_fact_count == 9);
  CHECK(s.derived_fact_count == 0);
  CHECK(s.relation_count == 9);
  CHECK(s.entity_count == 15);
  CHECK(kg.contains("Veronica_Mars", "child_of", "Keith_Mars"));
  CHECK(kg.entities().front() == "Veronica_Mars");
}

TEST_CASE("strict mode rejects undeclared relations") {
  KnowledgeGraph kg(test::fixture_ontology());
  CHECK_THROWS_AS(ingest_facts_csv(kg, "A,teleports_to,B\n", Mode::strict), Error);
  KnowledgeGraph loose(test::fixture_ontology());
  ingest_facts_csv(loose, "A,teleports_to,B\n", Mode::permissive);
  CHECK(loose.ontology().has_relation("teleports_to"));
}

TEST_CASE("domain and range are enforced on typed entities") {
  Ontology o = parse_ontology("relation child_of domain Character range Character\nentity clue type Clue\n");
  KnowledgeGraph kg(o);
  CHECK_THROWS_AS(kg.add_fact({"clue", "child_of", "Keith"}), Error);
  CHECK(kg.add_fact({"Veronica", "child_of", "Keith"}));
}

TEST_CASE("duplicates merge annotations") {
  KnowledgeGraph kg;
  CHECK(kg.add_fact({"A", "r", "B"}));
  Fact again{"A", "r", "B"};
  again.episode = 4;
  CHECK_FALSE(kg.add_fact(again));
  CHECK(kg.facts().size() == 1);
  CHECK(kg.facts()[0].episode == 4);
  again.episode = 5;
  kg.add_fact(again);
  CHECK(kg.facts()[0].episode == 4);
  CHECK(kg.warnings().size() == 1);
}

TEST_CASE("closure") {
  KnowledgeGraph kg(parse_ontology("relation child_of inverse parent_of\nrelation friend_of symmetric\n"));
  kg.add_fact({"V", "child_of", "K"});
  kg.add_fact({"V", "friend_of", "W"});
  kg.add_fact({"L", "friend_of", "D"});
  kg.add_fact({"D", "friend_of", "L"});
  CHECK(kg.apply_ontology_closure() == 2);
  CHECK(kg.contains("K", "parent_of", "V"));
  CHECK(kg.contains("W", "friend_of", "V"));
  CHECK(kg.facts()[*kg.find_fact("K", "parent_of", "V")].derived);
  CHECK(kg.apply_ontology_closure() == 0);

  SUBCASE("asserting a derived fact promotes it") {
    kg.add_fact({"K", "parent_of", "V"});
    CHECK_FALSE(kg.facts()[*kg.find_fact("K", "parent_of", "V")].derived);
    CHECK(kg.stats().derived_fact_count == 1);
  }
}

TEST_CASE("reification") {
  KnowledgeGraph kg = test::fixture_graph();
  const Fact f = kg.facts()[0];
  kg.add_entity("E06");
  const auto before = kg.stats();
  const std::string stmt = kg.reify(f, {"E06", "Veronica_Mars"});
  CHECK(stmt == "stmt__Veronica_Mars__child_of__Keith_Mars__1");
  const auto after = kg.stats();
  // Predicate label becomes an entity for rdf_predicate_is.
  CHECK(after.entity_count == before.entity_count + 2);
  CHECK(after.asserted_fact_count == before.asserted_fact_count + 5);
  CHECK(kg.contains(stmt, "rdf_subject", "Veronica_Mars"));
  CHECK(kg.contains(stmt, "rdf_predicate_is", "child_of"));
  CHECK(kg.contains(stmt, "occurs_at", "E06"));
  CHECK(kg.contains(stmt, "revealed_by", "Veronica_Mars"));

  CHECK(kg.reify(f, {"E06", "Veronica_Mars"}) == stmt);
  CHECK(kg.stats() == after);

  CHECK_THROWS_AS(kg.reify({"no", "such", "fact"}, {}), Error);
  CHECK(statement_label({"a", "b", "c"}) == "stmt__a__b__c__0");
  CHECK(time_token(6) == "E06");
  CHECK(time_token(6, 3) == "E06_S03");
}

TEST_CASE("query") {
  const KnowledgeGraph kg = test::fixture_graph();
  CHECK(kg.query({}).size() == 9);
  CHECK(kg.query({"Veronica_Mars", std::nullopt, std::nullopt}).size() == 1);
  CHECK(kg.query({std::nullopt, "seen_at", std::nullopt}).front().object == "Lilly_Kane's_room");
  CHECK(kg.query({std::nullopt, std::nullopt, "Wanda_Varner"}).size() == 1);
}

TEST_CASE("archive round trip") {
  KnowledgeGraph kg = test::fixture_graph();
  kg.add_fact({"Veronica_Mars", "friend_of", "Wallace_Fennel"});
  kg.apply_ontology_closure();
  kg.reify(kg.facts()[0], {"E01", std::nullopt});
  const KnowledgeGraph back = read_archive(write_archive(kg));
  CHECK(back.ontology() == kg.ontology());
  CHECK(back.entities() == kg.entities());
  CHECK(back.relations() == kg.relations());
  CHECK(back.facts() == kg.facts());
  CHECK(back.reified() == kg.reified());
  CHECK(write_archive(back) == write_archive(kg));

  CHECK_THROWS_AS(read_archive("not an archive\n"), Error);
}

TEST_CASE("n-triples round trip") {
  const KnowledgeGraph kg = test::fixture_graph();
  const std::string nt = export_ntriples(kg, "http://x.org/kg/");
  CHECK(nt.find("<http://x.org/kg/Veronica_Mars> <http://x.org/kg/child_of> <http://x.org/kg/Keith_Mars> .") !=
        std::string::npos);
  const auto facts = import_ntriples(nt, "http://x.org/kg/");
  REQUIRE(facts.size() == kg.facts().size());
  for (std::size_t i = 0; i < facts.size(); ++i) CHECK(facts[i].same_triple(kg.facts()[i]));
  CHECK(export_ntriples(kg, "http://x.org/kg#").find("<http://x.org/kg#Keith_Mars>") != std::string::npos);
}
