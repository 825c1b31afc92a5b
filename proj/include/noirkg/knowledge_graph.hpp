#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "noirkg/ontology.hpp"

namespace noirkg {

// One subject-predicate-object triple with optional narrative annotations.
struct Fact {
  std::string subject;
  std::string predicate;
  std::string object;
  std::optional<long long> episode;    // >= 1
  std::optional<long long> timestamp;  // scene index within the episode, >= 0
  std::optional<std::string> revealed_by;
  bool derived = false;  // produced by ontology closure rather than asserted

  bool same_triple(const Fact& o) const {
    return subject == o.subject && predicate == o.predicate && object == o.object;
  }
  bool operator==(const Fact&) const = default;
};

enum class Mode { permissive, strict };

struct TriplePattern {
  std::optional<std::string> subject;
  std::optional<std::string> predicate;
  std::optional<std::string> object;
};

struct GraphStats {
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::size_t asserted_fact_count = 0;
  std::size_t derived_fact_count = 0;

  bool operator==(const GraphStats&) const = default;
};

struct ReifyAnnotations {
  std::optional<std::string> occurs_at;  // time token, e.g. E06
  std::optional<std::string> revealed_by;
};

// Reserved vocabulary used by reification.
inline constexpr std::string_view kRdfSubject = "rdf_subject";
inline constexpr std::string_view kRdfPredicate = "rdf_predicate_is";
inline constexpr std::string_view kRdfObject = "rdf_object";
inline constexpr std::string_view kOccursAt = "occurs_at";
inline constexpr std::string_view kRevealedBy = "revealed_by";

// Label of the statement node that reifies `fact`:
// stmt__<subject>__<predicate>__<object>__<episode>, with episode 0 when absent.
std::string statement_label(const Fact& fact);

// Time token for an episode and optional scene, e.g. E06 or E06_S03.
std::string time_token(long long episode, std::optional<long long> scene = std::nullopt);

// Entities, relations and facts validated against an ontology.
//
// Entity and relation sets keep first-insertion order, and facts keep
// insertion order, so every traversal below is deterministic. The core
// triple set is deduplicated. Built by a single writer; const access is
// safe to share between threads afterwards.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(Ontology ontology) : ontology_(std::move(ontology)) {}

  const Ontology& ontology() const { return ontology_; }
  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<std::string>& relations() const { return relations_; }
  const std::vector<Fact>& facts() const { return facts_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  // Triple key ("s p o") -> statement node label.
  const std::map<std::string, std::string>& reified() const { return reified_; }

  std::optional<std::size_t> entity_index(std::string_view label) const;
  std::optional<std::size_t> relation_index(std::string_view label) const;
  std::optional<std::size_t> find_fact(std::string_view s, std::string_view p, std::string_view o) const;
  bool contains(std::string_view s, std::string_view p, std::string_view o) const {
    return find_fact(s, p, o).has_value();
  }

  void add_entity(const std::string& label);
  void add_relation(const std::string& label, Mode mode = Mode::permissive);

  // Adds a fact. Returns true when the triple is new. A duplicate triple
  // only fills annotations that are still missing; differing values are
  // kept and a warning is recorded. Asserting a triple that exists as
  // derived promotes it to asserted. Facts flagged `derived` skip the
  // domain/range check.
  bool add_fact(Fact fact, Mode mode = Mode::permissive);

  // Materializes symmetric and inverse consequences of every fact as
  // derived facts. Idempotent. Returns the number of facts added.
  std::size_t apply_ontology_closure();

  // Creates (or reuses) the statement node for an existing fact and links it
  // with rdf_subject / rdf_predicate_is / rdf_object plus the optional
  // occurs_at and revealed_by annotations. Returns the statement label.
  std::string reify(const Fact& fact, const ReifyAnnotations& annotations, Mode mode = Mode::permissive);
  void record_reified(const Fact& fact, const std::string& statement);

  std::vector<Fact> query(const TriplePattern& pattern) const;
  GraphStats stats() const;

 private:
  Ontology ontology_;
  std::vector<std::string> entities_;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  std::vector<Fact> facts_;
  std::unordered_map<std::string, std::size_t> triple_index_;
  std::map<std::string, std::string> reified_;
  std::vector<std::string> warnings_;
};

// Parses one fact CSV record: subject, predicate, object, [episode],
// [timestamp], [revealed_by]. Identifiers are normalized (trimmed, inner
// whitespace joined with '_') and validated.
Fact parse_fact_row(const std::vector<std::string>& fields);

// Parses a fact CSV document. The `subject,predicate,object,...` header is
// optional; blank lines and lines starting with '#' are skipped. Errors carry
// the 1-based line number.
std::vector<Fact> parse_facts_csv(std::string_view text);

// Adds every row of a fact CSV document to `graph`; validation errors carry
// the line number of the offending row.
void ingest_facts_csv(KnowledgeGraph& graph, std::string_view text, Mode mode = Mode::permissive);

// Fact as a CSV record (subject,predicate,object,episode,timestamp,revealed_by).
std::string format_fact_row(const Fact& fact);

std::string export_ntriples(const KnowledgeGraph& graph, std::string_view base_iri);
// Inverse of export_ntriples; every fact comes back asserted.
std::vector<Fact> import_ntriples(std::string_view text, std::string_view base_iri);

}  // namespace noirkg
