#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace noirkg {

struct RelationProperties {
  bool symmetric = false;
  std::optional<std::string> inverse;
  std::optional<std::string> domain;
  std::optional<std::string> range;

  bool operator==(const RelationProperties&) const = default;
};

// Declared relation vocabulary plus optional entity typing.
//
// Inverse pairing is kept involutive: declaring `a inverse b` also records
// `b inverse a`, and a relation is never both symmetric and paired with a
// distinct inverse.
class Ontology {
 public:
  bool has_relation(std::string_view name) const;
  const RelationProperties* relation(std::string_view name) const;
  const std::map<std::string, RelationProperties, std::less<>>& relations() const { return relations_; }

  // Registers `name` with default properties if absent.
  void declare(const std::string& name);
  void set_symmetric(const std::string& name);
  void set_inverse(const std::string& name, const std::string& inverse);
  void set_domain(const std::string& name, const std::string& type);
  void set_range(const std::string& name, const std::string& type);

  void set_entity_type(const std::string& entity, const std::string& type);
  std::optional<std::string> entity_type(std::string_view entity) const;
  const std::map<std::string, std::string, std::less<>>& entity_types() const { return entity_types_; }

  bool empty() const { return relations_.empty() && entity_types_.empty(); }

  // Re-parseable declaration text, one line per declaration, sorted by name.
  std::string to_text() const;

  bool operator==(const Ontology&) const = default;

 private:
  std::map<std::string, RelationProperties, std::less<>> relations_;
  std::map<std::string, std::string, std::less<>> entity_types_;
};

// Parses the line-based ontology format:
//
//   # comment
//   relation <name>
//   relation <name> symmetric
//   relation <name> inverse <name>
//   relation <name> domain <Type> range <Type>
//   entity <name> type <Type>
//
// Repeated declarations merge; later lines win per field. Throws ParseError
// naming the offending line.
Ontology parse_ontology(std::string_view text);

}  // namespace noirkg
