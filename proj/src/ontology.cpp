#include "noirkg/ontology.hpp"

#include <sstream>
#include <vector>

#include "noirkg/error.hpp"
#include "noirkg/text.hpp"

namespace noirkg {

bool Ontology::has_relation(std::string_view name) const { return relations_.find(name) != relations_.end(); }

const RelationProperties* Ontology::relation(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

void Ontology::declare(const std::string& name) { relations_.try_emplace(name); }

void Ontology::set_symmetric(const std::string& name) {
  auto& props = relations_[name];
  if (props.inverse && *props.inverse != name) {
    throw Error("relation " + name + " cannot be symmetric: already inverse of " + *props.inverse);
  }
  props.symmetric = true;
}

void Ontology::set_inverse(const std::string& name, const std::string& inverse) {
  if (name == inverse) {
    // Self-inverse is symmetry.
    set_symmetric(name);
    return;
  }
  auto& a = relations_[name];
  auto& b = relations_[inverse];
  if (a.symmetric) throw Error("relation " + name + " is symmetric and cannot have inverse " + inverse);
  if (b.symmetric) throw Error("relation " + inverse + " is symmetric and cannot have inverse " + name);
  if (b.inverse && *b.inverse != name) {
    throw Error("inverse conflict: " + inverse + " is already the inverse of " + *b.inverse);
  }
  if (a.inverse && *a.inverse != inverse) {
    // Later declaration wins; release the previous partner.
    auto old = relations_.find(*a.inverse);
    if (old != relations_.end() && old->second.inverse == name) old->second.inverse.reset();
  }
  a.inverse = inverse;
  b.inverse = name;
}

void Ontology::set_domain(const std::string& name, const std::string& type) { relations_[name].domain = type; }

void Ontology::set_range(const std::string& name, const std::string& type) { relations_[name].range = type; }

void Ontology::set_entity_type(const std::string& entity, const std::string& type) { entity_types_[entity] = type; }

std::optional<std::string> Ontology::entity_type(std::string_view entity) const {
  auto it = entity_types_.find(entity);
  if (it == entity_types_.end()) return std::nullopt;
  return it->second;
}

std::string Ontology::to_text() const {
  std::ostringstream out;
  for (const auto& [name, p] : relations_) {
    bool wrote = false;
    if (p.symmetric) {
      out << "relation " << name << " symmetric\n";
      wrote = true;
    }
    // Emit each inverse pair once, from its lexicographically smaller side.
    if (p.inverse && name < *p.inverse) {
      out << "relation " << name << " inverse " << *p.inverse << "\n";
      wrote = true;
    } else if (p.inverse) {
      wrote = true;
    }
    if (p.domain || p.range) {
      out << "relation " << name;
      if (p.domain) out << " domain " << *p.domain;
      if (p.range) out << " range " << *p.range;
      out << "\n";
      wrote = true;
    }
    if (!wrote) out << "relation " << name << "\n";
  }
  for (const auto& [entity, type] : entity_types_) out << "entity " << entity << " type " << type << "\n";
  return out.str();
}

namespace {

std::string checked_name(const std::string& token, std::size_t line, const char* what) {
  if (!is_valid_identifier(token)) throw ParseError(line, std::string("invalid ") + what + " '" + token + "'");
  return token;
}

}  // namespace

Ontology parse_ontology(std::string_view text) {
  Ontology onto;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_whitespace(line);
    if (tok.empty()) continue;

    try {
      if (tok[0] == "relation") {
        if (tok.size() < 2) throw ParseError(lineno, "relation declaration without a name");
        const std::string name = checked_name(tok[1], lineno, "relation name");
        onto.declare(name);
        std::size_t k = 2;
        if (k < tok.size() && tok[k] == "symmetric") {
          if (tok.size() != 3) throw ParseError(lineno, "unexpected tokens after 'symmetric'");
          onto.set_symmetric(name);
        } else if (k < tok.size() && tok[k] == "inverse") {
          if (tok.size() != 4) throw ParseError(lineno, "expected 'relation <name> inverse <name>'");
          onto.set_inverse(name, checked_name(tok[3], lineno, "relation name"));
        } else {
          while (k < tok.size()) {
            if (k + 1 >= tok.size()) throw ParseError(lineno, "missing type after '" + tok[k] + "'");
            if (tok[k] == "domain") {
              onto.set_domain(name, checked_name(tok[k + 1], lineno, "type"));
            } else if (tok[k] == "range") {
              onto.set_range(name, checked_name(tok[k + 1], lineno, "type"));
            } else {
              throw ParseError(lineno, "unknown relation attribute '" + tok[k] + "'");
            }
            k += 2;
          }
        }
      } else if (tok[0] == "entity") {
        if (tok.size() != 4 || tok[2] != "type") throw ParseError(lineno, "expected 'entity <name> type <Type>'");
        onto.set_entity_type(checked_name(tok[1], lineno, "entity name"), checked_name(tok[3], lineno, "type"));
      } else {
        throw ParseError(lineno, "unknown declaration '" + tok[0] + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return onto;
}

}  // namespace noirkg
