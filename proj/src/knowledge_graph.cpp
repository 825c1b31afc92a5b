#include "noirkg/knowledge_graph.hpp"

#include <cstdio>
#include <sstream>

#include "noirkg/error.hpp"
#include "noirkg/text.hpp"

namespace noirkg {

namespace {

std::string triple_key(std::string_view s, std::string_view p, std::string_view o) {
  std::string key;
  key.reserve(s.size() + p.size() + o.size() + 2);
  key.append(s).push_back(' ');
  key.append(p).push_back(' ');
  key.append(o);
  return key;
}

void require_identifier(const std::string& id, const char* field) {
  if (id.empty()) throw Error(std::string("empty ") + field);
  if (!is_valid_identifier(id)) throw Error(std::string("illegal characters in ") + field + " '" + id + "'");
}

template <class T>
std::string show(const std::optional<T>& v) {
  if (!v) return "<none>";
  if constexpr (std::is_same_v<T, std::string>) {
    return *v;
  } else {
    return std::to_string(*v);
  }
}

// Fills missing annotations on `into` from `from`; reports conflicts.
template <class T>
void merge_field(std::optional<T>& into, const std::optional<T>& from, const char* name, const Fact& f,
                 std::vector<std::string>& warnings) {
  if (!from) return;
  if (!into) {
    into = from;
  } else if (*into != *from) {
    warnings.push_back("conflicting " + std::string(name) + " for (" + f.subject + ", " + f.predicate + ", " +
                       f.object + "): keeping " + show(into) + ", ignoring " + show(from));
  }
}

std::string iri(std::string_view base, std::string_view label) {
  std::string out = "<";
  out.append(base);
  if (!base.empty() && base.back() != '/' && base.back() != '#') out.push_back('/');
  out.append(label);
  out.push_back('>');
  return out;
}

}  // namespace

std::string statement_label(const Fact& fact) {
  return "stmt__" + fact.subject + "__" + fact.predicate + "__" + fact.object + "__" +
         std::to_string(fact.episode.value_or(0));
}

std::string time_token(long long episode, std::optional<long long> scene) {
  char buf[64];
  if (scene) {
    std::snprintf(buf, sizeof(buf), "E%02lld_S%02lld", episode, *scene);
  } else {
    std::snprintf(buf, sizeof(buf), "E%02lld", episode);
  }
  return buf;
}

std::optional<std::size_t> KnowledgeGraph::entity_index(std::string_view label) const {
  auto it = entity_index_.find(std::string(label));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> KnowledgeGraph::relation_index(std::string_view label) const {
  auto it = relation_index_.find(std::string(label));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> KnowledgeGraph::find_fact(std::string_view s, std::string_view p,
                                                     std::string_view o) const {
  auto it = triple_index_.find(triple_key(s, p, o));
  if (it == triple_index_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::add_entity(const std::string& label) {
  require_identifier(label, "entity");
  if (entity_index_.emplace(label, entities_.size()).second) entities_.push_back(label);
}

void KnowledgeGraph::add_relation(const std::string& label, Mode mode) {
  require_identifier(label, "relation");
  if (!ontology_.has_relation(label)) {
    if (mode == Mode::strict) throw Error("relation '" + label + "' is not declared in the ontology");
    ontology_.declare(label);
  }
  if (relation_index_.emplace(label, relations_.size()).second) relations_.push_back(label);
}

bool KnowledgeGraph::add_fact(Fact fact, Mode mode) {
  require_identifier(fact.subject, "subject");
  require_identifier(fact.predicate, "predicate");
  require_identifier(fact.object, "object");
  if (fact.revealed_by) require_identifier(*fact.revealed_by, "revealed_by");
  if (fact.episode && *fact.episode < 1) throw Error("episode must be >= 1");
  if (fact.timestamp && *fact.timestamp < 0) throw Error("timestamp must be >= 0");

  if (mode == Mode::strict && !ontology_.has_relation(fact.predicate)) {
    throw Error("relation '" + fact.predicate + "' is not declared in the ontology");
  }
  if (!fact.derived) {
    if (const auto* props = ontology_.relation(fact.predicate)) {
      auto check = [&](const std::optional<std::string>& expected, const std::string& entity, const char* role) {
        if (!expected) return;
        auto actual = ontology_.entity_type(entity);
        if (actual && *actual != *expected) {
          throw Error(std::string(role) + " violation for relation '" + fact.predicate + "': expected type " +
                      *expected + ", got " + *actual + " (" + entity + ")");
        }
      };
      check(props->domain, fact.subject, "domain");
      check(props->range, fact.object, "range");
    }
  }

  if (auto idx = find_fact(fact.subject, fact.predicate, fact.object)) {
    Fact& existing = facts_[*idx];
    if (existing.derived && !fact.derived) existing.derived = false;
    merge_field(existing.episode, fact.episode, "episode", existing, warnings_);
    merge_field(existing.timestamp, fact.timestamp, "timestamp", existing, warnings_);
    merge_field(existing.revealed_by, fact.revealed_by, "revealed_by", existing, warnings_);
    return false;
  }

  add_entity(fact.subject);
  add_entity(fact.object);
  add_relation(fact.predicate, mode);
  triple_index_.emplace(triple_key(fact.subject, fact.predicate, fact.object), facts_.size());
  facts_.push_back(std::move(fact));
  return true;
}

std::size_t KnowledgeGraph::apply_ontology_closure() {
  std::size_t added = 0;
  // facts_ grows while we scan, so consequences of derived facts are covered too.
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    const auto* props = ontology_.relation(facts_[i].predicate);
    if (!props) continue;
    std::optional<std::string> reverse;
    if (props->symmetric) {
      reverse = facts_[i].predicate;
    } else if (props->inverse) {
      reverse = *props->inverse;
    }
    if (!reverse || contains(facts_[i].object, *reverse, facts_[i].subject)) continue;
    Fact d = facts_[i];
    std::swap(d.subject, d.object);
    d.predicate = *reverse;
    d.derived = true;
    add_fact(std::move(d), Mode::permissive);
    ++added;
  }
  return added;
}

std::string KnowledgeGraph::reify(const Fact& fact, const ReifyAnnotations& annotations, Mode mode) {
  auto idx = find_fact(fact.subject, fact.predicate, fact.object);
  if (!idx) {
    throw Error("cannot reify (" + fact.subject + ", " + fact.predicate + ", " + fact.object +
                "): fact not in graph");
  }
  if (annotations.occurs_at) require_identifier(*annotations.occurs_at, "time token");
  if (annotations.revealed_by) require_identifier(*annotations.revealed_by, "revealed_by");

  const Fact stored = facts_[*idx];
  const std::string stmt = statement_label(stored);

  // Reserved relations are part of the reification vocabulary, so they are
  // registered even in strict mode.
  for (auto r : {kRdfSubject, kRdfPredicate, kRdfObject}) ontology_.declare(std::string(r));
  if (annotations.occurs_at) ontology_.declare(std::string(kOccursAt));
  if (annotations.revealed_by) ontology_.declare(std::string(kRevealedBy));

  auto link = [&](std::string_view predicate, const std::string& object) {
    Fact f;
    f.subject = stmt;
    f.predicate = std::string(predicate);
    f.object = object;
    add_fact(std::move(f), mode);
  };
  link(kRdfSubject, stored.subject);
  link(kRdfPredicate, stored.predicate);
  link(kRdfObject, stored.object);
  if (annotations.occurs_at) link(kOccursAt, *annotations.occurs_at);
  if (annotations.revealed_by) link(kRevealedBy, *annotations.revealed_by);

  reified_[triple_key(stored.subject, stored.predicate, stored.object)] = stmt;
  return stmt;
}

void KnowledgeGraph::record_reified(const Fact& fact, const std::string& statement) {
  reified_[triple_key(fact.subject, fact.predicate, fact.object)] = statement;
}

std::vector<Fact> KnowledgeGraph::query(const TriplePattern& pattern) const {
  std::vector<Fact> out;
  for (const auto& f : facts_) {
    if (pattern.subject && f.subject != *pattern.subject) continue;
    if (pattern.predicate && f.predicate != *pattern.predicate) continue;
    if (pattern.object && f.object != *pattern.object) continue;
    out.push_back(f);
  }
  return out;
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.entity_count = entities_.size();
  s.relation_count = relations_.size();
  for (const auto& f : facts_) (f.derived ? s.derived_fact_count : s.asserted_fact_count)++;
  return s;
}

Fact parse_fact_row(const std::vector<std::string>& fields) {
  if (fields.size() < 3) throw Error("expected at least 3 fields, got " + std::to_string(fields.size()));
  if (fields.size() > 6) throw Error("expected at most 6 fields, got " + std::to_string(fields.size()));

  Fact f;
  f.subject = normalize_identifier(fields[0]);
  f.predicate = normalize_identifier(fields[1]);
  f.object = normalize_identifier(fields[2]);
  require_identifier(f.subject, "subject");
  require_identifier(f.predicate, "predicate");
  require_identifier(f.object, "object");

  auto integer_field = [&](std::size_t i, const char* name, long long min) -> std::optional<long long> {
    if (fields.size() <= i || trim(fields[i]).empty()) return std::nullopt;
    auto v = parse_integer(fields[i]);
    if (!v || *v < min) {
      throw Error(std::string(name) + " must be an integer >= " + std::to_string(min) + ", got '" +
                  std::string(trim(fields[i])) + "'");
    }
    return v;
  };
  f.episode = integer_field(3, "episode", 1);
  f.timestamp = integer_field(4, "timestamp", 0);
  if (fields.size() > 5 && !trim(fields[5]).empty()) {
    f.revealed_by = normalize_identifier(fields[5]);
    require_identifier(*f.revealed_by, "revealed_by");
  }
  return f;
}

namespace {

template <class Fn>
void for_each_row(std::string_view text, Fn&& fn) {
  auto lines = split_lines(text);
  bool first = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_record(line);
    if (first) {
      first = false;
      if (trim(fields[0]) == "subject") continue;
    }
    try {
      fn(parse_fact_row(fields), i + 1);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(i + 1, e.what());
    }
  }
}

}  // namespace

std::vector<Fact> parse_facts_csv(std::string_view text) {
  std::vector<Fact> out;
  for_each_row(text, [&](Fact f, std::size_t) { out.push_back(std::move(f)); });
  return out;
}

void ingest_facts_csv(KnowledgeGraph& graph, std::string_view text, Mode mode) {
  for_each_row(text, [&](Fact f, std::size_t) { graph.add_fact(std::move(f), mode); });
}

std::string format_fact_row(const Fact& f) {
  std::string out = f.subject + "," + f.predicate + "," + f.object + ",";
  if (f.episode) out += std::to_string(*f.episode);
  out += ",";
  if (f.timestamp) out += std::to_string(*f.timestamp);
  out += ",";
  if (f.revealed_by) out += *f.revealed_by;
  return out;
}

std::string export_ntriples(const KnowledgeGraph& graph, std::string_view base_iri) {
  std::string out;
  for (const auto& f : graph.facts()) {
    out += iri(base_iri, f.subject);
    out += ' ';
    out += iri(base_iri, f.predicate);
    out += ' ';
    out += iri(base_iri, f.object);
    out += " .\n";
  }
  return out;
}

std::vector<Fact> import_ntriples(std::string_view text, std::string_view base_iri) {
  std::string prefix = iri(base_iri, "");
  prefix.pop_back();  // drop '>'
  auto lines = split_lines(text);
  std::vector<Fact> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto tok = split_whitespace(line);
    if (tok.size() != 4 || tok[3] != ".") throw ParseError(i + 1, "expected '<s> <p> <o> .'");
    std::string parts[3];
    for (int k = 0; k < 3; ++k) {
      const std::string& t = tok[k];
      if (t.size() < prefix.size() + 2 || t.compare(0, prefix.size(), prefix) != 0 || t.back() != '>') {
        throw ParseError(i + 1, "IRI outside base " + std::string(base_iri) + ": " + t);
      }
      parts[k] = t.substr(prefix.size(), t.size() - prefix.size() - 1);
      if (!is_valid_identifier(parts[k])) throw ParseError(i + 1, "illegal identifier '" + parts[k] + "'");
    }
    Fact f;
    f.subject = std::move(parts[0]);
    f.predicate = std::move(parts[1]);
    f.object = std::move(parts[2]);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace noirkg
