#include "noirkg/archive.hpp"

#include "noirkg/error.hpp"
#include "noirkg/text.hpp"

namespace noirkg {

namespace {

constexpr std::string_view kMagic = "# noirkg graph archive v1";

enum class Section { none, ontology, entities, relations, facts, reified };

}  // namespace

std::string write_archive(const KnowledgeGraph& graph) {
  std::string out(kMagic);
  out += "\n[ontology]\n";
  out += graph.ontology().to_text();
  out += "[entities]\n";
  for (const auto& e : graph.entities()) out += e + "\n";
  out += "[relations]\n";
  for (const auto& r : graph.relations()) out += r + "\n";
  out += "[facts]\n";
  for (const auto& f : graph.facts()) out += format_fact_row(f) + (f.derived ? ",1\n" : ",0\n");
  out += "[reified]\n";
  for (const auto& [key, stmt] : graph.reified()) {
    auto parts = split_whitespace(key);
    out += parts.at(0) + "," + parts.at(1) + "," + parts.at(2) + "," + stmt + "\n";
  }
  return out;
}

KnowledgeGraph read_archive(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kMagic) throw ParseError(1, "not a noirkg graph archive");

  // The ontology block must be complete before any fact is validated.
  std::string ontology_text;
  std::size_t i = 1;
  if (i < lines.size() && lines[i] == "[ontology]") ++i;
  std::size_t ontology_first = i;
  while (i < lines.size() && lines[i] != "[entities]") ontology_text += lines[i++] + "\n";
  Ontology onto;
  try {
    onto = parse_ontology(ontology_text);
  } catch (const ParseError& e) {
    throw ParseError(ontology_first + e.line(), e.what());
  }
  KnowledgeGraph graph(std::move(onto));

  Section section = Section::none;
  for (; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (line == "[entities]") {
      section = Section::entities;
      continue;
    }
    if (line == "[relations]") {
      section = Section::relations;
      continue;
    }
    if (line == "[facts]") {
      section = Section::facts;
      continue;
    }
    if (line == "[reified]") {
      section = Section::reified;
      continue;
    }
    try {
      switch (section) {
        case Section::entities:
          graph.add_entity(line);
          break;
        case Section::relations:
          graph.add_relation(line);
          break;
        case Section::facts: {
          auto fields = split_csv_record(line);
          if (fields.size() != 7) throw Error("expected 7 fields in archived fact");
          const bool derived = fields.back() == "1";
          fields.pop_back();
          Fact f = parse_fact_row(fields);
          f.derived = derived;
          graph.add_fact(std::move(f));
          break;
        }
        case Section::reified: {
          auto fields = split_csv_record(line);
          if (fields.size() != 4) throw Error("expected 4 fields in reified entry");
          Fact f;
          f.subject = fields[0];
          f.predicate = fields[1];
          f.object = fields[2];
          graph.record_reified(f, fields[3]);
          break;
        }
        default:
          throw Error("content outside of a section");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return graph;
}

}  // namespace noirkg
