#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "noirkg/archive.hpp"
#include "noirkg/embedding.hpp"
#include "noirkg/error.hpp"
#include "noirkg/graph_ops.hpp"
#include "noirkg/knowledge_graph.hpp"
#include "noirkg/linkpred.hpp"
#include "noirkg/text.hpp"
#include "noirkg/topics.hpp"
#include "noirkg/tsne.hpp"

namespace noirkg::cli {

namespace {

constexpr const char* kDefaultBase = "http://example.org/noirkg/";

// Comment line recording tool version, subcommand and every parameter.
std::string header(const std::string& command, const std::vector<std::pair<std::string, std::string>>& params) {
  std::string h = std::string("# noirkg ") + NOIRKG_VERSION + " " + command;
  for (const auto& [k, v] : params) h += " " + k + "=" + v;
  return h + "\n";
}

std::string read_input(const std::string& path) {
  try {
    return read_file(path);
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()));
  }
}

// Rethrows parse failures with the file name in front.
template <class Fn>
auto with_file(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

KnowledgeGraph load_graph(const std::string& path) {
  const std::string text = read_input(path);
  return with_file(path, [&] { return read_archive(text); });
}

EmbeddingModel load_model(const std::string& path) {
  const std::string text = read_input(path);
  return with_file(path, [&] { return parse_embedding_csv(text); });
}

KnowledgeGraph build_graph(const std::string& facts_path, const std::string& ontology_path, Mode mode) {
  Ontology onto;
  if (!ontology_path.empty()) {
    const std::string text = read_input(ontology_path);
    onto = with_file(ontology_path, [&] { return parse_ontology(text); });
  }
  KnowledgeGraph kg(std::move(onto));
  const std::string text = read_input(facts_path);
  with_file(facts_path, [&] {
    ingest_facts_csv(kg, text, mode);
    return 0;
  });
  return kg;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file(path, content);
  }
}

std::string format_stats(const GraphStats& s) {
  return "entities," + std::to_string(s.entity_count) + "\nrelations," + std::to_string(s.relation_count) +
         "\nasserted_facts," + std::to_string(s.asserted_fact_count) + "\nderived_facts," +
         std::to_string(s.derived_fact_count) + "\n";
}

std::string format_facts(const std::vector<Fact>& facts) {
  std::string out = "subject,predicate,object,episode,timestamp,revealed_by,derived\n";
  for (const auto& f : facts) out += format_fact_row(f) + (f.derived ? ",1\n" : ",0\n");
  return out;
}

// Training flags shared by `embed` and `eval`. Precedence: defaults, then
// the --config file, then flags given on the command line.
struct TrainFlags {
  std::size_t dim = 200;
  std::string config_path;
  int epochs = 0;
  double learning_rate = 0;
  double margin = 0;
  int batch_size = 0;
  int negatives = 0;
  std::uint64_t seed = 0;
  std::string loss;
  bool include_derived = false;
  std::vector<std::pair<CLI::Option*, std::function<void(TrainConfig&)>>> apply;

  void attach(CLI::App* app) {
    app->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
    app->add_option("--config", config_path, "key=value training config file");
    TrainConfig d;
    auto add = [&](CLI::Option* o, std::function<void(TrainConfig&)> fn) { apply.emplace_back(o, std::move(fn)); };
    add(app->add_option("--epochs", epochs, "Training epochs (default " + std::to_string(d.epochs) + ")"),
        [this](TrainConfig& c) { c.epochs = epochs; });
    add(app->add_option("--lr", learning_rate, "Learning rate (default " + format_double(d.learning_rate) + ")"),
        [this](TrainConfig& c) { c.learning_rate = learning_rate; });
    add(app->add_option("--margin", margin, "Hinge margin (default " + format_double(d.margin) + ")"),
        [this](TrainConfig& c) { c.margin = margin; });
    add(app->add_option("--batch-size", batch_size, "Mini-batch size (default " + std::to_string(d.batch_size) + ")"),
        [this](TrainConfig& c) { c.batch_size = batch_size; });
    add(app->add_option("--negatives", negatives,
                        "Negatives per positive (default " + std::to_string(d.negatives_per_positive) + ")"),
        [this](TrainConfig& c) { c.negatives_per_positive = negatives; });
    add(app->add_option("--seed", seed, "Random seed (default " + std::to_string(d.seed) + ")"),
        [this](TrainConfig& c) { c.seed = seed; });
    add(app->add_option("--loss", loss, "hinge or paper_literal (default hinge)"),
        [this](TrainConfig& c) { c.loss = parse_loss_variant(loss); });
    add(app->add_flag("--include-derived", include_derived, "Train on closure-derived facts too"),
        [this](TrainConfig& c) { c.include_derived = include_derived; });
  }

  TrainConfig resolve() const {
    TrainConfig c;
    if (!config_path.empty()) {
      const std::string text = read_input(config_path);
      c = with_file(config_path, [&] { return parse_train_config(text, c); });
    }
    for (const auto& [opt, fn] : apply) {
      if (opt->count() > 0) fn(c);
    }
    c.validate();
    if (dim == 0) throw Error("--dim must be positive");
    return c;
  }
};

std::vector<std::pair<std::string, std::string>> train_params(const std::string& graph, std::size_t dim,
                                                              const TrainConfig& c) {
  std::vector<std::pair<std::string, std::string>> p{{"graph", graph}, {"dim", std::to_string(dim)}};
  std::istringstream ss(c.describe());
  std::string kv;
  while (ss >> kv) {
    auto eq = kv.find('=');
    p.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"noirkg: narrative knowledge graphs, TransE embeddings, random-walk topics, link prediction"};
  app.name("noirkg");
  app.require_subcommand(1);
  app.set_version_flag("--version", NOIRKG_VERSION);

  std::string graph_path, out_path, facts_path, ontology_path;
  std::uint64_t seed = 7;

  // ingest
  bool strict = false, closure = false, reify_all = false;
  auto* ingest = app.add_subcommand("ingest", "Validate a fact CSV against an ontology and write a graph archive");
  ingest->add_option("--facts", facts_path, "Fact CSV")->required();
  ingest->add_option("--ontology", ontology_path, "Ontology file");
  ingest->add_flag("--strict", strict, "Reject relations missing from the ontology");
  ingest->add_flag("--closure", closure, "Materialize symmetric and inverse facts");
  ingest->add_flag("--reify", reify_all, "Reify facts carrying an episode or revealed_by annotation");
  ingest->add_option("--out", out_path, "Archive to write")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Print entity, relation and fact counts");
  auto* stats_graph = stats->add_option("--graph", graph_path, "Graph archive");
  auto* stats_facts = stats->add_option("--facts", facts_path, "Fact CSV (instead of --graph)");
  stats->add_option("--ontology", ontology_path, "Ontology file used with --facts");
  stats_graph->excludes(stats_facts);

  // query
  std::string subject, predicate, object;
  auto* query = app.add_subcommand("query", "List facts matching a pattern; unbound positions match anything");
  query->add_option("--graph", graph_path, "Graph archive")->required();
  query->add_option("--subject", subject);
  query->add_option("--predicate", predicate);
  query->add_option("--object", object);
  query->add_option("--out", out_path, "Output file (default stdout)");

  // reify
  std::string occurs_at, revealed_by;
  auto* reify = app.add_subcommand("reify", "Reify one fact with time and provenance annotations");
  reify->add_option("--graph", graph_path, "Graph archive")->required();
  reify->add_option("--subject", subject)->required();
  reify->add_option("--predicate", predicate)->required();
  reify->add_option("--object", object)->required();
  reify->add_option("--occurs-at", occurs_at, "Time token, e.g. E06");
  reify->add_option("--revealed-by", revealed_by, "Character who revealed the fact");
  reify->add_option("--out", out_path, "Archive to write")->required();

  // subgraph
  std::string character, format = "dot";
  bool any_position = false, suppress_temporal = false;
  auto* subgraph = app.add_subcommand("subgraph", "Character subgraph");
  subgraph->add_option("--graph", graph_path, "Graph archive")->required();
  subgraph->add_option("--character", character)->required();
  subgraph->add_flag("--any-position", any_position, "Also keep facts with the character as object");
  subgraph->add_flag("--suppress-temporal", suppress_temporal, "Drop occurs_at facts and time tokens (dot only)");
  subgraph->add_option("--format", format, "dot or facts")->check(CLI::IsMember({"dot", "facts"}))->capture_default_str();
  subgraph->add_option("--out", out_path, "Output file (default stdout)");

  // export
  bool as_dot = false, as_ntriples = false;
  std::string base = kDefaultBase;
  auto* exp = app.add_subcommand("export", "Export the graph as DOT or N-Triples");
  exp->add_option("--graph", graph_path, "Graph archive")->required();
  auto* dot_flag = exp->add_flag("--dot", as_dot, "DOT digraph");
  auto* nt_flag = exp->add_flag("--ntriples", as_ntriples, "N-Triples");
  dot_flag->excludes(nt_flag);
  exp->add_option("--base", base, "Base IRI for N-Triples")->capture_default_str();
  exp->add_flag("--suppress-temporal", suppress_temporal, "Drop occurs_at facts and time tokens (DOT)");
  exp->add_option("--out", out_path, "Output file (default stdout)");

  // embed
  TrainFlags embed_flags;
  std::string loss_out;
  auto* embed = app.add_subcommand("embed", "Train TransE embeddings and write them as CSV");
  embed->add_option("--graph", graph_path, "Graph archive")->required();
  embed_flags.attach(embed);
  embed->add_option("--out", out_path, "Embedding CSV (default stdout)");
  embed->add_option("--loss-out", loss_out, "Per-epoch loss history CSV");

  // project
  std::string model_path;
  double perplexity = 0.0, tsne_lr = 200.0;
  int tsne_iterations = 1000;
  bool include_relations = false;
  auto* project = app.add_subcommand("project", "Project embeddings to 2D with exact t-SNE");
  project->add_option("--model", model_path, "Embedding CSV")->required();
  project->add_option("--perplexity", perplexity, "Perplexity (default 30, clamped to (n-1)/3)");
  project->add_option("--iterations", tsne_iterations)->capture_default_str();
  project->add_option("--learning-rate", tsne_lr)->capture_default_str();
  project->add_option("--seed", seed)->capture_default_str();
  project->add_flag("--include-relations", include_relations, "Project relation vectors too");
  project->add_option("--out", out_path, "Projection CSV (default stdout)");

  // topics
  std::size_t n_docs = 1000, walk_len = 50, rank = 25, top = 10;
  int nmf_iterations = 500;
  bool topics_derived = false;
  std::string corpus_out;
  auto* topics = app.add_subcommand("topics", "Random-walk corpus, TF-IDF and NMF topics");
  topics->add_option("--graph", graph_path, "Graph archive")->required();
  topics->add_option("--n", n_docs, "Number of documents")->capture_default_str();
  topics->add_option("--len", walk_len, "Walk length in steps")->capture_default_str();
  topics->add_option("--r", rank, "Number of topics")->capture_default_str();
  topics->add_option("--top", top, "Tokens listed per topic")->capture_default_str();
  topics->add_option("--iterations", nmf_iterations, "NMF iterations")->capture_default_str();
  topics->add_option("--seed", seed)->capture_default_str();
  topics->add_flag("--include-derived", topics_derived, "Walk over closure-derived facts too");
  topics->add_option("--corpus-out", corpus_out, "Write the walk corpus here");
  topics->add_option("--out", out_path, "Topics CSV (default stdout)");

  // predict
  std::string triple;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  auto* predict = app.add_subcommand("predict", "Score a triple and rank its tail among all entities");
  predict->add_option("--model", model_path, "Embedding CSV")->required();
  predict->add_option("--triple", triple, "subject,relation,object")->required();
  predict->add_option("--threshold", threshold, "Plausibility threshold on the score");
  predict->add_option("--graph", graph_path, "Graph archive; default threshold is the median known-fact score");

  // eval
  TrainFlags eval_flags;
  double split = 0.9;
  bool raw = false;
  auto* eval = app.add_subcommand("eval", "Hold out facts, train TransE, report hits@k and MRR");
  eval->add_option("--graph", graph_path, "Graph archive")->required();
  eval->add_option("--split", split, "Training fraction")->capture_default_str();
  eval_flags.attach(eval);
  eval->add_flag("--raw", raw, "Raw instead of filtered ranking protocol");
  eval->add_option("--out", out_path, "Report CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) {
      KnowledgeGraph kg = build_graph(facts_path, ontology_path, strict ? Mode::strict : Mode::permissive);
      if (closure) kg.apply_ontology_closure();
      if (reify_all) {
        const auto snapshot = kg.facts();
        for (const auto& f : snapshot) {
          if (f.derived || (!f.episode && !f.revealed_by)) continue;
          ReifyAnnotations a;
          if (f.episode) a.occurs_at = time_token(*f.episode, f.timestamp);
          a.revealed_by = f.revealed_by;
          kg.reify(f, a, strict ? Mode::strict : Mode::permissive);
        }
      }
      for (const auto& w : kg.warnings()) err << "warning: " << w << "\n";
      write_file(out_path, write_archive(kg));
      out << header("ingest", {{"facts", facts_path},
                               {"ontology", ontology_path},
                               {"strict", strict ? "1" : "0"},
                               {"closure", closure ? "1" : "0"},
                               {"reify", reify_all ? "1" : "0"}})
          << format_stats(kg.stats());
    } else if (stats->parsed()) {
      if (graph_path.empty() && facts_path.empty()) throw Error("stats needs --graph or --facts");
      KnowledgeGraph kg = graph_path.empty() ? build_graph(facts_path, ontology_path, Mode::permissive)
                                             : load_graph(graph_path);
      out << header("stats", {{graph_path.empty() ? "facts" : "graph", graph_path.empty() ? facts_path : graph_path}})
          << format_stats(kg.stats());
    } else if (query->parsed()) {
      const KnowledgeGraph kg = load_graph(graph_path);
      TriplePattern p;
      if (!subject.empty()) p.subject = subject;
      if (!predicate.empty()) p.predicate = predicate;
      if (!object.empty()) p.object = object;
      emit(out_path,
           header("query", {{"graph", graph_path}, {"subject", subject}, {"predicate", predicate}, {"object", object}}) +
               format_facts(kg.query(p)),
           out);
    } else if (reify->parsed()) {
      KnowledgeGraph kg = load_graph(graph_path);
      Fact f;
      f.subject = subject;
      f.predicate = predicate;
      f.object = object;
      ReifyAnnotations a;
      if (!occurs_at.empty()) a.occurs_at = occurs_at;
      if (!revealed_by.empty()) a.revealed_by = revealed_by;
      const std::string stmt = kg.reify(f, a);
      write_file(out_path, write_archive(kg));
      out << stmt << "\n";
    } else if (subgraph->parsed()) {
      const KnowledgeGraph kg = load_graph(graph_path);
      const KnowledgeGraph sub = character_subgraph(kg, character, !any_position);
      const auto h = header("subgraph", {{"graph", graph_path},
                                         {"character", character},
                                         {"subject_only", any_position ? "0" : "1"},
                                         {"suppress_temporal", suppress_temporal ? "1" : "0"}});
      if (format == "dot") {
        // DOT comments use '//' rather than '#'.
        emit(out_path, "// " + h.substr(2) + export_dot(sub, suppress_temporal), out);
      } else {
        emit(out_path, h + format_facts(sub.facts()), out);
      }
    } else if (exp->parsed()) {
      if (!as_dot && !as_ntriples) throw Error("export needs --dot or --ntriples");
      const KnowledgeGraph kg = load_graph(graph_path);
      emit(out_path, as_dot ? export_dot(kg, suppress_temporal) : export_ntriples(kg, base), out);
    } else if (embed->parsed()) {
      const TrainConfig config = embed_flags.resolve();
      const KnowledgeGraph kg = load_graph(graph_path);
      auto result = train(init_model(kg, embed_flags.dim, config.seed), kg, config);
      const auto h = header("embed", train_params(graph_path, embed_flags.dim, config));
      emit(out_path, h + export_embedding_csv(result.model), out);
      if (!loss_out.empty()) {
        std::string csv = h + "epoch,mean_loss,mean_positive_score\n";
        for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
          csv += std::to_string(e + 1) + "," + format_double(result.loss_history[e]) + "," +
                 format_double(result.positive_score_history[e]) + "\n";
        }
        write_file(loss_out, csv);
      }
      if (!out_path.empty()) {
        out << h << "final_mean_loss," << format_double(result.loss_history.back()) << "\n"
            << "final_mean_positive_score," << format_double(result.positive_score_history.back()) << "\n";
      }
    } else if (project->parsed()) {
      const EmbeddingModel model = load_model(model_path);
      const auto rows = embedding_rows(model, include_relations);
      TsneConfig tc;
      tc.perplexity = perplexity > 0.0 ? perplexity : default_perplexity(rows.size());
      tc.iterations = tsne_iterations;
      tc.learning_rate = tsne_lr;
      tc.seed = seed;
      const auto result = tsne_project(embedding_vectors(model, include_relations), tc);
      const auto h = header("project", {{"model", model_path},
                                        {"perplexity", format_double(tc.perplexity)},
                                        {"iterations", std::to_string(tc.iterations)},
                                        {"learning_rate", format_double(tc.learning_rate)},
                                        {"seed", std::to_string(tc.seed)},
                                        {"include_relations", include_relations ? "1" : "0"},
                                        {"final_kl", format_double(result.kl_history.back().kl)}});
      emit(out_path, h + export_projection_csv(rows, result.points), out);
    } else if (topics->parsed()) {
      const KnowledgeGraph kg = load_graph(graph_path);
      const UndirectedGraph g = underlying_graph(kg, topics_derived);
      const Corpus corpus = generate_corpus(g, n_docs, walk_len, seed);
      const std::size_t max_rank = std::min(corpus.vocabulary.size(), corpus.documents.size());
      std::size_t effective_rank = rank;
      if (rank > max_rank && max_rank > 0) {
        err << "warning: --r " << rank << " exceeds min(vocabulary, documents) = " << max_rank << "; using "
            << max_rank << "\n";
        effective_rank = max_rank;
      }
      const TopicModel model = extract_topics(corpus, effective_rank, nmf_iterations, seed);
      const CoverageStats cov = coverage_stats(corpus, g);
      const auto h = header("topics", {{"graph", graph_path},
                                       {"n", std::to_string(n_docs)},
                                       {"len", std::to_string(walk_len)},
                                       {"r", std::to_string(effective_rank)},
                                       {"top", std::to_string(top)},
                                       {"iterations", std::to_string(nmf_iterations)},
                                       {"seed", std::to_string(seed)},
                                       {"include_derived", topics_derived ? "1" : "0"},
                                       {"coverage", format_double(cov.coverage)},
                                       {"mean_repetition", format_double(cov.mean_repetition)}});
      if (!corpus_out.empty()) write_file(corpus_out, h + export_corpus(corpus));
      emit(out_path, h + export_topics_csv(top_terms(model, std::min(top, model.vocabulary.size()))), out);
      if (!out_path.empty()) {
        out << h << "coverage," << format_double(cov.coverage) << "\nmean_repetition,"
            << format_double(cov.mean_repetition) << "\nfinal_residual,"
            << format_double(model.residual_history.empty() ? 0.0 : model.residual_history.back()) << "\n";
      }
    } else if (predict->parsed()) {
      const EmbeddingModel model = load_model(model_path);
      auto parts = split_csv_record(triple);
      if (parts.size() != 3) throw Error("--triple expects subject,relation,object");
      for (auto& p : parts) p = normalize_identifier(p);
      double tau = threshold;
      std::string tau_source = "flag";
      if (std::isnan(tau)) {
        if (graph_path.empty()) throw Error("predict needs --threshold or --graph");
        const KnowledgeGraph kg = load_graph(graph_path);
        tau = median_threshold(model, kg.facts());
        tau_source = "median";
      }
      const Prediction pred = predict_flag(model, parts[0], parts[1], parts[2], tau);
      const auto ranking = rank_tails(model, parts[0], parts[1], model.entities());
      out << header("predict", {{"model", model_path},
                                {"triple", triple},
                                {"threshold", format_double(tau)},
                                {"threshold_source", tau_source}})
          << "score,tail_rank,candidates,plausible\n"
          << format_double(pred.score) << "," << *rank_of(ranking, parts[2]) << "," << ranking.candidates.size()
          << "," << (pred.plausible ? "1" : "0") << "\n";
    } else if (eval->parsed()) {
      const TrainConfig config = eval_flags.resolve();
      const KnowledgeGraph kg = load_graph(graph_path);
      const Split parts = split_facts(kg, split, config.seed);
      EmbeddingModel model = init_model(kg, eval_flags.dim, config.seed);
      std::vector<Triple> positives;
      for (const auto& f : parts.train) positives.push_back(to_triple(model, f));
      const TripleSet known_train = known_triples(model, parts.train);
      auto trained = train(std::move(model), positives, known_train, config);
      const EvalReport report = evaluate(trained.model, parts.test, kg.facts(), !raw);
      auto params = train_params(graph_path, eval_flags.dim, config);
      params.emplace_back("split", format_double(split));
      params.emplace_back("protocol", raw ? "raw" : "filtered");
      const auto h = header("eval", params);
      out << h << format_eval_table(report);
      if (!out_path.empty()) write_file(out_path, h + format_eval_csv(report));
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace noirkg::cli
