#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "noirkg/knowledge_graph.hpp"
#include "noirkg/random.hpp"

namespace noirkg {

enum class LossVariant {
  hinge,          // max(0, margin + d(pos) - d(neg))
  paper_literal,  // d(pos) - d(neg); unbounded below
};

std::string to_string(LossVariant v);
LossVariant parse_loss_variant(std::string_view s);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.01;
  double margin = 1.0;
  int batch_size = 32;
  int negatives_per_positive = 1;
  std::uint64_t seed = 7;
  LossVariant loss = LossVariant::hinge;
  bool include_derived = false;

  void validate() const;
  // Space-separated key=value pairs, the same keys parse_train_config accepts.
  std::string describe() const;
};

// Applies `key=value` lines (`#` comments allowed) on top of `base`. Keys:
// epochs, learning_rate, margin, batch_size, negatives_per_positive, seed,
// loss, include_derived.
TrainConfig parse_train_config(std::string_view text, TrainConfig base = {});

// TransE parameters: one vector per entity and per relation, stored row-major.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::size_t dim, std::vector<std::string> entities, std::vector<std::string> relations);

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<std::string>& relations() const { return relations_; }
  std::optional<std::size_t> entity_index(std::string_view label) const;
  std::optional<std::size_t> relation_index(std::string_view label) const;
  // Throws Error naming the label.
  std::size_t require_entity(std::string_view label) const;
  std::size_t require_relation(std::string_view label) const;

  std::span<double> entity(std::size_t i) { return {entity_data_.data() + i * dim_, dim_}; }
  std::span<const double> entity(std::size_t i) const { return {entity_data_.data() + i * dim_, dim_}; }
  std::span<double> relation(std::size_t i) { return {relation_data_.data() + i * dim_, dim_}; }
  std::span<const double> relation(std::size_t i) const { return {relation_data_.data() + i * dim_, dim_}; }

  std::vector<double>& entity_data() { return entity_data_; }
  const std::vector<double>& entity_data() const { return entity_data_; }
  std::vector<double>& relation_data() { return relation_data_; }
  const std::vector<double>& relation_data() const { return relation_data_; }

  void normalize_entities();

  TrainConfig config;

  bool operator==(const EmbeddingModel& o) const {
    return dim_ == o.dim_ && entities_ == o.entities_ && relations_ == o.relations_ &&
           entity_data_ == o.entity_data_ && relation_data_ == o.relation_data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  std::vector<double> entity_data_;
  std::vector<double> relation_data_;
};

// Index triple in model space.
struct Triple {
  std::size_t head;
  std::size_t relation;
  std::size_t tail;

  bool operator==(const Triple&) const = default;
};

class TripleSet {
 public:
  void insert(const Triple& t) { keys_.insert(key(t)); }
  bool contains(const Triple& t) const { return keys_.count(key(t)) != 0; }
  std::size_t size() const { return keys_.size(); }

 private:
  static std::uint64_t key(const Triple& t) {
    return (static_cast<std::uint64_t>(t.head) << 42) ^ (static_cast<std::uint64_t>(t.relation) << 21) ^
           static_cast<std::uint64_t>(t.tail);
  }
  std::unordered_set<std::uint64_t> keys_;
};

// Maps facts onto model indices; throws Error on identifiers the model lacks.
Triple to_triple(const EmbeddingModel& model, const Fact& fact);
TripleSet known_triples(const EmbeddingModel& model, std::span<const Fact> facts);

// Uniform on [-6/sqrt(dim), 6/sqrt(dim)] per coordinate, then every entity
// and relation vector rescaled to unit norm. Only entities are renormalized
// during training. Entity and relation order follow the graph.
EmbeddingModel init_model(const KnowledgeGraph& kg, std::size_t dim, std::uint64_t seed);

double score(const EmbeddingModel& model, const Triple& t);
// ||u_s + u_r - u_o||_2
double score_triple(const EmbeddingModel& model, std::string_view s, std::string_view r, std::string_view o);

// Replaces head or tail (fair coin) with a different uniformly drawn entity
// so that the result is not a known triple; after 100 rejected draws the
// last candidate is returned regardless.
class NegativeSampler {
 public:
  NegativeSampler(std::size_t entity_count, const TripleSet& known) : entity_count_(entity_count), known_(&known) {}

  Triple sample(const Triple& positive, Rng& rng, bool* head_corrupted = nullptr) const;

  static constexpr int kMaxRetries = 100;

 private:
  std::size_t entity_count_;
  const TripleSet* known_;
};

Fact negative_sample(const Fact& fact, const KnowledgeGraph& kg, Rng& rng, bool* head_corrupted = nullptr);

struct TrainingPair {
  Triple positive;
  Triple negative;
};

// Gradient buffers laid out like the model's entity/relation data.
struct Gradient {
  std::vector<double> entity;
  std::vector<double> relation;

  explicit Gradient(const EmbeddingModel& m)
      : entity(m.entity_data().size(), 0.0), relation(m.relation_data().size(), 0.0) {}
};

double pair_loss(const EmbeddingModel& model, const TrainingPair& pair, LossVariant variant, double margin);

// Adds d(sum of pair losses)/d(parameters) into `grad`; returns the summed loss.
double accumulate_gradient(const EmbeddingModel& model, std::span<const TrainingPair> pairs, LossVariant variant,
                           double margin, Gradient& grad);

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> loss_history;            // mean pair loss per epoch
  std::vector<double> positive_score_history;  // mean positive score after each epoch
};

// Mini-batch SGD over `positives`. Each epoch shuffles the positives, draws
// `negatives_per_positive` corruptions per positive, steps by the summed
// batch gradient, then renormalizes entity vectors. Sequential and
// bitwise-deterministic given config.seed.
TrainResult train(EmbeddingModel model, std::span<const Triple> positives, const TripleSet& known,
                  const TrainConfig& config);
// Trains on the graph's asserted facts (plus derived when
// config.include_derived); every graph fact counts as known.
TrainResult train(EmbeddingModel model, const KnowledgeGraph& kg, const TrainConfig& config);

double mean_score(const EmbeddingModel& model, std::span<const Triple> triples);

struct EmbeddingRow {
  std::string label;
  std::string kind;  // "entity" or "relation"
};

std::vector<EmbeddingRow> embedding_rows(const EmbeddingModel& model, bool include_relations);
std::vector<std::vector<double>> embedding_vectors(const EmbeddingModel& model, bool include_relations);

// label,kind,c1..cdim with entities first, then relations.
std::string export_embedding_csv(const EmbeddingModel& model);
// label,kind,x,y
std::string export_projection_csv(std::span<const EmbeddingRow> rows, std::span<const std::array<double, 2>> points);
// Reads the raw export back; lines starting with '#' are ignored.
EmbeddingModel parse_embedding_csv(std::string_view text);

}  // namespace noirkg
