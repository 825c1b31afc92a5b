#include "noirkg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noirkg/error.hpp"
#include "noirkg/text.hpp"

namespace noirkg {

std::string to_string(LossVariant v) { return v == LossVariant::hinge ? "hinge" : "paper_literal"; }

LossVariant parse_loss_variant(std::string_view s) {
  if (s == "hinge") return LossVariant::hinge;
  if (s == "paper_literal") return LossVariant::paper_literal;
  throw Error("unknown loss variant '" + std::string(s) + "' (expected hinge or paper_literal)");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw Error("learning_rate must be >= 0");
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw Error("margin must be >= 0");
  if (batch_size < 1) throw Error("batch_size must be positive");
  if (negatives_per_positive < 1) throw Error("negatives_per_positive must be positive");
}

std::string TrainConfig::describe() const {
  return "epochs=" + std::to_string(epochs) + " learning_rate=" + format_double(learning_rate) +
         " margin=" + format_double(margin) + " batch_size=" + std::to_string(batch_size) +
         " negatives_per_positive=" + std::to_string(negatives_per_positive) + " seed=" + std::to_string(seed) +
         " loss=" + to_string(loss) + " include_derived=" + (include_derived ? "1" : "0");
}

TrainConfig parse_train_config(std::string_view text, TrainConfig base) {
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(i + 1, "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    auto as_int = [&]() {
      auto v = parse_integer(value);
      if (!v) throw ParseError(i + 1, key + ": expected an integer");
      return *v;
    };
    auto as_double = [&]() {
      auto v = parse_double(value);
      if (!v) throw ParseError(i + 1, key + ": expected a number");
      return *v;
    };
    if (key == "epochs") {
      base.epochs = static_cast<int>(as_int());
    } else if (key == "learning_rate") {
      base.learning_rate = as_double();
    } else if (key == "margin") {
      base.margin = as_double();
    } else if (key == "batch_size") {
      base.batch_size = static_cast<int>(as_int());
    } else if (key == "negatives_per_positive") {
      base.negatives_per_positive = static_cast<int>(as_int());
    } else if (key == "seed") {
      base.seed = static_cast<std::uint64_t>(as_int());
    } else if (key == "loss") {
      try {
        base.loss = parse_loss_variant(value);
      } catch (const Error& e) {
        throw ParseError(i + 1, e.what());
      }
    } else if (key == "include_derived") {
      base.include_derived = as_int() != 0;
    } else {
      throw ParseError(i + 1, "unknown key '" + key + "'");
    }
  }
  return base;
}

EmbeddingModel::EmbeddingModel(std::size_t dim, std::vector<std::string> entities, std::vector<std::string> relations)
    : dim_(dim), entities_(std::move(entities)), relations_(std::move(relations)) {
  if (dim_ == 0) throw Error("embedding dimension must be positive");
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (!entity_index_.emplace(entities_[i], i).second) throw Error("duplicate entity '" + entities_[i] + "'");
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (!relation_index_.emplace(relations_[i], i).second) throw Error("duplicate relation '" + relations_[i] + "'");
  }
  entity_data_.assign(entities_.size() * dim_, 0.0);
  relation_data_.assign(relations_.size() * dim_, 0.0);
}

std::optional<std::size_t> EmbeddingModel::entity_index(std::string_view label) const {
  auto it = entity_index_.find(std::string(label));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EmbeddingModel::relation_index(std::string_view label) const {
  auto it = relation_index_.find(std::string(label));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingModel::require_entity(std::string_view label) const {
  auto i = entity_index(label);
  if (!i) throw Error("entity '" + std::string(label) + "' has no embedding");
  return *i;
}

std::size_t EmbeddingModel::require_relation(std::string_view label) const {
  auto i = relation_index(label);
  if (!i) throw Error("relation '" + std::string(label) + "' has no embedding");
  return *i;
}

namespace {

void normalize(std::span<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  if (n == 0.0) return;
  for (double& x : v) x /= n;
}

// Writes u_h + u_r - u_t into `diff` and returns its norm.
double residual(const EmbeddingModel& m, const Triple& t, std::vector<double>& diff) {
  auto h = m.entity(t.head);
  auto r = m.relation(t.relation);
  auto o = m.entity(t.tail);
  diff.resize(m.dim());
  double sq = 0.0;
  for (std::size_t k = 0; k < m.dim(); ++k) {
    diff[k] = h[k] + r[k] - o[k];
    sq += diff[k] * diff[k];
  }
  return std::sqrt(sq);
}

// Adds sign * d(score)/d(params) for triple t into grad.
void add_score_gradient(const EmbeddingModel& m, const Triple& t, const std::vector<double>& diff, double dist,
                        double sign, Gradient& grad) {
  if (dist == 0.0) return;  // subgradient 0 at the kink
  const std::size_t d = m.dim();
  double* gh = grad.entity.data() + t.head * d;
  double* gt = grad.entity.data() + t.tail * d;
  double* gr = grad.relation.data() + t.relation * d;
  for (std::size_t k = 0; k < d; ++k) {
    const double g = sign * diff[k] / dist;
    gh[k] += g;
    gr[k] += g;
    gt[k] -= g;
  }
}

}  // namespace

void EmbeddingModel::normalize_entities() {
  for (std::size_t i = 0; i < entities_.size(); ++i) normalize(entity(i));
}

Triple to_triple(const EmbeddingModel& model, const Fact& fact) {
  return Triple{model.require_entity(fact.subject), model.require_relation(fact.predicate),
                model.require_entity(fact.object)};
}

TripleSet known_triples(const EmbeddingModel& model, std::span<const Fact> facts) {
  TripleSet set;
  for (const auto& f : facts) set.insert(to_triple(model, f));
  return set;
}

EmbeddingModel init_model(const KnowledgeGraph& kg, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error("embedding dimension must be positive");
  if (kg.entities().empty()) throw Error("cannot embed an empty graph");
  EmbeddingModel m(dim, kg.entities(), kg.relations());
  Rng rng = stream_rng(seed, 0);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> unif(-bound, bound);
  for (double& x : m.entity_data()) x = unif(rng);
  for (double& x : m.relation_data()) x = unif(rng);
  m.normalize_entities();
  // Relations are normalized once here and left free during training.
  for (std::size_t i = 0; i < m.relations().size(); ++i) normalize(m.relation(i));
  return m;
}

double score(const EmbeddingModel& model, const Triple& t) {
  auto h = model.entity(t.head);
  auto r = model.relation(t.relation);
  auto o = model.entity(t.tail);
  double sq = 0.0;
  for (std::size_t k = 0; k < model.dim(); ++k) {
    const double x = h[k] + r[k] - o[k];
    sq += x * x;
  }
  return std::sqrt(sq);
}

double score_triple(const EmbeddingModel& model, std::string_view s, std::string_view r, std::string_view o) {
  return score(model, Triple{model.require_entity(s), model.require_relation(r), model.require_entity(o)});
}

Triple NegativeSampler::sample(const Triple& positive, Rng& rng, bool* head_corrupted) const {
  if (entity_count_ < 2) throw Error("negative sampling needs at least 2 entities");
  std::bernoulli_distribution coin(0.5);
  const bool head = coin(rng);
  if (head_corrupted) *head_corrupted = head;
  std::uniform_int_distribution<std::size_t> pick(0, entity_count_ - 2);
  const std::size_t current = head ? positive.head : positive.tail;
  Triple candidate = positive;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::size_t e = pick(rng);
    if (e >= current) ++e;  // skip the original entity
    (head ? candidate.head : candidate.tail) = e;
    if (!known_->contains(candidate)) break;
  }
  return candidate;
}

Fact negative_sample(const Fact& fact, const KnowledgeGraph& kg, Rng& rng, bool* head_corrupted) {
  auto idx = [&](const std::string& e) {
    auto i = kg.entity_index(e);
    if (!i) throw Error("unknown entity '" + e + "'");
    return *i;
  };
  auto rel = kg.relation_index(fact.predicate);
  if (!rel) throw Error("unknown relation '" + fact.predicate + "'");
  TripleSet known;
  for (const auto& f : kg.facts()) known.insert(Triple{idx(f.subject), *kg.relation_index(f.predicate), idx(f.object)});
  NegativeSampler sampler(kg.entities().size(), known);
  Triple t = sampler.sample(Triple{idx(fact.subject), *rel, idx(fact.object)}, rng, head_corrupted);
  Fact out;
  out.subject = kg.entities()[t.head];
  out.predicate = fact.predicate;
  out.object = kg.entities()[t.tail];
  return out;
}

double pair_loss(const EmbeddingModel& model, const TrainingPair& pair, LossVariant variant, double margin) {
  const double dp = score(model, pair.positive);
  const double dn = score(model, pair.negative);
  if (variant == LossVariant::paper_literal) return dp - dn;
  return std::max(0.0, margin + dp - dn);
}

double accumulate_gradient(const EmbeddingModel& model, std::span<const TrainingPair> pairs, LossVariant variant,
                           double margin, Gradient& grad) {
  std::vector<double> pos_diff, neg_diff;
  double total = 0.0;
  for (const auto& pair : pairs) {
    const double dp = residual(model, pair.positive, pos_diff);
    const double dn = residual(model, pair.negative, neg_diff);
    double loss = dp - dn;
    if (variant == LossVariant::hinge) {
      loss += margin;
      if (loss <= 0.0) continue;
    }
    total += loss;
    add_score_gradient(model, pair.positive, pos_diff, dp, +1.0, grad);
    add_score_gradient(model, pair.negative, neg_diff, dn, -1.0, grad);
  }
  return total;
}

double mean_score(const EmbeddingModel& model, std::span<const Triple> triples) {
  if (triples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : triples) sum += score(model, t);
  return sum / static_cast<double>(triples.size());
}

TrainResult train(EmbeddingModel model, std::span<const Triple> positives, const TripleSet& known,
                  const TrainConfig& config) {
  config.validate();
  if (positives.empty()) throw Error("cannot train on an empty fact set");
  model.config = config;

  Rng rng = stream_rng(config.seed, 1);
  NegativeSampler sampler(model.entities().size(), known);
  std::vector<std::size_t> order(positives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  Gradient grad(model);
  std::vector<TrainingPair> batch;
  std::vector<std::size_t> touched_entities, touched_relations;
  const std::size_t dim = model.dim();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t pair_count = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        const Triple& p = positives[order[i]];
        for (int k = 0; k < config.negatives_per_positive; ++k) batch.push_back({p, sampler.sample(p, rng)});
      }
      std::fill(grad.entity.begin(), grad.entity.end(), 0.0);
      std::fill(grad.relation.begin(), grad.relation.end(), 0.0);
      epoch_loss += accumulate_gradient(model, batch, config.loss, config.margin, grad);
      pair_count += batch.size();

      // Only rows touched by the batch carry a gradient; step each once.
      touched_entities.clear();
      touched_relations.clear();
      for (const auto& pair : batch) {
        for (const Triple* t : {&pair.positive, &pair.negative}) {
          touched_entities.push_back(t->head);
          touched_entities.push_back(t->tail);
          touched_relations.push_back(t->relation);
        }
      }
      auto step = [&](std::vector<double>& data, const std::vector<double>& g, std::vector<std::size_t>& rows) {
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        for (std::size_t row : rows) {
          for (std::size_t k = 0; k < dim; ++k) data[row * dim + k] -= config.learning_rate * g[row * dim + k];
        }
      };
      step(model.entity_data(), grad.entity, touched_entities);
      step(model.relation_data(), grad.relation, touched_relations);
    }
    model.normalize_entities();
    result.loss_history.push_back(epoch_loss / static_cast<double>(pair_count));
    result.positive_score_history.push_back(mean_score(model, positives));
  }
  result.model = std::move(model);
  return result;
}

TrainResult train(EmbeddingModel model, const KnowledgeGraph& kg, const TrainConfig& config) {
  std::vector<Triple> positives;
  TripleSet known;
  for (const auto& f : kg.facts()) {
    const Triple t = to_triple(model, f);
    known.insert(t);
    if (!f.derived || config.include_derived) positives.push_back(t);
  }
  return train(std::move(model), positives, known, config);
}

std::vector<EmbeddingRow> embedding_rows(const EmbeddingModel& model, bool include_relations) {
  std::vector<EmbeddingRow> rows;
  for (const auto& e : model.entities()) rows.push_back({e, "entity"});
  if (include_relations) {
    for (const auto& r : model.relations()) rows.push_back({r, "relation"});
  }
  return rows;
}

std::vector<std::vector<double>> embedding_vectors(const EmbeddingModel& model, bool include_relations) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < model.entities().size(); ++i) {
    auto v = model.entity(i);
    out.emplace_back(v.begin(), v.end());
  }
  if (include_relations) {
    for (std::size_t i = 0; i < model.relations().size(); ++i) {
      auto v = model.relation(i);
      out.emplace_back(v.begin(), v.end());
    }
  }
  return out;
}

std::string export_embedding_csv(const EmbeddingModel& model) {
  std::string out = "label,kind";
  for (std::size_t k = 1; k <= model.dim(); ++k) out += ",c" + std::to_string(k);
  out += "\n";
  auto row = [&](const std::string& label, const char* kind, std::span<const double> v) {
    out += label;
    out += ',';
    out += kind;
    for (double x : v) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  };
  for (std::size_t i = 0; i < model.entities().size(); ++i) row(model.entities()[i], "entity", model.entity(i));
  for (std::size_t i = 0; i < model.relations().size(); ++i) row(model.relations()[i], "relation", model.relation(i));
  return out;
}

std::string export_projection_csv(std::span<const EmbeddingRow> rows, std::span<const std::array<double, 2>> points) {
  if (rows.size() != points.size()) throw Error("projection has a different number of rows than labels");
  std::string out = "label,kind,x,y\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += rows[i].label + "," + rows[i].kind + "," + format_double(points[i][0]) + "," +
           format_double(points[i][1]) + "\n";
  }
  return out;
}

EmbeddingModel parse_embedding_csv(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t dim = 0;
  bool header_seen = false;
  std::vector<std::string> entities, relations;
  std::vector<double> entity_values, relation_values;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_record(line);
    if (!header_seen) {
      if (fields.size() < 3 || fields[0] != "label" || fields[1] != "kind") {
        throw ParseError(i + 1, "expected header label,kind,c1..cN");
      }
      dim = fields.size() - 2;
      header_seen = true;
      continue;
    }
    if (fields.size() != dim + 2) throw ParseError(i + 1, "expected " + std::to_string(dim + 2) + " fields");
    const bool is_entity = fields[1] == "entity";
    if (!is_entity && fields[1] != "relation") throw ParseError(i + 1, "kind must be entity or relation");
    (is_entity ? entities : relations).push_back(fields[0]);
    auto& values = is_entity ? entity_values : relation_values;
    for (std::size_t k = 0; k < dim; ++k) {
      auto v = parse_double(fields[k + 2]);
      if (!v) throw ParseError(i + 1, "bad number '" + fields[k + 2] + "'");
      values.push_back(*v);
    }
  }
  if (!header_seen) throw ParseError(0, "empty embedding file");
  EmbeddingModel m(dim, std::move(entities), std::move(relations));
  m.entity_data() = std::move(entity_values);
  m.relation_data() = std::move(relation_values);
  return m;
}

}  // namespace noirkg
