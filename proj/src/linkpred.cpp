#include "noirkg/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "noirkg/text.hpp"

namespace noirkg {

namespace {

class Coverage {
 public:
  void add(const Fact& f) {
    ++entities_[f.subject];
    ++entities_[f.object];
    ++relations_[f.predicate];
  }
  void remove(const Fact& f) {
    --entities_[f.subject];
    --entities_[f.object];
    --relations_[f.predicate];
  }
  bool covers(const Fact& f) const { return count(entities_, f.subject) > 0 && count(entities_, f.object) > 0 &&
                                            count(relations_, f.predicate) > 0; }
  // True when `f` could leave while its own identifiers stay covered.
  bool removable(const Fact& f) const {
    const long need_s = f.subject == f.object ? 3 : 2;
    return count(entities_, f.subject) >= need_s && count(entities_, f.object) >= need_s &&
           count(relations_, f.predicate) >= 2;
  }

 private:
  static long count(const std::unordered_map<std::string, long>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  }
  std::unordered_map<std::string, long> entities_;
  std::unordered_map<std::string, long> relations_;
};

RankingResult rank(const EmbeddingModel& model, std::span<const std::string> candidates, const TripleSet* known,
                   std::string_view keep, const std::function<Triple(std::size_t)>& make) {
  if (candidates.empty()) throw Error("candidate set is empty");
  RankingResult out;
  out.filtered = known != nullptr;
  for (const auto& c : candidates) {
    const std::size_t e = model.require_entity(c);
    const Triple t = make(e);
    if (known && c != keep && known->contains(t)) continue;
    out.candidates.push_back({c, score(model, t)});
  }
  std::sort(out.candidates.begin(), out.candidates.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.entity < b.entity;
  });
  return out;
}

}  // namespace

Split split_facts(const KnowledgeGraph& kg, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("train fraction must be in (0, 1)");
  std::vector<Fact> asserted;
  for (const auto& f : kg.facts()) {
    if (!f.derived) asserted.push_back(f);
  }
  const std::size_t n = asserted.size();
  if (n < 2) throw SplitError("need at least 2 asserted facts to split", 1.0);

  Rng rng(seed);
  std::shuffle(asserted.begin(), asserted.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));

  Split split;
  split.train.assign(asserted.begin(), asserted.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(asserted.begin() + static_cast<std::ptrdiff_t>(n_train), asserted.end());
  std::vector<bool> locked(split.train.size(), false);
  Coverage cov;
  for (const auto& f : split.train) cov.add(f);

  bool infeasible = false;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    if (cov.covers(split.test[i])) continue;
    // Move the violating fact into training for good.
    cov.add(split.test[i]);
    split.train.push_back(split.test[i]);
    locked.push_back(true);

    std::optional<std::size_t> replacement;
    if (!infeasible) {
      for (std::size_t j = split.train.size(); j-- > 0;) {
        if (!locked[j] && cov.removable(split.train[j])) {
          replacement = j;
          break;
        }
      }
    }
    if (replacement) {
      cov.remove(split.train[*replacement]);
      split.test[i] = split.train[*replacement];
      split.train.erase(split.train.begin() + static_cast<std::ptrdiff_t>(*replacement));
      locked.erase(locked.begin() + static_cast<std::ptrdiff_t>(*replacement));
    } else {
      infeasible = true;
      split.test.erase(split.test.begin() + static_cast<std::ptrdiff_t>(i));
      --i;
    }
  }
  if (infeasible) {
    const double achievable = static_cast<double>(split.train.size()) / static_cast<double>(n);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "graph too small to hold out %.0f%% of facts with every test entity and relation seen in "
                  "training; achievable train fraction %.4f",
                  100.0 * (1.0 - train_fraction), achievable);
    throw SplitError(buf, achievable);
  }
  return split;
}

RankingResult rank_tails(const EmbeddingModel& model, std::string_view s, std::string_view r,
                         std::span<const std::string> candidates, const TripleSet* known, std::string_view keep) {
  const std::size_t head = model.require_entity(s);
  const std::size_t rel = model.require_relation(r);
  return rank(model, candidates, known, keep, [&](std::size_t e) { return Triple{head, rel, e}; });
}

RankingResult rank_heads(const EmbeddingModel& model, std::string_view r, std::string_view o,
                         std::span<const std::string> candidates, const TripleSet* known, std::string_view keep) {
  const std::size_t rel = model.require_relation(r);
  const std::size_t tail = model.require_entity(o);
  return rank(model, candidates, known, keep, [&](std::size_t e) { return Triple{e, rel, tail}; });
}

std::optional<std::size_t> rank_of(const RankingResult& ranking, std::string_view target) {
  for (std::size_t i = 0; i < ranking.candidates.size(); ++i) {
    if (ranking.candidates[i].entity == target) return i + 1;
  }
  return std::nullopt;
}

std::vector<std::string> typed_candidates(const KnowledgeGraph& kg, std::string_view relation, bool tail) {
  const auto* props = kg.ontology().relation(relation);
  const auto& type = props ? (tail ? props->range : props->domain) : std::optional<std::string>{};
  if (!type) return kg.entities();
  std::vector<std::string> out;
  for (const auto& e : kg.entities()) {
    if (kg.ontology().entity_type(e) == type) out.push_back(e);
  }
  return out;
}

EvalReport evaluate(const EmbeddingModel& model, std::span<const Fact> test, std::span<const Fact> all_known,
                    bool filtered) {
  if (test.empty()) throw Error("test set is empty");
  const TripleSet known = known_triples(model, all_known);
  const TripleSet* filter = filtered ? &known : nullptr;
  const auto& entities = model.entities();

  std::vector<std::size_t> ranks;
  ranks.reserve(2 * test.size());
  for (const auto& f : test) {
    auto tails = rank_tails(model, f.subject, f.predicate, entities, filter, f.object);
    auto heads = rank_heads(model, f.predicate, f.object, entities, filter, f.subject);
    ranks.push_back(*rank_of(tails, f.object));
    ranks.push_back(*rank_of(heads, f.subject));
  }

  EvalReport report;
  report.filtered = filtered;
  report.test_size = test.size();
  const double q = static_cast<double>(ranks.size());
  for (int k : {1, 3, 10}) {
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [&](std::size_t r) { return r <= static_cast<std::size_t>(k); });
    report.hits_at[k] = static_cast<double>(hits) / q;
  }
  double rr = 0.0;
  for (std::size_t r : ranks) rr += 1.0 / static_cast<double>(r);
  report.mrr = rr / q;
  return report;
}

std::string format_eval_csv(const EvalReport& report) {
  std::string out = "metric,value\n";
  for (const auto& [k, v] : report.hits_at) out += "hits@" + std::to_string(k) + "," + format_double(v) + "\n";
  out += "mrr," + format_double(report.mrr) + "\n";
  out += "test_size," + std::to_string(report.test_size) + "\n";
  out += std::string("filtered,") + (report.filtered ? "1" : "0") + "\n";
  return out;
}

std::string format_eval_table(const EvalReport& report) {
  char buf[96];
  std::string out = report.filtered ? "protocol   filtered\n" : "protocol   raw\n";
  std::snprintf(buf, sizeof(buf), "test size  %zu\n", report.test_size);
  out += buf;
  for (const auto& [k, v] : report.hits_at) {
    std::snprintf(buf, sizeof(buf), "hits@%-5d %.4f\n", k, v);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "MRR        %.4f\n", report.mrr);
  out += buf;
  return out;
}

Prediction predict_flag(const EmbeddingModel& model, std::string_view s, std::string_view r, std::string_view o,
                        double threshold) {
  const double d = score_triple(model, s, r, o);
  return {d, d <= threshold};
}

double median_threshold(const EmbeddingModel& model, std::span<const Fact> facts) {
  if (facts.empty()) throw Error("median threshold needs at least one fact");
  std::vector<double> scores;
  for (const auto& f : facts) scores.push_back(score_triple(model, f.subject, f.predicate, f.object));
  std::sort(scores.begin(), scores.end());
  const std::size_t m = scores.size();
  return m % 2 ? scores[m / 2] : 0.5 * (scores[m / 2 - 1] + scores[m / 2]);
}

}  // namespace noirkg
