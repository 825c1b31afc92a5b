#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noirkg/embedding.hpp"
#include "noirkg/error.hpp"
#include "noirkg/knowledge_graph.hpp"

namespace noirkg {

struct Split {
  std::vector<Fact> train;
  std::vector<Fact> test;
};

class SplitError : public Error {
 public:
  SplitError(const std::string& what, double achievable) : Error(what), achievable_(achievable) {}
  // Training fraction reached when every violating test fact stays in training.
  double achievable_fraction() const noexcept { return achievable_; }

 private:
  double achievable_;
};

// Seeded uniform split of the asserted facts. Test facts whose entities or
// relation would be missing from the training side are swapped back into
// training, each replaced by a training fact that can leave without
// breaking coverage. Throws SplitError when no replacement exists.
Split split_facts(const KnowledgeGraph& kg, double train_fraction, std::uint64_t seed);

struct RankedCandidate {
  std::string entity;
  double score;
};

struct RankingResult {
  std::vector<RankedCandidate> candidates;  // ascending score, ties by label
  bool filtered = false;
};

// Ranks tails o of (s, r, ?) by ||u_s + u_r - u_o||. With `known`, every
// candidate other than `keep` that forms a known triple is removed.
RankingResult rank_tails(const EmbeddingModel& model, std::string_view s, std::string_view r,
                         std::span<const std::string> candidates, const TripleSet* known = nullptr,
                         std::string_view keep = {});
// Ranks heads of (?, r, o).
RankingResult rank_heads(const EmbeddingModel& model, std::string_view r, std::string_view o,
                         std::span<const std::string> candidates, const TripleSet* known = nullptr,
                         std::string_view keep = {});

// 1-based position of `target` in a ranking, or nullopt when absent.
std::optional<std::size_t> rank_of(const RankingResult& ranking, std::string_view target);

// Entities admissible as tails (or heads) of `relation`: those typed with the
// declared range (domain), or every entity when none is declared.
std::vector<std::string> typed_candidates(const KnowledgeGraph& kg, std::string_view relation, bool tail);

struct EvalReport {
  std::map<int, double> hits_at;  // k in {1, 3, 10}
  double mrr = 0.0;
  std::size_t test_size = 0;
  bool filtered = true;
};

// Ranks the true tail and the true head of every test fact among all model
// entities; hits@k and MRR average over both queries.
EvalReport evaluate(const EmbeddingModel& model, std::span<const Fact> test, std::span<const Fact> all_known,
                    bool filtered = true);

std::string format_eval_csv(const EvalReport& report);
std::string format_eval_table(const EvalReport& report);

struct Prediction {
  double score;
  bool plausible;
};

Prediction predict_flag(const EmbeddingModel& model, std::string_view s, std::string_view r, std::string_view o,
                        double threshold);
// Median score of `facts`, the default plausibility threshold.
double median_threshold(const EmbeddingModel& model, std::span<const Fact> facts);

}  // namespace noirkg
