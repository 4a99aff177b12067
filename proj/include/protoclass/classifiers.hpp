#ifndef PROTOCLASS_CLASSIFIERS_HPP
#define PROTOCLASS_CLASSIFIERS_HPP

#include "protoclass/linalg.hpp"
#include "protoclass/prototypes.hpp"
#include "protoclass/store.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace protoclass {

enum class Rule { Softmax, Npc, Knn };
enum class Metric { Euclidean, Cosine };

std::string_view to_string(Rule rule);
Rule parse_rule(std::string_view text);
std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

struct ClassifierConfig {
    /// Softmax temperature; 0.01 matches a logit scale of 100.
    double temperature = 0.01;
    Metric metric = Metric::Euclidean;
    std::size_t k = 11;
    /// Worker threads for batch calls; 0 = hardware concurrency. Never changes results.
    unsigned parallel = 0;

    void validate() const;
};

struct Prediction {
    ClassId class_id = 0;
    /// Probabilities (softmax), negated distances (npc) or vote counts (knn), one per class.
    std::vector<double> scores;
    Rule rule = Rule::Npc;
};

/// Temperature-scaled softmax with max-subtraction. Index of the first maximum wins.
std::vector<double> softmax_scores(std::span<const double> similarities, double temperature);
std::size_t argmax_first(std::span<const double> scores);

/// P(y | query) = exp(cos(q, p_y) / tau) / sum_i exp(cos(q, p_i) / tau).
Prediction classify_softmax(VectorView query, const PrototypeBank& bank, double temperature);

/// Nearest prototype; scores are negated distances, ties go to the lowest class id.
Prediction classify_npc(VectorView query, const PrototypeBank& bank, Metric metric = Metric::Euclidean);

struct Neighbor {
    std::size_t index;
    double distance;
};

/**
 * @brief The @p k closest gallery records, closest first.
 *
 * Ties on distance are broken by smaller sourceId, then by record position.
 * Throws DimMismatch or KTooLarge.
 */
std::vector<Neighbor> nearest_neighbors(VectorView query, const EmbeddingSet& gallery, std::size_t k,
                                        Metric metric = Metric::Euclidean);

/**
 * @brief Majority vote over the first @p k neighbors.
 *
 * Vote ties go to the class with the smaller summed distance among its
 * voters, then to the lowest class id.
 */
Prediction vote(std::span<const Neighbor> neighbors, const EmbeddingSet& gallery, std::size_t k);

Prediction classify_knn(VectorView query, const EmbeddingSet& gallery, std::size_t k,
                        Metric metric = Metric::Euclidean);

/// Softmax or NPC over every query. Output order follows input order.
std::vector<Prediction> classify_batch(const EmbeddingSet& queries, Rule rule, const ClassifierConfig& config,
                                       const PrototypeBank& bank);

/// k-NN over every query. @p rule must be Rule::Knn.
std::vector<Prediction> classify_batch(const EmbeddingSet& queries, Rule rule, const ClassifierConfig& config,
                                       const EmbeddingSet& gallery);

/// Neighbor lists of length @p k for every query (used to evaluate several k at once).
std::vector<std::vector<Neighbor>> batch_neighbors(const EmbeddingSet& queries, const EmbeddingSet& gallery,
                                                   std::size_t k, Metric metric, unsigned parallel);

/// One JSONL record: {sourceId, predictedClassId, trueClassId, rule, scores}.
nlohmann::json prediction_to_json(const Prediction& p, std::string_view source_id, ClassId true_class);

} // namespace protoclass

#endif
