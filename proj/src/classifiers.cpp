#include "protoclass/classifiers.hpp"

#include "parallel.hpp"
#include "protoclass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace protoclass {

namespace {

double distance(VectorView a, VectorView b, Metric metric) {
    return metric == Metric::Euclidean ? euclidean_dist(a, b) : 1.0 - cosine_sim(a, b);
}

void require_bank(const PrototypeBank& bank, VectorView query) {
    if (bank.size() == 0) {
        throw Error(ErrorCode::EmptyInput, "prototype bank is empty");
    }
    if (query.size() != bank.dim) {
        throw Error(ErrorCode::DimMismatch, "query dim " + std::to_string(query.size()) + ", bank dim " +
                                                std::to_string(bank.dim));
    }
}

// Neighbor order: distance, then sourceId, then position.
struct NeighborLess {
    const EmbeddingSet& gallery;
    bool operator()(const Neighbor& a, const Neighbor& b) const {
        if (a.distance != b.distance) return a.distance < b.distance;
        const auto& sa = gallery.source_ids[a.index];
        const auto& sb = gallery.source_ids[b.index];
        if (sa != sb) return sa < sb;
        return a.index < b.index;
    }
};

template <typename Fn>
auto run_item(std::size_t index, Fn&& fn) {
    try {
        return fn();
    } catch (const BatchItemError&) {
        throw;
    } catch (const Error& e) {
        throw BatchItemError(index, e.code(), e.what());
    }
}

} // namespace

std::string_view to_string(Rule rule) {
    switch (rule) {
    case Rule::Softmax: return "softmax";
    case Rule::Npc: return "npc";
    case Rule::Knn: return "knn";
    }
    return "npc";
}

Rule parse_rule(std::string_view text) {
    if (text == "softmax") return Rule::Softmax;
    if (text == "npc") return Rule::Npc;
    if (text == "knn") return Rule::Knn;
    throw Error(ErrorCode::Config, "unknown rule '" + std::string(text) + "' (softmax, npc, knn)");
}

std::string_view to_string(Metric metric) { return metric == Metric::Euclidean ? "euclidean" : "cosine"; }

Metric parse_metric(std::string_view text) {
    if (text == "euclidean") return Metric::Euclidean;
    if (text == "cosine") return Metric::Cosine;
    throw Error(ErrorCode::Config, "unknown metric '" + std::string(text) + "' (euclidean, cosine)");
}

void ClassifierConfig::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorCode::Config, "temperature must be a positive finite number");
    }
    if (k == 0) {
        throw Error(ErrorCode::Config, "k must be at least 1");
    }
}

std::vector<double> softmax_scores(std::span<const double> similarities, double temperature) {
    if (similarities.empty()) {
        throw Error(ErrorCode::EmptyInput, "softmax over zero classes");
    }
    if (!(temperature > 0.0)) {
        throw Error(ErrorCode::Config, "temperature must be positive");
    }
    const double top = *std::max_element(similarities.begin(), similarities.end());
    std::vector<double> scores(similarities.size());
    double total = 0.0;
    for (std::size_t i = 0; i < similarities.size(); ++i) {
        scores[i] = std::exp((similarities[i] - top) / temperature);
        total += scores[i];
    }
    for (auto& s : scores) {
        s /= total;
    }
    return scores;
}

std::size_t argmax_first(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return best;
}

Prediction classify_softmax(VectorView query, const PrototypeBank& bank, double temperature) {
    require_bank(bank, query);
    std::vector<double> sims(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        sims[i] = cosine_sim(query, bank.vector(i));
    }
    Prediction p;
    p.rule = Rule::Softmax;
    p.scores = softmax_scores(sims, temperature);
    p.class_id = bank.prototypes[argmax_first(p.scores)].class_id;
    return p;
}

Prediction classify_npc(VectorView query, const PrototypeBank& bank, Metric metric) {
    require_bank(bank, query);
    Prediction p;
    p.rule = Rule::Npc;
    p.scores.resize(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        p.scores[i] = -distance(query, bank.vector(i), metric);
    }
    p.class_id = bank.prototypes[argmax_first(p.scores)].class_id;
    return p;
}

std::vector<Neighbor> nearest_neighbors(VectorView query, const EmbeddingSet& gallery, std::size_t k,
                                        Metric metric) {
    if (k == 0 || k > gallery.size()) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " with a gallery of " +
                                              std::to_string(gallery.size()) + " records");
    }
    if (query.size() != gallery.dim()) {
        throw Error(ErrorCode::DimMismatch, "query dim " + std::to_string(query.size()) + ", gallery dim " +
                                                std::to_string(gallery.dim()));
    }
    std::vector<Neighbor> all(gallery.size());
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        all[i] = {i, distance(query, gallery.vector(i), metric)};
    }
    const NeighborLess less{gallery};
    if (k < all.size()) {
        std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end(), less);
        all.resize(k);
    }
    std::sort(all.begin(), all.end(), less);
    return all;
}

Prediction vote(std::span<const Neighbor> neighbors, const EmbeddingSet& gallery, std::size_t k) {
    if (k == 0 || k > neighbors.size()) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " with " + std::to_string(neighbors.size()) +
                                              " neighbors available");
    }
    const std::size_t classes = gallery.catalog.size();
    std::vector<double> votes(classes, 0.0);
    std::vector<double> summed(classes, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const ClassId c = gallery.class_ids[neighbors[i].index];
        votes[c] += 1.0;
        summed[c] += neighbors[i].distance;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && votes[c] > 0 && summed[c] < summed[best])) {
            best = c;
        }
    }
    Prediction p;
    p.rule = Rule::Knn;
    p.class_id = static_cast<ClassId>(best);
    p.scores = std::move(votes);
    return p;
}

Prediction classify_knn(VectorView query, const EmbeddingSet& gallery, std::size_t k, Metric metric) {
    const auto neighbors = nearest_neighbors(query, gallery, k, metric);
    return vote(neighbors, gallery, k);
}

std::vector<Prediction> classify_batch(const EmbeddingSet& queries, Rule rule, const ClassifierConfig& config,
                                       const PrototypeBank& bank) {
    config.validate();
    if (rule == Rule::Knn) {
        throw Error(ErrorCode::Config, "k-NN classifies against a gallery, not a prototype bank");
    }
    std::vector<Prediction> out(queries.size());
    detail::parallel_for(queries.size(), config.parallel, [&](std::size_t i) {
        out[i] = run_item(i, [&] {
            return rule == Rule::Softmax ? classify_softmax(queries.vector(i), bank, config.temperature)
                                         : classify_npc(queries.vector(i), bank, config.metric);
        });
    });
    return out;
}

std::vector<Prediction> classify_batch(const EmbeddingSet& queries, Rule rule, const ClassifierConfig& config,
                                       const EmbeddingSet& gallery) {
    config.validate();
    if (rule != Rule::Knn) {
        throw Error(ErrorCode::Config, "a gallery target requires the knn rule");
    }
    std::vector<Prediction> out(queries.size());
    detail::parallel_for(queries.size(), config.parallel, [&](std::size_t i) {
        out[i] = run_item(i, [&] { return classify_knn(queries.vector(i), gallery, config.k, config.metric); });
    });
    return out;
}

std::vector<std::vector<Neighbor>> batch_neighbors(const EmbeddingSet& queries, const EmbeddingSet& gallery,
                                                   std::size_t k, Metric metric, unsigned parallel) {
    std::vector<std::vector<Neighbor>> out(queries.size());
    detail::parallel_for(queries.size(), parallel, [&](std::size_t i) {
        out[i] = run_item(i, [&] { return nearest_neighbors(queries.vector(i), gallery, k, metric); });
    });
    return out;
}

nlohmann::json prediction_to_json(const Prediction& p, std::string_view source_id, ClassId true_class) {
    return {{"sourceId", source_id},
            {"predictedClassId", p.class_id},
            {"trueClassId", true_class},
            {"rule", to_string(p.rule)},
            {"scores", p.scores}};
}

} // namespace protoclass
