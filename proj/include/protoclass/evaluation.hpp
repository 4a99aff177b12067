#ifndef PROTOCLASS_EVALUATION_HPP
#define PROTOCLASS_EVALUATION_HPP

#include "protoclass/classifiers.hpp"
#include "protoclass/linalg.hpp"
#include "protoclass/prototypes.hpp"
#include "protoclass/store.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace protoclass {

/// Percentage of positions where @p predicted equals @p truth.
double top1_accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth);
double top1_accuracy(std::span<const Prediction> predictions, std::span<const ClassId> truth);

enum class Direction { TrainToTest, TestToTrain };

/// Column ids used in reports for the two cross-validation directions.
inline constexpr std::string_view kTrainToTest = "train_to_test";
inline constexpr std::string_view kTestToTrain = "test_to_train";
std::string_view column_id(Direction d);

struct ReportRow {
    std::string config;
    /// A direction id (kTrainToTest / kTestToTrain) or a query-subset label.
    std::string column;
    std::optional<double> accuracy;
    std::size_t n_queries = 0;
    /// "ok", or the error that stopped this cell.
    std::string status = "ok";
    /// Accuracy per seed when a cell is repeated over seeds (accuracy is their mean).
    std::vector<double> per_seed;

    bool operator==(const ReportRow&) const = default;
};

struct Aggregate {
    std::string config;
    double mean = 0.0;
    /// Half the absolute difference between the two directions.
    double spread = 0.0;
};

struct EvalReport {
    std::string title;
    std::vector<std::string> columns;
    std::vector<ReportRow> rows;
    nlohmann::json parameters = nlohmann::json::object();

    /// Configs in first-appearance order.
    std::vector<std::string> configs() const;
    const ReportRow* find(std::string_view config, std::string_view column) const;

    /// Mean and spread per config that has both directions evaluated.
    std::vector<Aggregate> aggregates() const;

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
    /// Aligned plain-text table, one line per config.
    std::string to_text() const;
};

/// What is fit on the gallery and how queries are classified.
struct PipelineConfig {
    Rule rule = Rule::Npc;
    ClassifierConfig classifier;
    /// Per-class sample size for visual prototypes; nullopt uses the whole gallery.
    std::optional<std::size_t> prototype_samples;
    std::optional<std::size_t> pca_dim;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
};

/**
 * @brief Artifacts fit on a gallery split only.
 *
 * Visual prototypes are averaged in the input space and, when PCA is
 * enabled, projected into PCA coordinates alongside queries and gallery.
 * Projected vectors are not renormalized, so a full-rank PCA preserves all
 * Euclidean distances.
 */
struct FittedPipeline {
    PipelineConfig config;
    std::optional<PcaModel> pca;
    std::optional<PrototypeBank> bank;
    std::optional<EmbeddingSet> gallery;

    std::vector<Prediction> predict(const EmbeddingSet& queries) const;
};

FittedPipeline fit_pipeline(const EmbeddingSet& gallery, const PipelineConfig& config);

/// Throws CatalogMismatch or DimMismatch unless the two sets can play gallery and query.
void require_compatible(const EmbeddingSet& a, const EmbeddingSet& b);

/// Both directions (train gallery -> test queries, then the reverse) of one pipeline.
EvalReport crossval_2fold(const EmbeddingSet& train, const EmbeddingSet& test, const PipelineConfig& config,
                          const std::string& label = "accuracy");

/// "means" (NPC) row plus one k-NN row per k, for both directions. k > gallery size yields a status row.
EvalReport sweep_k(const EmbeddingSet& train, const EmbeddingSet& test, std::span<const std::size_t> ks,
                   const PipelineConfig& base);

/// NPC with seeded per-class samples; each cell is the mean over @p seeds.
EvalReport sweep_prototype_samples(const EmbeddingSet& train, const EmbeddingSet& test,
                                   std::span<const std::size_t> sizes, std::span<const std::uint64_t> seeds,
                                   const PipelineConfig& base);

/// Joins two encoders' embeddings of the same records by sourceId and fuses them (order of @p a).
EmbeddingSet join_fused(const EmbeddingSet& a, const EmbeddingSet& b);

struct FusionInputs {
    const EmbeddingSet& train_a;
    const EmbeddingSet& train_b;
    const EmbeddingSet& test_a;
    const EmbeddingSet& test_b;
    std::string label_a = "A";
    std::string label_b = "B";
};

/// Rows: A, B, A + B, then A + B + PCA(d) per requested dim. PCA is fit on the fused gallery.
EvalReport sweep_fusion(const FusionInputs& inputs, std::span<const std::size_t> pca_dims,
                        const PipelineConfig& base);

/// Textual prototype banks against query subsets; columns are subset labels, no directions.
EvalReport evaluate_banks(const std::vector<std::pair<std::string, PrototypeBank>>& banks,
                          const std::vector<std::pair<std::string, const EmbeddingSet*>>& subsets,
                          const ClassifierConfig& config, const std::string& title);

/// Records of both sets in order (a, then b). Catalogs and dims must agree.
EmbeddingSet concat_sets(const EmbeddingSet& a, const EmbeddingSet& b);

struct SyntheticSpec {
    std::size_t classes = 28;
    std::size_t dim = 64;
    std::size_t per_class = 50;
    /// Per-coordinate standard deviation of the Gaussian noise added to each center.
    double sigma = 0.1;
    std::uint64_t seed = 0;
    /// Centers are redrawn until every pairwise cosine is at most this.
    double max_center_cosine = 0.8;

    void validate() const;
    nlohmann::json to_json() const;
};

struct SyntheticData {
    EmbeddingSet train;
    EmbeddingSet test;
};

/**
 * @brief Unit-norm Gaussian clusters around seeded unit centers.
 *
 * Draws come from one SplitMix64 stream: centers (rejection sampled), then
 * the train members class by class, then the test members.
 */
SyntheticData generate_synthetic(const SyntheticSpec& spec);

struct SyntheticPair {
    SyntheticData a;
    SyntheticData b;
};

/**
 * @brief Two encoders that each separate only half of the classes.
 *
 * Encoder A merges the second half of the classes pairwise onto shared
 * centers, encoder B merges the first half. Both encoders see the same
 * records (same sourceIds).
 */
SyntheticPair generate_synthetic_complementary(const SyntheticSpec& spec);

struct Projection {
    struct Point {
        std::string source_id;
        ClassId class_id;
        double x;
        double y;
    };
    std::vector<Point> points;
    std::vector<Point> centroids;
    PcaModel pca;

    /// sourceId,classId,x,y rows; centroid rows use sourceId "centroid:<class name>".
    std::string to_csv() const;
};

/// PCA-2D projection of a set with per-class centroids of the projected points.
Projection project_2d(const EmbeddingSet& set);

} // namespace protoclass

#endif
