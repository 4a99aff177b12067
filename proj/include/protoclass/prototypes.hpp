#ifndef PROTOCLASS_PROTOTYPES_HPP
#define PROTOCLASS_PROTOTYPES_HPP

#include "protoclass/linalg.hpp"
#include "protoclass/store.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace protoclass {

/// A prompt pattern with exactly one "[c]" placeholder for the class name.
class PromptTemplate {
public:
    static constexpr std::string_view kPlaceholder = "[c]";

    /// Throws BadTemplate unless the placeholder occurs exactly once.
    explicit PromptTemplate(std::string pattern);

    const std::string& pattern() const { return pattern_; }
    std::string expand(std::string_view class_name) const;

private:
    std::string pattern_;
};

struct TemplateBank {
    std::string name;
    std::vector<PromptTemplate> templates;

    /// The built-in banks are "baseline" (1 template), "multiple" (44) and "selected".
    static TemplateBank builtin(std::string_view name);

    /// JSON file {name, templates:[...]}.
    static TemplateBank load(const std::filesystem::path& path);
    static TemplateBank from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Enforces the cardinality of the named banks (baseline = 1, multiple = 44).
    void validate() const;
};

/// Prompts per class, indexed by class id, in bank order.
std::vector<std::vector<std::string>> expand_templates(const TemplateBank& bank, const ClassCatalog& catalog);

enum class PrototypeSource { TextTemplate, Caption, VisualMean };

std::string_view to_string(PrototypeSource source);
PrototypeSource parse_prototype_source(std::string_view text);

struct Prototype {
    ClassId class_id = 0;
    Vector vector;
    PrototypeSource source = PrototypeSource::VisualMean;
    std::size_t support_count = 0;
};

/**
 * @brief One prototype per catalog class.
 *
 * Banks produced by the builders hold unit vectors. A bank passed through
 * project_bank() lives in PCA coordinates and is flagged `projected`; its
 * vectors are not renormalized.
 */
struct PrototypeBank {
    ClassCatalog catalog;
    std::size_t dim = 0;
    PrototypeSource source = PrototypeSource::VisualMean;
    std::vector<Prototype> prototypes;
    bool projected = false;
    /// Builder parameters (caption split, sample size, seed, template bank).
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t size() const { return prototypes.size(); }
    VectorView vector(std::size_t i) const { return prototypes[i].vector; }
};

/// Shared averaging path: per class, mean of the listed rows, then L2-normalized.
/// `groups[c]` lists the rows of class c; an empty group raises MissingClass.
PrototypeBank average_groups(const EmbeddingSet& set, const std::vector<std::vector<std::size_t>>& groups,
                             PrototypeSource source);

/// Prompt embeddings of every class averaged into one textual prototype each.
PrototypeBank build_text_prototypes(const EmbeddingSet& text_embeddings);

enum class CaptionSplit { Train, Test, All };

std::string_view to_string(CaptionSplit split);
CaptionSplit parse_caption_split(std::string_view text);

/**
 * @brief Caption descriptors: per class, the mean of its caption embeddings.
 *
 * Sets whose split tag matches @p split are pooled; `All` pools every set
 * given (the literal union of the splits). All sets must share one catalog.
 */
PrototypeBank build_caption_prototypes(std::span<const EmbeddingSet> caption_embeddings, CaptionSplit split);

/**
 * @brief Visual class means over a labeled gallery.
 *
 * With @p per_class_samples set, each class mean is taken over a seeded
 * sample drawn by sample_per_class(); support counts record the actual
 * number of records used.
 */
PrototypeBank build_visual_prototypes(const EmbeddingSet& gallery, std::optional<std::size_t> per_class_samples,
                                      std::uint64_t seed);

PrototypeBank project_bank(const PrototypeBank& bank, const PcaModel& pca);

/// EMB1 representation (manifest role "prototypes").
EmbeddingSet bank_to_set(const PrototypeBank& bank);
PrototypeBank bank_from_set(const EmbeddingSet& set);

void write_bank(const PrototypeBank& bank, const std::filesystem::path& path);
PrototypeBank read_bank(const std::filesystem::path& path);

} // namespace protoclass

#endif
