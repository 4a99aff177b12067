#include "protoclass/prototypes.hpp"

#include "protoclass/errors.hpp"

#include <array>

namespace protoclass {

namespace {

constexpr std::string_view kQuotedBaseline = "A photo of a [c]";
constexpr std::string_view kQuotedCropped = "A cropped photo of a [c]";
constexpr std::string_view kQuotedCentered = "A centered photo of a [c] consumer product";

// Drawn from the public CLIP ImageNet zero-shot template list, skipping the
// two entries already covered by the quoted templates above.
constexpr std::array<std::string_view, 41> kPublicTemplates = {
    "a bad photo of a [c].",
    "a photo of many [c].",
    "a photo of the hard to see [c].",
    "a low resolution photo of the [c].",
    "a bad photo of the [c].",
    "a cropped photo of the [c].",
    "a photo of a hard to see [c].",
    "a bright photo of a [c].",
    "a photo of a clean [c].",
    "a photo of a dirty [c].",
    "a dark photo of the [c].",
    "a photo of my [c].",
    "a photo of the cool [c].",
    "a close-up photo of a [c].",
    "a black and white photo of the [c].",
    "a pixelated photo of the [c].",
    "a bright photo of the [c].",
    "a photo of the dirty [c].",
    "a jpeg corrupted photo of a [c].",
    "a blurry photo of the [c].",
    "a photo of the [c].",
    "a good photo of the [c].",
    "a photo of one [c].",
    "a close-up photo of the [c].",
    "a low resolution photo of a [c].",
    "a photo of the clean [c].",
    "a photo of a large [c].",
    "a photo of a nice [c].",
    "a photo of a weird [c].",
    "a blurry photo of a [c].",
    "a pixelated photo of a [c].",
    "itap of the [c].",
    "a jpeg corrupted photo of the [c].",
    "a good photo of a [c].",
    "a photo of the nice [c].",
    "a photo of the small [c].",
    "a photo of the weird [c].",
    "a photo of the large [c].",
    "a black and white photo of a [c].",
    "a dark photo of a [c].",
    "itap of a [c].",
};

std::size_t count_placeholders(std::string_view text) {
    std::size_t count = 0;
    for (auto pos = text.find(PromptTemplate::kPlaceholder); pos != std::string_view::npos;
         pos = text.find(PromptTemplate::kPlaceholder, pos + PromptTemplate::kPlaceholder.size())) {
        ++count;
    }
    return count;
}

} // namespace

PromptTemplate::PromptTemplate(std::string pattern) : pattern_(std::move(pattern)) {
    const auto n = count_placeholders(pattern_);
    if (n != 1) {
        throw Error(ErrorCode::BadTemplate, "'" + pattern_ + "' has " + std::to_string(n) +
                                                " \"[c]\" placeholders, expected exactly one");
    }
}

std::string PromptTemplate::expand(std::string_view class_name) const {
    std::string out = pattern_;
    out.replace(out.find(kPlaceholder), kPlaceholder.size(), class_name);
    return out;
}

TemplateBank TemplateBank::builtin(std::string_view name) {
    TemplateBank bank;
    bank.name = std::string(name);
    if (name == "baseline") {
        bank.templates.emplace_back(std::string(kQuotedBaseline));
    } else if (name == "multiple") {
        for (auto t : {kQuotedBaseline, kQuotedCropped, kQuotedCentered}) {
            bank.templates.emplace_back(std::string(t));
        }
        for (auto t : kPublicTemplates) {
            bank.templates.emplace_back(std::string(t));
        }
    } else if (name == "selected") {
        for (auto t : {kQuotedBaseline, kQuotedCropped, kQuotedCentered}) {
            bank.templates.emplace_back(std::string(t));
        }
    } else {
        throw Error(ErrorCode::Config, "no built-in template bank named '" + std::string(name) + "'");
    }
    bank.validate();
    return bank;
}

TemplateBank TemplateBank::from_json(const nlohmann::json& j) {
    TemplateBank bank;
    try {
        bank.name = j.at("name").get<std::string>();
        for (const auto& t : j.at("templates")) {
            bank.templates.emplace_back(t.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, std::string("template bank: ") + e.what());
    }
    bank.validate();
    return bank;
}

TemplateBank TemplateBank::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
}

nlohmann::json TemplateBank::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : templates) {
        list.push_back(t.pattern());
    }
    return {{"name", name}, {"templates", list}};
}

void TemplateBank::validate() const {
    if (templates.empty()) {
        throw Error(ErrorCode::BadTemplate, "bank '" + name + "' has no templates");
    }
    if (name == "baseline" && templates.size() != 1) {
        throw Error(ErrorCode::BadTemplate, "the baseline bank holds exactly 1 template, got " +
                                                std::to_string(templates.size()));
    }
    if (name == "multiple" && templates.size() != 44) {
        throw Error(ErrorCode::BadTemplate, "the multiple bank holds exactly 44 templates, got " +
                                                std::to_string(templates.size()));
    }
}

std::vector<std::vector<std::string>> expand_templates(const TemplateBank& bank, const ClassCatalog& catalog) {
    bank.validate();
    std::vector<std::vector<std::string>> prompts(catalog.size());
    for (std::size_t c = 0; c < catalog.size(); ++c) {
        prompts[c].reserve(bank.templates.size());
        for (const auto& t : bank.templates) {
            prompts[c].push_back(t.expand(catalog.names()[c]));
        }
    }
    return prompts;
}

std::string_view to_string(PrototypeSource source) {
    switch (source) {
    case PrototypeSource::TextTemplate: return "textTemplate";
    case PrototypeSource::Caption: return "caption";
    case PrototypeSource::VisualMean: return "visualMean";
    }
    return "visualMean";
}

PrototypeSource parse_prototype_source(std::string_view text) {
    if (text == "textTemplate") return PrototypeSource::TextTemplate;
    if (text == "caption") return PrototypeSource::Caption;
    if (text == "visualMean") return PrototypeSource::VisualMean;
    throw FormatError(FormatReason::BadManifest, "unknown prototype source '" + std::string(text) + "'");
}

std::string_view to_string(CaptionSplit split) {
    switch (split) {
    case CaptionSplit::Train: return "train";
    case CaptionSplit::Test: return "test";
    case CaptionSplit::All: return "all";
    }
    return "all";
}

CaptionSplit parse_caption_split(std::string_view text) {
    if (text == "train") return CaptionSplit::Train;
    if (text == "test") return CaptionSplit::Test;
    if (text == "all") return CaptionSplit::All;
    throw Error(ErrorCode::Config, "unknown caption split '" + std::string(text) + "'");
}

PrototypeBank average_groups(const EmbeddingSet& set, const std::vector<std::vector<std::size_t>>& groups,
                             PrototypeSource source) {
    PrototypeBank bank;
    bank.catalog = set.catalog;
    bank.dim = set.dim();
    bank.source = source;
    bank.prototypes.reserve(set.catalog.size());
    for (std::size_t c = 0; c < set.catalog.size(); ++c) {
        if (c >= groups.size() || groups[c].empty()) {
            throw Error(ErrorCode::MissingClass, "class " + std::to_string(c) + " ('" + set.catalog.names()[c] +
                                                     "') has no embeddings");
        }
        Prototype p;
        p.class_id = static_cast<ClassId>(c);
        p.vector = l2_normalize(mean_of_rows(set.vectors, groups[c]));
        p.source = source;
        p.support_count = groups[c].size();
        bank.prototypes.push_back(std::move(p));
    }
    return bank;
}

PrototypeBank build_text_prototypes(const EmbeddingSet& text_embeddings) {
    return average_groups(text_embeddings, records_by_class(text_embeddings), PrototypeSource::TextTemplate);
}

PrototypeBank build_caption_prototypes(std::span<const EmbeddingSet> caption_embeddings, CaptionSplit split) {
    if (caption_embeddings.empty()) {
        throw Error(ErrorCode::EmptyInput, "no caption embedding sets given");
    }
    const auto& first = caption_embeddings.front();
    EmbeddingSet pooled(first.dim(), first.catalog);
    for (const auto& set : caption_embeddings) {
        if (!(set.catalog == first.catalog)) {
            throw Error(ErrorCode::CatalogMismatch, "caption embedding sets use different catalogs");
        }
        if (set.dim() != first.dim()) {
            throw Error(ErrorCode::DimMismatch, "caption embedding sets of dims " + std::to_string(first.dim()) +
                                                    " and " + std::to_string(set.dim()));
        }
        const bool take = split == CaptionSplit::All || (split == CaptionSplit::Train && set.split == SplitTag::Train) ||
                          (split == CaptionSplit::Test && set.split == SplitTag::Test);
        if (!take) {
            continue;
        }
        for (std::size_t i = 0; i < set.size(); ++i) {
            pooled.add(set.vector(i), set.class_ids[i], set.source_ids[i]);
        }
    }
    auto bank = average_groups(pooled, records_by_class(pooled), PrototypeSource::Caption);
    bank.metadata["sourceSplit"] = to_string(split);
    return bank;
}

PrototypeBank build_visual_prototypes(const EmbeddingSet& gallery, std::optional<std::size_t> per_class_samples,
                                      std::uint64_t seed) {
    auto bank = average_groups(gallery, sample_indices_per_class(gallery, per_class_samples, seed),
                               PrototypeSource::VisualMean);
    if (per_class_samples) {
        bank.metadata["perClassSamples"] = *per_class_samples;
        bank.metadata["seed"] = seed;
    }
    return bank;
}

PrototypeBank project_bank(const PrototypeBank& bank, const PcaModel& pca) {
    if (bank.dim != pca.input_dim) {
        throw Error(ErrorCode::DimMismatch, "bank dim " + std::to_string(bank.dim) + ", PCA input dim " +
                                                std::to_string(pca.input_dim));
    }
    PrototypeBank out = bank;
    out.dim = pca.output_dim;
    out.projected = true;
    for (auto& p : out.prototypes) {
        p.vector = pca.transform(p.vector);
    }
    out.metadata["pcaDim"] = pca.output_dim;
    return out;
}

EmbeddingSet bank_to_set(const PrototypeBank& bank) {
    EmbeddingSet set(bank.dim, bank.catalog);
    set.role = "prototypes";
    set.encoder = bank.metadata.value("encoderTag", "");
    nlohmann::json support = nlohmann::json::array();
    for (const auto& p : bank.prototypes) {
        set.add(p.vector, p.class_id, "prototype:" + bank.catalog.names()[p.class_id]);
        support.push_back(p.support_count);
    }
    set.extra["source"] = to_string(bank.source);
    set.extra["supportCounts"] = std::move(support);
    set.extra["projected"] = bank.projected;
    set.extra["metadata"] = bank.metadata;
    return set;
}

PrototypeBank bank_from_set(const EmbeddingSet& set) {
    if (set.role != "prototypes") {
        throw FormatError(FormatReason::BadManifest, "manifest role is '" + set.role + "', expected 'prototypes'");
    }
    PrototypeBank bank;
    bank.catalog = set.catalog;
    bank.dim = set.dim();
    try {
        bank.source = parse_prototype_source(set.extra.at("source").get<std::string>());
        bank.projected = set.extra.value("projected", false);
        bank.metadata = set.extra.value("metadata", nlohmann::json::object());
        const auto support = set.extra.at("supportCounts").get<std::vector<std::size_t>>();
        if (support.size() != set.size() || set.size() != set.catalog.size()) {
            throw FormatError(FormatReason::CountMismatch, "prototype bank must hold one record per class");
        }
        std::vector<bool> seen(set.catalog.size(), false);
        bank.prototypes.resize(set.catalog.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            const ClassId c = set.class_ids[i];
            if (seen[c]) {
                throw FormatError(FormatReason::BadManifest, "class " + std::to_string(c) + " has two prototypes");
            }
            seen[c] = true;
            const auto v = set.vector(i);
            bank.prototypes[c] = Prototype{c, Vector(v.begin(), v.end()), bank.source, support[i]};
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatReason::BadManifest, std::string("prototype manifest: ") + e.what());
    }
    return bank;
}

void write_bank(const PrototypeBank& bank, const std::filesystem::path& path) { write_set(bank_to_set(bank), path); }

PrototypeBank read_bank(const std::filesystem::path& path) { return bank_from_set(read_set(path)); }

} // namespace protoclass
