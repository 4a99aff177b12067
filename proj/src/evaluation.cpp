#include "protoclass/evaluation.hpp"

#include "protoclass/errors.hpp"
#include "protoclass/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace protoclass {

namespace {

constexpr std::size_t kMaxCenterRejections = 100000;

std::string format_double(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double accuracy_of(const std::vector<Prediction>& predictions, const EmbeddingSet& queries) {
    return top1_accuracy(predictions, queries.class_ids);
}

struct Split {
    Direction direction;
    const EmbeddingSet& gallery;
    const EmbeddingSet& queries;
};

std::vector<Split> both_directions(const EmbeddingSet& train, const EmbeddingSet& test) {
    return {{Direction::TrainToTest, train, test}, {Direction::TestToTrain, test, train}};
}

template <typename Fn>
ReportRow run_cell(std::string config, std::string_view column, std::size_t n_queries, Fn&& fn) {
    ReportRow row;
    row.config = std::move(config);
    row.column = std::string(column);
    row.n_queries = n_queries;
    try {
        row.accuracy = fn(row);
    } catch (const Error& e) {
        row.status = e.what();
    }
    return row;
}

EmbeddingSet empty_like(const EmbeddingSet& set, std::size_t dim) {
    EmbeddingSet out(dim, set.catalog);
    out.split = set.split;
    out.cleaned = set.cleaned;
    out.encoder = set.encoder;
    out.role = set.role;
    return out;
}

EmbeddingSet transformed(const EmbeddingSet& set, const PcaModel& pca) {
    EmbeddingSet out = empty_like(set, pca.output_dim);
    out.vectors = pca.transform(set.vectors);
    out.class_ids = set.class_ids;
    out.source_ids = set.source_ids;
    return out;
}

std::vector<double> unit_gaussian(SplitMix64& rng, std::size_t dim) {
    for (;;) {
        std::vector<double> v(dim);
        double sq = 0.0;
        for (auto& x : v) {
            x = rng.gaussian();
            sq += x * x;
        }
        if (sq > 1e-24) {
            const double n = std::sqrt(sq);
            for (auto& x : v) {
                x /= n;
            }
            return v;
        }
    }
}

std::vector<std::vector<double>> draw_centers(SplitMix64& rng, const SyntheticSpec& spec) {
    std::vector<std::vector<double>> centers;
    std::size_t rejections = 0;
    while (centers.size() < spec.classes) {
        auto candidate = unit_gaussian(rng, spec.dim);
        bool ok = true;
        for (const auto& c : centers) {
            double cos = 0.0;
            for (std::size_t j = 0; j < spec.dim; ++j) {
                cos += c[j] * candidate[j];
            }
            if (cos > spec.max_center_cosine) {
                ok = false;
                break;
            }
        }
        if (ok) {
            centers.push_back(std::move(candidate));
        } else if (++rejections >= kMaxCenterRejections) {
            throw Error(ErrorCode::CenterSamplingFailed,
                        "no admissible center after " + std::to_string(rejections) + " rejections (" +
                            std::to_string(centers.size()) + " of " + std::to_string(spec.classes) + " placed)");
        }
    }
    return centers;
}

Vector noisy_member(SplitMix64& rng, const std::vector<double>& center, double sigma) {
    std::vector<double> v(center.size());
    double sq = 0.0;
    for (std::size_t j = 0; j < center.size(); ++j) {
        v[j] = center[j] + sigma * rng.gaussian();
        sq += v[j] * v[j];
    }
    const double n = std::sqrt(sq);
    if (n < 1e-12) {
        throw Error(ErrorCode::ZeroVector, "synthetic member collapsed to the origin");
    }
    Vector out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        out[j] = static_cast<float>(v[j] / n);
    }
    return out;
}

ClassCatalog synthetic_catalog(std::size_t classes) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < classes; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "class_%03zu", c);
        names.emplace_back(buf);
    }
    return ClassCatalog(std::move(names));
}

std::string synthetic_source_id(SplitTag split, std::size_t c, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s-c%03zu-%06zu", std::string(to_string(split)).c_str(), c, i);
    return buf;
}

EmbeddingSet synthetic_split(const SyntheticSpec& spec, const ClassCatalog& catalog, SplitTag split,
                             const std::string& encoder) {
    EmbeddingSet set(spec.dim, catalog);
    set.split = split;
    set.encoder = encoder;
    set.extra["synthetic"] = spec.to_json();
    set.vectors.reserve(spec.classes * spec.per_class);
    return set;
}

} // namespace

// ---------------------------------------------------------------------------
// Accuracy and reports

double top1_accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth) {
    if (predicted.size() != truth.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions for " +
                                                   std::to_string(truth.size()) + " labels");
    }
    if (predicted.empty()) {
        throw Error(ErrorCode::EmptyInput, "accuracy of zero predictions");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        correct += predicted[i] == truth[i] ? 1 : 0;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double top1_accuracy(std::span<const Prediction> predictions, std::span<const ClassId> truth) {
    std::vector<ClassId> ids(predictions.size());
    std::transform(predictions.begin(), predictions.end(), ids.begin(), [](const Prediction& p) { return p.class_id; });
    return top1_accuracy(ids, truth);
}

std::string_view column_id(Direction d) { return d == Direction::TrainToTest ? kTrainToTest : kTestToTrain; }

std::vector<std::string> EvalReport::configs() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (std::find(out.begin(), out.end(), r.config) == out.end()) {
            out.push_back(r.config);
        }
    }
    return out;
}

const ReportRow* EvalReport::find(std::string_view config, std::string_view column) const {
    for (const auto& r : rows) {
        if (r.config == config && r.column == column) {
            return &r;
        }
    }
    return nullptr;
}

std::vector<Aggregate> EvalReport::aggregates() const {
    std::vector<Aggregate> out;
    for (const auto& config : configs()) {
        const auto* a = find(config, kTrainToTest);
        const auto* b = find(config, kTestToTrain);
        if (a && b && a->accuracy && b->accuracy) {
            out.push_back({config, (*a->accuracy + *b->accuracy) / 2.0, std::abs(*a->accuracy - *b->accuracy) / 2.0});
        }
    }
    return out;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["title"] = title;
    j["columns"] = columns;
    j["parameters"] = parameters;
    auto rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"config", r.config},
                              {"column", r.column},
                              {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr)},
                              {"nQueries", r.n_queries},
                              {"status", r.status}};
        if (!r.per_seed.empty()) {
            row["perSeed"] = r.per_seed;
        }
        rows_json.push_back(std::move(row));
    }
    j["rows"] = std::move(rows_json);
    auto agg = nlohmann::json::array();
    for (const auto& a : aggregates()) {
        agg.push_back({{"config", a.config}, {"mean", a.mean}, {"spread", a.spread}});
    }
    j["aggregates"] = std::move(agg);
    return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport report;
    try {
        report.title = j.at("title").get<std::string>();
        report.columns = j.at("columns").get<std::vector<std::string>>();
        report.parameters = j.value("parameters", nlohmann::json::object());
        for (const auto& r : j.at("rows")) {
            ReportRow row;
            row.config = r.at("config").get<std::string>();
            row.column = r.at("column").get<std::string>();
            if (!r.at("accuracy").is_null()) {
                row.accuracy = r.at("accuracy").get<double>();
            }
            row.n_queries = r.at("nQueries").get<std::size_t>();
            row.status = r.at("status").get<std::string>();
            row.per_seed = r.value("perSeed", std::vector<double>{});
            report.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatReason::BadManifest, std::string("report: ") + e.what());
    }
    return report;
}

std::string EvalReport::to_text() const {
    auto header_of = [](const std::string& column) -> std::string {
        if (column == kTrainToTest) return "Train -> Test";
        if (column == kTestToTrain) return "Test -> Train";
        return column;
    };
    const auto config_list = configs();
    const auto agg = aggregates();
    const bool with_average = !agg.empty();

    std::size_t first_width = 6;
    for (const auto& c : config_list) {
        first_width = std::max(first_width, c.size());
    }
    std::vector<std::size_t> widths;
    for (const auto& c : columns) {
        widths.push_back(std::max<std::size_t>(header_of(c).size(), 8));
    }
    const std::size_t average_width = 15;

    std::string out;
    if (!title.empty()) {
        out += title + "\n";
    }
    // Widths count code points so the "±" in the Average column lines up.
    auto width_of = [](const std::string& s) {
        return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char ch) { return (ch & 0xC0) != 0x80; }));
    };
    auto pad_left = [&](const std::string& s, std::size_t w) {
        return std::string(w > width_of(s) ? w - width_of(s) : 0, ' ') + s;
    };
    auto pad_right = [&](const std::string& s, std::size_t w) {
        return s + std::string(w > width_of(s) ? w - width_of(s) : 0, ' ');
    };

    std::string line = pad_right("", first_width);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        line += "  " + pad_left(header_of(columns[i]), widths[i]);
    }
    if (with_average) {
        line += "  " + pad_left("Average", average_width);
    }
    out += line + "\n";
    out += std::string(width_of(line), '-') + "\n";

    for (const auto& config : config_list) {
        line = pad_right(config, first_width);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto* row = find(config, columns[i]);
            std::string cell = "-";
            if (row && row->accuracy) {
                cell = format_double("%.2f", *row->accuracy);
            } else if (row) {
                cell = "ERR(" + row->status.substr(0, row->status.find(':')) + ")";
            }
            line += "  " + pad_left(cell, widths[i]);
        }
        if (with_average) {
            std::string cell = "-";
            for (const auto& a : agg) {
                if (a.config == config) {
                    cell = format_double("%.2f", a.mean) + " ± " + format_double("%.1f", a.spread);
                }
            }
            line += "  " + pad_left(cell, average_width);
        }
        out += line + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pipelines

nlohmann::json PipelineConfig::to_json() const {
    return {{"rule", to_string(rule)},
            {"temperature", classifier.temperature},
            {"metric", to_string(classifier.metric)},
            {"k", classifier.k},
            {"prototypeSamples", prototype_samples ? nlohmann::json(*prototype_samples) : nlohmann::json(nullptr)},
            {"pcaDim", pca_dim ? nlohmann::json(*pca_dim) : nlohmann::json(nullptr)},
            {"seed", seed}};
}

void require_compatible(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (!(a.catalog == b.catalog)) {
        throw Error(ErrorCode::CatalogMismatch, "gallery and query sets use different class catalogs");
    }
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimMismatch, "gallery dim " + std::to_string(a.dim()) + ", query dim " +
                                                std::to_string(b.dim()));
    }
}

FittedPipeline fit_pipeline(const EmbeddingSet& gallery, const PipelineConfig& config) {
    config.classifier.validate();
    FittedPipeline fitted;
    fitted.config = config;
    if (config.pca_dim) {
        fitted.pca = pca_fit(gallery.vectors, *config.pca_dim);
    }
    if (config.rule == Rule::Knn) {
        fitted.gallery = fitted.pca ? transformed(gallery, *fitted.pca) : gallery;
    } else {
        auto bank = build_visual_prototypes(gallery, config.prototype_samples, config.seed);
        fitted.bank = fitted.pca ? project_bank(bank, *fitted.pca) : std::move(bank);
    }
    return fitted;
}

std::vector<Prediction> FittedPipeline::predict(const EmbeddingSet& queries) const {
    const EmbeddingSet* q = &queries;
    EmbeddingSet projected;
    if (pca) {
        projected = transformed(queries, *pca);
        q = &projected;
    }
    if (config.rule == Rule::Knn) {
        return classify_batch(*q, config.rule, config.classifier, *gallery);
    }
    return classify_batch(*q, config.rule, config.classifier, *bank);
}

EvalReport crossval_2fold(const EmbeddingSet& train, const EmbeddingSet& test, const PipelineConfig& config,
                          const std::string& label) {
    require_compatible(train, test);
    EvalReport report;
    report.title = "crossval";
    report.columns = {std::string(kTrainToTest), std::string(kTestToTrain)};
    report.parameters["pipeline"] = config.to_json();
    for (const auto& split : both_directions(train, test)) {
        const auto fitted = fit_pipeline(split.gallery, config);
        ReportRow row;
        row.config = label;
        row.column = std::string(column_id(split.direction));
        row.n_queries = split.queries.size();
        row.accuracy = accuracy_of(fitted.predict(split.queries), split.queries);
        report.rows.push_back(std::move(row));
    }
    return report;
}

EvalReport sweep_k(const EmbeddingSet& train, const EmbeddingSet& test, std::span<const std::size_t> ks,
                   const PipelineConfig& base) {
    require_compatible(train, test);
    std::vector<std::string> labels = {"means"};
    for (auto k : ks) {
        labels.push_back("k=" + std::to_string(k));
    }
    std::map<std::pair<std::string, std::string>, ReportRow> cells;

    for (const auto& split : both_directions(train, test)) {
        const auto column = column_id(split.direction);
        const auto n = split.queries.size();

        PipelineConfig npc = base;
        npc.rule = Rule::Npc;
        cells[{labels[0], std::string(column)}] = run_cell(labels[0], column, n, [&](ReportRow&) {
            return accuracy_of(fit_pipeline(split.gallery, npc).predict(split.queries), split.queries);
        });

        std::size_t k_max = 0;
        for (auto k : ks) {
            if (k >= 1 && k <= split.gallery.size()) {
                k_max = std::max(k_max, k);
            }
        }
        std::vector<std::vector<Neighbor>> neighbors;
        std::optional<EmbeddingSet> gallery;
        std::optional<std::string> failure;
        if (k_max > 0) {
            try {
                PipelineConfig knn = base;
                knn.rule = Rule::Knn;
                const auto fitted = fit_pipeline(split.gallery, knn);
                const EmbeddingSet queries = fitted.pca ? transformed(split.queries, *fitted.pca) : split.queries;
                gallery = *fitted.gallery;
                neighbors = batch_neighbors(queries, *gallery, k_max, base.classifier.metric, base.classifier.parallel);
            } catch (const Error& e) {
                failure = e.what();
            }
        }

        for (std::size_t i = 0; i < ks.size(); ++i) {
            const auto k = ks[i];
            cells[{labels[i + 1], std::string(column)}] = run_cell(labels[i + 1], column, n, [&](ReportRow&) {
                if (k == 0 || k > split.gallery.size()) {
                    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " with a gallery of " +
                                                          std::to_string(split.gallery.size()) + " records");
                }
                if (failure) {
                    throw Error(ErrorCode::Spec, *failure);
                }
                std::vector<ClassId> predicted(neighbors.size());
                for (std::size_t q = 0; q < neighbors.size(); ++q) {
                    predicted[q] = vote(neighbors[q], *gallery, k).class_id;
                }
                return top1_accuracy(predicted, split.queries.class_ids);
            });
        }
    }

    EvalReport report;
    report.title = "sweep_k";
    report.columns = {std::string(kTrainToTest), std::string(kTestToTrain)};
    report.parameters["pipeline"] = base.to_json();
    report.parameters["ks"] = std::vector<std::size_t>(ks.begin(), ks.end());
    for (const auto& label : labels) {
        for (const auto& column : report.columns) {
            report.rows.push_back(cells.at({label, column}));
        }
    }
    return report;
}

EvalReport sweep_prototype_samples(const EmbeddingSet& train, const EmbeddingSet& test,
                                   std::span<const std::size_t> sizes, std::span<const std::uint64_t> seeds,
                                   const PipelineConfig& base) {
    require_compatible(train, test);
    if (seeds.empty()) {
        throw Error(ErrorCode::Config, "the sample-size sweep needs at least one seed");
    }
    EvalReport report;
    report.title = "sweep_samples";
    report.columns = {std::string(kTrainToTest), std::string(kTestToTrain)};
    report.parameters["pipeline"] = base.to_json();
    report.parameters["sizes"] = std::vector<std::size_t>(sizes.begin(), sizes.end());
    report.parameters["seeds"] = std::vector<std::uint64_t>(seeds.begin(), seeds.end());

    for (auto size : sizes) {
        for (const auto& split : both_directions(train, test)) {
            report.rows.push_back(run_cell(std::to_string(size), column_id(split.direction), split.queries.size(),
                                           [&](ReportRow& row) {
                                               double total = 0.0;
                                               for (auto seed : seeds) {
                                                   PipelineConfig cfg = base;
                                                   cfg.rule = Rule::Npc;
                                                   cfg.prototype_samples = size;
                                                   cfg.seed = seed;
                                                   const double acc = accuracy_of(
                                                       fit_pipeline(split.gallery, cfg).predict(split.queries),
                                                       split.queries);
                                                   row.per_seed.push_back(acc);
                                                   total += acc;
                                               }
                                               return total / static_cast<double>(seeds.size());
                                           }));
        }
    }
    return report;
}

EmbeddingSet join_fused(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (!(a.catalog == b.catalog)) {
        throw Error(ErrorCode::CatalogMismatch, "encoder sets use different class catalogs");
    }
    std::unordered_map<std::string_view, std::size_t> index_b;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!index_b.emplace(b.source_ids[i], i).second) {
            throw Error(ErrorCode::DimMismatch, "duplicate sourceId '" + b.source_ids[i] + "' in the second set");
        }
    }
    std::vector<std::string> missing;
    std::vector<bool> used(b.size(), false);
    EmbeddingSet out = empty_like(a, a.dim() + b.dim());
    out.encoder = a.encoder + "+" + b.encoder;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto it = index_b.find(a.source_ids[i]);
        if (it == index_b.end()) {
            missing.push_back(a.source_ids[i]);
            continue;
        }
        if (used[it->second]) {
            throw Error(ErrorCode::DimMismatch, "duplicate sourceId '" + a.source_ids[i] + "' in the first set");
        }
        used[it->second] = true;
        if (a.class_ids[i] != b.class_ids[it->second]) {
            throw Error(ErrorCode::CatalogMismatch, "sourceId '" + a.source_ids[i] + "' is labeled " +
                                                        std::to_string(a.class_ids[i]) + " and " +
                                                        std::to_string(b.class_ids[it->second]));
        }
        if (missing.empty()) {
            out.add(fuse_concat(a.vector(i), b.vector(it->second)), a.class_ids[i], a.source_ids[i]);
        }
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!used[i]) {
            missing.push_back(b.source_ids[i]);
        }
    }
    if (!missing.empty()) {
        std::string names;
        for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) {
            names += (i ? ", '" : "'") + missing[i] + "'";
        }
        throw Error(ErrorCode::DimMismatch, std::to_string(missing.size()) +
                                                " sourceIds are present in only one encoder set: " + names +
                                                (missing.size() > 5 ? ", ..." : ""));
    }
    return out;
}

EvalReport sweep_fusion(const FusionInputs& in, std::span<const std::size_t> pca_dims, const PipelineConfig& base) {
    require_compatible(in.train_a, in.test_a);
    require_compatible(in.train_b, in.test_b);
    const EmbeddingSet fused_train = join_fused(in.train_a, in.train_b);
    const EmbeddingSet fused_test = join_fused(in.test_a, in.test_b);

    EvalReport report;
    report.title = "sweep_fusion";
    report.columns = {std::string(kTrainToTest), std::string(kTestToTrain)};
    report.parameters["pipeline"] = base.to_json();
    report.parameters["pcaDims"] = std::vector<std::size_t>(pca_dims.begin(), pca_dims.end());

    auto add_rows = [&](const std::string& label, const EmbeddingSet& train, const EmbeddingSet& test,
                        std::optional<std::size_t> pca_dim) {
        PipelineConfig cfg = base;
        cfg.pca_dim = pca_dim;
        for (const auto& split : both_directions(train, test)) {
            report.rows.push_back(run_cell(label, column_id(split.direction), split.queries.size(), [&](ReportRow&) {
                return accuracy_of(fit_pipeline(split.gallery, cfg).predict(split.queries), split.queries);
            }));
        }
    };

    const std::string fused_label = in.label_a + " + " + in.label_b;
    add_rows(in.label_a, in.train_a, in.test_a, std::nullopt);
    add_rows(in.label_b, in.train_b, in.test_b, std::nullopt);
    add_rows(fused_label, fused_train, fused_test, std::nullopt);
    for (auto d : pca_dims) {
        add_rows(fused_label + " + PCA(" + std::to_string(d) + ")", fused_train, fused_test, d);
    }
    return report;
}

EvalReport evaluate_banks(const std::vector<std::pair<std::string, PrototypeBank>>& banks,
                          const std::vector<std::pair<std::string, const EmbeddingSet*>>& subsets,
                          const ClassifierConfig& config, const std::string& title) {
    EvalReport report;
    report.title = title;
    report.parameters["temperature"] = config.temperature;
    for (const auto& [label, _] : subsets) {
        report.columns.push_back(label);
    }
    for (const auto& [bank_label, bank] : banks) {
        for (const auto& [subset_label, queries] : subsets) {
            report.rows.push_back(run_cell(bank_label, subset_label, queries->size(), [&](ReportRow&) {
                if (!(queries->catalog == bank.catalog)) {
                    throw Error(ErrorCode::CatalogMismatch, "bank '" + bank_label + "' and subset '" + subset_label +
                                                                "' use different catalogs");
                }
                return accuracy_of(classify_batch(*queries, Rule::Softmax, config, bank), *queries);
            }));
        }
    }
    return report;
}

EmbeddingSet concat_sets(const EmbeddingSet& a, const EmbeddingSet& b) {
    require_compatible(a, b);
    EmbeddingSet out = empty_like(a, a.dim());
    out.split = SplitTag::Other;
    for (const auto* set : {&a, &b}) {
        for (std::size_t i = 0; i < set->size(); ++i) {
            out.add(set->vector(i), set->class_ids[i], set->source_ids[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

void SyntheticSpec::validate() const {
    if (classes < 2) throw Error(ErrorCode::Spec, "at least 2 classes required");
    if (dim < 2) throw Error(ErrorCode::Spec, "at least 2 dims required");
    if (per_class < 1) throw Error(ErrorCode::Spec, "at least 1 record per class required");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::Spec, "sigma must be finite and >= 0");
    if (!(max_center_cosine > -1.0 && max_center_cosine <= 1.0)) {
        throw Error(ErrorCode::Spec, "max center cosine must be in (-1, 1]");
    }
}

nlohmann::json SyntheticSpec::to_json() const {
    return {{"classes", classes},   {"dim", dim},   {"perClass", per_class},
            {"sigma", sigma}, {"seed", seed}, {"maxCenterCosine", max_center_cosine}};
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    SplitMix64 rng(spec.seed);
    const auto centers = draw_centers(rng, spec);
    const auto catalog = synthetic_catalog(spec.classes);
    SyntheticData data{synthetic_split(spec, catalog, SplitTag::Train, "synthetic"),
                       synthetic_split(spec, catalog, SplitTag::Test, "synthetic")};
    for (auto* set : {&data.train, &data.test}) {
        for (std::size_t c = 0; c < spec.classes; ++c) {
            for (std::size_t i = 0; i < spec.per_class; ++i) {
                set->add(noisy_member(rng, centers[c], spec.sigma), static_cast<ClassId>(c),
                         synthetic_source_id(set->split, c, i));
            }
        }
    }
    return data;
}

SyntheticPair generate_synthetic_complementary(const SyntheticSpec& spec) {
    spec.validate();
    if (spec.classes < 4) {
        throw Error(ErrorCode::Spec, "complementary encoders need at least 4 classes");
    }
    SplitMix64 rng(spec.seed);
    const std::size_t half = spec.classes / 2;
    auto centers_a = draw_centers(rng, spec);
    auto centers_b = draw_centers(rng, spec);
    // Odd offsets inside the merged half reuse the previous class's center.
    for (std::size_t c = half + 1; c < spec.classes; c += 2) {
        centers_a[c] = centers_a[c - 1];
    }
    for (std::size_t c = 1; c < half; c += 2) {
        centers_b[c] = centers_b[c - 1];
    }

    const auto catalog = synthetic_catalog(spec.classes);
    SyntheticPair pair{{synthetic_split(spec, catalog, SplitTag::Train, "synthetic-a"),
                        synthetic_split(spec, catalog, SplitTag::Test, "synthetic-a")},
                       {synthetic_split(spec, catalog, SplitTag::Train, "synthetic-b"),
                        synthetic_split(spec, catalog, SplitTag::Test, "synthetic-b")}};
    for (auto [set_a, set_b] : {std::pair{&pair.a.train, &pair.b.train}, std::pair{&pair.a.test, &pair.b.test}}) {
        for (std::size_t c = 0; c < spec.classes; ++c) {
            for (std::size_t i = 0; i < spec.per_class; ++i) {
                const auto id = synthetic_source_id(set_a->split, c, i);
                set_a->add(noisy_member(rng, centers_a[c], spec.sigma), static_cast<ClassId>(c), id);
                set_b->add(noisy_member(rng, centers_b[c], spec.sigma), static_cast<ClassId>(c), id);
            }
        }
    }
    return pair;
}

// ---------------------------------------------------------------------------
// 2D projection

Projection project_2d(const EmbeddingSet& set) {
    Projection out;
    out.pca = pca_fit(set.vectors, 2);
    std::vector<std::array<double, 3>> sums(set.catalog.size(), {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto p = out.pca.transform(set.vector(i));
        out.points.push_back({set.source_ids[i], set.class_ids[i], p[0], p[1]});
        auto& s = sums[set.class_ids[i]];
        s[0] += p[0];
        s[1] += p[1];
        s[2] += 1.0;
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
        if (sums[c][2] > 0) {
            out.centroids.push_back({"centroid:" + set.catalog.names()[c], static_cast<ClassId>(c),
                                     sums[c][0] / sums[c][2], sums[c][1] / sums[c][2]});
        }
    }
    return out;
}

std::string Projection::to_csv() const {
    std::string out = "sourceId,classId,x,y\n";
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        }
        return q + "\"";
    };
    for (const auto* list : {&points, &centroids}) {
        for (const auto& p : *list) {
            out += quote(p.source_id) + "," + std::to_string(p.class_id) + "," + format_double("%.9g", p.x) + "," +
                   format_double("%.9g", p.y) + "\n";
        }
    }
    return out;
}

} // namespace protoclass
