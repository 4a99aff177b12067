#include "cli.hpp"

#include "protoclass/errors.hpp"
#include "protoclass/prototypes.hpp"
#include "protoclass/store.hpp"

#include "CLI11.hpp"
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <ostream>

namespace protoclass::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// Config file

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::Config, "'" + key + "': " + e.what());
    }
}

template <typename T>
void read_into(const YAML::Node& parent, const char* key, T& target) {
    if (const auto node = parent[key]; node && !node.IsNull()) {
        target = scalar<T>(node, key);
    }
}

void read_optional(const YAML::Node& parent, const char* key, std::optional<std::size_t>& target) {
    if (const auto node = parent[key]) {
        if (node.IsNull()) {
            target.reset();
        } else {
            const auto v = scalar<std::size_t>(node, key);
            target = v == 0 ? std::nullopt : std::optional<std::size_t>(v);
        }
    }
}

void read_path(const YAML::Node& parent, const char* key, const fs::path& base, fs::path& target) {
    if (const auto node = parent[key]; node && !node.IsNull()) {
        const fs::path p = scalar<std::string>(node, key);
        target = p.is_absolute() ? p : (base / p).lexically_normal();
    }
}

void read_path_map(const YAML::Node& parent, const char* key, const fs::path& base,
                   std::map<std::string, fs::path>& target) {
    const auto node = parent[key];
    if (!node || node.IsNull()) {
        return;
    }
    if (!node.IsMap()) {
        throw Error(ErrorCode::Config, std::string("'") + key + "' must be a mapping");
    }
    for (const auto& entry : node) {
        const auto name = entry.first.as<std::string>();
        const fs::path p = entry.second.as<std::string>();
        target[name] = p.is_absolute() ? p : (base / p).lexically_normal();
    }
}

void emit_optional(YAML::Emitter& e, const std::optional<std::size_t>& v) {
    if (v) {
        e << *v;
    } else {
        e << YAML::Null;
    }
}

// ---------------------------------------------------------------------------
// Command-line overrides

struct Overrides {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    std::string rule;
    std::size_t k = 0;
    double tau = 0.0;
    std::size_t proto_samples = 0;
    std::size_t pca_dim = 0;
    unsigned parallel = 0;
    std::string templates;
    std::map<std::string, CLI::Option*> options;

    bool given(const std::string& name) const {
        const auto it = options.find(name);
        return it != options.end() && it->second->count() > 0;
    }
};

void add_common(CLI::App* sub, Overrides& o) {
    o.options["config"] = sub->add_option("--config", o.config, "YAML run configuration");
    o.options["out"] = sub->add_option("--out", o.out, "Output directory (fallback: $PROTOCLASS_OUT)");
    o.options["seed"] = sub->add_option("--seed", o.seed, "Seed for sampling and synthesis");
    o.options["rule"] = sub->add_option("--rule", o.rule, "softmax | npc | knn");
    o.options["k"] = sub->add_option("--k", o.k, "Neighbors for k-NN");
    o.options["tau"] = sub->add_option("--tau", o.tau, "Softmax temperature");
    o.options["proto-samples"] =
        sub->add_option("--proto-samples", o.proto_samples, "Per-class sample size for prototypes (0 = all)");
    o.options["pca-dim"] = sub->add_option("--pca-dim", o.pca_dim, "PCA output dim (0 = no PCA)");
    o.options["parallel"] = sub->add_option("--parallel", o.parallel, "Worker threads (0 = all processors)");
    o.options["templates"] = sub->add_option("--templates", o.templates, "Template bank for text prototypes");
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.given("seed")) {
        cfg.seed = o.seed;
        cfg.synth.spec.seed = o.seed;
    }
    if (o.given("rule")) cfg.rule = parse_rule(o.rule);
    if (o.given("k")) cfg.k = o.k;
    if (o.given("tau")) cfg.tau = o.tau;
    if (o.given("proto-samples")) {
        cfg.proto_samples = o.proto_samples == 0 ? std::nullopt : std::optional<std::size_t>(o.proto_samples);
    }
    if (o.given("pca-dim")) cfg.pca_dim = o.pca_dim == 0 ? std::nullopt : std::optional<std::size_t>(o.pca_dim);
    if (o.given("parallel")) cfg.parallel = o.parallel;
    if (o.given("templates")) cfg.templates = o.templates;

    if (o.given("out")) {
        cfg.out = fs::absolute(o.out).lexically_normal();
    } else if (cfg.out.empty()) {
        if (const char* env = std::getenv("PROTOCLASS_OUT"); env && *env) {
            cfg.out = fs::absolute(env).lexically_normal();
        }
    }
    if (cfg.out.empty()) {
        throw Error(ErrorCode::Config, "no output directory: pass --out, set 'out' in the config or PROTOCLASS_OUT");
    }
    if (!(cfg.tau > 0.0)) throw Error(ErrorCode::Config, "tau must be positive");
    if (cfg.k == 0) throw Error(ErrorCode::Config, "k must be at least 1");
    return cfg;
}

// ---------------------------------------------------------------------------
// Outputs

class Run {
public:
    Run(RunConfig cfg, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {
        fs::create_directories(cfg_.out);
        atomic_write(cfg_.out / "resolved_config.yaml", cfg_.to_yaml());
    }

    const RunConfig& config() const { return cfg_; }

    void write(const std::string& name, const std::string& text) {
        atomic_write(cfg_.out / name, text);
        log_ << "[protoclass] wrote " << (cfg_.out / name).string() << "\n";
    }

    void write_report(const std::string& stem, const EvalReport& report) {
        write(stem + ".json", report.to_json().dump(2) + "\n");
        write(stem + ".txt", report.to_text());
    }

    EmbeddingSet load(const fs::path& path, const char* what) const {
        if (path.empty()) {
            throw Error(ErrorCode::Config, std::string("no '") + what + "' file configured");
        }
        log_ << "[protoclass] reading " << what << " " << path.string() << "\n";
        // Unit length at ingest keeps cosine and Euclidean rankings identical.
        return normalize_rows(read_set(path));
    }

    std::ostream& log() { return log_; }

private:
    RunConfig cfg_;
    std::ostream& log_;
};

// ---------------------------------------------------------------------------
// Commands

int cmd_validate(const std::vector<std::string>& files, const std::string& catalog_file, bool pair,
                 std::ostream& out) {
    std::optional<ClassCatalog> catalog;
    if (!catalog_file.empty()) {
        catalog = read_set(catalog_file).catalog;
    }
    bool ok = true;
    std::vector<EmbeddingSet> sets;
    for (const auto& file : files) {
        try {
            if (fs::path(file).extension() == ".jsonl") {
                const auto captions = read_captions(file);
                captions.validate(catalog ? &*catalog : nullptr);
                out << "OK " << file << ": " << captions.entries.size() << " captions\n";
            } else {
                auto set = read_set(file);
                if (catalog && !(set.catalog == *catalog)) {
                    throw Error(ErrorCode::CatalogMismatch, "catalog differs from " + catalog_file);
                }
                out << "OK " << file << ": " << set.size() << " records, dim " << set.dim() << ", "
                    << set.catalog.size() << " classes\n";
                sets.push_back(std::move(set));
            }
        } catch (const Error& e) {
            out << "FAIL " << file << ": " << e.what() << "\n";
            ok = false;
        }
    }
    if (pair && ok) {
        if (sets.size() != 2) {
            out << "FAIL --pair needs exactly two embedding files\n";
            return kExitUsage;
        }
        try {
            const auto fused = join_fused(sets[0], sets[1]);
            out << "OK pair: " << fused.size() << " joined records, fused dim " << fused.dim() << "\n";
        } catch (const Error& e) {
            out << "FAIL pair: " << e.what() << "\n";
            ok = false;
        }
    }
    return ok ? kExitOk : kExitFailure;
}

int cmd_synth(Run& run) {
    const auto& cfg = run.config();
    RunConfig resolved = cfg;
    if (cfg.synth.complementary) {
        const auto pair = generate_synthetic_complementary(cfg.synth.spec);
        write_set(pair.a.train, cfg.out / "train.emb");
        write_set(pair.a.test, cfg.out / "test.emb");
        write_set(pair.b.train, cfg.out / "train_b.emb");
        write_set(pair.b.test, cfg.out / "test_b.emb");
        resolved.data.train_b = cfg.out / "train_b.emb";
        resolved.data.test_b = cfg.out / "test_b.emb";
    } else {
        const auto data = generate_synthetic(cfg.synth.spec);
        write_set(data.train, cfg.out / "train.emb");
        write_set(data.test, cfg.out / "test.emb");
    }
    resolved.data.train = cfg.out / "train.emb";
    resolved.data.test = cfg.out / "test.emb";
    run.log() << "[protoclass] synthetic sets written to " << cfg.out.string() << "\n";
    // Points the stored config at the generated files so later commands can reuse it.
    run.write("resolved_config.yaml", resolved.to_yaml());
    return kExitOk;
}

int cmd_classify(Run& run) {
    const auto& cfg = run.config();
    const auto gallery = run.load(cfg.data.gallery.empty() ? cfg.data.train : cfg.data.gallery, "gallery");
    const auto queries = run.load(cfg.data.queries.empty() ? cfg.data.test : cfg.data.queries, "queries");
    require_compatible(gallery, queries);

    std::vector<Prediction> predictions;
    const auto text = cfg.data.text_embeddings.find(cfg.templates);
    if (cfg.rule == Rule::Softmax && text != cfg.data.text_embeddings.end()) {
        const auto bank = build_text_prototypes(run.load(text->second, "text embeddings"));
        auto classifier = cfg.pipeline().classifier;
        predictions = classify_batch(queries, Rule::Softmax, classifier, bank);
    } else {
        predictions = fit_pipeline(gallery, cfg.pipeline()).predict(queries);
    }

    std::string lines;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        lines += prediction_to_json(predictions[i], queries.source_ids[i], queries.class_ids[i]).dump() + "\n";
    }
    run.write("predictions.jsonl", lines);
    const double acc = top1_accuracy(predictions, queries.class_ids);
    run.write("summary.json", nlohmann::json{{"rule", to_string(cfg.rule)},
                                             {"nQueries", predictions.size()},
                                             {"accuracy", acc}}
                                  .dump(2) +
                                  "\n");
    run.log() << "[protoclass] top-1 accuracy " << acc << "% over " << predictions.size() << " queries\n";
    return kExitOk;
}

int cmd_eval(Run& run) {
    const auto& cfg = run.config();
    const auto train = run.load(cfg.data.train, "train");
    const auto test = run.load(cfg.data.test, "test");
    auto report = crossval_2fold(train, test, cfg.pipeline(), std::string(to_string(cfg.rule)));
    run.write_report("report", report);
    return kExitOk;
}

int cmd_sweep(Run& run, const std::string& kind) {
    const auto& cfg = run.config();
    if (kind == "k") {
        const auto train = run.load(cfg.data.train, "train");
        const auto test = run.load(cfg.data.test, "test");
        run.write_report("sweep_k", sweep_k(train, test, cfg.sweep.ks, cfg.pipeline()));
    } else if (kind == "samples") {
        const auto train = run.load(cfg.data.train, "train");
        const auto test = run.load(cfg.data.test, "test");
        run.write_report("sweep_samples",
                         sweep_prototype_samples(train, test, cfg.sweep.sample_sizes, cfg.sweep.seeds, cfg.pipeline()));
    } else if (kind == "fusion") {
        const auto train_a = run.load(cfg.data.train, "train");
        const auto test_a = run.load(cfg.data.test, "test");
        const auto train_b = run.load(cfg.data.train_b, "train_b");
        const auto test_b = run.load(cfg.data.test_b, "test_b");
        auto base = cfg.pipeline();
        base.pca_dim.reset();
        run.write_report("sweep_fusion", sweep_fusion({train_a, train_b, test_a, test_b, cfg.data.label_a,
                                                       cfg.data.label_b},
                                                      cfg.sweep.pca_dims, base));
    } else if (kind == "prompts") {
        const auto train = run.load(cfg.data.train, "train");
        const auto test = run.load(cfg.data.test, "test");
        const auto all = concat_sets(test, train);
        std::vector<std::pair<std::string, PrototypeBank>> banks;
        for (const auto& [name, path] : cfg.data.text_embeddings) {
            banks.emplace_back(name, build_text_prototypes(run.load(path, "text embeddings")));
        }
        std::vector<EmbeddingSet> captions;
        for (const auto& [split, path] : cfg.data.caption_embeddings) {
            captions.push_back(run.load(path, "caption embeddings"));
        }
        if (!captions.empty()) {
            for (auto split : {CaptionSplit::Train, CaptionSplit::Test, CaptionSplit::All}) {
                const std::string label = "captions:" + std::string(to_string(split));
                try {
                    banks.emplace_back(label, build_caption_prototypes(captions, split));
                } catch (const Error& e) {
                    run.log() << "[protoclass] skipping " << label << ": " << e.what() << "\n";
                }
            }
        }
        if (banks.empty()) {
            throw Error(ErrorCode::Config, "the prompts sweep needs data.text_embeddings or data.caption_embeddings");
        }
        auto classifier = cfg.pipeline().classifier;
        run.write_report("sweep_prompts", evaluate_banks(banks, {{"test", &test}, {"train", &train}, {"all", &all}},
                                                         classifier, "sweep_prompts"));
    } else {
        throw Error(ErrorCode::Config, "unknown sweep kind '" + kind + "' (k, samples, fusion, prompts)");
    }
    return kExitOk;
}

int cmd_project(Run& run, const std::string& input) {
    const auto set = run.load(input.empty() ? run.config().data.train : fs::path(input), "input");
    run.write("project.csv", project_2d(set).to_csv());
    return kExitOk;
}

} // namespace

// ---------------------------------------------------------------------------

PipelineConfig RunConfig::pipeline() const {
    PipelineConfig p;
    p.rule = rule;
    p.classifier.temperature = tau;
    p.classifier.k = k;
    p.classifier.metric = metric;
    p.classifier.parallel = parallel;
    p.prototype_samples = proto_samples;
    p.pca_dim = pca_dim;
    p.seed = seed;
    return p;
}

std::string RunConfig::to_yaml() const {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "out" << YAML::Value << out.string();
    e << YAML::Key << "seed" << YAML::Value << seed;
    e << YAML::Key << "parallel" << YAML::Value << parallel;
    e << YAML::Key << "rule" << YAML::Value << std::string(to_string(rule));
    e << YAML::Key << "tau" << YAML::Value << tau;
    e << YAML::Key << "k" << YAML::Value << k;
    e << YAML::Key << "metric" << YAML::Value << std::string(to_string(metric));
    e << YAML::Key << "proto_samples" << YAML::Value;
    emit_optional(e, proto_samples);
    e << YAML::Key << "pca_dim" << YAML::Value;
    emit_optional(e, pca_dim);
    e << YAML::Key << "templates" << YAML::Value << templates;

    e << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
    auto path = [&](const char* key, const fs::path& p) {
        if (!p.empty()) e << YAML::Key << key << YAML::Value << p.string();
    };
    path("train", data.train);
    path("test", data.test);
    path("train_b", data.train_b);
    path("test_b", data.test_b);
    path("gallery", data.gallery);
    path("queries", data.queries);
    e << YAML::Key << "label_a" << YAML::Value << data.label_a;
    e << YAML::Key << "label_b" << YAML::Value << data.label_b;
    for (const auto* entry : {&data.text_embeddings, &data.caption_embeddings}) {
        if (entry->empty()) continue;
        e << YAML::Key << (entry == &data.text_embeddings ? "text_embeddings" : "caption_embeddings");
        e << YAML::Value << YAML::BeginMap;
        for (const auto& [name, p] : *entry) {
            e << YAML::Key << name << YAML::Value << p.string();
        }
        e << YAML::EndMap;
    }
    e << YAML::EndMap;

    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "ks" << YAML::Value << YAML::Flow << sweep.ks;
    e << YAML::Key << "sample_sizes" << YAML::Value << YAML::Flow << sweep.sample_sizes;
    e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << sweep.seeds;
    e << YAML::Key << "pca_dims" << YAML::Value << YAML::Flow << sweep.pca_dims;
    e << YAML::EndMap;

    e << YAML::Key << "synth" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "classes" << YAML::Value << synth.spec.classes;
    e << YAML::Key << "dim" << YAML::Value << synth.spec.dim;
    e << YAML::Key << "per_class" << YAML::Value << synth.spec.per_class;
    e << YAML::Key << "sigma" << YAML::Value << synth.spec.sigma;
    e << YAML::Key << "seed" << YAML::Value << synth.spec.seed;
    e << YAML::Key << "max_center_cosine" << YAML::Value << synth.spec.max_center_cosine;
    e << YAML::Key << "complementary" << YAML::Value << synth.complementary;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

RunConfig load_config(const fs::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::BadFile&) {
        throw Error(ErrorCode::Io, "cannot read config '" + path.string() + "'");
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
    if (!root.IsMap()) {
        throw Error(ErrorCode::Config, path.string() + ": top level must be a mapping");
    }
    const fs::path base = fs::absolute(path).parent_path();
    RunConfig cfg;

    read_path(root, "out", base, cfg.out);
    read_into(root, "seed", cfg.seed);
    cfg.synth.spec.seed = cfg.seed;
    read_into(root, "parallel", cfg.parallel);
    if (root["rule"]) cfg.rule = parse_rule(scalar<std::string>(root["rule"], "rule"));
    read_into(root, "tau", cfg.tau);
    read_into(root, "k", cfg.k);
    if (root["metric"]) cfg.metric = parse_metric(scalar<std::string>(root["metric"], "metric"));
    read_optional(root, "proto_samples", cfg.proto_samples);
    read_optional(root, "pca_dim", cfg.pca_dim);
    read_into(root, "templates", cfg.templates);

    if (const auto data = root["data"]) {
        read_path(data, "train", base, cfg.data.train);
        read_path(data, "test", base, cfg.data.test);
        read_path(data, "train_b", base, cfg.data.train_b);
        read_path(data, "test_b", base, cfg.data.test_b);
        read_path(data, "gallery", base, cfg.data.gallery);
        read_path(data, "queries", base, cfg.data.queries);
        read_into(data, "label_a", cfg.data.label_a);
        read_into(data, "label_b", cfg.data.label_b);
        read_path_map(data, "text_embeddings", base, cfg.data.text_embeddings);
        read_path_map(data, "caption_embeddings", base, cfg.data.caption_embeddings);
    }
    if (const auto sweep = root["sweep"]) {
        read_into(sweep, "ks", cfg.sweep.ks);
        read_into(sweep, "sample_sizes", cfg.sweep.sample_sizes);
        read_into(sweep, "seeds", cfg.sweep.seeds);
        read_into(sweep, "pca_dims", cfg.sweep.pca_dims);
    }
    if (const auto synth = root["synth"]) {
        read_into(synth, "classes", cfg.synth.spec.classes);
        read_into(synth, "dim", cfg.synth.spec.dim);
        read_into(synth, "per_class", cfg.synth.spec.per_class);
        read_into(synth, "sigma", cfg.synth.spec.sigma);
        read_into(synth, "seed", cfg.synth.spec.seed);
        read_into(synth, "max_center_cosine", cfg.synth.spec.max_center_cosine);
        read_into(synth, "complementary", cfg.synth.complementary);
    }
    return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"protoclass: zero/few-shot classification over precomputed embeddings"};
    app.require_subcommand(1);

    std::vector<std::string> validate_files;
    std::string validate_catalog;
    bool validate_pair = false;
    auto* validate = app.add_subcommand("validate", "Check EMB1 files, manifests and caption files");
    validate->add_option("files", validate_files, "EMB1 or .jsonl caption files")->required();
    validate->add_option("--catalog", validate_catalog, "EMB1 file whose catalog captions must match");
    validate->add_flag("--pair", validate_pair, "Also check that two encoder files join by sourceId");

    auto* classify = app.add_subcommand("classify", "Classify the query split against the gallery");
    auto* eval = app.add_subcommand("eval", "Two-fold cross-validation of one pipeline");
    auto* sweep = app.add_subcommand("sweep", "Parameter sweeps (k, samples, fusion, prompts)");
    auto* synth = app.add_subcommand("synth", "Generate synthetic train/test embedding sets");
    auto* project = app.add_subcommand("project", "PCA-2D projection to CSV");

    std::string sweep_kind;
    sweep->add_option("kind", sweep_kind, "k | samples | fusion | prompts")
        ->required()
        ->check(CLI::IsMember({"k", "samples", "fusion", "prompts"}));
    std::string project_input;
    project->add_option("input", project_input, "EMB1 file (default: data.train)");

    SyntheticSpec synth_flags;
    std::map<std::string, CLI::Option*> synth_opts;
    bool complementary = false;
    synth_opts["classes"] = synth->add_option("--classes", synth_flags.classes);
    synth_opts["dim"] = synth->add_option("--dim", synth_flags.dim);
    synth_opts["per-class"] = synth->add_option("--per-class", synth_flags.per_class);
    synth_opts["sigma"] = synth->add_option("--sigma", synth_flags.sigma);
    auto* complementary_flag = synth->add_flag("--complementary", complementary, "Two half-separating encoders");

    std::vector<CLI::App*> with_common = {classify, eval, sweep, synth, project};
    // Each subcommand owns its options; they all write into the same Overrides.
    std::vector<Overrides> per_command(with_common.size());
    for (std::size_t i = 0; i < with_common.size(); ++i) {
        add_common(with_common[i], per_command[i]);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(validate_files, validate_catalog, validate_pair, out);
        }
        std::size_t which = 0;
        while (!with_common[which]->parsed()) {
            ++which;
        }
        RunConfig cfg = resolve(per_command[which]);
        if (synth->parsed()) {
            if (synth_opts["classes"]->count()) cfg.synth.spec.classes = synth_flags.classes;
            if (synth_opts["dim"]->count()) cfg.synth.spec.dim = synth_flags.dim;
            if (synth_opts["per-class"]->count()) cfg.synth.spec.per_class = synth_flags.per_class;
            if (synth_opts["sigma"]->count()) cfg.synth.spec.sigma = synth_flags.sigma;
            if (complementary_flag->count()) cfg.synth.complementary = complementary;
            cfg.synth.spec.validate();
        }
        Run run(std::move(cfg), err);
        if (classify->parsed()) return cmd_classify(run);
        if (eval->parsed()) return cmd_eval(run);
        if (sweep->parsed()) return cmd_sweep(run, sweep_kind);
        if (synth->parsed()) return cmd_synth(run);
        return cmd_project(run, project_input);
    } catch (const Error& e) {
        err << "[protoclass] error: " << e.what() << "\n";
        return e.code() == ErrorCode::Config ? kExitUsage : kExitFailure;
    } catch (const fs::filesystem_error& e) {
        err << "[protoclass] error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace protoclass::cli
