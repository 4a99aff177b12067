// Acceptance gate: one line per criterion, nonzero exit if any criterion fails.
// Tolerances and instance counts are fixed here on purpose; do not loosen them.

#include "oracles.hpp"

#include "../tools/cli.hpp"
#include "protoclass/classifiers.hpp"
#include "protoclass/errors.hpp"
#include "protoclass/evaluation.hpp"
#include "protoclass/store.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace protoclass;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Fails the criterion with the first message; later failures are counted only.
struct Check {
    Outcome& out;
    int failures = 0;
    void require(bool ok, const std::string& why) {
        if (ok) return;
        if (failures++ == 0) out.detail = why;
        out.pass = false;
    }
};

constexpr double kKnnBudgetSeconds = 30.0;
constexpr double kPcaBudgetSeconds = 10.0;
constexpr double kTrendBudgetSeconds = 120.0;

// Shared synthetic benchmark for the sample-size and k sweeps.
SyntheticData benchmark_data() {
    SyntheticSpec spec;
    spec.classes = 28;
    spec.dim = 64;
    spec.per_class = 400;
    spec.sigma = 0.25;
    spec.seed = 0;
    return generate_synthetic(spec);
}

double average(const EvalReport& report, const std::string& config) {
    for (const auto& a : report.aggregates())
        if (a.config == config) return a.mean;
    return std::nan("");
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

Outcome knn_oracle() {
    Outcome out;
    Check check{out};
    const std::size_t ks[] = {1, 3, 5, 7, 11};
    std::size_t compared = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 gen(1000 + seed);
        const std::size_t n = 11 + gen() % 490, d = 1 + gen() % 64, classes = 2 + gen() % 9;
        EmbeddingSet gallery(d, oracle::catalog_of(classes));
        for (std::size_t i = 0; i < n; ++i) {
            Vector v;
            if (i > 0 && gen() % 10 == 0) {
                // Exact duplicates of earlier points produce distance ties.
                const auto row = gallery.vector(gen() % i);
                v.assign(row.begin(), row.end());
            } else {
                v = oracle::random_unit(gen, d);
            }
            gallery.add(v, static_cast<ClassId>(gen() % classes), "s" + std::to_string(gen() % 5000));
        }
        for (int q = 0; q < 10; ++q) {
            Vector query;
            if (q < 2) {
                const auto row = gallery.vector(gen() % n);
                query.assign(row.begin(), row.end());
            } else {
                query = oracle::random_unit(gen, d);
            }
            for (auto k : ks) {
                ++compared;
                const auto got = classify_knn(query, gallery, k).class_id;
                const auto want = oracle::knn(query, gallery, k);
                check.require(got == want, "seed " + std::to_string(seed) + " k=" + std::to_string(k) + ": got " +
                                               std::to_string(got) + ", oracle " + std::to_string(want));
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(secs < kKnnBudgetSeconds, "runtime " + fmt("%.1f", secs) + " s over budget");
    if (out.pass)
        out.detail = std::to_string(compared) + " winners, 0 mismatches, " + fmt("%.2f", secs) + " s";
    else
        out.detail += " (" + std::to_string(check.failures) + " mismatches)";
    return out;
}

Outcome pca_oracle() {
    Outcome out;
    Check check{out};
    double worst_component = 0.0, worst_value = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 gen(2000 + seed);
        const std::size_t d = 2 + gen() % 15;
        const std::size_t rows = d + 2 + gen() % (63 - d);
        std::vector<std::vector<float>> data;
        EmbeddingMatrix m(d);
        // Unequal column scales keep the spectrum well separated.
        std::vector<float> scale(d);
        for (std::size_t j = 0; j < d; ++j) scale[j] = 1.0f + 0.5f * static_cast<float>(j);
        for (std::size_t i = 0; i < rows; ++i) {
            auto r = oracle::random_row(gen, d);
            for (std::size_t j = 0; j < d; ++j) r[j] *= scale[j];
            data.push_back(r);
            m.append(r);
        }
        const auto pca = pca_fit(m, d);
        const auto [values, vectors] = oracle::jacobi_eigen(oracle::covariance(data));
        for (std::size_t c = 0; c < d; ++c) {
            const double want = static_cast<double>(values[c]);
            const double rel = std::abs(pca.explained_variance[c] - want) / std::max(std::abs(want), 1e-300);
            worst_value = std::max(worst_value, rel);
            check.require(rel <= 1e-6, "seed " + std::to_string(seed) + " eigenvalue " + std::to_string(c) +
                                           " relative error " + fmt("%.3g", rel));
            double agree = 0.0;
            for (std::size_t j = 0; j < d; ++j) agree += pca.component(c)[j] * static_cast<double>(vectors[j][c]);
            const double sign = agree < 0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double err = std::abs(pca.component(c)[j] - sign * static_cast<double>(vectors[j][c]));
                worst_component = std::max(worst_component, err);
                check.require(err <= 1e-4, "seed " + std::to_string(seed) + " component " + std::to_string(c) +
                                               " entry error " + fmt("%.3g", err));
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(secs < kPcaBudgetSeconds, "runtime " + fmt("%.1f", secs) + " s over budget");
    if (out.pass)
        out.detail = "50 matrices, worst component error " + fmt("%.2g", worst_component) +
                     ", worst eigenvalue rel. error " + fmt("%.2g", worst_value) + ", " + fmt("%.2f", secs) + " s";
    return out;
}

PrototypeBank random_bank(std::mt19937_64& gen, std::size_t k, std::size_t d) {
    std::vector<std::vector<float>> rows;
    EmbeddingSet s(d, oracle::catalog_of(k));
    for (std::size_t c = 0; c < k; ++c) s.add(oracle::random_unit(gen, d), static_cast<ClassId>(c), "p" + std::to_string(c));
    return build_text_prototypes(s);
}

Outcome softmax_contract() {
    Outcome out;
    Check check{out};
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    for (int t = 0; t < 1000; ++t) {
        std::mt19937_64 gen(3000 + t);
        const std::size_t k = 2 + gen() % 40, d = 2 + gen() % 62;
        const auto bank = random_bank(gen, k, d);
        const auto query = oracle::random_row(gen, d);
        std::vector<double> sims;
        for (std::size_t c = 0; c < k; ++c) sims.push_back(cosine_sim(query, bank.vector(c)));

        const auto p = classify_softmax(query, bank, 0.01);
        double sum = 0.0;
        bool finite = true;
        for (double s : p.scores) {
            sum += s;
            finite = finite && std::isfinite(s);
        }
        check.require(finite, "case " + std::to_string(t) + ": non-finite score at tau 0.01");
        check.require(std::abs(sum - 1.0) <= 1e-6, "case " + std::to_string(t) + ": scores sum to " + fmt("%.9f", sum));

        const double c = shift(gen);
        auto shifted = sims;
        for (auto& s : shifted) s += c;
        check.require(argmax_first(softmax_scores(shifted, 0.01)) == p.class_id,
                      "case " + std::to_string(t) + ": argmax moved under a constant shift");
        for (double tau : {0.01, 0.1, 1.0}) {
            check.require(classify_softmax(query, bank, tau).class_id == p.class_id,
                          "case " + std::to_string(t) + ": argmax moved at tau " + fmt("%g", tau));
        }
    }
    if (out.pass) out.detail = "1000 cases, sums within 1e-6, argmax stable under shift and tau";
    return out;
}

Outcome geometry_consistency() {
    Outcome out;
    Check check{out};
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::mt19937_64 gen(4000 + t);
        const std::size_t k = 2 + gen() % 30, d = 2 + gen() % 62;
        const auto bank = random_bank(gen, k, d);
        const auto query = oracle::random_unit(gen, d);
        check.require(classify_npc(query, bank).class_id == classify_softmax(query, bank, 0.01).class_id,
                      "case " + std::to_string(t) + ": NPC and softmax winners differ");
        const auto other = oracle::random_unit(gen, d);
        const double err = std::abs(squared_euclidean(query, other) - (2.0 - 2.0 * cosine_sim(query, other)));
        worst = std::max(worst, err);
        check.require(err <= 1e-6, "case " + std::to_string(t) + ": euclidean^2 off by " + fmt("%.3g", err));
    }
    if (out.pass) out.detail = "1000 cases, 0 winner mismatches, worst identity error " + fmt("%.2g", worst);
    return out;
}

Outcome fusion_identity() {
    Outcome out;
    Check check{out};
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::mt19937_64 gen(5000 + t);
        const std::size_t da = 1 + gen() % 64, db = 1 + gen() % 64;
        const auto a1 = oracle::random_row(gen, da), a2 = oracle::random_row(gen, da);
        const auto b1 = oracle::random_row(gen, db), b2 = oracle::random_row(gen, db);
        const double err = std::abs(cosine_sim(fuse_concat(a1, b1), fuse_concat(a2, b2)) -
                                    0.5 * (cosine_sim(a1, a2) + cosine_sim(b1, b2)));
        worst = std::max(worst, err);
        check.require(err <= 1e-6, "pair " + std::to_string(t) + ": fused cosine off by " + fmt("%.3g", err));
    }

    SyntheticSpec spec;
    spec.classes = 12;
    spec.dim = 24;
    spec.per_class = 30;
    spec.sigma = 0.2;
    spec.seed = 11;
    const auto pair = generate_synthetic_complementary(spec);
    const FusionInputs in{pair.a.train, pair.b.train, pair.a.test, pair.b.test};
    const std::vector<std::size_t> full = {2 * spec.dim};
    const auto report = sweep_fusion(in, full, PipelineConfig{});
    const std::string pca_row = "A + B + PCA(" + std::to_string(2 * spec.dim) + ")";
    double gap = 0.0;
    for (auto column : {kTrainToTest, kTestToTrain}) {
        const auto* plain = report.find("A + B", column);
        const auto* rotated = report.find(pca_row, column);
        const bool ok = plain && rotated && plain->accuracy && rotated->accuracy;
        check.require(ok, "fusion sweep rows missing");
        if (!ok) continue;
        gap = std::max(gap, std::abs(*plain->accuracy - *rotated->accuracy));
        check.require(gap <= 1e-6, "full-rank PCA changed NPC accuracy by " + fmt("%.3g", gap));
    }
    if (out.pass)
        out.detail = "1000 pairs, worst error " + fmt("%.2g", worst) + "; full-dim PCA accuracy gap " + fmt("%.2g", gap);
    return out;
}

Outcome sample_size_trend(const SyntheticData& data) {
    Outcome out;
    Check check{out};
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::size_t> sizes = {50, 25, 20, 15, 10};
    const std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    PipelineConfig base;
    const auto full = crossval_2fold(data.train, data.test, base, "full");
    const auto sweep = sweep_prototype_samples(data.train, data.test, sizes, seeds, base);

    std::vector<std::pair<std::string, double>> curve = {{"full", average(full, "full")}};
    for (auto s : sizes) curve.emplace_back(std::to_string(s), average(sweep, std::to_string(s)));
    std::string trace;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        trace += (i ? " " : "") + curve[i].first + "=" + fmt("%.2f", curve[i].second);
        check.require(std::isfinite(curve[i].second), "no accuracy for size " + curve[i].first);
        if (i > 0)
            check.require(curve[i].second <= curve[i - 1].second + 0.5,
                          "accuracy rose from " + curve[i - 1].first + " to " + curve[i].first + ": " + trace);
    }
    const double drop = curve[0].second - curve[1].second;
    check.require(drop <= 10.0, "full->50 drop " + fmt("%.2f", drop) + " exceeds 10 points");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(secs < kTrendBudgetSeconds, "runtime " + fmt("%.1f", secs) + " s over budget");
    if (out.pass) out.detail = trace + ", full->50 drop " + fmt("%.2f", drop) + ", " + fmt("%.1f", secs) + " s";
    return out;
}

Outcome k_sweep_shape(const SyntheticData& data) {
    Outcome out;
    Check check{out};
    const std::vector<std::size_t> ks = {1, 3, 5, 7, 11};
    PipelineConfig base;
    base.classifier.parallel = 0;
    const auto report = sweep_k(data.train, data.test, ks, base);

    const std::vector<std::string> rows = {"means", "k=1", "k=3", "k=5", "k=7", "k=11"};
    check.require(report.configs() == rows, "row labels differ from means + k rows");
    check.require(report.columns == std::vector<std::string>{std::string(kTrainToTest), std::string(kTestToTrain)},
                  "columns are not the two directions");
    check.require(report.rows.size() == rows.size() * 2, "expected " + std::to_string(rows.size() * 2) + " cells");
    for (const auto& r : report.rows) check.require(r.accuracy.has_value(), "cell " + r.config + " has no accuracy");
    check.require(report.aggregates().size() == rows.size(), "missing average +- spread for some rows");
    const auto text = report.to_text();
    check.require(text.find("Train -> Test") != std::string::npos && text.find("Test -> Train") != std::string::npos &&
                      text.find("Average") != std::string::npos && text.find("±") != std::string::npos,
                  "text table lacks the direction or average columns");

    const double k1 = average(report, "k=1"), k11 = average(report, "k=11");
    check.require(k11 >= k1 - 1.0, "k=11 " + fmt("%.2f", k11) + " below k=1 " + fmt("%.2f", k1) + " - 1.0");
    if (out.pass)
        out.detail = "6 rows x 2 directions + average; means=" + fmt("%.2f", average(report, "means")) +
                     " k=1=" + fmt("%.2f", k1) + " k=11=" + fmt("%.2f", k11);
    return out;
}

Outcome crossval_symmetry() {
    Outcome out;
    Check check{out};
    SyntheticSpec spec;
    spec.classes = 10;
    spec.dim = 32;
    spec.per_class = 25;
    spec.sigma = 0.3;
    spec.seed = 21;
    const auto data = generate_synthetic(spec);

    std::vector<PipelineConfig> configs(4);
    configs[1].rule = Rule::Knn;
    configs[2].rule = Rule::Softmax;
    configs[3].pca_dim = 16;
    configs[3].prototype_samples = 10;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto label = "pipeline " + std::to_string(i);
        const auto same = crossval_2fold(data.train, data.train, configs[i]);
        check.require(same.rows[0].accuracy == same.rows[1].accuracy, label + ": identical sets disagree");

        const auto fwd = crossval_2fold(data.train, data.test, configs[i]);
        const auto rev = crossval_2fold(data.test, data.train, configs[i]);
        for (const auto& row : fwd.rows) {
            const auto other = row.column == kTrainToTest ? kTestToTrain : kTrainToTest;
            const auto* mirror = rev.find(row.config, other);
            check.require(mirror && mirror->accuracy && row.accuracy &&
                              std::memcmp(&*mirror->accuracy, &*row.accuracy, sizeof(double)) == 0 &&
                              mirror->n_queries == row.n_queries,
                          label + ": swapped inputs do not swap rows bit-identically");
        }
    }
    if (out.pass) out.detail = "4 pipelines (npc, knn, softmax, pca+sampled npc)";
    return out;
}

Outcome store_round_trip() {
    Outcome out;
    Check check{out};
    const auto dir = fs::temp_directory_path() / ("protoclass-acceptance-store-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::mt19937_64 gen(6000);
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 1 + gen() % 10, d = 1 + gen() % 128, n = 1 + gen() % 200;
        EmbeddingSet s(d, oracle::catalog_of(k));
        s.split = static_cast<SplitTag>(gen() % 3);
        s.cleaned = gen() % 2;
        s.encoder = "enc" + std::to_string(t);
        s.extra["note"] = "set " + std::to_string(t);
        std::uniform_real_distribution<float> wide(-1e30f, 1e30f);
        for (std::size_t i = 0; i < n; ++i) {
            auto v = oracle::random_row(gen, d);
            if (i % 7 == 0) v[0] = wide(gen);
            if (i % 11 == 0) v[d - 1] = std::numeric_limits<float>::denorm_min();
            s.add(v, static_cast<ClassId>(gen() % k), "id/" + std::to_string(i) + "/" + std::to_string(gen()));
        }
        const auto path = dir / "set.emb";
        write_set(s, path);
        const auto back = read_set(path);
        check.require(back == s && back.extra == s.extra, "set " + std::to_string(t) + " changed on round trip");
        check.require(encode_payload(back) == read_file(path), "set " + std::to_string(t) + " re-encodes differently");
    }

    // Corrupt-file cases, built from one valid file.
    EmbeddingSet base(3, oracle::catalog_of(2));
    for (int i = 0; i < 10; ++i) base.add(Vector{float(i), 1.0f, -1.0f}, i % 2, "r" + std::to_string(i));
    const auto good = dir / "good.emb";
    write_set(base, good);
    const auto payload = read_file(good);
    const auto manifest = nlohmann::json::parse(read_file(manifest_path(good)));

    struct Case {
        const char* name;
        FormatReason want;
        std::function<void(std::string&, nlohmann::json&)> corrupt;
    };
    const std::vector<Case> cases = {
        {"badMagic", FormatReason::BadMagic, [](std::string& p, nlohmann::json&) { p[0] = 'X'; }},
        {"badVersion", FormatReason::BadVersion, [](std::string& p, nlohmann::json&) { p[4] = 7; }},
        {"truncated", FormatReason::Truncated,
         [](std::string& p, nlohmann::json&) { p.resize(p.size() - (4 + 3 * 4)); }},
        {"truncatedHeader", FormatReason::Truncated, [](std::string& p, nlohmann::json&) { p.resize(10); }},
        {"trailingBytes", FormatReason::TrailingBytes, [](std::string& p, nlohmann::json&) { p += "!"; }},
        {"dimMismatch", FormatReason::DimMismatch, [](std::string&, nlohmann::json& m) { m["dim"] = 4; }},
        {"countMismatch", FormatReason::CountMismatch, [](std::string&, nlohmann::json& m) { m["count"] = 11; }},
        {"nonFinite", FormatReason::NonFinite,
         [](std::string& p, nlohmann::json&) {
             const float inf = std::numeric_limits<float>::infinity();
             std::memcpy(p.data() + 20 + 4, &inf, 4);
         }},
        {"empty", FormatReason::Empty,
         [](std::string& p, nlohmann::json& m) {
             p.resize(20);
             std::memset(p.data() + 12, 0, 8);
             m["count"] = 0;
             m["sourceIds"] = nlohmann::json::array();
         }},
        {"badManifest", FormatReason::BadManifest, [](std::string&, nlohmann::json& m) { m.erase("classes"); }},
    };
    std::string fired;
    for (const auto& c : cases) {
        auto p = payload;
        auto m = manifest;
        c.corrupt(p, m);
        const auto path = dir / (std::string(c.name) + ".emb");
        atomic_write(path, p);
        atomic_write(manifest_path(path), m.dump());
        try {
            read_set(path);
            check.require(false, std::string(c.name) + ": accepted");
        } catch (const FormatError& e) {
            check.require(e.reason() == c.want, std::string(c.name) + ": raised " + std::string(to_string(e.reason())));
            fired += (fired.empty() ? "" : ",") + std::string(to_string(e.reason()));
        } catch (const std::exception& e) {
            check.require(false, std::string(c.name) + ": unexpected " + e.what());
        }
    }
    fs::remove_all(dir);
    if (out.pass) out.detail = "200 sets bit-exact; fired " + fired;
    return out;
}

Outcome run_determinism() {
    Outcome out;
    Check check{out};
    const auto dir = fs::temp_directory_path() / ("protoclass-acceptance-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    std::ostringstream sink;
    auto cli_run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };

    const int synth = cli_run({"synth", "--out", (dir / "data").string(), "--classes", "8", "--dim", "16", "--per-class",
                               "30", "--sigma", "0.3", "--seed", "3", "--complementary"});
    check.require(synth == 0, "synth failed: " + sink.str());

    // Prompt embeddings for the prompts sweep: reuse the test split as a stand-in text bank.
    const auto config = dir / "run.yaml";
    atomic_write(config, "seed: 5\n"
                         "data:\n"
                         "  train: data/train.emb\n  test: data/test.emb\n"
                         "  train_b: data/train_b.emb\n  test_b: data/test_b.emb\n"
                         "  text_embeddings:\n    selected: data/test_b.emb\n"
                         "sweep:\n  ks: [1, 3, 5, 7, 11]\n  sample_sizes: [20, 10]\n  seeds: [0, 1, 2]\n"
                         "  pca_dims: [32, 8]\n");
    std::size_t compared = 0;
    for (const char* kind : {"k", "samples", "fusion", "prompts"}) {
        const std::string file = std::string("sweep_") + kind + ".json";
        std::string reference;
        for (const char* parallel : {"1", "2", "4", "0"}) {
            const auto out_dir = dir / (std::string(kind) + "-p" + parallel);
            const int rc = cli_run({"sweep", kind, "--config", config.string(), "--out", out_dir.string(), "--parallel",
                                    parallel});
            check.require(rc == 0, std::string("sweep ") + kind + " exited " + std::to_string(rc));
            if (rc != 0) continue;
            const auto bytes = read_file(out_dir / file);
            if (reference.empty()) {
                reference = bytes;
                // Replay from the resolved config the first run wrote.
                const auto replay = dir / (std::string(kind) + "-replay");
                const int rc2 = cli_run({"sweep", kind, "--config", (out_dir / "resolved_config.yaml").string(), "--out",
                                         replay.string()});
                check.require(rc2 == 0 && read_file(replay / file) == reference,
                              std::string("sweep ") + kind + " replay from resolved config differs");
                ++compared;
            } else {
                check.require(bytes == reference, std::string("sweep ") + kind + " differs at --parallel " + parallel);
                ++compared;
            }
        }
    }
    fs::remove_all(dir);
    if (out.pass) out.detail = std::to_string(compared) + " re-runs byte-identical (parallel 1/2/4/auto + replay)";
    return out;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    std::optional<SyntheticData> benchmark;
    auto shared = [&]() -> const SyntheticData& {
        if (!benchmark) benchmark = benchmark_data();
        return *benchmark;
    };
    const std::vector<Criterion> criteria = {
        {"knn-oracle-equivalence", knn_oracle},
        {"pca-oracle-equivalence", pca_oracle},
        {"softmax-contract", softmax_contract},
        {"geometry-consistency", geometry_consistency},
        {"fusion-identity", fusion_identity},
        {"sample-size-trend", [&] { return sample_size_trend(shared()); }},
        {"k-sweep-shape", [&] { return k_sweep_shape(shared()); }},
        {"two-fold-symmetry", crossval_symmetry},
        {"store-round-trip", store_round_trip},
        {"sweep-determinism", run_determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << fmt("%.2f", secs) << " s): " << o.detail
                  << std::endl;
        failed += !o.pass;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
