#include "../tools/cli.hpp"

#include "protoclass/store.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

using namespace protoclass;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("protoclass-cli-" + std::to_string(std::random_device{}()) + "-" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    // A small synthetic pair of splits; returns the run config it wrote.
    fs::path synth(const std::string& name, std::vector<std::string> extra = {}) {
        std::vector<std::string> args = {"synth",    "--out",       (root_ / name).string(), "--classes", "5",
                                         "--dim",    "8",           "--per-class",          "12",        "--sigma",
                                         "0.3",      "--seed",      "4"};
        args.insert(args.end(), extra.begin(), extra.end());
        EXPECT_EQ(run(args), 0) << err_.str();
        return root_ / name / "resolved_config.yaml";
    }

    fs::path root_;
    std::ostringstream out_;
    std::ostringstream err_;
};

} // namespace

TEST_F(CliTest, SynthIsDeterministic) {
    synth("a");
    synth("b");
    EXPECT_EQ(read_file(root_ / "a" / "train.emb"), read_file(root_ / "b" / "train.emb"));
    EXPECT_EQ(read_file(root_ / "a" / "test.emb"), read_file(root_ / "b" / "test.emb"));
}

TEST_F(CliTest, ValidateAcceptsGoodAndRejectsCorruptFiles) {
    synth("s");
    EXPECT_EQ(run({"validate", (root_ / "s" / "train.emb").string()}), 0);
    EXPECT_NE(out_.str().find("OK"), std::string::npos);

    auto bytes = read_file(root_ / "s" / "train.emb");
    std::memcpy(bytes.data(), "XMB1", 4);
    atomic_write(root_ / "s" / "train.emb", bytes);
    EXPECT_NE(run({"validate", (root_ / "s" / "train.emb").string()}), 0);
    EXPECT_NE((out_.str() + err_.str()).find("badMagic"), std::string::npos);
}

TEST_F(CliTest, ValidatePairRequiresJoinableRecords) {
    synth("s", {"--complementary"});
    EXPECT_EQ(run({"validate", "--pair", (root_ / "s" / "train.emb").string(), (root_ / "s" / "train_b.emb").string()}),
              0)
        << out_.str() << err_.str();
    EXPECT_NE(run({"validate", "--pair", (root_ / "s" / "train.emb").string(), (root_ / "s" / "test_b.emb").string()}),
              0);
}

TEST_F(CliTest, ClassifyWritesPredictionsDeterministically) {
    const auto config = synth("s");
    ASSERT_EQ(run({"classify", "--config", config.string(), "--out", (root_ / "c1").string(), "--rule", "knn", "--k",
                   "3"}),
              0)
        << err_.str();
    ASSERT_EQ(run({"classify", "--config", config.string(), "--out", (root_ / "c2").string(), "--rule", "knn", "--k",
                   "3", "--parallel", "3"}),
              0);
    const auto a = read_file(root_ / "c1" / "predictions.jsonl");
    EXPECT_EQ(a, read_file(root_ / "c2" / "predictions.jsonl"));
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 60);
    EXPECT_TRUE(fs::exists(root_ / "c1" / "summary.json"));
    EXPECT_TRUE(fs::exists(root_ / "c1" / "resolved_config.yaml"));
}

TEST_F(CliTest, FlagsOverrideConfigAndResolvedConfigReplays) {
    const auto config = synth("s");
    ASSERT_EQ(run({"eval", "--config", config.string(), "--out", (root_ / "e1").string(), "--proto-samples", "5",
                   "--seed", "9"}),
              0)
        << err_.str();
    const auto cfg = cli::load_config(root_ / "e1" / "resolved_config.yaml");
    EXPECT_EQ(cfg.proto_samples, std::optional<std::size_t>(5));
    EXPECT_EQ(cfg.seed, 9u);

    ASSERT_EQ(run({"eval", "--config", (root_ / "e1" / "resolved_config.yaml").string(), "--out",
                   (root_ / "e2").string()}),
              0);
    EXPECT_EQ(read_file(root_ / "e1" / "report.json"), read_file(root_ / "e2" / "report.json"));
}

TEST_F(CliTest, SweepsAreByteIdenticalAcrossParallelism) {
    const auto config = synth("s");
    for (const char* kind : {"k", "samples"}) {
        ASSERT_EQ(run({"sweep", kind, "--config", config.string(), "--out", (root_ / "p1").string(), "--parallel", "1"}),
                  0)
            << err_.str();
        ASSERT_EQ(run({"sweep", kind, "--config", config.string(), "--out", (root_ / "p4").string(), "--parallel", "4"}),
                  0);
        const std::string file = std::string("sweep_") + kind + ".json";
        EXPECT_EQ(read_file(root_ / "p1" / file), read_file(root_ / "p4" / file)) << kind;
    }
}

TEST_F(CliTest, OversizedKIsAStatusRowNotAFailure) {
    synth("s");
    atomic_write(root_ / "big_k.yaml", "data:\n  train: s/train.emb\n  test: s/test.emb\nsweep:\n  ks: [1, 100]\n");
    EXPECT_EQ(run({"sweep", "k", "--config", (root_ / "big_k.yaml").string(), "--out", (root_ / "k").string()}), 0)
        << err_.str();
    const auto report = nlohmann::json::parse(read_file(root_ / "k" / "sweep_k.json"));
    ASSERT_EQ(report["rows"].size(), 6u);
    std::size_t failed = 0;
    for (const auto& row : report["rows"]) failed += row["status"] != "ok";
    EXPECT_EQ(failed, 2u);
}

TEST_F(CliTest, ProjectWritesCsv) {
    const auto config = synth("s");
    ASSERT_EQ(run({"project", "--config", config.string(), "--out", (root_ / "proj").string()}), 0) << err_.str();
    EXPECT_EQ(read_file(root_ / "proj" / "project.csv").rfind("sourceId,classId,x,y", 0), 0u);
}

TEST_F(CliTest, UsageErrorsExitWithTwo) {
    EXPECT_EQ(run({"classify", "--rule", "svm", "--out", (root_ / "x").string()}), 2);
    EXPECT_EQ(run({"frobnicate"}), 2);
}
