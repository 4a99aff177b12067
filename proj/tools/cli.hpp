#ifndef PROTOCLASS_TOOLS_CLI_HPP
#define PROTOCLASS_TOOLS_CLI_HPP

#include "protoclass/classifiers.hpp"
#include "protoclass/evaluation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace protoclass::cli {

/// Everything a run needs, with defaults materialized. Paths are absolute once resolved.
struct RunConfig {
    std::filesystem::path out;
    std::uint64_t seed = 0;
    unsigned parallel = 0;

    Rule rule = Rule::Npc;
    double tau = 0.01;
    std::size_t k = 11;
    Metric metric = Metric::Euclidean;
    std::optional<std::size_t> proto_samples;
    std::optional<std::size_t> pca_dim;
    std::string templates = "selected";

    struct Data {
        std::filesystem::path train;
        std::filesystem::path test;
        std::filesystem::path train_b;
        std::filesystem::path test_b;
        std::filesystem::path gallery;
        std::filesystem::path queries;
        std::string label_a = "A";
        std::string label_b = "B";
        /// Template-bank name -> EMB1 of prompt embeddings.
        std::map<std::string, std::filesystem::path> text_embeddings;
        /// Caption split (train/test) -> EMB1 of caption embeddings.
        std::map<std::string, std::filesystem::path> caption_embeddings;
    } data;

    struct Sweep {
        std::vector<std::size_t> ks = {1, 3, 5, 7, 11};
        std::vector<std::size_t> sample_sizes = {50, 25, 20, 15, 10};
        std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
        std::vector<std::size_t> pca_dims = {1024, 512};
    } sweep;

    struct Synth {
        SyntheticSpec spec;
        bool complementary = false;
    } synth;

    PipelineConfig pipeline() const;

    /// YAML text of the fully resolved config; loading it back reproduces the run.
    std::string to_yaml() const;
};

/// Reads a YAML config; relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace protoclass::cli

#endif
