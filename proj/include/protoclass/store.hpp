#ifndef PROTOCLASS_STORE_HPP
#define PROTOCLASS_STORE_HPP

#include "protoclass/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file store.hpp
 *
 * @brief On-disk embedding sets, class catalogs and caption files.
 *
 * An embedding set lives in two files:
 *
 *  - `<file>`: the EMB1 payload. Little-endian. A 20-byte header made of the
 *    four ASCII bytes "EMB1", u32 version (1), u32 dim, u64 record count,
 *    followed by `count` rows of (u32 classId, f32 x dim).
 *  - `<file>.manifest.json`: {version, dim, count, splitTag, cleanedFlag,
 *    encoderTag, role, classes:[{id,name}], sourceIds:[...]} plus any extra
 *    fields a producer adds (kept verbatim).
 *
 * Caption files are JSON Lines with one {sourceId, classId, caption} object
 * per line. A line holding a "header" object carries producer metadata.
 */

namespace protoclass {

using ClassId = std::uint32_t;

enum class SplitTag { Train, Test, Other };

std::string_view to_string(SplitTag tag);
SplitTag parse_split_tag(std::string_view text);

class ClassCatalog {
public:
    ClassCatalog() = default;

    /// Class ids are assigned 0..K-1 in the given order.
    explicit ClassCatalog(std::vector<std::string> names);

    /// Throws CatalogError unless ids are exactly 0..K-1 (any order) and names are unique and nonempty.
    static ClassCatalog from_entries(const std::vector<std::pair<std::int64_t, std::string>>& entries);

    std::size_t size() const { return names_.size(); }
    bool contains(ClassId id) const { return id < names_.size(); }
    const std::string& name(ClassId id) const;
    std::optional<ClassId> find(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const ClassCatalog&) const = default;

private:
    void validate() const;

    std::vector<std::string> names_;
};

/// A labeled collection of equally sized embeddings.
struct EmbeddingSet {
    EmbeddingMatrix vectors;
    std::vector<ClassId> class_ids;
    std::vector<std::string> source_ids;
    ClassCatalog catalog;
    SplitTag split = SplitTag::Other;
    bool cleaned = false;
    std::string encoder;
    std::string role = "embeddings";
    /// Additional manifest fields, preserved across read/write.
    nlohmann::json extra = nlohmann::json::object();

    EmbeddingSet() = default;
    EmbeddingSet(std::size_t dim, ClassCatalog catalog) : vectors(dim), catalog(std::move(catalog)) {}

    std::size_t size() const { return class_ids.size(); }
    std::size_t dim() const { return vectors.dim(); }
    VectorView vector(std::size_t i) const { return vectors.row(i); }

    void add(VectorView v, ClassId class_id, std::string source_id);

    /// Checks dims, catalog membership, finiteness and non-emptiness.
    void validate() const;

    bool operator==(const EmbeddingSet& other) const;
};

/// Atomic whole-file write (temp file + rename) of payload and manifest.
void write_set(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_set(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& path);

/// Serialized payload bytes, exactly as written by write_set.
std::string encode_payload(const EmbeddingSet& set);
nlohmann::json encode_manifest(const EmbeddingSet& set);
EmbeddingSet decode(std::string_view payload, const nlohmann::json& manifest);

/// Copy with every vector scaled to unit length. Throws ZeroVector naming the record.
EmbeddingSet normalize_rows(const EmbeddingSet& set);

/// Records whose class is listed, in original order. Throws UnknownClass.
EmbeddingSet subset_by_class(const EmbeddingSet& set, std::span<const ClassId> classes);

/// Records whose class ids are in the catalog range [0, K); empty classes are not an error.
std::vector<std::vector<std::size_t>> records_by_class(const EmbeddingSet& set);

struct ShortClass {
    ClassId class_id;
    std::size_t requested;
    std::size_t available;
};

struct SampledSet {
    EmbeddingSet set;
    /// Classes that had fewer than the requested number of records.
    std::vector<ShortClass> short_classes;
};

/**
 * @brief Draws min(n, available) records per class without replacement.
 *
 * Within each class the records are first ordered by sourceId (then by
 * original position), then a partial Fisher-Yates shuffle driven by one
 * SplitMix64 stream seeded with @p seed picks the sample; classes are
 * visited in ascending id order. The output is order-normalized: ascending
 * class id, then ascending sourceId. A std::nullopt @p n keeps every record.
 */
SampledSet sample_per_class(const EmbeddingSet& set, std::optional<std::size_t> n, std::uint64_t seed);

/// Indices of the selected records, in output order (shared by sample_per_class).
std::vector<std::vector<std::size_t>> sample_indices_per_class(const EmbeddingSet& set,
                                                               std::optional<std::size_t> n, std::uint64_t seed);

struct CaptionEntry {
    std::string source_id;
    ClassId class_id = 0;
    std::string caption;

    bool operator==(const CaptionEntry&) const = default;
};

struct CaptionSet {
    std::vector<CaptionEntry> entries;
    SplitTag split = SplitTag::Other;
    /// Producer metadata from the header line (decoding parameters etc.).
    nlohmann::json header = nlohmann::json::object();

    /// Throws FormatError on empty captions and CatalogError when a class is outside @p catalog.
    void validate(const ClassCatalog* catalog = nullptr) const;
};

void write_captions(const CaptionSet& captions, const std::filesystem::path& path);
CaptionSet read_captions(const std::filesystem::path& path);

/// Writes @p bytes to @p path through a sibling temp file and a rename.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace protoclass

#endif
