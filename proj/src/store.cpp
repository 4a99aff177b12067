#include "protoclass/store.hpp"

#include "protoclass/errors.hpp"
#include "protoclass/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unistd.h>

namespace protoclass {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    }
    return v;
}

std::uint64_t get_u64(std::string_view in, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    }
    return v;
}

const std::set<std::string> kManifestKeys = {"version",  "dim",     "count", "splitTag", "cleanedFlag",
                                             "encoderTag", "role", "classes", "sourceIds"};

template <typename T>
T manifest_field(const nlohmann::json& manifest, const char* key) {
    if (!manifest.contains(key)) {
        throw FormatError(FormatReason::BadManifest, std::string("missing field '") + key + "'");
    }
    try {
        return manifest.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatReason::BadManifest, std::string("field '") + key + "': " + e.what());
    }
}

} // namespace

std::string_view to_string(SplitTag tag) {
    switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::Test: return "test";
    case SplitTag::Other: return "other";
    }
    return "other";
}

SplitTag parse_split_tag(std::string_view text) {
    if (text == "train") return SplitTag::Train;
    if (text == "test") return SplitTag::Test;
    if (text == "other") return SplitTag::Other;
    throw FormatError(FormatReason::BadManifest, "unknown split tag '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// ClassCatalog

ClassCatalog::ClassCatalog(std::vector<std::string> names) : names_(std::move(names)) { validate(); }

ClassCatalog ClassCatalog::from_entries(const std::vector<std::pair<std::int64_t, std::string>>& entries) {
    std::vector<std::string> names(entries.size());
    std::vector<bool> seen(entries.size(), false);
    for (const auto& [id, name] : entries) {
        if (id < 0 || static_cast<std::size_t>(id) >= entries.size() || seen[static_cast<std::size_t>(id)]) {
            throw Error(ErrorCode::Catalog, "class ids must be exactly 0.." + std::to_string(entries.size()) +
                                                "-1; offending id " + std::to_string(id));
        }
        seen[static_cast<std::size_t>(id)] = true;
        names[static_cast<std::size_t>(id)] = name;
    }
    return ClassCatalog(std::move(names));
}

void ClassCatalog::validate() const {
    std::set<std::string_view> unique;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) {
            throw Error(ErrorCode::Catalog, "class " + std::to_string(i) + " has an empty name");
        }
        if (!unique.insert(names_[i]).second) {
            throw Error(ErrorCode::Catalog, "duplicate class name '" + names_[i] + "'");
        }
    }
}

const std::string& ClassCatalog::name(ClassId id) const {
    if (!contains(id)) {
        throw Error(ErrorCode::UnknownClass, "class id " + std::to_string(id));
    }
    return names_[id];
}

std::optional<ClassId> ClassCatalog::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return static_cast<ClassId>(i);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// EmbeddingSet

void EmbeddingSet::add(VectorView v, ClassId class_id, std::string source_id) {
    vectors.append(v);
    class_ids.push_back(class_id);
    source_ids.push_back(std::move(source_id));
}

void EmbeddingSet::validate() const {
    if (dim() == 0) {
        throw FormatError(FormatReason::DimMismatch, "embedding dim must be at least 1");
    }
    if (size() == 0) {
        throw FormatError(FormatReason::Empty, "embedding set has no records");
    }
    if (vectors.rows() != size() || source_ids.size() != size()) {
        throw FormatError(FormatReason::CountMismatch,
                          std::to_string(vectors.rows()) + " vectors, " + std::to_string(class_ids.size()) +
                              " labels, " + std::to_string(source_ids.size()) + " sourceIds");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!catalog.contains(class_ids[i])) {
            throw Error(ErrorCode::Catalog, "record '" + source_ids[i] + "' has class id " +
                                                std::to_string(class_ids[i]) + " outside a catalog of " +
                                                std::to_string(catalog.size()));
        }
        for (float x : vector(i)) {
            if (!std::isfinite(x)) {
                throw FormatError(FormatReason::NonFinite, "record '" + source_ids[i] + "'");
            }
        }
    }
}

bool EmbeddingSet::operator==(const EmbeddingSet& other) const {
    const auto& a = vectors.values();
    const auto& b = other.vectors.values();
    return dim() == other.dim() && a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0 && class_ids == other.class_ids &&
           source_ids == other.source_ids && catalog == other.catalog && split == other.split &&
           cleaned == other.cleaned && encoder == other.encoder && role == other.role && extra == other.extra;
}

// ---------------------------------------------------------------------------
// Serialization

fs::path manifest_path(const fs::path& path) {
    fs::path out = path;
    out += ".manifest.json";
    return out;
}

std::string encode_payload(const EmbeddingSet& set) {
    set.validate();
    std::string out;
    out.reserve(kHeaderBytes + set.size() * (4 + 4 * set.dim()));
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(set.dim()));
    put_u64(out, set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        put_u32(out, set.class_ids[i]);
        for (float x : set.vector(i)) {
            put_u32(out, std::bit_cast<std::uint32_t>(x));
        }
    }
    return out;
}

nlohmann::json encode_manifest(const EmbeddingSet& set) {
    nlohmann::json m = set.extra.is_object() ? set.extra : nlohmann::json::object();
    m["version"] = kVersion;
    m["dim"] = set.dim();
    m["count"] = set.size();
    m["splitTag"] = to_string(set.split);
    m["cleanedFlag"] = set.cleaned;
    m["encoderTag"] = set.encoder;
    m["role"] = set.role;
    auto classes = nlohmann::json::array();
    for (std::size_t i = 0; i < set.catalog.size(); ++i) {
        classes.push_back({{"id", i}, {"name", set.catalog.names()[i]}});
    }
    m["classes"] = std::move(classes);
    m["sourceIds"] = set.source_ids;
    return m;
}

EmbeddingSet decode(std::string_view payload, const nlohmann::json& manifest) {
    if (payload.size() < 4) {
        throw FormatError(FormatReason::Truncated, "file shorter than the magic bytes");
    }
    if (std::memcmp(payload.data(), kMagic, 4) != 0) {
        throw FormatError(FormatReason::BadMagic, "expected \"EMB1\"");
    }
    if (payload.size() < kHeaderBytes) {
        throw FormatError(FormatReason::Truncated, "header needs " + std::to_string(kHeaderBytes) + " bytes, file has " +
                                                       std::to_string(payload.size()));
    }
    const std::uint32_t version = get_u32(payload, 4);
    if (version != kVersion) {
        throw FormatError(FormatReason::BadVersion, "version " + std::to_string(version));
    }
    const std::uint32_t dim = get_u32(payload, 8);
    const std::uint64_t count = get_u64(payload, 12);
    if (dim == 0) {
        throw FormatError(FormatReason::DimMismatch, "header declares dim 0");
    }
    if (count == 0) {
        throw FormatError(FormatReason::Empty, "header declares zero records");
    }

    const std::uint64_t row_bytes = 4 + 4 * static_cast<std::uint64_t>(dim);
    const std::uint64_t body = payload.size() - kHeaderBytes;
    if (body / row_bytes < count) {
        throw FormatError(FormatReason::Truncated, "header declares " + std::to_string(count) + " records, file holds " +
                                                       std::to_string(body / row_bytes));
    }
    if (body != count * row_bytes) {
        throw FormatError(FormatReason::TrailingBytes,
                          std::to_string(body - count * row_bytes) + " bytes after the last record");
    }

    if (!manifest.is_object()) {
        throw FormatError(FormatReason::BadManifest, "manifest is not a JSON object");
    }
    if (manifest_field<std::uint32_t>(manifest, "version") != kVersion) {
        throw FormatError(FormatReason::BadVersion, "manifest version");
    }
    const auto manifest_dim = manifest_field<std::uint64_t>(manifest, "dim");
    if (manifest_dim != dim) {
        throw FormatError(FormatReason::DimMismatch, "manifest dim " + std::to_string(manifest_dim) +
                                                         ", payload dim " + std::to_string(dim));
    }
    const auto manifest_count = manifest_field<std::uint64_t>(manifest, "count");
    if (manifest_count != count) {
        throw FormatError(FormatReason::CountMismatch, "manifest count " + std::to_string(manifest_count) +
                                                           ", payload count " + std::to_string(count));
    }

    std::vector<std::pair<std::int64_t, std::string>> entries;
    const auto classes = manifest_field<nlohmann::json>(manifest, "classes");
    if (!classes.is_array()) {
        throw FormatError(FormatReason::BadManifest, "'classes' must be an array");
    }
    for (const auto& c : classes) {
        try {
            entries.emplace_back(c.at("id").get<std::int64_t>(), c.at("name").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(FormatReason::BadManifest, std::string("class entry: ") + e.what());
        }
    }

    EmbeddingSet set(dim, ClassCatalog::from_entries(entries));
    set.split = parse_split_tag(manifest_field<std::string>(manifest, "splitTag"));
    set.cleaned = manifest_field<bool>(manifest, "cleanedFlag");
    set.encoder = manifest_field<std::string>(manifest, "encoderTag");
    set.role = manifest.contains("role") ? manifest_field<std::string>(manifest, "role") : "embeddings";
    set.source_ids = manifest_field<std::vector<std::string>>(manifest, "sourceIds");
    if (set.source_ids.size() != count) {
        throw FormatError(FormatReason::CountMismatch, std::to_string(set.source_ids.size()) + " sourceIds for " +
                                                           std::to_string(count) + " records");
    }
    for (auto it = manifest.begin(); it != manifest.end(); ++it) {
        if (!kManifestKeys.contains(it.key())) {
            set.extra[it.key()] = it.value();
        }
    }

    std::vector<float> values(static_cast<std::size_t>(count) * dim);
    set.class_ids.resize(count);
    std::size_t at = kHeaderBytes;
    for (std::size_t r = 0; r < count; ++r) {
        set.class_ids[r] = get_u32(payload, at);
        at += 4;
        for (std::size_t j = 0; j < dim; ++j, at += 4) {
            values[r * dim + j] = std::bit_cast<float>(get_u32(payload, at));
        }
    }
    set.vectors = EmbeddingMatrix(dim, std::move(values));
    set.validate();
    return set;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::Io, "read failed on '" + path.string() + "'");
    }
    return std::move(buf).str();
}

void atomic_write(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw Error(ErrorCode::Io, "write failed on '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot rename into '" + path.string() + "'");
    }
}

void write_set(const EmbeddingSet& set, const fs::path& path) {
    const std::string payload = encode_payload(set);
    const std::string manifest = encode_manifest(set).dump(2) + "\n";
    atomic_write(path, payload);
    atomic_write(manifest_path(path), manifest);
}

EmbeddingSet read_set(const fs::path& path) {
    const std::string payload = read_file(path);
    const std::string manifest_text = read_file(manifest_path(path));
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(manifest_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(FormatReason::BadManifest, manifest_path(path).string() + ": " + e.what());
    }
    return decode(payload, manifest);
}

// ---------------------------------------------------------------------------
// Subsets and sampling

EmbeddingSet normalize_rows(const EmbeddingSet& set) {
    EmbeddingSet out = set;
    for (std::size_t i = 0; i < set.size(); ++i) {
        try {
            const auto unit = l2_normalize(set.vector(i));
            std::copy(unit.begin(), unit.end(), out.vectors.row(i).begin());
        } catch (const Error& e) {
            throw Error(e.code(), "record '" + set.source_ids[i] + "': " + e.what());
        }
    }
    return out;
}

EmbeddingSet subset_by_class(const EmbeddingSet& set, std::span<const ClassId> classes) {
    std::vector<bool> keep(set.catalog.size(), false);
    for (auto c : classes) {
        if (!set.catalog.contains(c)) {
            throw Error(ErrorCode::UnknownClass, "class id " + std::to_string(c) + " not in catalog");
        }
        keep[c] = true;
    }
    EmbeddingSet out(set.dim(), set.catalog);
    out.split = set.split;
    out.cleaned = set.cleaned;
    out.encoder = set.encoder;
    out.role = set.role;
    out.extra = set.extra;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (keep[set.class_ids[i]]) {
            out.add(set.vector(i), set.class_ids[i], set.source_ids[i]);
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> records_by_class(const EmbeddingSet& set) {
    std::vector<std::vector<std::size_t>> groups(set.catalog.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set.class_ids[i] < groups.size()) {
            groups[set.class_ids[i]].push_back(i);
        }
    }
    return groups;
}

std::vector<std::vector<std::size_t>> sample_indices_per_class(const EmbeddingSet& set,
                                                               std::optional<std::size_t> n, std::uint64_t seed) {
    if (n && *n == 0) {
        throw Error(ErrorCode::Spec, "sample size must be at least 1");
    }
    auto groups = records_by_class(set);
    SplitMix64 rng(seed);
    for (auto& members : groups) {
        std::stable_sort(members.begin(), members.end(),
                         [&](std::size_t a, std::size_t b) { return set.source_ids[a] < set.source_ids[b]; });
        if (!n || *n >= members.size()) {
            continue;
        }
        for (std::size_t i = 0; i < *n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(members.size() - i));
            std::swap(members[i], members[j]);
        }
        members.resize(*n);
        // Sorted positions double as the sourceId order.
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (set.source_ids[a] != set.source_ids[b]) return set.source_ids[a] < set.source_ids[b];
            return a < b;
        });
    }
    return groups;
}

SampledSet sample_per_class(const EmbeddingSet& set, std::optional<std::size_t> n, std::uint64_t seed) {
    const auto groups = sample_indices_per_class(set, n, seed);
    SampledSet out{EmbeddingSet(set.dim(), set.catalog), {}};
    out.set.split = set.split;
    out.set.cleaned = set.cleaned;
    out.set.encoder = set.encoder;
    out.set.role = set.role;
    out.set.extra = set.extra;
    const auto counts = records_by_class(set);
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (n && counts[c].size() < *n) {
            out.short_classes.push_back({static_cast<ClassId>(c), *n, counts[c].size()});
        }
        for (auto i : groups[c]) {
            out.set.add(set.vector(i), set.class_ids[i], set.source_ids[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Captions

void CaptionSet::validate(const ClassCatalog* catalog) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.caption.empty()) {
            throw FormatError(FormatReason::BadCaption, "empty caption for '" + e.source_id + "'");
        }
        if (catalog && !catalog->contains(e.class_id)) {
            throw Error(ErrorCode::Catalog, "caption '" + e.source_id + "' has class id " +
                                                std::to_string(e.class_id) + " outside the catalog");
        }
    }
}

void write_captions(const CaptionSet& captions, const fs::path& path) {
    captions.validate();
    std::string out;
    nlohmann::json header = captions.header;
    header["splitTag"] = to_string(captions.split);
    out += nlohmann::json{{"header", header}}.dump() + "\n";
    for (const auto& e : captions.entries) {
        out += nlohmann::json{{"sourceId", e.source_id}, {"classId", e.class_id}, {"caption", e.caption}}.dump() + "\n";
    }
    atomic_write(path, out);
}

CaptionSet read_captions(const fs::path& path) {
    const std::string text = read_file(path);
    CaptionSet captions;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(FormatReason::BadCaption, where + ": " + e.what());
        }
        if (obj.contains("header")) {
            captions.header = obj["header"];
            if (captions.header.contains("splitTag")) {
                captions.split = parse_split_tag(captions.header["splitTag"].get<std::string>());
                captions.header.erase("splitTag");
            }
            continue;
        }
        try {
            CaptionEntry e;
            e.source_id = obj.at("sourceId").get<std::string>();
            const auto id = obj.at("classId").get<std::int64_t>();
            if (id < 0) {
                throw Error(ErrorCode::Catalog, where + ": negative class id");
            }
            e.class_id = static_cast<ClassId>(id);
            e.caption = obj.at("caption").get<std::string>();
            captions.entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(FormatReason::BadCaption, where + ": " + e.what());
        }
    }
    captions.validate();
    return captions;
}

} // namespace protoclass
