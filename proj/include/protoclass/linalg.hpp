#ifndef PROTOCLASS_LINALG_HPP
#define PROTOCLASS_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

/**
 * @file linalg.hpp
 *
 * @brief Vector kernels shared by every stage of the engine.
 *
 * Embeddings are stored as 32-bit floats; every reduction (dot products,
 * norms, means, covariances) accumulates in double precision.
 */

namespace protoclass {

using Vector = std::vector<float>;
using VectorView = std::span<const float>;

/**
 * @brief Dense row-major block of equally sized embeddings.
 *
 * Rows are contiguous so the brute-force kernels can stream over them.
 */
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    explicit EmbeddingMatrix(std::size_t dim) : dim_(dim) {}
    EmbeddingMatrix(std::size_t dim, std::vector<float> values);

    std::size_t dim() const { return dim_; }
    std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
    bool empty() const { return values_.empty(); }

    VectorView row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    std::span<float> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }

    void append(VectorView v);
    void reserve(std::size_t rows) { values_.reserve(rows * dim_); }

    const std::vector<float>& values() const { return values_; }

    bool operator==(const EmbeddingMatrix&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<float> values_;
};

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(VectorView v);
void require_same_dim(VectorView a, VectorView b);

double dot(VectorView a, VectorView b);
double norm(VectorView v);

/// Unit-length copy of @p v. Throws ZeroVector when the norm is below 1e-12.
Vector l2_normalize(VectorView v);

/// Cosine similarity in [-1, 1]. Throws DimMismatch or ZeroVector.
double cosine_sim(VectorView a, VectorView b);

double squared_euclidean(VectorView a, VectorView b);
double euclidean_dist(VectorView a, VectorView b);

/// Component-wise arithmetic mean. Throws EmptyInput or DimMismatch.
Vector mean_vector(std::span<const Vector> vs);
Vector mean_vector(const EmbeddingMatrix& m);

/// Mean over the listed rows, summed in the order given.
Vector mean_of_rows(const EmbeddingMatrix& m, std::span<const std::size_t> rows);

/**
 * @brief Late fusion of two embeddings from independent encoders.
 *
 * Each block is normalized on its own, the blocks are concatenated (@p a
 * first) and the result is normalized again, so each encoder contributes
 * half of the squared norm. Consequently the cosine between two fused
 * vectors is the mean of the per-encoder cosines.
 */
Vector fuse_concat(VectorView a, VectorView b);

/**
 * @brief Principal component projection fit by eigendecomposition of the
 * sample covariance.
 *
 * Components are stored row-major (`output_dim x input_dim`). Each
 * component is sign-normalized so that its largest-magnitude entry is
 * positive.
 */
struct PcaModel {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    Vector mean;
    std::vector<double> components;
    std::vector<double> explained_variance;
    /// Trace of the sample covariance (sum of all eigenvalues, clamped).
    double total_variance = 0.0;

    std::span<const double> component(std::size_t i) const {
        return {components.data() + i * input_dim, input_dim};
    }

    Vector transform(VectorView v) const;
    EmbeddingMatrix transform(const EmbeddingMatrix& m) const;
    Vector inverse_transform(VectorView projected) const;
};

/// Throws InsufficientData when fewer than two rows are given or when
/// @p output_dim exceeds min(input_dim, rows).
PcaModel pca_fit(const EmbeddingMatrix& data, std::size_t output_dim);

inline Vector pca_transform(const PcaModel& model, VectorView v) { return model.transform(v); }

} // namespace protoclass

#endif
