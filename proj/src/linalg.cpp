#include "protoclass/linalg.hpp"

#include "protoclass/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace protoclass {

namespace {

constexpr double kZeroNorm = 1e-12;

// Rows per block when accumulating the covariance.
constexpr std::size_t kCovarianceBlock = 512;

void add_into(std::vector<double>& acc, VectorView v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc[i] += v[i];
    }
}

Vector finish_mean(const std::vector<double>& acc, std::size_t count) {
    Vector out(acc.size());
    const double n = static_cast<double>(count);
    for (std::size_t i = 0; i < acc.size(); ++i) {
        out[i] = static_cast<float>(acc[i] / n);
    }
    return out;
}

} // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<float> values) : dim_(dim), values_(std::move(values)) {
    if (dim_ == 0 || values_.size() % dim_ != 0) {
        throw Error(ErrorCode::DimMismatch, "matrix payload of " + std::to_string(values_.size()) +
                                                " values is not a multiple of dim " + std::to_string(dim_));
    }
}

void EmbeddingMatrix::append(VectorView v) {
    if (v.size() != dim_) {
        throw Error(ErrorCode::DimMismatch,
                    "row of dim " + std::to_string(v.size()) + " appended to matrix of dim " + std::to_string(dim_));
    }
    values_.insert(values_.end(), v.begin(), v.end());
}

void require_finite(VectorView v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw Error(ErrorCode::NonFinite, "entry " + std::to_string(i) + " is not finite");
        }
    }
}

void require_same_dim(VectorView a, VectorView b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

double dot(VectorView a, VectorView b) {
    require_same_dim(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double norm(VectorView v) {
    double acc = 0.0;
    for (float x : v) {
        acc += static_cast<double>(x) * static_cast<double>(x);
    }
    return std::sqrt(acc);
}

Vector l2_normalize(VectorView v) {
    if (v.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot normalize an empty vector");
    }
    require_finite(v);
    const double n = norm(v);
    if (n < kZeroNorm) {
        throw Error(ErrorCode::ZeroVector, "norm " + std::to_string(n) + " is below 1e-12");
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
    }
    return out;
}

double cosine_sim(VectorView a, VectorView b) {
    require_same_dim(a, b);
    const double na = norm(a);
    const double nb = norm(b);
    if (na < kZeroNorm || nb < kZeroNorm) {
        throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector");
    }
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double squared_euclidean(VectorView a, VectorView b) {
    require_same_dim(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc;
}

double euclidean_dist(VectorView a, VectorView b) { return std::sqrt(squared_euclidean(a, b)); }

Vector mean_vector(std::span<const Vector> vs) {
    if (vs.empty()) {
        throw Error(ErrorCode::EmptyInput, "mean of zero vectors");
    }
    std::vector<double> acc(vs.front().size(), 0.0);
    for (const auto& v : vs) {
        require_same_dim(vs.front(), v);
        add_into(acc, v);
    }
    return finish_mean(acc, vs.size());
}

Vector mean_vector(const EmbeddingMatrix& m) {
    if (m.rows() == 0) {
        throw Error(ErrorCode::EmptyInput, "mean of zero vectors");
    }
    std::vector<double> acc(m.dim(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        add_into(acc, m.row(r));
    }
    return finish_mean(acc, m.rows());
}

Vector mean_of_rows(const EmbeddingMatrix& m, std::span<const std::size_t> rows) {
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyInput, "mean of zero vectors");
    }
    std::vector<double> acc(m.dim(), 0.0);
    for (auto r : rows) {
        add_into(acc, m.row(r));
    }
    return finish_mean(acc, rows.size());
}

Vector fuse_concat(VectorView a, VectorView b) {
    const Vector ua = l2_normalize(a);
    const Vector ub = l2_normalize(b);
    Vector joined;
    joined.reserve(ua.size() + ub.size());
    joined.insert(joined.end(), ua.begin(), ua.end());
    joined.insert(joined.end(), ub.begin(), ub.end());
    return l2_normalize(joined);
}

Vector PcaModel::transform(VectorView v) const {
    if (v.size() != input_dim) {
        throw Error(ErrorCode::DimMismatch, "PCA input dim " + std::to_string(input_dim) + ", got " +
                                                std::to_string(v.size()));
    }
    std::vector<double> centered(input_dim);
    for (std::size_t j = 0; j < input_dim; ++j) {
        centered[j] = static_cast<double>(v[j]) - static_cast<double>(mean[j]);
    }
    Vector out(output_dim);
    for (std::size_t c = 0; c < output_dim; ++c) {
        const auto comp = component(c);
        double acc = 0.0;
        for (std::size_t j = 0; j < input_dim; ++j) {
            acc += comp[j] * centered[j];
        }
        out[c] = static_cast<float>(acc);
    }
    return out;
}

EmbeddingMatrix PcaModel::transform(const EmbeddingMatrix& m) const {
    EmbeddingMatrix out(output_dim);
    out.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out.append(transform(m.row(r)));
    }
    return out;
}

Vector PcaModel::inverse_transform(VectorView projected) const {
    if (projected.size() != output_dim) {
        throw Error(ErrorCode::DimMismatch, "PCA output dim " + std::to_string(output_dim) + ", got " +
                                                std::to_string(projected.size()));
    }
    std::vector<double> acc(input_dim);
    for (std::size_t j = 0; j < input_dim; ++j) {
        acc[j] = mean[j];
    }
    for (std::size_t c = 0; c < output_dim; ++c) {
        const auto comp = component(c);
        const double w = projected[c];
        for (std::size_t j = 0; j < input_dim; ++j) {
            acc[j] += w * comp[j];
        }
    }
    Vector out(input_dim);
    std::transform(acc.begin(), acc.end(), out.begin(), [](double x) { return static_cast<float>(x); });
    return out;
}

PcaModel pca_fit(const EmbeddingMatrix& data, std::size_t output_dim) {
    const std::size_t n = data.rows();
    const std::size_t d = data.dim();
    if (n < 2) {
        throw Error(ErrorCode::InsufficientData, "PCA needs at least 2 rows, got " + std::to_string(n));
    }
    if (output_dim == 0 || output_dim > std::min(d, n)) {
        throw Error(ErrorCode::InsufficientData, "PCA output dim " + std::to_string(output_dim) +
                                                     " must be in [1, min(dim=" + std::to_string(d) +
                                                     ", rows=" + std::to_string(n) + ")]");
    }
    for (std::size_t r = 0; r < n; ++r) {
        require_finite(data.row(r));
    }

    std::vector<double> mean_acc(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        add_into(mean_acc, data.row(r));
    }
    Eigen::VectorXd mu(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        mu[static_cast<Eigen::Index>(j)] = mean_acc[j] / static_cast<double>(n);
    }

    const auto di = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(di, di);
    for (std::size_t start = 0; start < n; start += kCovarianceBlock) {
        const std::size_t stop = std::min(n, start + kCovarianceBlock);
        Eigen::MatrixXd block(static_cast<Eigen::Index>(stop - start), di);
        for (std::size_t r = start; r < stop; ++r) {
            const auto row = data.row(r);
            for (std::size_t j = 0; j < d; ++j) {
                block(static_cast<Eigen::Index>(r - start), static_cast<Eigen::Index>(j)) =
                    static_cast<double>(row[j]) - mu[static_cast<Eigen::Index>(j)];
            }
        }
        cov.noalias() += block.transpose() * block;
    }
    cov /= static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::InsufficientData, "covariance eigendecomposition did not converge");
    }
    // Eigen sorts ascending.
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXd& vectors = solver.eigenvectors();

    PcaModel model;
    model.input_dim = d;
    model.output_dim = output_dim;
    model.mean.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        model.mean[j] = static_cast<float>(mu[static_cast<Eigen::Index>(j)]);
    }
    model.components.resize(output_dim * d);
    model.explained_variance.resize(output_dim);
    for (Eigen::Index i = 0; i < di; ++i) {
        model.total_variance += std::max(values[i], 0.0);
    }

    for (std::size_t c = 0; c < output_dim; ++c) {
        const Eigen::Index col = di - 1 - static_cast<Eigen::Index>(c);
        model.explained_variance[c] = std::max(values[col], 0.0);

        // Sign: the largest-magnitude entry (first one on ties) is positive.
        Eigen::Index pivot = 0;
        for (Eigen::Index j = 1; j < di; ++j) {
            if (std::abs(vectors(j, col)) > std::abs(vectors(pivot, col))) {
                pivot = j;
            }
        }
        const double sign = vectors(pivot, col) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            model.components[c * d + j] = sign * vectors(static_cast<Eigen::Index>(j), col);
        }
    }
    return model;
}

} // namespace protoclass
