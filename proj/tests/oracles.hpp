// Independent reference implementations used only by the tests. Nothing in
// here calls into the library's numeric kernels.

#ifndef PROTOCLASS_TESTS_ORACLES_HPP
#define PROTOCLASS_TESTS_ORACLES_HPP

#include "protoclass/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix, long double throughout.
/// Returns eigenpairs sorted by descending eigenvalue; vectors are columns of the result.
inline std::pair<std::vector<long double>, Matrix> jacobi_eigen(Matrix a) {
    const std::size_t n = a.size();
    Matrix v(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0L;

    for (int sweep = 0; sweep < 100; ++sweep) {
        long double off = 0.0L;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-36L) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300L) continue;
                const long double theta = (a[q][q] - a[p][p]) / (2.0L * a[p][q]);
                const long double t = (theta >= 0 ? 1.0L : -1.0L) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0L));
                const long double c = 1.0L / std::sqrt(t * t + 1.0L);
                const long double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const long double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const long double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const long double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
    std::vector<long double> values(n);
    Matrix vectors(n, std::vector<long double>(n));
    for (std::size_t c = 0; c < n; ++c) {
        values[c] = a[order[c]][order[c]];
        for (std::size_t r = 0; r < n; ++r) vectors[r][c] = v[r][order[c]];
    }
    return {values, vectors};
}

/// Sample covariance (divisor N - 1) by explicit double loops.
inline Matrix covariance(const std::vector<std::vector<float>>& rows) {
    const std::size_t n = rows.size(), d = rows.front().size();
    std::vector<long double> mean(d, 0.0L);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    for (auto& m : mean) m /= static_cast<long double>(n);
    Matrix cov(d, std::vector<long double>(d, 0.0L));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    for (auto& row : cov)
        for (auto& x : row) x /= static_cast<long double>(n - 1);
    return cov;
}

inline double distance(const float* a, const float* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double x = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        s += x * x;
    }
    return std::sqrt(s);
}

/// Sorts every gallery record by (distance, sourceId, position), then votes.
inline std::uint32_t knn(const std::vector<float>& query, const protoclass::EmbeddingSet& gallery, std::size_t k) {
    const std::size_t d = gallery.dim();
    std::vector<std::tuple<double, std::string, std::size_t>> all;
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        all.emplace_back(distance(query.data(), gallery.vector(i).data(), d), gallery.source_ids[i], i);
    }
    std::sort(all.begin(), all.end());
    std::map<std::uint32_t, std::pair<int, double>> tally;
    for (std::size_t i = 0; i < k; ++i) {
        auto& t = tally[gallery.class_ids[std::get<2>(all[i])]];
        t.first += 1;
        t.second += std::get<0>(all[i]);
    }
    std::uint32_t best = tally.begin()->first;
    for (const auto& [cls, t] : tally) {
        const auto& b = tally[best];
        if (t.first > b.first || (t.first == b.first && t.second < b.second)) best = cls;
    }
    return best;
}

/// Naive normalized mean of rows, long double accumulation.
inline std::vector<double> normalized_mean(const std::vector<std::vector<float>>& rows) {
    std::vector<long double> acc(rows.front().size(), 0.0L);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size(); ++j) acc[j] += r[j];
    long double n2 = 0.0L;
    for (auto& x : acc) {
        x /= static_cast<long double>(rows.size());
    }
    std::vector<float> mean_f(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) {
        mean_f[j] = static_cast<float>(acc[j]);
        n2 += static_cast<long double>(mean_f[j]) * mean_f[j];
    }
    std::vector<double> out(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) out[j] = static_cast<double>(mean_f[j] / std::sqrt(n2));
    return out;
}

/// Random dense row for oracle tests (std::mt19937_64 keeps the tests independent of the library PRNG).
inline std::vector<float> random_row(std::mt19937_64& gen, std::size_t d) {
    std::normal_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> v(d);
    for (auto& x : v) x = dist(gen);
    return v;
}

inline std::vector<float> random_unit(std::mt19937_64& gen, std::size_t d) {
    auto v = random_row(gen, d);
    double n = 0.0;
    for (float x : v) n += static_cast<double>(x) * x;
    n = std::sqrt(n);
    for (auto& x : v) x = static_cast<float>(x / n);
    return v;
}

inline protoclass::ClassCatalog catalog_of(std::size_t k) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
    return protoclass::ClassCatalog(names);
}

} // namespace oracle

#endif
