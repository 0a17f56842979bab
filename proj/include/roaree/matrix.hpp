#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace roaree {

/// Row-major dense matrix; rows are time steps, columns are features.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    /// Copy of rows [begin, end).
    FeatureMatrix slice(std::size_t begin, std::size_t end) const {
        FeatureMatrix m(end - begin, cols);
        std::copy(data.begin() + static_cast<std::ptrdiff_t>(begin * cols),
                  data.begin() + static_cast<std::ptrdiff_t>(end * cols), m.data.begin());
        return m;
    }
};

}  // namespace roaree
