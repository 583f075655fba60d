#pragma once

// Dense row-major feature matrix shared by the learning modules.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sxp {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major, rows*cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    std::span<double> row(std::size_t i) {
        return {data.data() + i * cols, cols};
    }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    Matrix select_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= rows) throw std::out_of_range("row index");
            std::copy(row(idx[i]).begin(), row(idx[i]).end(), out.row(i).begin());
        }
        return out;
    }
};

}  // namespace sxp
