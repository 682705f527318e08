#include "streamlens/common.hpp"

#include <algorithm>

namespace streamlens {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) {
            throw InputError("Matrix::from_rows: ragged row " + std::to_string(r));
        }
        std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * m.cols_));
    }
    return m;
}

void Matrix::set_row(std::size_t r, std::span<const double> values) {
    if (values.size() != cols_) {
        throw InputError("Matrix::set_row: expected " + std::to_string(cols_) + " values, got " +
                         std::to_string(values.size()));
    }
    std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace streamlens
