#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ageflow {

/// Dense real-valued function of (age, position) sampled on a tensor grid.
/// Row-major: row index = age node, column index = space node.
class Field2D {
public:
    Field2D() = default;
    Field2D(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int j, int i) { return data_[static_cast<std::size_t>(j) * cols_ + i]; }
    double operator()(int j, int i) const { return data_[static_cast<std::size_t>(j) * cols_ + i]; }

    std::span<double> row(int j) { return {data_.data() + static_cast<std::size_t>(j) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const double> row(int j) const { return {data_.data() + static_cast<std::size_t>(j) * cols_, static_cast<std::size_t>(cols_)}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }
    double max() const { return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end()); }
    double min() const { return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end()); }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double sup_distance(const Field2D& a, const Field2D& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace ageflow
