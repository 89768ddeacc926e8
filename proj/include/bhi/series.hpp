#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "bhi/error.hpp"

namespace bhi {

/// Ordered list of finite reals. NaN and infinities are rejected at
/// construction so the numeric kernels never have to re-check.
class Series {
public:
    Series() = default;

    explicit Series(std::vector<double> values) : values_(std::move(values)) {
        for (double v : values_) check_finite(v);
    }

    Series(std::initializer_list<double> values) : Series(std::vector<double>(values)) {}

    void push_back(double v) {
        check_finite(v);
        values_.push_back(v);
    }

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

private:
    static void check_finite(double v) {
        if (!std::isfinite(v)) throw Error("series", "non-finite value rejected");
    }

    std::vector<double> values_;
};

}  // namespace bhi
