#pragma once

#include <cassert>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "polyjet/error.hpp"
#include "polyjet/evaluation.hpp"
#include "polyjet/expr.hpp"

namespace polyjet {

/// Dense row-major multi-index array.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, T fill = T{})
        : shape_(std::move(shape)), data_(count(shape_), fill) {}

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    T& operator[](std::size_t flat) { return data_[flat]; }
    const T& operator[](std::size_t flat) const { return data_[flat]; }

    template <typename... I>
    T& operator()(I... idx) {
        return data_[offset({static_cast<std::size_t>(idx)...})];
    }
    template <typename... I>
    const T& operator()(I... idx) const {
        return data_[offset({static_cast<std::size_t>(idx)...})];
    }

    T& at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
    const T& at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

    std::size_t offset(std::initializer_list<std::size_t> idx) const {
        return offset(std::span<const std::size_t>(idx.begin(), idx.size()));
    }
    std::size_t offset(std::span<const std::size_t> idx) const {
        assert(idx.size() == shape_.size());
        std::size_t off = 0;
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            assert(idx[k] < shape_[k]);
            off = off * shape_[k] + idx[k];
        }
        return off;
    }

    std::vector<std::size_t> unravel(std::size_t flat) const {
        std::vector<std::size_t> idx(shape_.size());
        for (std::size_t k = shape_.size(); k-- > 0;) {
            idx[k] = flat % shape_[k];
            flat /= shape_[k];
        }
        return idx;
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    template <typename F>
    auto map(F&& f) const -> Tensor<decltype(f(std::declval<const T&>()))> {
        Tensor<decltype(f(std::declval<const T&>()))> out(shape_);
        for (std::size_t k = 0; k < data_.size(); ++k) out[k] = f(data_[k]);
        return out;
    }

private:
    static std::size_t count(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
    }

    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

using ExprArray = Tensor<Expr>;
using NumArray = Tensor<double>;

/// "[a=1,i=2,j=1]" style label with 1-based indices.
std::string index_label(std::span<const std::string> letters, std::span<const std::size_t> idx);

/// Evaluates every entry of `arr` at each given point (ordered as `variables`).
class ArrayEvaluator {
public:
    ArrayEvaluator(const std::vector<std::string>& variables, const ExprArray& arr)
        : shape_(arr.shape()), program_(variables, arr.data()) {}

    NumArray operator()(std::span<const double> point) const {
        NumArray out(shape_);
        program_.run(point, out.data());
        return out;
    }

private:
    std::vector<std::size_t> shape_;
    Program program_;
};

}  // namespace polyjet
