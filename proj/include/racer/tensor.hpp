#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace racer {

// Dense row-major tensor. float is the training/inference scalar; the
// double instantiation exists for finite-difference gradient checks.
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;

    explicit TensorT(std::vector<int> s)
        : shape(std::move(s)), data(static_cast<size_t>(numel_of(shape)), T(0)) {}

    TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (numel_of(shape) != static_cast<long long>(data.size())) {
            throw std::invalid_argument("tensor: shape does not match data size");
        }
    }

    static long long numel_of(const std::vector<int>& s) {
        if (s.empty()) return 0;
        long long n = 1;
        for (int d : s) {
            if (d < 1) throw std::invalid_argument("tensor: dimension must be >= 1");
            n *= d;
        }
        return n;
    }

    long long numel() const { return static_cast<long long>(data.size()); }
    bool empty() const { return data.empty(); }

    T& operator[](size_t i) { return data[i]; }
    const T& operator[](size_t i) const { return data[i]; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (T v : data) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }
};

using Tensor = TensorT<float>;

template <typename To, typename From>
TensorT<To> tensor_cast(const TensorT<From>& t) {
    TensorT<To> out;
    out.shape = t.shape;
    out.data.reserve(t.data.size());
    for (From v : t.data) out.data.push_back(static_cast<To>(v));
    return out;
}

inline std::string shape_str(const std::vector<int>& s) {
    std::string r = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) r += ", ";
        r += std::to_string(s[i]);
    }
    return r + "]";
}

}  // namespace racer
