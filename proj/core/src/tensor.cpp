#include "gradsec/tensor.hpp"

#include <cmath>

#include "gradsec/error.hpp"

namespace gradsec {

std::size_t shape_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) fail("tensor shape has non-positive dimension " + shape_str(shape));
        n *= std::size_t(d);
    }
    return shape.empty() ? 0 : n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)), data(shape_size(shape), 0.0f) {}

Tensor::Tensor(std::vector<int> s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != shape_size(shape))
        fail("tensor data length " + std::to_string(data.size()) + " does not match shape " +
             shape_str(shape));
}

Tensor Tensor::full(std::vector<int> s, float value) {
    Tensor t(std::move(s));
    for (float& x : t.data) x = value;
    return t;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    if (a.shape != b.shape) return false;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (!(a.data[i] == b.data[i]) || std::signbit(a.data[i]) != std::signbit(b.data[i]))
            return false;
    return true;
}

void check_finite(const Tensor& t, const std::string& what) {
    for (float x : t.data)
        if (!std::isfinite(x)) fail(what + " contains a non-finite value");
}

double l2_distance(const Tensor& a, const Tensor& b) {
    if (a.shape != b.shape)
        fail("l2_distance: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = double(a.data[i]) - double(b.data[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

double l2_norm(const Tensor& t) {
    double acc = 0.0;
    for (float x : t.data) acc += double(x) * double(x);
    return std::sqrt(acc);
}

}  // namespace gradsec
