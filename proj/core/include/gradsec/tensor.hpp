#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gradsec {

// Dense row-major float tensor. Storage is float32; reductions that feed it
// accumulate in double before truncation.
struct Tensor {
    std::vector<int> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);
    Tensor(std::vector<int> s, std::vector<float> d);

    static Tensor full(std::vector<int> s, float value);

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    float& operator[](std::size_t i) { return data[i]; }
    float operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

std::size_t shape_size(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

bool bitwise_equal(const Tensor& a, const Tensor& b);

// throws if any element is NaN or infinite; `what` names the buffer
void check_finite(const Tensor& t, const std::string& what);

// Euclidean (L2) distance between two same-shaped tensors, double accumulation.
double l2_distance(const Tensor& a, const Tensor& b);
double l2_norm(const Tensor& t);

}  // namespace gradsec
