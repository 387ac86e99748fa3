#include "gradsec/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "gradsec/error.hpp"

namespace gradsec {

double auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.size() != labels.size()) fail("auc: scores and labels differ in length");
    std::size_t n = scores.size();
    std::size_t pos = 0;
    for (std::uint8_t y : labels) pos += (y != 0);
    std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) fail("auc: needs both a positive and a negative example");

    // average ranks with ties shared, then the Mann-Whitney identity
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double shared = (double(i + 1) + double(j + 1)) / 2.0;  // 1-based average rank
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = shared;
        i = j + 1;
    }
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (labels[k]) rank_sum += rank[k];
    double u = rank_sum - double(pos) * double(pos + 1) / 2.0;
    return u / (double(pos) * double(neg));
}

double image_loss(const Tensor& reconstructed, const Tensor& original) {
    return l2_distance(reconstructed, original);
}

}  // namespace gradsec
