#pragma once

#include <cstdint>
#include <vector>

#include "gradsec/model.hpp"
#include "gradsec/trace.hpp"

namespace gradsec {

// One block of columns holding a flattened per-layer gradient.
struct ColumnGroup {
    int layer = 0;  // 1-based model layer
    int begin = 0;  // first column, inclusive
    int end = 0;    // past-the-end column
};

// Feature matrix for gradient-based attack models: one row per observation,
// one column group per weighted layer. A group a shielding policy hid in some
// observation is masked there; its cells hold NaN until imputation.
struct GradDataset {
    int width = 0;
    std::vector<ColumnGroup> groups;
    std::vector<float> values;        // rows() x width, row-major
    std::vector<std::uint8_t> labels;
    std::vector<std::uint8_t> mask;   // rows() x groups»size(), 1 = hidden
    std::vector<int> row_cycle;       // optional provenance, empty or rows()

    int rows() const { return width == 0 ? 0 : int(values.size()) / width; }
    int group_count() const { return int(groups.size()); }
    bool masked(int row, int group) const {
        return mask[std::size_t(row) * groups.size() + std::size_t(group)] != 0;
    }
    float* row(int r) { return values.data() + std::size_t(r) * width; }
    const float* row(int r) const { return values.data() + std::size_t(r) * width; }

    // appends a row; masked groups get NaN cells. per_layer[i] matches
    // groups[i] and may be empty when hidden[i] is set.
    void append_row(const std::vector<std::vector<float>>& per_layer,
                    const std::vector<std::uint8_t>& hidden, std::uint8_t label, int cycle = -1);

    bool has_nan() const;
    void check_compatible(const GradDataset& other) const;  // same groups or throws
};

// column layout covering every weighted layer of the model, in layer order
GradDataset make_grad_dataset(const Model& m);

// Mean imputation: each masked cell takes the mean of the observed entries in
// its column; columns with no observed entry at all fall back to zero.
// The result carries no masked groups.
GradDataset impute_mean(const GradDataset& d);

// flattened per-layer gradients of one step of an attacker view; layers the
// view hides come back empty with hidden=1
void view_step_gradients(const AttackerView& view, int step, const GradDataset& layout,
                         std::vector<std::vector<float>>& per_layer,
                         std::vector<std::uint8_t>& hidden);

}  // namespace gradsec
