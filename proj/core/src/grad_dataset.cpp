#include "gradsec/grad_dataset.hpp"

#include <cmath>
#include <limits>

#include "gradsec/error.hpp"

namespace gradsec {

void GradDataset::append_row(const std::vector<std::vector<float>>& per_layer,
                             const std::vector<std::uint8_t>& hidden, std::uint8_t label,
                             int cycle) {
    if (per_layer.size() != groups.size() || hidden.size() != groups.size())
        fail("grad dataset: row has " + std::to_string(per_layer.size()) + " groups, expected " +
             std::to_string(groups.size()));
    std::size_t base = values.size();
    values.resize(base + std::size_t(width));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        int len = groups[g].end - groups[g].begin;
        float* dst = values.data() + base + std::size_t(groups[g].begin);
        if (hidden[g]) {
            for (int i = 0; i < len; ++i) dst[i] = std::numeric_limits<float>::quiet_NaN();
        } else {
            if (int(per_layer[g].size()) != len)
                fail("grad dataset: group for layer " + std::to_string(groups[g].layer) +
                     " expects " + std::to_string(len) + " values, got " +
                     std::to_string(per_layer[g].size()));
            for (int i = 0; i < len; ++i) dst[i] = per_layer[g][i];
        }
        mask.push_back(hidden[g] ? 1 : 0);
    }
    labels.push_back(label);
    if (cycle >= 0 || !row_cycle.empty()) row_cycle.push_back(cycle);
}

bool GradDataset::has_nan() const {
    for (float v : values)
        if (std::isnan(v)) return true;
    return false;
}

void GradDataset::check_compatible(const GradDataset& other) const {
    if (width != other.width || groups.size() != other.groups.size())
        fail("grad datasets have different column layouts");
    for (std::size_t g = 0; g < groups.size(); ++g)
        if (groups[g].layer != other.groups[g].layer || groups[g].begin != other.groups[g].begin ||
            groups[g].end != other.groups[g].end)
            fail("grad datasets have different column layouts");
}

GradDataset make_grad_dataset(const Model& m) {
    GradDataset d;
    int col = 0;
    for (int l : m.weighted_layers()) {
        int len = int(m.weight_count(l));
        d.groups.push_back({l, col, col + len});
        col += len;
    }
    d.width = col;
    return d;
}

GradDataset impute_mean(const GradDataset& d) {
    GradDataset out = d;
    int n = d.rows();
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
        const ColumnGroup& group = d.groups[g];
        // column means over rows where this group is observed
        std::vector<int> missing_rows;
        for (int r = 0; r < n; ++r)
            if (d.masked(r, int(g))) missing_rows.push_back(r);
        if (missing_rows.empty()) continue;
        for (int c = group.begin; c < group.end; ++c) {
            double sum = 0.0;
            int seen = 0;
            for (int r = 0; r < n; ++r) {
                if (d.masked(r, int(g))) continue;
                sum += double(d.row(r)[c]);
                ++seen;
            }
            float fill = seen > 0 ? float(sum / double(seen)) : 0.0f;
            for (int r : missing_rows) out.row(r)[c] = fill;
        }
    }
    std::fill(out.mask.begin(), out.mask.end(), 0);
    return out;
}

void view_step_gradients(const AttackerView& view, int step, const GradDataset& layout,
                         std::vector<std::vector<float>>& per_layer,
                         std::vector<std::uint8_t>& hidden) {
    if (step < 0 || step >= int(view.steps.size())) fail("view step index out of range");
    const AttackerView::StepView& sv = view.steps[std::size_t(step)];
    per_layer.assign(layout.groups.size(), {});
    hidden.assign(layout.groups.size(), 0);
    for (std::size_t g = 0; g < layout.groups.size(); ++g) {
        int l = layout.groups[g].layer;
        if (l < 1 || l > int(sv.layers.size()))
            fail("view lacks layer " + std::to_string(l) + " expected by the column layout");
        const auto& grad = sv.layers[std::size_t(l - 1)].grad;
        if (grad)
            per_layer[g].assign(grad->data.begin(), grad->data.end());
        else
            hidden[g] = 1;
    }
}

}  // namespace gradsec
