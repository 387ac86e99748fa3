#include "gradsec/nn.hpp"

#include <cmath>

#include "gradsec/error.hpp"

namespace gradsec {

namespace {

std::size_t per_sample_size(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) n *= std::size_t(d);
    return n;
}

void apply_activation(Activation act, const Tensor& z, Tensor& a) {
    a.shape = z.shape;
    a.data.resize(z.data.size());
    switch (act) {
        case Activation::Identity:
            a.data = z.data;
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < z.data.size(); ++i)
                a.data[i] = float(1.0 / (1.0 + std::exp(-double(z.data[i]))));
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < z.data.size(); ++i)
                a.data[i] = z.data[i] > 0.0f ? z.data[i] : 0.0f;
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < z.data.size(); ++i)
                a.data[i] = float(std::tanh(double(z.data[i])));
            break;
    }
}

// dZ = dA * f'(Z), using whichever of Z/A gives the cheaper derivative
void activation_backward(Activation act, const Tensor& z, const Tensor& a, Tensor& d) {
    switch (act) {
        case Activation::Identity:
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < d.data.size(); ++i) {
                double s = double(a.data[i]);
                d.data[i] = float(double(d.data[i]) * s * (1.0 - s));
            }
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < d.data.size(); ++i)
                if (z.data[i] <= 0.0f) d.data[i] = 0.0f;
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < d.data.size(); ++i) {
                double t = double(a.data[i]);
                d.data[i] = float(double(d.data[i]) * (1.0 - t * t));
            }
            break;
    }
}

void softmax_rows(const Tensor& z, Tensor& a) {
    a.shape = z.shape;
    a.data.resize(z.data.size());
    int m = z.shape[0];
    int c = z.shape[1];
    for (int b = 0; b < m; ++b) {
        const float* zr = z.data.data() + std::size_t(b) * c;
        float* ar = a.data.data() + std::size_t(b) * c;
        double mx = zr[0];
        for (int j = 1; j < c; ++j)
            if (zr[j] > mx) mx = zr[j];
        double sum = 0.0;
        for (int j = 0; j < c; ++j) sum += std::exp(double(zr[j]) - mx);
        for (int j = 0; j < c; ++j) ar[j] = float(std::exp(double(zr[j]) - mx) / sum);
    }
}

void dense_forward(const Tensor& in, const Tensor& w, Tensor& z) {
    int m = in.shape[0];
    std::size_t features = in.size() / std::size_t(m);
    int units = w.shape[0];
    if (std::size_t(w.shape[1]) != features)
        fail("dense forward: weight expects " + std::to_string(w.shape[1]) + " inputs, got " +
             std::to_string(features));
    z.shape = {m, units};
    z.data.resize(std::size_t(m) * units);
    for (int b = 0; b < m; ++b) {
        const float* x = in.data.data() + std::size_t(b) * features;
        for (int u = 0; u < units; ++u) {
            const float* wr = w.data.data() + std::size_t(u) * features;
            double acc = 0.0;
            for (std::size_t i = 0; i < features; ++i) acc += double(x[i]) * double(wr[i]);
            z.data[std::size_t(b) * units + u] = float(acc);
        }
    }
}

void dense_backward(const Tensor& in, const Tensor& w, const Tensor& dz, Tensor& dw, Tensor& din) {
    int m = in.shape[0];
    std::size_t features = in.size() / std::size_t(m);
    int units = w.shape[0];
    std::vector<double> dw_acc(w.size(), 0.0);
    std::vector<double> din_acc(in.size(), 0.0);
    for (int b = 0; b < m; ++b) {
        const float* x = in.data.data() + std::size_t(b) * features;
        double* dx = din_acc.data() + std::size_t(b) * features;
        for (int u = 0; u < units; ++u) {
            double d = double(dz.data[std::size_t(b) * units + u]);
            if (d == 0.0) continue;
            const float* wr = w.data.data() + std::size_t(u) * features;
            double* dwr = dw_acc.data() + std::size_t(u) * features;
            for (std::size_t i = 0; i < features; ++i) {
                dwr[i] += d * double(x[i]);
                dx[i] += d * double(wr[i]);
            }
        }
    }
    dw.shape = w.shape;
    dw.data.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dw.data[i] = float(dw_acc[i]);
    din.shape = in.shape;
    din.data.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) din.data[i] = float(din_acc[i]);
}

struct ConvGeom {
    int h, w, c;       // input
    int oh, ow, f;     // output
    int k, stride, pad;
    std::size_t patch;  // k*k*c
};

ConvGeom conv_geom(const LayerSpec& spec, const std::vector<int>& in_dims,
                   const std::vector<int>& out_dims) {
    ConvGeom g;
    g.h = in_dims[0];
    g.w = in_dims[1];
    g.c = in_dims[2];
    g.oh = out_dims[0];
    g.ow = out_dims[1];
    g.f = out_dims[2];
    g.k = spec.kernel;
    g.stride = spec.stride;
    g.pad = spec.pad;
    g.patch = std::size_t(g.k) * g.k * g.c;
    return g;
}

// gathers the receptive field at (oy, ox) into a contiguous buffer,
// zero-filling out-of-bounds positions
void gather_patch(const float* img, const ConvGeom& g, int oy, int ox, float* patch) {
    for (int ky = 0; ky < g.k; ++ky) {
        int iy = oy * g.stride - g.pad + ky;
        float* row = patch + std::size_t(ky) * g.k * g.c;
        if (iy < 0 || iy >= g.h) {
            for (int j = 0; j < g.k * g.c; ++j) row[j] = 0.0f;
            continue;
        }
        for (int kx = 0; kx < g.k; ++kx) {
            int ix = ox * g.stride - g.pad + kx;
            float* cell = row + std::size_t(kx) * g.c;
            if (ix < 0 || ix >= g.w) {
                for (int j = 0; j < g.c; ++j) cell[j] = 0.0f;
            } else {
                const float* src = img + (std::size_t(iy) * g.w + ix) * g.c;
                for (int j = 0; j < g.c; ++j) cell[j] = src[j];
            }
        }
    }
}

void conv_forward(const Tensor& in, const Tensor& w, const ConvGeom& g, Tensor& z) {
    int m = in.shape[0];
    z.shape = {m, g.oh, g.ow, g.f};
    z.data.resize(std::size_t(m) * g.oh * g.ow * g.f);
    std::vector<float> patch(g.patch);
    for (int b = 0; b < m; ++b) {
        const float* img = in.data.data() + std::size_t(b) * g.h * g.w * g.c;
        float* zb = z.data.data() + std::size_t(b) * g.oh * g.ow * g.f;
        for (int oy = 0; oy < g.oh; ++oy)
            for (int ox = 0; ox < g.ow; ++ox) {
                gather_patch(img, g, oy, ox, patch.data());
                float* zo = zb + (std::size_t(oy) * g.ow + ox) * g.f;
                for (int f = 0; f < g.f; ++f) {
                    const float* wr = w.data.data() + std::size_t(f) * g.patch;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < g.patch; ++j)
                        acc += double(patch[j]) * double(wr[j]);
                    zo[f] = float(acc);
                }
            }
    }
}

void conv_backward(const Tensor& in, const Tensor& w, const ConvGeom& g, const Tensor& dz,
                   Tensor& dw, Tensor& din) {
    int m = in.shape[0];
    std::vector<double> dw_acc(w.size(), 0.0);
    std::vector<double> din_acc(in.size(), 0.0);
    std::vector<float> patch(g.patch);
    std::vector<double> dpatch(g.patch);
    for (int b = 0; b < m; ++b) {
        const float* img = in.data.data() + std::size_t(b) * g.h * g.w * g.c;
        double* dimg = din_acc.data() + std::size_t(b) * g.h * g.w * g.c;
        const float* dzb = dz.data.data() + std::size_t(b) * g.oh * g.ow * g.f;
        for (int oy = 0; oy < g.oh; ++oy)
            for (int ox = 0; ox < g.ow; ++ox) {
                gather_patch(img, g, oy, ox, patch.data());
                std::fill(dpatch.begin(), dpatch.end(), 0.0);
                const float* dzo = dzb + (std::size_t(oy) * g.ow + ox) * g.f;
                for (int f = 0; f < g.f; ++f) {
                    double d = double(dzo[f]);
                    if (d == 0.0) continue;
                    const float* wr = w.data.data() + std::size_t(f) * g.patch;
                    double* dwr = dw_acc.data() + std::size_t(f) * g.patch;
                    for (std::size_t j = 0; j < g.patch; ++j) {
                        dwr[j] += d * double(patch[j]);
                        dpatch[j] += d * double(wr[j]);
                    }
                }
                // scatter the patch gradient back, skipping padding cells
                for (int ky = 0; ky < g.k; ++ky) {
                    int iy = oy * g.stride - g.pad + ky;
                    if (iy < 0 || iy >= g.h) continue;
                    for (int kx = 0; kx < g.k; ++kx) {
                        int ix = ox * g.stride - g.pad + kx;
                        if (ix < 0 || ix >= g.w) continue;
                        const double* cell = dpatch.data() + (std::size_t(ky) * g.k + kx) * g.c;
                        double* dst = dimg + (std::size_t(iy) * g.w + ix) * g.c;
                        for (int j = 0; j < g.c; ++j) dst[j] += cell[j];
                    }
                }
            }
    }
    dw.shape = w.shape;
    dw.data.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dw.data[i] = float(dw_acc[i]);
    din.shape = in.shape;
    din.data.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) din.data[i] = float(din_acc[i]);
}

void pool_forward(const Tensor& in, const std::vector<int>& out_dims, Tensor& z,
                  std::vector<std::int32_t>& idx) {
    int m = in.shape[0];
    int h = in.shape[1], w = in.shape[2], c = in.shape[3];
    int oh = out_dims[0], ow = out_dims[1];
    z.shape = {m, oh, ow, c};
    z.data.resize(std::size_t(m) * oh * ow * c);
    idx.resize(z.data.size());
    std::size_t o = 0;
    for (int b = 0; b < m; ++b) {
        const float* img = in.data.data() + std::size_t(b) * h * w * c;
        std::size_t base = std::size_t(b) * h * w * c;
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int ch = 0; ch < c; ++ch, ++o) {
                    int iy = oy * 2, ix = ox * 2;
                    // ties resolve to the first position in scan order
                    std::size_t best = (std::size_t(iy) * w + ix) * c + ch;
                    float bv = img[best];
                    const int dy[3] = {0, 1, 1};
                    const int dx[3] = {1, 0, 1};
                    for (int t = 0; t < 3; ++t) {
                        std::size_t cand = (std::size_t(iy + dy[t]) * w + (ix + dx[t])) * c + ch;
                        if (img[cand] > bv) {
                            bv = img[cand];
                            best = cand;
                        }
                    }
                    z.data[o] = bv;
                    idx[o] = std::int32_t(base + best);
                }
    }
}

void pool_backward(const Tensor& in, const Tensor& dz, const std::vector<std::int32_t>& idx,
                   Tensor& din) {
    din.shape = in.shape;
    din.data.assign(in.size(), 0.0f);
    std::vector<double> acc(in.size(), 0.0);
    for (std::size_t o = 0; o < dz.data.size(); ++o) acc[std::size_t(idx[o])] += double(dz.data[o]);
    for (std::size_t i = 0; i < in.size(); ++i) din.data[i] = float(acc[i]);
}

}  // namespace

ForwardCache forward(const Model& m, const Tensor& X) {
    if (X.shape.size() != 4)
        fail("forward: X must be (m, h, w, c), got " + shape_str(X.shape));
    if (X.shape[1] != m.input_shape[0] || X.shape[2] != m.input_shape[1] ||
        X.shape[3] != m.input_shape[2])
        fail("forward: X image shape " + shape_str(X.shape) + " does not match model input (" +
             std::to_string(m.input_shape[0]) + ", " + std::to_string(m.input_shape[1]) + ", " +
             std::to_string(m.input_shape[2]) + ")");
    int batch = X.shape[0];
    if (batch < 1) fail("forward: empty batch");

    int n = m.layer_count();
    ForwardCache cache;
    cache.batch = batch;
    cache.preact.resize(n);
    cache.act.resize(n + 1);
    cache.pool_idx.resize(n);
    cache.act[0] = X;

    std::vector<int> dims = {m.input_shape[0], m.input_shape[1], m.input_shape[2]};
    for (int l = 1; l <= n; ++l) {
        const Model::Layer& layer = m.layers[l - 1];
        const Tensor& in = cache.act[l - 1];
        Tensor& z = cache.preact[l - 1];
        switch (layer.spec.kind) {
            case LayerKind::Dense:
                dense_forward(in, layer.weights, z);
                break;
            case LayerKind::Conv2D:
                conv_forward(in, layer.weights, conv_geom(layer.spec, dims, m.out_dims[l - 1]), z);
                break;
            case LayerKind::MaxPool2:
                pool_forward(in, m.out_dims[l - 1], z, cache.pool_idx[l - 1]);
                break;
        }
        if (l == n)
            softmax_rows(z, cache.act[l]);
        else
            apply_activation(layer.spec.act, z, cache.act[l]);
        dims = m.out_dims[l - 1];
    }
    return cache;
}

BackwardResult backward(const Model& m, const ForwardCache& cache, const Tensor& Y) {
    int n = m.layer_count();
    const Tensor& probs = cache.act[n];
    if (Y.shape != probs.shape)
        fail("backward: labels " + shape_str(Y.shape) + " do not match output " +
             shape_str(probs.shape));
    int batch = cache.batch;

    BackwardResult r;
    r.grads.resize(n);
    r.delta.resize(n);
    r.d_input.resize(n);
    r.loss = loss_ce(probs, Y);

    // dZ_n for fused softmax + mean cross-entropy
    Tensor dz(probs.shape);
    for (std::size_t i = 0; i < probs.data.size(); ++i)
        dz.data[i] = float((double(probs.data[i]) - double(Y.data[i])) / double(batch));

    std::vector<int> in_dims;
    for (int l = n; l >= 1; --l) {
        const Model::Layer& layer = m.layers[l - 1];
        const Tensor& in = cache.act[l - 1];
        if (l < n) {
            // dz currently holds dLoss/dA_l; fold in the activation derivative
            if (layer.spec.weighted())
                activation_backward(layer.spec.act, cache.preact[l - 1], cache.act[l], dz);
        }
        r.delta[l - 1] = dz;
        Tensor din;
        switch (layer.spec.kind) {
            case LayerKind::Dense:
                dense_backward(in, layer.weights, dz, r.grads[l - 1], din);
                break;
            case LayerKind::Conv2D: {
                in_dims = l >= 2 ? m.out_dims[l - 2]
                                 : std::vector<int>{m.input_shape[0], m.input_shape[1],
                                                    m.input_shape[2]};
                conv_backward(in, layer.weights, conv_geom(layer.spec, in_dims, m.out_dims[l - 1]),
                              dz, r.grads[l - 1], din);
                break;
            }
            case LayerKind::MaxPool2:
                pool_backward(in, dz, cache.pool_idx[l - 1], din);
                break;
        }
        r.d_input[l - 1] = din;
        dz = std::move(din);
    }
    return r;
}

void sgd_step(Model& m, const std::vector<Tensor>& grads, double lr) {
    int n = m.layer_count();
    if (int(grads.size()) != n)
        fail("sgd_step: got " + std::to_string(grads.size()) + " gradients for " +
             std::to_string(n) + " layers");
    for (int l = 1; l <= n; ++l) {
        Model::Layer& layer = m.layers[l - 1];
        if (!layer.spec.weighted()) {
            if (!grads[l - 1].empty())
                fail("sgd_step: layer " + std::to_string(l) + " has no weights but got a gradient");
            continue;
        }
        const Tensor& g = grads[l - 1];
        if (g.shape != layer.weights.shape)
            fail("sgd_step: layer " + std::to_string(l) + " gradient shape " + shape_str(g.shape) +
                 " does not match weights " + shape_str(layer.weights.shape));
        for (std::size_t i = 0; i < g.size(); ++i)
            layer.weights.data[i] =
                float(double(layer.weights.data[i]) - lr * double(g.data[i]));
    }
}

double loss_ce(const Tensor& probs, const Tensor& Y) {
    if (probs.shape.size() != 2 || probs.shape != Y.shape)
        fail("loss_ce: expected matching (m, classes) tensors, got " + shape_str(probs.shape) +
             " and " + shape_str(Y.shape));
    int m = probs.shape[0];
    int c = probs.shape[1];
    double total = 0.0;
    for (int b = 0; b < m; ++b) {
        const float* pr = probs.data.data() + std::size_t(b) * c;
        const float* yr = Y.data.data() + std::size_t(b) * c;
        double rowsum = 0.0;
        double row = 0.0;
        for (int j = 0; j < c; ++j) {
            rowsum += double(pr[j]);
            if (yr[j] != 0.0f) row -= double(yr[j]) * std::log(double(pr[j]) + 1e-12);
        }
        if (std::abs(rowsum - 1.0) > 1e-4)
            fail("loss_ce: output row " + std::to_string(b) + " does not sum to 1");
        total += row;
    }
    return total / double(m);
}

}  // namespace gradsec
