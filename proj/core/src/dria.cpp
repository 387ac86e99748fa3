#include "gradsec/dria.hpp"

#include <cmath>

#include "gradsec/error.hpp"
#include "gradsec/metrics.hpp"
#include "gradsec/nn.hpp"
#include "gradsec/rng.hpp"

namespace gradsec {

DriaTarget make_dria_target(const Model& snapshot, const AttackerView& view, int step,
                            std::uint64_t attacker_seed) {
    if (step < 0 || step >= int(view.steps.size())) fail("dria target: step index out of range");
    const AttackerView::StepView& sv = view.steps[std::size_t(step)];
    if (int(sv.layers.size()) != snapshot.layer_count())
        fail("dria target: view and snapshot disagree on layer count");

    DriaTarget target;
    target.surrogate = snapshot;
    target.grads.resize(sv.layers.size());
    for (int l = 1; l <= snapshot.layer_count(); ++l) {
        if (!snapshot.is_weighted(l)) continue;
        const auto& grad = sv.layers[std::size_t(l - 1)].grad;
        if (grad) {
            if (grad->shape != snapshot.layers[std::size_t(l - 1)].weights.shape)
                fail("dria target: layer " + std::to_string(l) + " gradient shape mismatch");
            target.grads[std::size_t(l - 1)] = *grad;
        } else {
            // shielded layer: the attacker only knows the architecture, so it
            // substitutes a fresh draw from the same initialization family
            Model::Layer& layer = target.surrogate.layers[std::size_t(l - 1)];
            std::size_t fan_in =
                layer.spec.kind == LayerKind::Dense
                    ? std::size_t(layer.weights.shape[1])
                    : std::size_t(layer.spec.kernel) * layer.spec.kernel * layer.weights.shape[3];
            double bound = std::sqrt(1.0 / double(fan_in));
            Rng rng = derive_rng(attacker_seed, kStreamAttack, 0xd1a, std::uint64_t(l));
            for (float& w : layer.weights.data) w = float(rng.uniform(-bound, bound));
        }
    }
    return target;
}

namespace {

struct Objective {
    const DriaTarget& target;
    std::size_t px;
    int classes;

    double eval(const std::vector<double>& theta) const {
        Tensor input({1, target.surrogate.input_shape[0], target.surrogate.input_shape[1],
                      target.surrogate.input_shape[2]});
        for (std::size_t i = 0; i < px; ++i) input.data[i] = float(theta[i]);
        Tensor logits({1, classes});
        for (int c = 0; c < classes; ++c) logits.data[std::size_t(c)] = float(theta[px + c]);
        return dria_match_loss(target, input, logits);
    }

    void gradient(std::vector<double>& theta, double h, std::vector<double>& g) const {
        g.resize(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double keep = theta[i];
            theta[i] = keep + h;
            double up = eval(theta);
            theta[i] = keep - h;
            double down = eval(theta);
            theta[i] = keep;
            g[i] = (up - down) / (2.0 * h);
        }
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void run_adam(const Objective& obj, const DriaConfig& cfg, std::vector<double>& theta,
              std::vector<double>& curve) {
    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), g;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int it = 1; it <= cfg.iterations; ++it) {
        obj.gradient(theta, cfg.fd_step, g);
        double c1 = 1.0 - std::pow(b1, it);
        double c2 = 1.0 - std::pow(b2, it);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            theta[i] -= cfg.step * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
        curve.push_back(obj.eval(theta));
    }
}

void run_lbfgs(const Objective& obj, const DriaConfig& cfg, std::vector<double>& theta,
               std::vector<double>& curve) {
    std::size_t dim = theta.size();
    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;
    std::vector<double> g, g_new, d, alpha;
    double f = obj.eval(theta);
    obj.gradient(theta, cfg.fd_step, g);

    for (int it = 0; it < cfg.iterations; ++it) {
        // two-loop recursion over the stored curvature pairs
        d = g;
        int hist = int(s_hist.size());
        alpha.assign(std::size_t(hist), 0.0);
        for (int i = hist - 1; i >= 0; --i) {
            alpha[std::size_t(i)] = rho_hist[std::size_t(i)] * dot(s_hist[std::size_t(i)], d);
            for (std::size_t j = 0; j < dim; ++j)
                d[j] -= alpha[std::size_t(i)] * y_hist[std::size_t(i)][j];
        }
        if (hist > 0) {
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            double gamma = dot(s, y) / std::max(dot(y, y), 1e-300);
            for (double& x : d) x *= gamma;
        }
        for (int i = 0; i < hist; ++i) {
            double beta = rho_hist[std::size_t(i)] * dot(y_hist[std::size_t(i)], d);
            for (std::size_t j = 0; j < dim; ++j)
                d[j] += s_hist[std::size_t(i)][j] * (alpha[std::size_t(i)] - beta);
        }
        for (double& x : d) x = -x;
        double slope = dot(g, d);
        if (slope >= 0.0) {  // not a descent direction; fall back to steepest
            for (std::size_t j = 0; j < dim; ++j) d[j] = -g[j];
            slope = -dot(g, g);
        }

        // backtracking Armijo line search; never accepts an increase
        double t = hist == 0 ? cfg.step : 1.0;
        double f_new = f;
        std::vector<double> theta_new(dim);
        bool moved = false;
        for (int back = 0; back < 30; ++back) {
            for (std::size_t j = 0; j < dim; ++j) theta_new[j] = theta[j] + t * d[j];
            f_new = obj.eval(theta_new);
            if (f_new <= f + 1e-4 * t * slope) {
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            curve.push_back(f);
            continue;  // stalled at a flat spot; keep the budget honest
        }
        obj.gradient(theta_new, cfg.fd_step, g_new);
        std::vector<double> s(dim), y(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            s[j] = theta_new[j] - theta[j];
            y[j] = g_new[j] - g[j];
        }
        double sy = dot(s, y);
        if (sy > 1e-10) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (int(s_hist.size()) > cfg.lbfgs_memory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }
        theta = std::move(theta_new);
        g = std::move(g_new);
        f = f_new;
        curve.push_back(f);
    }
}

}  // namespace

double dria_match_loss(const DriaTarget& target, const Tensor& input, const Tensor& logits) {
    int classes = logits.shape.back();
    Tensor y({1, classes});
    double mx = logits.data[0];
    for (int c = 1; c < classes; ++c) mx = std::max(mx, double(logits.data[std::size_t(c)]));
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) sum += std::exp(double(logits.data[std::size_t(c)]) - mx);
    for (int c = 0; c < classes; ++c)
        y.data[std::size_t(c)] = float(std::exp(double(logits.data[std::size_t(c)]) - mx) / sum);

    ForwardCache cache = forward(target.surrogate, input);
    BackwardResult back = backward(target.surrogate, cache, y);
    double loss = 0.0;
    for (std::size_t l = 0; l < target.grads.size(); ++l) {
        if (!target.grads[l]) continue;
        const Tensor& want = *target.grads[l];
        const Tensor& got = back.grads[l];
        for (std::size_t i = 0; i < want.size(); ++i) {
            double diff = double(got.data[i]) - double(want.data[i]);
            loss += diff * diff;
        }
    }
    return loss;
}

DriaResult dria(const DriaTarget& target, const DriaConfig& cfg, const Tensor* truth) {
    if (cfg.iterations < 1) fail("dria: iterations must be positive");
    if (cfg.fd_step <= 0.0 || cfg.step <= 0.0) fail("dria: step sizes must be positive");
    const Model& m = target.surrogate;
    std::size_t px = std::size_t(m.input_shape[0]) * m.input_shape[1] * m.input_shape[2];
    int classes = m.out_dims.back().back();

    Objective obj{target, px, classes};
    std::vector<double> theta(px + std::size_t(classes), 0.0);
    Rng rng = derive_rng(cfg.seed, kStreamAttack, 0xd1a0);
    for (std::size_t i = 0; i < px; ++i) theta[i] = rng.uniform();  // dummy image in [0,1)
    // logits start at zero: a uniform soft label

    DriaResult result;
    result.initial_match_loss = obj.eval(theta);
    result.outcome.curve.push_back(result.initial_match_loss);

    if (cfg.optimizer == DriaConfig::Optimizer::Adam)
        run_adam(obj, cfg, theta, result.outcome.curve);
    else
        run_lbfgs(obj, cfg, theta, result.outcome.curve);
    result.final_match_loss = result.outcome.curve.back();

    result.reconstruction = Tensor({1, m.input_shape[0], m.input_shape[1], m.input_shape[2]});
    for (std::size_t i = 0; i < px; ++i) result.reconstruction.data[i] = float(theta[i]);
    Tensor logits({1, classes});
    for (int c = 0; c < classes; ++c) logits.data[std::size_t(c)] = float(theta[px + c]);
    {
        double mx = logits.data[0];
        for (int c = 1; c < classes; ++c) mx = std::max(mx, double(logits.data[std::size_t(c)]));
        double sum = 0.0;
        for (int c = 0; c < classes; ++c)
            sum += std::exp(double(logits.data[std::size_t(c)]) - mx);
        result.label_guess = Tensor({1, classes});
        for (int c = 0; c < classes; ++c)
            result.label_guess.data[std::size_t(c)] =
                float(std::exp(double(logits.data[std::size_t(c)]) - mx) / sum);
    }

    result.outcome.kind = "DRIA";
    result.outcome.seed = cfg.seed;
    if (truth) {
        result.outcome.metric = "ImageLoss";
        result.outcome.value = image_loss(result.reconstruction, *truth);
    } else {
        result.outcome.metric = "MatchLoss";
        result.outcome.value = result.final_match_loss;
    }
    return result;
}

}  // namespace gradsec
