#include "glai/masked.hpp"

#include <algorithm>

#include "glai/errors.hpp"

namespace glai {

namespace {

void check_pattern(const Network& net, const ActivationPattern& p) {
    if (p.masks.size() != net.spec.hidden_layers()) {
        throw input_error("pattern has " + std::to_string(p.masks.size()) +
                          " hidden layers, network has " +
                          std::to_string(net.spec.hidden_layers()));
    }
    for (std::size_t l = 0; l < p.masks.size(); ++l) {
        if (p.masks[l].size() != net.spec.layer_sizes[l + 1]) {
            throw input_error("pattern width mismatch at hidden layer " + std::to_string(l));
        }
    }
}

}  // namespace

void masked_forward_into(const Network& net, const std::vector<double>& x,
                         const ActivationPattern& p, ForwardCache& cache) {
    check_pattern(net, p);
    if (x.size() != net.spec.inputs()) {
        throw shape_error("masked_forward: input width mismatch");
    }
    std::size_t layers = net.weights.size();
    cache.input = x;
    cache.pre_activations.resize(layers);
    cache.post_activations.resize(layers);

    const std::vector<double>* prev = &cache.input;
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = net.weights[l];
        std::vector<double>& z = cache.pre_activations[l];
        z.assign(w.rows, 0.0);
        for (std::size_t j = 0; j < w.rows; ++j) {
            const double* wr = w.row(j);
            double sum = net.biases[l][j];
            for (std::size_t k = 0; k < w.cols; ++k) sum += wr[k] * (*prev)[k];
            z[j] = sum;
        }
        std::vector<double>& a = cache.post_activations[l];
        a = z;
        if (l + 1 < layers) {
            const auto& mask = p.masks[l];
            for (std::size_t j = 0; j < a.size(); ++j) a[j] = mask[j] ? a[j] : 0.0;
        }
        prev = &cache.post_activations[l];
    }
}

std::pair<std::vector<double>, ForwardCache> masked_forward(const Network& net,
                                                            const std::vector<double>& x,
                                                            const ActivationPattern& p) {
    ForwardCache cache;
    masked_forward_into(net, x, p, cache);
    return {cache.pre_activations.back(), std::move(cache)};
}

void masked_backward_into(const Network& net, const ForwardCache& cache, int label,
                          const ActivationPattern& p, Gradients& out, double scale) {
    check_pattern(net, p);
    std::size_t layers = net.weights.size();
    if (cache.pre_activations.size() != layers || cache.input.size() != net.spec.inputs()) {
        throw input_error("masked_backward: cache does not match network");
    }
    const std::vector<double>& logits = cache.pre_activations.back();
    if (label < 0 || std::size_t(label) >= logits.size()) {
        throw input_error("masked_backward: label out of range");
    }

    std::vector<double> delta = softmax(logits);
    delta[std::size_t(label)] -= 1.0;

    for (std::size_t l = layers; l-- > 0;) {
        const std::vector<double>& a_prev =
            (l == 0) ? cache.input : cache.post_activations[l - 1];
        Matrix& dw = out.d_weights[l];
        for (std::size_t j = 0; j < dw.rows; ++j) {
            double dj = delta[j] * scale;
            out.d_biases[l][j] += dj;
            double* dwr = dw.row(j);
            for (std::size_t k = 0; k < dw.cols; ++k) dwr[k] += dj * a_prev[k];
        }
        if (l == 0) break;
        const Matrix& w = net.weights[l];
        std::vector<double> prev_delta(w.cols, 0.0);
        for (std::size_t j = 0; j < w.rows; ++j) {
            const double* wr = w.row(j);
            double dj = delta[j];
            for (std::size_t k = 0; k < w.cols; ++k) prev_delta[k] += wr[k] * dj;
        }
        const auto& mask = p.masks[l - 1];
        for (std::size_t k = 0; k < w.cols; ++k) {
            prev_delta[k] = mask[k] ? prev_delta[k] : 0.0;
        }
        delta = std::move(prev_delta);
    }
}

Gradients masked_backward(const Network& net, const ForwardCache& cache, int label,
                          const ActivationPattern& p) {
    Gradients g = zero_gradients(net);
    masked_backward_into(net, cache, label, p, g, 1.0);
    return g;
}

Metrics evaluate_masked(const Network& net, const Dataset& data, const PatternSet& ps) {
    if (ps.size() != data.size()) {
        throw input_error("evaluate_masked: patterns not aligned with dataset");
    }
    Metrics m;
    if (data.size() == 0) return m;
    ForwardCache cache;
    std::size_t correct = 0;
    std::vector<double> x(data.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.features.row(i);
        x.assign(row, row + data.width());
        masked_forward_into(net, x, ps.patterns[i], cache);
        const std::vector<double>& logits = cache.pre_activations.back();
        m.loss += loss_cce(logits, data.labels[i]);
        std::size_t argmax =
            std::size_t(std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (argmax == std::size_t(data.labels[i])) ++correct;
    }
    m.loss /= double(data.size());
    m.accuracy = double(correct) / double(data.size());
    return m;
}

std::pair<Network, std::vector<EpochStats>> retrain_quantitative(
    Network est, const Dataset& data, const PatternSet& ps, std::size_t epochs,
    double lr, std::size_t batch_size, std::uint64_t seed,
    const Dataset* val, const PatternSet* val_ps) {
    if (ps.size() != data.size()) {
        throw input_error("retrain_quantitative: patterns not aligned with dataset");
    }
    if (ps.spec.layer_sizes != est.spec.layer_sizes) {
        throw input_error("retrain_quantitative: pattern spec does not match network");
    }
    if (val != nullptr && (val_ps == nullptr || val_ps->size() != val->size())) {
        throw input_error("retrain_quantitative: validation patterns not aligned");
    }

    std::vector<EpochStats> history;
    history.reserve(epochs);
    Gradients g = zero_gradients(est);
    ForwardCache cache;
    std::vector<double> x(data.width());
    for (std::size_t e = 0; e < epochs; ++e) {
        for (const auto& batch : batches(data, batch_size, seed, e)) {
            for (Matrix& m : g.d_weights) std::fill(m.data.begin(), m.data.end(), 0.0);
            for (auto& b : g.d_biases) std::fill(b.begin(), b.end(), 0.0);
            double inv = 1.0 / double(batch.size());
            for (std::size_t i : batch) {
                const double* row = data.features.row(i);
                x.assign(row, row + data.width());
                masked_forward_into(est, x, ps.patterns[i], cache);
                masked_backward_into(est, cache, data.labels[i], ps.patterns[i], g, inv);
            }
            est = sgd_step(std::move(est), g, lr);
        }
        EpochStats stats;
        stats.epoch = e + 1;
        Metrics train = evaluate_masked(est, data, ps);
        stats.train_loss = train.loss;
        stats.train_accuracy = train.accuracy;
        if (val != nullptr) {
            Metrics v = evaluate_masked(est, *val, *val_ps);
            stats.has_val = true;
            stats.val_loss = v.loss;
            stats.val_accuracy = v.accuracy;
        }
        history.push_back(stats);
    }
    return {std::move(est), std::move(history)};
}

}  // namespace glai
