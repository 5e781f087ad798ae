#include "glai/network.hpp"

#include <algorithm>
#include <cmath>

#include "glai/errors.hpp"
#include "glai/rng.hpp"

namespace glai {

void NetworkSpec::validate() const {
    if (layer_sizes.size() < 3) {
        throw config_error("spec needs at least [inputs, hidden, outputs]");
    }
    for (std::size_t s : layer_sizes) {
        if (s < 1) throw config_error("layer sizes must be >= 1");
    }
}

std::uint64_t NetworkSpec::fingerprint() const {
    std::uint64_t h = 0x6c76a1f0a1c3b5d7ULL;
    h = splitmix_hash(h ^ layer_sizes.size());
    for (std::size_t s : layer_sizes) h = splitmix_hash(h ^ s);
    return splitmix_hash(h ^ seed);
}

Network init_network(const NetworkSpec& spec) {
    spec.validate();
    Network net;
    net.spec = spec;
    SplitMix64 rng(spec.seed);
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        std::size_t fan_in = spec.layer_sizes[l];
        std::size_t fan_out = spec.layer_sizes[l + 1];
        double limit = std::sqrt(6.0 / double(fan_in));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) v = rng.uniform(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

void forward_into(const Network& net, const std::vector<double>& x, ForwardCache& cache) {
    if (x.size() != net.spec.inputs()) {
        throw shape_error("forward: input width " + std::to_string(x.size()) +
                          " != " + std::to_string(net.spec.inputs()));
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
            for (double& v : a) v = relu(v);
        }
        prev = &cache.post_activations[l];
    }
}

std::pair<std::vector<double>, ForwardCache> forward(const Network& net,
                                                     const std::vector<double>& x) {
    ForwardCache cache;
    forward_into(net, x, cache);
    return {cache.pre_activations.back(), std::move(cache)};
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

double loss_cce(const std::vector<double>& logits, int label) {
    if (label < 0 || std::size_t(label) >= logits.size()) {
        throw input_error("loss_cce: label out of range");
    }
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    return std::log(sum) - (logits[std::size_t(label)] - mx);
}

Gradients zero_gradients(const Network& net) {
    Gradients g;
    for (const Matrix& w : net.weights) g.d_weights.emplace_back(w.rows, w.cols);
    for (const auto& b : net.biases) g.d_biases.emplace_back(b.size(), 0.0);
    return g;
}

namespace {

// Shared backprop core; hidden-layer derivative at layer l and unit j comes
// from `deriv` (ReLU indicator for the standard pass, mask bit for the
// masked one).
template <typename Deriv>
void backprop(const Network& net, const ForwardCache& cache, int label, Gradients& out,
              double scale, Deriv&& deriv) {
    std::size_t layers = net.weights.size();
    if (cache.pre_activations.size() != layers || cache.input.size() != net.spec.inputs()) {
        throw shape_error("backward: cache does not match network");
    }
    const std::vector<double>& logits = cache.pre_activations.back();
    if (label < 0 || std::size_t(label) >= logits.size()) {
        throw input_error("backward: label out of range");
    }
    if (out.d_weights.size() != layers) {
        throw shape_error("backward: gradient shapes do not match network");
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
        for (std::size_t k = 0; k < w.cols; ++k) prev_delta[k] *= deriv(l - 1, k);
        delta = std::move(prev_delta);
    }
}

}  // namespace

void backward_into(const Network& net, const ForwardCache& cache, int label,
                   Gradients& out, double scale) {
    backprop(net, cache, label, out, scale, [&](std::size_t l, std::size_t k) {
        return relu_derivative(cache.pre_activations[l][k]);
    });
}

Gradients backward(const Network& net, const ForwardCache& cache, int label) {
    Gradients g = zero_gradients(net);
    backward_into(net, cache, label, g, 1.0);
    return g;
}

Network sgd_step(Network net, const Gradients& g, double lr) {
    if (!(lr > 0.0)) throw input_error("sgd_step: lr must be > 0");
    if (g.d_weights.size() != net.weights.size()) {
        throw shape_error("sgd_step: gradient layer count mismatch");
    }
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        if (g.d_weights[l].rows != net.weights[l].rows ||
            g.d_weights[l].cols != net.weights[l].cols ||
            g.d_biases[l].size() != net.biases[l].size()) {
            throw shape_error("sgd_step: gradient shape mismatch at layer " + std::to_string(l));
        }
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
            net.weights[l].data[i] -= lr * g.d_weights[l].data[i];
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            net.biases[l][i] -= lr * g.d_biases[l][i];
        }
    }
    return net;
}

Metrics evaluate(const Network& net, const Dataset& data) {
    Metrics m;
    if (data.size() == 0) return m;
    ForwardCache cache;
    std::size_t correct = 0;
    std::vector<double> x(data.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.features.row(i);
        x.assign(row, row + data.width());
        forward_into(net, x, cache);
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

void train_one_epoch(Network& net, const Dataset& data, double lr,
                     std::size_t batch_size, std::uint64_t seed,
                     std::uint64_t epoch_index) {
    Gradients g = zero_gradients(net);
    ForwardCache cache;
    std::vector<double> x(data.width());
    for (const auto& batch : batches(data, batch_size, seed, epoch_index)) {
        for (Matrix& m : g.d_weights) std::fill(m.data.begin(), m.data.end(), 0.0);
        for (auto& b : g.d_biases) std::fill(b.begin(), b.end(), 0.0);
        double inv = 1.0 / double(batch.size());
        for (std::size_t i : batch) {
            const double* row = data.features.row(i);
            x.assign(row, row + data.width());
            forward_into(net, x, cache);
            backward_into(net, cache, data.labels[i], g, inv);
        }
        net = sgd_step(std::move(net), g, lr);
    }
}

std::pair<Network, std::vector<EpochStats>> train_epochs(
    Network net, const Dataset& data, std::size_t epochs, double lr,
    std::size_t batch_size, std::uint64_t seed, const Dataset* val) {
    if (data.size() == 0) throw input_error("train_epochs: empty dataset");
    if (batch_size < 1) throw input_error("train_epochs: batch_size must be >= 1");
    if (data.width() != net.spec.inputs()) {
        throw shape_error("train_epochs: feature width mismatch");
    }
    std::vector<EpochStats> history;
    history.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
        train_one_epoch(net, data, lr, batch_size, seed, e);
        EpochStats stats;
        stats.epoch = e + 1;
        Metrics train = evaluate(net, data);
        stats.train_loss = train.loss;
        stats.train_accuracy = train.accuracy;
        if (val != nullptr) {
            Metrics v = evaluate(net, *val);
            stats.has_val = true;
            stats.val_loss = v.loss;
            stats.val_accuracy = v.accuracy;
        }
        history.push_back(stats);
    }
    return {std::move(net), std::move(history)};
}

}  // namespace glai
