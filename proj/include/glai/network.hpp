#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "glai/data_io.hpp"
#include "glai/matrix.hpp"

namespace glai {

// Architecture of a dense ReLU network: [inputs, h1, ..., hL, outputs],
// at least one hidden layer. The seed fixes every random draw.
struct NetworkSpec {
    std::vector<std::size_t> layer_sizes;
    std::uint64_t seed = 0;

    void validate() const;  // throws config_error
    std::size_t inputs() const { return layer_sizes.front(); }
    std::size_t outputs() const { return layer_sizes.back(); }
    std::size_t hidden_layers() const { return layer_sizes.size() - 2; }
    std::uint64_t fingerprint() const;

    bool operator==(const NetworkSpec&) const = default;
};

// Quantitative knowledge: the weights and biases.
// weights[l]: layer_sizes[l+1] x layer_sizes[l]; biases[l]: layer_sizes[l+1].
struct Network {
    NetworkSpec spec;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    bool operator==(const Network&) const = default;
};

struct ForwardCache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre_activations;   // z per layer
    std::vector<std::vector<double>> post_activations;  // a per layer; output layer a = z
};

struct Gradients {
    std::vector<Matrix> d_weights;
    std::vector<std::vector<double>> d_biases;
};

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
// 0 at x == 0, matching the "active iff output positive" convention.
inline double relu_derivative(double x) { return x > 0.0 ? 1.0 : 0.0; }

// Kaiming-uniform weights (+-sqrt(6/fan_in)) from SplitMix64(spec.seed),
// zero biases. Same spec+seed gives bit-identical parameters.
Network init_network(const NetworkSpec& spec);

std::pair<std::vector<double>, ForwardCache> forward(const Network& net,
                                                     const std::vector<double>& x);
// Allocation-free variant for hot loops; returns the logits in cache.pre_activations.back().
void forward_into(const Network& net, const std::vector<double>& x, ForwardCache& cache);

std::vector<double> softmax(const std::vector<double>& logits);
double loss_cce(const std::vector<double>& logits, int label);

Gradients backward(const Network& net, const ForwardCache& cache, int label);
// Accumulates scale * gradient into out (shapes must match net).
void backward_into(const Network& net, const ForwardCache& cache, int label,
                   Gradients& out, double scale);

Gradients zero_gradients(const Network& net);

Network sgd_step(Network net, const Gradients& g, double lr);

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    bool has_val = false;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct Metrics {
    double loss = 0.0;
    double accuracy = 0.0;
};

Metrics evaluate(const Network& net, const Dataset& data);

// Mini-batch SGD with per-epoch seeded shuffling. epoch_index selects the
// batch schedule, so running epochs one at a time reproduces a single run.
void train_one_epoch(Network& net, const Dataset& data, double lr,
                     std::size_t batch_size, std::uint64_t seed,
                     std::uint64_t epoch_index);

std::pair<Network, std::vector<EpochStats>> train_epochs(
    Network net, const Dataset& data, std::size_t epochs, double lr,
    std::size_t batch_size, std::uint64_t seed, const Dataset* val = nullptr);

}  // namespace glai
