#pragma once
#include <utility>
#include <vector>

#include "glai/pattern.hpp"

namespace glai {

// Forward pass with the activation functions replaced by frozen masks:
// hidden a = z where the mask bit is 1, else 0; output layer unchanged.
std::pair<std::vector<double>, ForwardCache> masked_forward(const Network& net,
                                                            const std::vector<double>& x,
                                                            const ActivationPattern& p);
void masked_forward_into(const Network& net, const std::vector<double>& x,
                         const ActivationPattern& p, ForwardCache& cache);

// Backprop where each hidden derivative is the mask bit.
Gradients masked_backward(const Network& net, const ForwardCache& cache, int label,
                          const ActivationPattern& p);
void masked_backward_into(const Network& net, const ForwardCache& cache, int label,
                          const ActivationPattern& p, Gradients& out, double scale);

Metrics evaluate_masked(const Network& net, const Dataset& data, const PatternSet& ps);

// Quantitative-only re-training: SGD over masked passes with the per-sample
// masks frozen for the whole run.
std::pair<Network, std::vector<EpochStats>> retrain_quantitative(
    Network est, const Dataset& data, const PatternSet& ps, std::size_t epochs,
    double lr, std::size_t batch_size, std::uint64_t seed,
    const Dataset* val = nullptr, const PatternSet* val_ps = nullptr);

}  // namespace glai
