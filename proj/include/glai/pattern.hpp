#pragma once
#include <cstdint>
#include <vector>

#include "glai/network.hpp"

namespace glai {

// Structural knowledge for one sample: per hidden layer, 1 marks a neuron
// whose pre-activation is strictly positive.
struct ActivationPattern {
    std::vector<std::vector<std::uint8_t>> masks;

    bool operator==(const ActivationPattern&) const = default;
};

// Patterns index-aligned with a Dataset; all captured under one spec.
struct PatternSet {
    NetworkSpec spec;
    std::vector<ActivationPattern> patterns;

    std::size_t size() const { return patterns.size(); }
    std::uint64_t spec_fingerprint() const { return spec.fingerprint(); }
    void append(const PatternSet& other);  // input_error on spec mismatch

    bool operator==(const PatternSet&) const = default;
};

ActivationPattern capture_pattern(const Network& net, const std::vector<double>& x);

// Per-sample capture over a frozen network; samples may be processed
// concurrently, results assembled in dataset order.
PatternSet capture_patterns(const Network& net, const Dataset& data);

// Fraction of (sample, hidden neuron) mask bits that differ. A pseudometric.
double pattern_diff(const PatternSet& a, const PatternSet& b);

struct TraceRow {
    std::size_t epoch = 0;
    double pattern_diff = 0.0;  // vs previous epoch's validation patterns
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

// Trains epoch by epoch from a fresh init; after each epoch captures the
// validation patterns and reports the diff against the previous epoch's.
std::vector<TraceRow> convergence_trace(const NetworkSpec& spec, const Dataset& train,
                                        const Dataset& val, std::size_t epochs, double lr,
                                        std::size_t batch_size, std::uint64_t seed);

}  // namespace glai
