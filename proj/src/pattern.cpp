#include "glai/pattern.hpp"

#include "glai/errors.hpp"
#include "glai/parallel.hpp"

namespace glai {

void PatternSet::append(const PatternSet& other) {
    if (other.spec.fingerprint() != spec.fingerprint()) {
        throw input_error("PatternSet::append: spec fingerprint mismatch");
    }
    patterns.insert(patterns.end(), other.patterns.begin(), other.patterns.end());
}

ActivationPattern capture_pattern(const Network& net, const std::vector<double>& x) {
    ForwardCache cache;
    forward_into(net, x, cache);
    ActivationPattern p;
    p.masks.resize(net.spec.hidden_layers());
    for (std::size_t l = 0; l < p.masks.size(); ++l) {
        const std::vector<double>& z = cache.pre_activations[l];
        p.masks[l].resize(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) p.masks[l][j] = z[j] > 0.0 ? 1 : 0;
    }
    return p;
}

PatternSet capture_patterns(const Network& net, const Dataset& data) {
    if (data.size() > 0 && data.width() != net.spec.inputs()) {
        throw shape_error("capture_patterns: feature width mismatch");
    }
    PatternSet ps;
    ps.spec = net.spec;
    ps.patterns.resize(data.size());
    parallel_for(data.size(), [&](std::size_t i) {
        const double* row = data.features.row(i);
        std::vector<double> x(row, row + data.width());
        ps.patterns[i] = capture_pattern(net, x);
    });
    return ps;
}

double pattern_diff(const PatternSet& a, const PatternSet& b) {
    if (a.spec.fingerprint() != b.spec.fingerprint()) {
        throw input_error("pattern_diff: spec fingerprint mismatch");
    }
    if (a.size() != b.size()) {
        throw input_error("pattern_diff: pattern count mismatch (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    std::size_t total = 0;
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const ActivationPattern& pa = a.patterns[i];
        const ActivationPattern& pb = b.patterns[i];
        for (std::size_t l = 0; l < pa.masks.size(); ++l) {
            for (std::size_t j = 0; j < pa.masks[l].size(); ++j) {
                ++total;
                if (pa.masks[l][j] != pb.masks[l][j]) ++differing;
            }
        }
    }
    return total == 0 ? 0.0 : double(differing) / double(total);
}

std::vector<TraceRow> convergence_trace(const NetworkSpec& spec, const Dataset& train,
                                        const Dataset& val, std::size_t epochs, double lr,
                                        std::size_t batch_size, std::uint64_t seed) {
    Network net = init_network(spec);
    PatternSet prev = capture_patterns(net, val);
    std::vector<TraceRow> trace;
    trace.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
        if (lr > 0.0) train_one_epoch(net, train, lr, batch_size, seed, e);
        PatternSet cur = capture_patterns(net, val);
        TraceRow row;
        row.epoch = e + 1;
        row.pattern_diff = pattern_diff(cur, prev);
        Metrics tm = evaluate(net, train);
        Metrics vm = evaluate(net, val);
        row.train_loss = tm.loss;
        row.train_accuracy = tm.accuracy;
        row.val_loss = vm.loss;
        row.val_accuracy = vm.accuracy;
        trace.push_back(row);
        prev = std::move(cur);
    }
    return trace;
}

}  // namespace glai
