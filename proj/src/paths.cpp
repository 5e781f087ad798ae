#include "glai/paths.hpp"

#include <limits>

#include "glai/errors.hpp"

namespace glai {

namespace {

constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kU64Max / a) return kU64Max;
    return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return (b > kU64Max - a) ? kU64Max : a + b;
}

void check_pattern_spec(const NetworkSpec& spec, const ActivationPattern& pat) {
    if (pat.masks.size() != spec.hidden_layers()) {
        throw input_error("pattern does not match spec: hidden layer count");
    }
    for (std::size_t l = 0; l < pat.masks.size(); ++l) {
        if (pat.masks[l].size() != spec.layer_sizes[l + 1]) {
            throw input_error("pattern does not match spec at hidden layer " +
                              std::to_string(l));
        }
    }
}

// Odometer increment over hidden layers [first_hidden, L]; returns false on wrap.
bool advance_route(std::vector<std::size_t>& route, const NetworkSpec& spec,
                   std::size_t first_hidden) {
    for (std::size_t i = route.size(); i-- > 0;) {
        std::size_t layer = first_hidden + i;  // 1-based position in layer_sizes
        if (++route[i] < spec.layer_sizes[layer]) return true;
        route[i] = 0;
    }
    return false;
}

}  // namespace

std::uint64_t predicted_path_count(const NetworkSpec& spec) {
    spec.validate();
    std::size_t n_layers = spec.layer_sizes.size();
    std::uint64_t full = 1;
    for (std::size_t s : spec.layer_sizes) full = sat_mul(full, s);

    std::uint64_t bias = 0;
    // hidden-origin bias paths: h_l * (h_{l+1} * ... * h_L * O)
    for (std::size_t l = 1; l + 1 < n_layers; ++l) {
        std::uint64_t downstream = 1;
        for (std::size_t k = l + 1; k < n_layers; ++k) {
            downstream = sat_mul(downstream, spec.layer_sizes[k]);
        }
        bias = sat_add(bias, sat_mul(spec.layer_sizes[l], downstream));
    }
    bias = sat_add(bias, spec.layer_sizes.back());  // output biases
    return sat_add(full, bias);
}

PathTable enumerate_paths(const NetworkSpec& spec, std::uint64_t cap) {
    std::uint64_t predicted = predicted_path_count(spec);
    if (predicted > cap) throw capacity_error(predicted, cap);

    std::size_t n_layers = spec.layer_sizes.size();
    std::size_t hidden = spec.hidden_layers();
    PathTable table;
    table.spec = spec;
    table.paths.reserve(predicted);

    // Full paths: source input, route through every hidden layer.
    for (std::size_t i = 0; i < spec.inputs(); ++i) {
        std::vector<std::size_t> route(hidden, 0);
        do {
            for (std::size_t o = 0; o < spec.outputs(); ++o) {
                PathId p;
                p.kind = PathKind::Full;
                p.source_layer = 0;
                p.source = i;
                p.route = route;
                p.output = o;
                table.paths.push_back(std::move(p));
            }
        } while (advance_route(route, spec, 1));
    }

    // Bias paths from hidden neurons: route through the layers after the source.
    for (std::size_t l = 1; l + 1 < n_layers; ++l) {
        for (std::size_t j = 0; j < spec.layer_sizes[l]; ++j) {
            std::vector<std::size_t> route(hidden - l, 0);
            do {
                for (std::size_t o = 0; o < spec.outputs(); ++o) {
                    PathId p;
                    p.kind = PathKind::Bias;
                    p.source_layer = l;
                    p.source = j;
                    p.route = route;
                    p.output = o;
                    table.paths.push_back(std::move(p));
                }
            } while (advance_route(route, spec, l + 1));
        }
    }

    // Output biases: zero-length bias paths, always active.
    for (std::size_t o = 0; o < spec.outputs(); ++o) {
        PathId p;
        p.kind = PathKind::Bias;
        p.source_layer = n_layers - 1;
        p.source = o;
        p.output = o;
        table.paths.push_back(std::move(p));
    }
    return table;
}

double path_weight(const Network& net, const PathId& p) {
    const NetworkSpec& spec = net.spec;
    std::size_t hidden = spec.hidden_layers();
    std::size_t out_layer = spec.layer_sizes.size() - 1;
    if (p.output >= spec.outputs()) throw input_error("path_weight: output out of range");

    if (p.kind == PathKind::Full) {
        if (p.source >= spec.inputs() || p.route.size() != hidden) {
            throw input_error("path_weight: invalid full path");
        }
        double w = 1.0;
        std::size_t prev = p.source;
        for (std::size_t i = 0; i < p.route.size(); ++i) {
            if (p.route[i] >= spec.layer_sizes[i + 1]) {
                throw input_error("path_weight: route index out of range");
            }
            w *= net.weights[i](p.route[i], prev);
            prev = p.route[i];
        }
        return w * net.weights[hidden](p.output, prev);
    }

    if (p.source_layer == out_layer) {
        if (p.source != p.output || !p.route.empty()) {
            throw input_error("path_weight: invalid output-bias path");
        }
        return net.biases[out_layer - 1][p.source];
    }
    if (p.source_layer < 1 || p.source_layer >= out_layer ||
        p.source >= spec.layer_sizes[p.source_layer] ||
        p.route.size() != hidden - p.source_layer) {
        throw input_error("path_weight: invalid bias path");
    }
    double w = net.biases[p.source_layer - 1][p.source];
    std::size_t prev = p.source;
    for (std::size_t i = 0; i < p.route.size(); ++i) {
        std::size_t layer = p.source_layer + i + 1;  // position in layer_sizes
        if (p.route[i] >= spec.layer_sizes[layer]) {
            throw input_error("path_weight: route index out of range");
        }
        w *= net.weights[layer - 1](p.route[i], prev);
        prev = p.route[i];
    }
    return w * net.weights[hidden](p.output, prev);
}

bool path_active(const PathId& p, const ActivationPattern& pat) {
    if (p.kind == PathKind::Full) {
        if (p.route.size() != pat.masks.size()) {
            throw input_error("path_active: route does not match pattern");
        }
        for (std::size_t i = 0; i < p.route.size(); ++i) {
            if (!pat.masks[i][p.route[i]]) return false;
        }
        return true;
    }
    if (p.source_layer == pat.masks.size() + 1) return true;  // output bias
    if (p.source_layer < 1 || p.source_layer > pat.masks.size()) {
        throw input_error("path_active: bias source layer out of range");
    }
    if (!pat.masks[p.source_layer - 1][p.source]) return false;
    for (std::size_t i = 0; i < p.route.size(); ++i) {
        if (!pat.masks[p.source_layer + i][p.route[i]]) return false;
    }
    return true;
}

LinearEstimator init_estimator_from_network(const Network& net, std::uint64_t cap) {
    LinearEstimator est;
    est.table = enumerate_paths(net.spec, cap);
    est.pw.resize(est.table.size());
    for (std::size_t k = 0; k < est.table.size(); ++k) {
        est.pw[k] = path_weight(net, est.table.paths[k]);
    }
    return est;
}

std::vector<double> path_sum_output(const LinearEstimator& est, const ActivationPattern& pat,
                             const std::vector<double>& x) {
    const NetworkSpec& spec = est.table.spec;
    check_pattern_spec(spec, pat);
    if (x.size() != spec.inputs()) throw input_error("path_sum_output: input width mismatch");

    std::vector<double> out(spec.outputs(), 0.0);
    for (std::size_t k = 0; k < est.table.size(); ++k) {
        const PathId& p = est.table.paths[k];
        if (!path_active(p, pat)) continue;
        if (p.kind == PathKind::Full) {
            out[p.output] += est.pw[k] * x[p.source];
        } else {
            out[p.output] += est.pw[k];
        }
    }
    return out;
}

std::size_t count_active_paths(const PathTable& table, const ActivationPattern& pat,
                               std::size_t input, std::size_t output) {
    if (input >= table.spec.inputs() || output >= table.spec.outputs()) {
        throw input_error("count_active_paths: index out of range");
    }
    check_pattern_spec(table.spec, pat);
    std::size_t count = 0;
    for (const PathId& p : table.paths) {
        if (p.kind == PathKind::Full && p.source == input && p.output == output &&
            path_active(p, pat)) {
            ++count;
        }
    }
    return count;
}

}  // namespace glai
