#pragma once
#include <compare>
#include <cstdint>
#include <vector>

#include "glai/pattern.hpp"

namespace glai {

enum class PathKind : std::uint8_t { Full = 0, Bias = 1 };

// One multiplicative path through the network.
//
// Full paths start at an input (source_layer 0, source = input index) and
// traverse one neuron per hidden layer. Bias paths start at a neuron's bias:
// source_layer in [1, L] for hidden neurons (route covers the hidden layers
// strictly after it), or L+1 for an output bias (empty route). Field order
// is the lexicographic table order: (kind, source_layer, source, route, output).
struct PathId {
    PathKind kind = PathKind::Full;
    std::size_t source_layer = 0;
    std::size_t source = 0;
    std::vector<std::size_t> route;
    std::size_t output = 0;

    auto operator<=>(const PathId&) const = default;
};

struct PathTable {
    NetworkSpec spec;
    std::vector<PathId> paths;

    std::size_t size() const { return paths.size(); }
    std::uint64_t spec_fingerprint() const { return spec.fingerprint(); }
};

// The single-layer model: one independent trainable weight per path.
struct LinearEstimator {
    PathTable table;
    std::vector<double> pw;

    std::size_t outputs() const { return table.spec.outputs(); }
};

inline constexpr std::uint64_t kDefaultPathCap = 1000000;

// Closed-form count: full = I*h1*...*hL*O, bias = sum_l h_l*(h_{l+1}*...*hL*O) + O.
// Saturates at uint64 max.
std::uint64_t predicted_path_count(const NetworkSpec& spec);

// All full and bias paths in lexicographic order; refuses to materialize
// more than cap paths (capacity_error names the predicted count).
PathTable enumerate_paths(const NetworkSpec& spec, std::uint64_t cap = kDefaultPathCap);

// Product of the weights along the path; bias paths include the source bias
// as the leading factor, an output-bias path is the bias itself.
double path_weight(const Network& net, const PathId& p);

// Active iff every neuron on the route (and the source neuron, for bias
// paths) is active. Output-bias paths are always active.
bool path_active(const PathId& p, const ActivationPattern& pat);

LinearEstimator init_estimator_from_network(const Network& net,
                                            std::uint64_t cap = kDefaultPathCap);

// Path-sum output: o_j = sum(active full paths to j) pw * x[source]
//                      + sum(active bias paths to j) pw.
std::vector<double> path_sum_output(const LinearEstimator& est, const ActivationPattern& pat,
                             const std::vector<double>& x);

std::size_t count_active_paths(const PathTable& table, const ActivationPattern& pat,
                               std::size_t input, std::size_t output);

}  // namespace glai
