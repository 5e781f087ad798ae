// Test-only oracles and generators. The oracles here are deliberately
// independent of the implementation paths they check: finite differences
// for gradients, recursive enumeration for paths, explicit normal
// equations for the least-squares solver.
#pragma once
#include <cmath>
#include <functional>
#include <tuple>
#include <vector>

#include "glai/data_io.hpp"
#include "glai/network.hpp"
#include "glai/paths.hpp"
#include "glai/rng.hpp"

namespace testutil {

using namespace glai;

// ---- finite differences ----------------------------------------------------

// Central-difference gradient of `loss(net)` for every weight and bias.
inline Gradients fd_gradients(const Network& net,
                              const std::function<double(const Network&)>& loss,
                              double h = 1e-6) {
    Gradients g = zero_gradients(net);
    Network probe = net;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
            double saved = probe.weights[l].data[i];
            probe.weights[l].data[i] = saved + h;
            double up = loss(probe);
            probe.weights[l].data[i] = saved - h;
            double down = loss(probe);
            probe.weights[l].data[i] = saved;
            g.d_weights[l].data[i] = (up - down) / (2.0 * h);
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            double saved = probe.biases[l][i];
            probe.biases[l][i] = saved + h;
            double up = loss(probe);
            probe.biases[l][i] = saved - h;
            double down = loss(probe);
            probe.biases[l][i] = saved;
            g.d_biases[l][i] = (up - down) / (2.0 * h);
        }
    }
    return g;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max({std::fabs(got), std::fabs(want), 1e-8});
}

// Worst relative error between an analytic gradient and the fd oracle.
inline double max_grad_rel_err(const Gradients& got, const Gradients& want) {
    double worst = 0.0;
    for (std::size_t l = 0; l < got.d_weights.size(); ++l) {
        for (std::size_t i = 0; i < got.d_weights[l].data.size(); ++i) {
            worst = std::max(worst, rel_err(got.d_weights[l].data[i],
                                            want.d_weights[l].data[i]));
        }
        for (std::size_t i = 0; i < got.d_biases[l].size(); ++i) {
            worst = std::max(worst, rel_err(got.d_biases[l][i], want.d_biases[l][i]));
        }
    }
    return worst;
}

// ---- brute-force path enumeration ------------------------------------------

using PathTuple = std::tuple<int, std::size_t, std::size_t, std::vector<std::size_t>,
                             std::size_t>;

// Recursive enumeration, written without reference to the production
// odometer: extends partial routes one hidden layer at a time.
inline void extend_routes(const NetworkSpec& spec, std::size_t layer,
                          std::vector<std::size_t>& route,
                          const std::function<void(const std::vector<std::size_t>&)>& emit) {
    if (layer + 1 == spec.layer_sizes.size()) {
        emit(route);
        return;
    }
    for (std::size_t j = 0; j < spec.layer_sizes[layer]; ++j) {
        route.push_back(j);
        extend_routes(spec, layer + 1, route, emit);
        route.pop_back();
    }
}

inline std::vector<PathTuple> brute_force_paths(const NetworkSpec& spec) {
    std::vector<PathTuple> out;
    std::size_t out_layer = spec.layer_sizes.size() - 1;
    for (std::size_t i = 0; i < spec.inputs(); ++i) {
        std::vector<std::size_t> route;
        extend_routes(spec, 1, route, [&](const std::vector<std::size_t>& r) {
            for (std::size_t o = 0; o < spec.outputs(); ++o) out.push_back({0, 0, i, r, o});
        });
    }
    for (std::size_t l = 1; l < out_layer; ++l) {
        for (std::size_t j = 0; j < spec.layer_sizes[l]; ++j) {
            std::vector<std::size_t> route;
            extend_routes(spec, l + 1, route, [&](const std::vector<std::size_t>& r) {
                for (std::size_t o = 0; o < spec.outputs(); ++o) {
                    out.push_back({1, l, j, r, o});
                }
            });
        }
    }
    for (std::size_t o = 0; o < spec.outputs(); ++o) out.push_back({1, out_layer, o, {}, o});
    return out;
}

inline PathTuple to_tuple(const PathId& p) {
    return {p.kind == PathKind::Full ? 0 : 1, p.source_layer, p.source, p.route, p.output};
}

// ---- normal-equations oracle -----------------------------------------------

// Solves (X^T X + ridge I) w = X^T y by Gaussian elimination with full
// pivoting, accumulating in long double; an independent route to the same
// ridge least-squares minimum.
inline std::vector<double> normal_equations_solve(const Matrix& X,
                                                  const std::vector<double>& y,
                                                  double ridge) {
    std::size_t n = X.cols;
    std::vector<long double> A(n * n, 0.0L);
    std::vector<long double> b(n, 0.0L);
    auto at = [&](std::size_t i, std::size_t j) -> long double& { return A[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            long double s = 0.0L;
            for (std::size_t r = 0; r < X.rows; ++r) {
                s += static_cast<long double>(X(r, i)) * X(r, j);
            }
            at(i, j) = s + (i == j ? static_cast<long double>(ridge) : 0.0L);
        }
        for (std::size_t r = 0; r < X.rows; ++r) {
            b[i] += static_cast<long double>(X(r, i)) * y[r];
        }
    }
    std::vector<std::size_t> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        long double best = 0.0L;
        for (std::size_t i = k; i < n; ++i) {
            for (std::size_t j = k; j < n; ++j) {
                if (std::fabs(at(i, j)) > best) { best = std::fabs(at(i, j)); pr = i; pc = j; }
            }
        }
        for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(pr, j));
        std::swap(b[k], b[pr]);
        for (std::size_t i = 0; i < n; ++i) std::swap(at(i, k), at(i, pc));
        std::swap(col[k], col[pc]);
        for (std::size_t i = k + 1; i < n; ++i) {
            long double f = at(i, k) / at(k, k);
            for (std::size_t j = k; j < n; ++j) at(i, j) -= f * at(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<long double> z(n, 0.0L);
    for (std::size_t k = n; k-- > 0;) {
        long double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= at(k, j) * z[j];
        z[k] = s / at(k, k);
    }
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) w[col[k]] = double(z[k]);
    return w;
}

// ---- generators --------------------------------------------------------------

inline NetworkSpec random_spec(SplitMix64& rng, std::size_t max_in = 6,
                               std::size_t max_hidden = 8, std::size_t max_out = 4,
                               std::size_t max_depth = 2) {
    NetworkSpec spec;
    std::size_t depth = 1 + rng.below(max_depth);
    spec.layer_sizes.push_back(1 + rng.below(max_in));
    for (std::size_t l = 0; l < depth; ++l) spec.layer_sizes.push_back(1 + rng.below(max_hidden));
    spec.layer_sizes.push_back(1 + rng.below(max_out));
    spec.seed = rng.next();
    return spec;
}

inline std::vector<double> random_input(SplitMix64& rng, std::size_t dim, double lo = -1.0,
                                        double hi = 1.0) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform(lo, hi);
    return x;
}

// x drawn so every hidden pre-activation sits at least `margin` from the
// ReLU kink; keeps central differences valid for the non-masked backward.
inline std::vector<double> kink_free_input(const Network& net, SplitMix64& rng,
                                           double margin = 1e-3) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> x = random_input(rng, net.spec.inputs());
        auto [logits, cache] = forward(net, x);
        double closest = 1e300;
        for (std::size_t l = 0; l + 1 < cache.pre_activations.size(); ++l) {
            for (double z : cache.pre_activations[l]) {
                closest = std::min(closest, std::fabs(z));
            }
        }
        if (closest > margin) return x;
    }
    return random_input(rng, net.spec.inputs());
}

inline Dataset random_dataset(SplitMix64& rng, std::size_t n, std::size_t dim,
                              int n_classes) {
    Dataset d;
    d.n_classes = n_classes;
    d.features = Matrix(n, dim);
    for (double& v : d.features.data) v = rng.uniform(-1.0, 1.0);
    d.labels.resize(n);
    for (auto& l : d.labels) l = int(rng.below(std::uint64_t(n_classes)));
    return d;
}

// The 1-1-1 hand-evaluated network: W0=[[2]], b0=[1], W1=[[3]], b1=[0.5].
inline Network tiny_net() {
    NetworkSpec spec;
    spec.layer_sizes = {1, 1, 1};
    spec.seed = 0;
    Network net = init_network(spec);
    net.weights[0](0, 0) = 2.0;
    net.biases[0][0] = 1.0;
    net.weights[1](0, 0) = 3.0;
    net.biases[1][0] = 0.5;
    return net;
}

}  // namespace testutil
