// Acceptance suite: exact structural properties plus desk-scale training
// analogs. Each criterion prints one PASS/FAIL line; the process exits with
// the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "glai/data_io.hpp"
#include "glai/errors.hpp"
#include "glai/estimator.hpp"
#include "glai/masked.hpp"
#include "glai/paths.hpp"
#include "glai/pattern.hpp"
#include "glai/persistence.hpp"
#include "helpers.hpp"

using namespace glai;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s — %s\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---- 1: path-sum equivalence ----------------------------------------

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(1001);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        NetworkSpec spec = random_spec(rng, 6, 8, 4, 2);  // sizes <= [6,8,8,4]
        Network net = init_network(spec);
        LinearEstimator est = init_estimator_from_network(net);
        for (int s = 0; s < 10; ++s) {
            std::vector<double> x = random_input(rng, spec.inputs());
            auto logits = forward(net, x).first;
            auto sum = path_sum_output(est, capture_pattern(net, x), x);
            for (std::size_t j = 0; j < logits.size(); ++j) {
                worst = std::max(worst, std::fabs(sum[j] - logits[j]));
            }
        }
    }
    double secs = seconds_since(t0);
    report(1, "path-sum equivalence (100 nets x 10 samples)", worst < 1e-9 && secs < 30.0,
           fmt("max |path sum - forward| = %.2e (< 1e-9), %.1fs (< 30s)", worst, secs));
}

// ---- 2: masked-forward identity --------------------------------------------

void criterion_2() {
    SplitMix64 rng(1002);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        NetworkSpec spec = random_spec(rng);
        Network net = init_network(spec);
        for (int s = 0; s < 10; ++s) {
            std::vector<double> x = random_input(rng, spec.inputs());
            ActivationPattern p = capture_pattern(net, x);
            auto plain = forward(net, x).first;
            auto masked = masked_forward(net, x, p).first;
            for (std::size_t j = 0; j < plain.size(); ++j) {
                worst = std::max(worst, std::fabs(plain[j] - masked[j]));
            }
        }
    }
    report(2, "masked-forward identity (1000 cases)", worst < 1e-12,
           fmt("max |forward - masked| = %.2e (< 1e-12)", worst));
}

// ---- 3: gradient oracles ----------------------------------------------------

void criterion_3() {
    SplitMix64 rng(1003);
    double worst_backward = 0.0;
    for (int t = 0; t < 50; ++t) {
        NetworkSpec spec = random_spec(rng);
        Network net = init_network(spec);
        // the fd oracle needs pre-activations away from the ReLU kink
        std::vector<double> x = kink_free_input(net, rng);
        int label = int(rng.below(spec.outputs()));
        auto [logits, cache] = forward(net, x);
        Gradients got = backward(net, cache, label);
        Gradients want = fd_gradients(net, [&](const Network& n) {
            return loss_cce(forward(n, x).first, label);
        });
        worst_backward = std::max(worst_backward, max_grad_rel_err(got, want));
    }

    double worst_masked = 0.0;
    for (int t = 0; t < 50; ++t) {
        NetworkSpec spec = random_spec(rng);
        Network net = init_network(spec);
        std::vector<double> x = random_input(rng, spec.inputs());
        int label = int(rng.below(spec.outputs()));
        ActivationPattern p;
        for (std::size_t l = 1; l + 1 < spec.layer_sizes.size(); ++l) {
            std::vector<std::uint8_t> bits(spec.layer_sizes[l]);
            for (auto& b : bits) b = std::uint8_t(rng.below(2));
            p.masks.push_back(bits);
        }
        auto [logits, cache] = masked_forward(net, x, p);
        Gradients got = masked_backward(net, cache, label, p);
        Gradients want = fd_gradients(net, [&](const Network& n) {
            return loss_cce(masked_forward(n, x, p).first, label);
        });
        worst_masked = std::max(worst_masked, max_grad_rel_err(got, want));
    }

    double worst_est = 0.0;
    for (int t = 0; t < 50; ++t) {
        NetworkSpec spec = random_spec(rng, 3, 4, 3, 2);
        Network net = init_network(spec);
        LinearEstimator est = init_estimator_from_network(net);
        std::vector<double> x = random_input(rng, spec.inputs());
        int label = int(rng.below(spec.outputs()));
        ActivationPattern p = capture_pattern(net, x);
        EstimatorLoss loss = t % 2 == 0 ? EstimatorLoss::Cce : EstimatorLoss::Mse;

        auto loss_of = [&](const LinearEstimator& e) {
            std::vector<double> out = path_sum_output(e, p, x);
            if (loss == EstimatorLoss::Cce) return loss_cce(out, label);
            double s = 0.0;
            for (std::size_t j = 0; j < out.size(); ++j) {
                double d = out[j] - (std::size_t(label) == j ? 1.0 : 0.0);
                s += d * d;
            }
            return s;
        };
        std::vector<double> got = estimator_loss_gradient(est, p, x, label, loss);
        LinearEstimator probe = est;
        double h = 1e-6;
        for (std::size_t k = 0; k < probe.pw.size(); ++k) {
            double saved = probe.pw[k];
            probe.pw[k] = saved + h;
            double up = loss_of(probe);
            probe.pw[k] = saved - h;
            double down = loss_of(probe);
            probe.pw[k] = saved;
            worst_est = std::max(worst_est, rel_err(got[k], (up - down) / (2.0 * h)));
        }
    }

    bool ok = worst_backward < 1e-5 && worst_masked < 1e-5 && worst_est < 1e-5;
    report(3, "gradient oracles (50 instances each)", ok,
           fmt("rel err: backward %.2e, masked %.2e, estimator %.2e (all < 1e-5)",
               worst_backward, worst_masked, worst_est));
}

// ---- 4: direct solver vs normal-equations oracle ----------------------------

void criterion_4() {
    SplitMix64 rng(1004);
    const std::vector<std::vector<std::size_t>> shapes = {
        {2, 3, 2}, {1, 2, 2}, {2, 4, 2}, {3, 2, 3}, {2, 2, 2, 2}};  // 20/10/26/27/30 paths
    double worst_coeff = 0.0;
    double worst_resid = 0.0;
    // well-posed common problem: at tiny ridge the near-flat valley of the
    // shared bias columns amplifies either route's roundoff into the
    // coefficients; 1e-4 keeps the comparison about the solvers
    double ridge = 1e-4;
    for (const auto& sizes : shapes) {
        NetworkSpec spec;
        spec.layer_sizes = sizes;
        spec.seed = rng.next();
        Network net = init_network(spec);
        PathTable table = enumerate_paths(spec);
        Dataset data = random_dataset(rng, 200, spec.inputs(), int(spec.outputs()));
        PatternSet ps = capture_patterns(net, data);
        LinearEstimator est = estimator_direct_solve(table, data, ps, ridge);

        for (std::size_t out = 0; out < spec.outputs(); ++out) {
            std::vector<std::size_t> cols;
            for (std::size_t k = 0; k < table.size(); ++k) {
                if (table.paths[k].output != out) continue;
                for (std::size_t i = 0; i < data.size(); ++i) {
                    if (path_active(table.paths[k], ps.patterns[i])) {
                        cols.push_back(k);
                        break;
                    }
                }
            }
            if (cols.empty()) continue;
            Matrix X(data.size(), cols.size());
            std::vector<double> y(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    const PathId& p = table.paths[cols[c]];
                    if (path_active(p, ps.patterns[i])) {
                        X(i, c) = p.kind == PathKind::Full ? data.features(i, p.source) : 1.0;
                    }
                }
                y[i] = data.labels[i] == int(out) ? 1.0 : 0.0;
            }
            std::vector<double> want = normal_equations_solve(X, y, ridge);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                worst_coeff = std::max(worst_coeff, std::fabs(est.pw[cols[c]] - want[c]));
            }
            // residual of (X^T X + ridge I) pw - X^T y, infinity norm
            for (std::size_t a = 0; a < cols.size(); ++a) {
                double lhs = ridge * est.pw[cols[a]];
                for (std::size_t b = 0; b < cols.size(); ++b) {
                    double dot = 0.0;
                    for (std::size_t r = 0; r < X.rows; ++r) dot += X(r, a) * X(r, b);
                    lhs += dot * est.pw[cols[b]];
                }
                double rhs = 0.0;
                for (std::size_t r = 0; r < X.rows; ++r) rhs += X(r, a) * y[r];
                worst_resid = std::max(worst_resid, std::fabs(lhs - rhs));
            }
        }
    }
    bool ok = worst_coeff < 1e-8 && worst_resid < 1e-8;
    report(4, "direct solver vs normal-equations oracle", ok,
           fmt("max coeff diff %.2e, residual inf-norm %.2e (both < 1e-8)", worst_coeff,
               worst_resid));
}

// ---- 5: structural stabilization (trace analog) ------------------------------

void criterion_5() {
    auto t0 = std::chrono::steady_clock::now();
    Dataset all = synth_clusters(501, 10, 8, 256, 0.12);
    auto [train, val] = split(all, 0.8, 501);

    NetworkSpec spec;
    spec.layer_sizes = {8, 32, 16, 10};
    spec.seed = 505;
    auto trace = convergence_trace(spec, train, val, 50, 0.05, 32, 505);

    double first = 0.0, last = 0.0;
    for (int e = 0; e < 5; ++e) first += trace[std::size_t(e)].pattern_diff / 5.0;
    for (int e = 45; e < 50; ++e) last += trace[std::size_t(e)].pattern_diff / 5.0;
    double secs = seconds_since(t0);
    bool ok = last < 0.25 * first && secs < 120.0;
    report(5, "pattern stabilization (10-class task, 50 epochs)", ok,
           fmt("mean diff epochs 46-50 = %.4f vs epochs 1-5 = %.4f (ratio %.2f < 0.25), "
               "%.1fs (< 120s)",
               last, first, first > 0 ? last / first : 0.0, secs));
}

// ---- 6: quantitative-only vs traditional re-training -------------------------

void criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    // spread 0.20 leaves real class overlap: phase-1 val accuracy starts
    // near 0.91 and more samples genuinely help
    Dataset all = synth_clusters(601, 10, 8, 1280, 0.20);
    auto [train, val] = split(all, 0.8, 601);  // 10240 / 2560

    NetworkSpec spec;
    spec.layer_sizes = {8, 32, 16, 10};
    spec.seed = 606;
    // Phase 1: selector trained on the first 1024 samples.
    Dataset initial = take(train, 1024);
    Network selector =
        train_epochs(init_network(spec), initial, 200, 0.05, 32, 606).first;
    PatternSet val_ps = capture_patterns(selector, val);

    std::vector<double> q_acc, b_acc;
    double max_gap = 0.0;
    for (std::size_t s = 1024; s <= 8192; s += 1024) {
        Dataset sub = take(train, s);
        PatternSet ps = capture_patterns(selector, sub);
        Network q = retrain_quantitative(selector, sub, ps, 50, 0.05, 32, 607).first;
        q_acc.push_back(evaluate_masked(q, val, val_ps).accuracy);

        Network b = train_epochs(selector, sub, 50, 0.05, 32, 607).first;
        b_acc.push_back(evaluate(b, val).accuracy);
        max_gap = std::max(max_gap, std::fabs(q_acc.back() - b_acc.back()));
    }
    double secs = seconds_since(t0);
    bool trend_ok = q_acc.back() >= q_acc.front();
    bool gap_ok = max_gap <= 0.10;
    std::string detail =
        fmt("quant acc %.3f -> %.3f (final >= first), max |quant - sgd| = %.3f "
            "(<= 0.10), %.0fs (< 600s)",
            q_acc.front(), q_acc.back(), max_gap, secs);
    report(6, "quantitative-only vs traditional re-training",
           trend_ok && gap_ok && secs < 600.0, detail);
}

// ---- 7: merging / no-forgetting ----------------------------------------------

void criterion_7() {
    Dataset all = synth_clusters(701, 3, 4, 500, 0.20);
    auto [train, val] = split(all, 0.8, 701);  // 1200 / 300
    Dataset old_data = take(train, 600);
    std::vector<std::size_t> rest;
    for (std::size_t i = 600; i < train.size(); ++i) rest.push_back(i);
    Dataset new_data = subset(train, rest);

    NetworkSpec spec;
    spec.layer_sizes = {4, 6, 4, 3};
    spec.seed = 707;
    Network selector = train_epochs(init_network(spec), old_data, 100, 0.05, 32, 707).first;

    PatternSet ps_old = capture_patterns(selector, old_data);
    PatternSet ps_new = capture_patterns(selector, new_data);
    PatternSet ps_union = ps_old;
    ps_union.append(ps_new);
    PatternSet val_ps = capture_patterns(selector, val);
    Dataset union_data = concat(old_data, new_data);

    LinearEstimator base = init_estimator_from_network(selector);
    TrainerConfig cfg;
    cfg.method = TrainMethod::Direct;
    cfg.ridge = 1e-8;

    LinearEstimator old_model = estimator_direct_solve(base.table, old_data, ps_old, cfg.ridge);
    LinearEstimator merged =
        incremental_retrain(old_model, new_data, ps_new, old_data.size(), new_data.size(), cfg);
    LinearEstimator union_model =
        estimator_direct_solve(base.table, union_data, ps_union, cfg.ridge);

    double acc_merged = evaluate_estimator(merged, val, val_ps).accuracy;
    double acc_union = evaluate_estimator(union_model, val, val_ps).accuracy;
    bool acc_ok = std::fabs(acc_merged - acc_union) <= 0.05;

    // exact identities
    bool idem = merge_estimators(old_model, old_model, 0.37).pw == old_model.pw;
    bool ends = merge_estimators(old_model, union_model, 1.0).pw == old_model.pw &&
                merge_estimators(old_model, union_model, 0.0).pw == union_model.pw;

    auto shard_of = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> idx;
        for (std::size_t i = lo; i < hi; ++i) idx.push_back(i);
        PatternSet ps;
        ps.spec = ps_old.spec;
        for (std::size_t i = lo; i < hi; ++i) ps.patterns.push_back(ps_old.patterns[i]);
        return std::pair<Dataset, PatternSet>{subset(old_data, idx), ps};
    };
    auto s1 = shard_of(0, 200), s2 = shard_of(200, 380), s3 = shard_of(380, 600);
    LinearEstimator f1 = federated_round(base, {s1, s2, s3}, cfg);
    LinearEstimator f2 = federated_round(base, {s3, s1, s2}, cfg);
    bool shard_order = f1.pw == f2.pw;

    bool ok = acc_ok && idem && ends && shard_order;
    report(7, "incremental merge / no-forgetting", ok,
           fmt("merged %.3f vs union %.3f (|diff| %.3f <= 0.05); identities: "
               "idempotence %s, endpoints %s, shard-order %s",
               acc_merged, acc_union, std::fabs(acc_merged - acc_union),
               idem ? "exact" : "BROKEN", ends ? "exact" : "BROKEN",
               shard_order ? "exact" : "BROKEN"));
}

// ---- 8: path-count closed forms ----------------------------------------------

void criterion_8() {
    SplitMix64 rng(1008);
    bool counts_ok = true;
    for (int t = 0; t < 20; ++t) {
        NetworkSpec spec = random_spec(rng, 4, 5, 3, 3);
        PathTable table = enumerate_paths(spec);
        std::vector<PathTuple> got;
        for (const PathId& p : table.paths) got.push_back(to_tuple(p));
        std::vector<PathTuple> want = brute_force_paths(spec);
        std::sort(want.begin(), want.end());
        counts_ok = counts_ok && table.size() == predicted_path_count(spec) &&
                    table.size() == want.size() && got == want;
    }

    NetworkSpec probe;
    probe.layer_sizes = {2, 3, 2};
    probe.seed = 0;
    bool cap_ok = false;
    try {
        enumerate_paths(probe, 20);  // exactly at the cap: fine
        enumerate_paths(probe, 19);  // one below: must refuse
    } catch (const capacity_error& e) {
        cap_ok = e.predicted == 20 && e.cap == 19 &&
                 std::string(e.what()).find("20") != std::string::npos;
    }
    report(8, "path-count closed forms (20 random specs)", counts_ok && cap_ok,
           fmt("closed form == enumeration == brute force: %s; capacity error at cap "
               "boundary: %s",
               counts_ok ? "yes" : "NO", cap_ok ? "yes" : "NO"));
}

// ---- 9: persistence round-trip -------------------------------------------------

void criterion_9() {
    fs::path dir = fs::temp_directory_path() / "glai_acceptance";
    fs::create_directories(dir);
    SplitMix64 rng(1009);

    NetworkSpec spec = random_spec(rng, 4, 5, 3, 2);
    Network net = init_network(spec);
    Dataset data = random_dataset(rng, 25, spec.inputs(), int(spec.outputs()));
    net = train_epochs(std::move(net), data, 3, 0.05, 8, 1).first;
    PatternSet ps = capture_patterns(net, data);
    LinearEstimator est = init_estimator_from_network(net);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    fs::path np = dir / "net.glai", pp = dir / "ps.glai", ep = dir / "est.glai";
    save(net, np.string());
    save(ps, pp.string());
    save(est, ep.string());
    bool round = load_network(np.string()) == net && load_patterns(pp.string()) == ps &&
                 load_estimator(ep.string()).pw == est.pw &&
                 load_estimator(ep.string()).table.paths == est.table.paths;

    std::string nb = slurp(np), pb = slurp(pp), eb = slurp(ep);
    save(net, np.string());
    save(ps, pp.string());
    save(est, ep.string());
    bool canonical = slurp(np) == nb && slurp(pp) == pb && slurp(ep) == eb;

    report(9, "persistence round-trip", round && canonical,
           fmt("bit-exact round-trip: %s; canonical bytes: %s", round ? "yes" : "NO",
               canonical ? "yes" : "NO"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
