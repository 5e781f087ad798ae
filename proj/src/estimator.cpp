#include "glai/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glai/errors.hpp"
#include "glai/parallel.hpp"

namespace glai {

namespace {

void check_alignment(const PathTable& table, const Dataset& data, const PatternSet& ps) {
    if (ps.size() != data.size()) {
        throw input_error("patterns not aligned with dataset (" + std::to_string(ps.size()) +
                          " vs " + std::to_string(data.size()) + ")");
    }
    if (ps.spec.layer_sizes != table.spec.layer_sizes) {
        throw input_error("pattern spec does not match path table");
    }
    if (data.size() > 0 && data.width() != table.spec.inputs()) {
        throw input_error("feature width does not match path table");
    }
}

double loss_mse(const std::vector<double>& outputs, int label) {
    double loss = 0.0;
    for (std::size_t j = 0; j < outputs.size(); ++j) {
        double d = outputs[j] - (std::size_t(label) == j ? 1.0 : 0.0);
        loss += d * d;
    }
    return loss;
}

std::vector<double> output_delta(const std::vector<double>& outputs, int label,
                                 EstimatorLoss loss) {
    std::vector<double> delta;
    if (loss == EstimatorLoss::Cce) {
        delta = softmax(outputs);
        delta[std::size_t(label)] -= 1.0;
    } else {
        delta.resize(outputs.size());
        for (std::size_t j = 0; j < outputs.size(); ++j) {
            delta[j] = 2.0 * (outputs[j] - (std::size_t(label) == j ? 1.0 : 0.0));
        }
    }
    return delta;
}

// Least squares min ||A w - b|| by Householder QR, A destroyed and b
// replaced by Q^T b. Returns false when a diagonal of R collapses (rank
// deficiency); tol is absolute on the remaining column norm.
bool qr_solve(Matrix& A, std::vector<double>& b, std::vector<double>& w, double tol) {
    std::size_t m = A.rows, n = A.cols;
    w.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) norm2 += A(i, k) * A(i, k);
        double norm = std::sqrt(norm2);
        if (!(norm > tol)) return false;

        double alpha = A(k, k) >= 0.0 ? -norm : norm;
        double v0 = A(k, k) - alpha;
        double vtv = v0 * v0;
        for (std::size_t i = k + 1; i < m; ++i) vtv += A(i, k) * A(i, k);

        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = v0 * A(k, j);
            for (std::size_t i = k + 1; i < m; ++i) dot += A(i, k) * A(i, j);
            double f = 2.0 * dot / vtv;
            A(k, j) -= f * v0;
            for (std::size_t i = k + 1; i < m; ++i) A(i, j) -= f * A(i, k);
        }
        double dot = v0 * b[k];
        for (std::size_t i = k + 1; i < m; ++i) dot += A(i, k) * b[i];
        double f = 2.0 * dot / vtv;
        b[k] -= f * v0;
        for (std::size_t i = k + 1; i < m; ++i) b[i] -= f * A(i, k);
        A(k, k) = alpha;
    }
    for (std::size_t k = n; k-- > 0;) {
        double sum = b[k];
        for (std::size_t j = k + 1; j < n; ++j) sum -= A(k, j) * w[j];
        w[k] = sum / A(k, k);
    }
    return true;
}

}  // namespace

std::vector<double> ridge_least_squares(const Matrix& X, const std::vector<double>& y,
                                        double ridge) {
    if (X.rows != y.size()) throw input_error("ridge_least_squares: row/target mismatch");
    if (ridge < 0.0) throw input_error("ridge_least_squares: ridge must be >= 0");

    std::size_t extra = ridge > 0.0 ? X.cols : 0;
    Matrix A(X.rows + extra, X.cols);
    std::vector<double> b(X.rows + extra, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        for (std::size_t j = 0; j < X.cols; ++j) A(i, j) = X(i, j);
        b[i] = y[i];
    }
    double sr = std::sqrt(ridge);
    for (std::size_t c = 0; c < extra; ++c) A(X.rows + c, c) = sr;

    double max_col = 0.0;
    for (std::size_t c = 0; c < A.cols; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i) s += A(i, c) * A(i, c);
        max_col = std::max(max_col, std::sqrt(s));
    }
    std::vector<double> w;
    if (!qr_solve(A, b, w, 1e-10 * std::max(1.0, max_col))) {
        throw rank_error("rank-deficient least-squares system; re-run with ridge > 0");
    }
    return w;
}

std::vector<double> estimator_loss_gradient(const LinearEstimator& est,
                                            const ActivationPattern& pat,
                                            const std::vector<double>& x, int label,
                                            EstimatorLoss loss) {
    std::vector<double> outputs = path_sum_output(est, pat, x);
    std::vector<double> delta = output_delta(outputs, label, loss);
    std::vector<double> grad(est.pw.size(), 0.0);
    for (std::size_t k = 0; k < est.table.size(); ++k) {
        const PathId& p = est.table.paths[k];
        if (!path_active(p, pat)) continue;
        double contrib = p.kind == PathKind::Full ? x[p.source] : 1.0;
        grad[k] = delta[p.output] * contrib;
    }
    return grad;
}

Metrics evaluate_estimator(const LinearEstimator& est, const Dataset& data,
                           const PatternSet& ps) {
    check_alignment(est.table, data, ps);
    Metrics m;
    if (data.size() == 0) return m;
    std::size_t correct = 0;
    std::vector<double> x(data.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.features.row(i);
        x.assign(row, row + data.width());
        std::vector<double> out = path_sum_output(est, ps.patterns[i], x);
        m.loss += loss_cce(out, data.labels[i]);
        std::size_t argmax = std::size_t(std::max_element(out.begin(), out.end()) - out.begin());
        if (argmax == std::size_t(data.labels[i])) ++correct;
    }
    m.loss /= double(data.size());
    m.accuracy = double(correct) / double(data.size());
    return m;
}

namespace {

Metrics evaluate_with_loss(const LinearEstimator& est, const Dataset& data,
                           const PatternSet& ps, EstimatorLoss loss) {
    Metrics m;
    if (data.size() == 0) return m;
    std::size_t correct = 0;
    std::vector<double> x(data.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.features.row(i);
        x.assign(row, row + data.width());
        std::vector<double> out = path_sum_output(est, ps.patterns[i], x);
        m.loss += loss == EstimatorLoss::Cce ? loss_cce(out, data.labels[i])
                                             : loss_mse(out, data.labels[i]);
        std::size_t argmax = std::size_t(std::max_element(out.begin(), out.end()) - out.begin());
        if (argmax == std::size_t(data.labels[i])) ++correct;
    }
    m.loss /= double(data.size());
    m.accuracy = double(correct) / double(data.size());
    return m;
}

}  // namespace

std::pair<LinearEstimator, std::vector<EpochStats>> estimator_sgd_train(
    LinearEstimator est, const Dataset& data, const PatternSet& ps, std::size_t epochs,
    double lr, std::size_t batch_size, std::uint64_t seed, EstimatorLoss loss,
    const Dataset* val, const PatternSet* val_ps) {
    check_alignment(est.table, data, ps);
    if (val != nullptr && (val_ps == nullptr || val_ps->size() != val->size())) {
        throw input_error("estimator_sgd_train: validation patterns not aligned");
    }

    std::vector<EpochStats> history;
    history.reserve(epochs);
    std::vector<double> grad(est.pw.size());
    std::vector<double> x(data.width());
    for (std::size_t e = 0; e < epochs; ++e) {
        for (const auto& batch : batches(data, batch_size, seed, e)) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double inv = 1.0 / double(batch.size());
            for (std::size_t i : batch) {
                const double* row = data.features.row(i);
                x.assign(row, row + data.width());
                std::vector<double> outputs = path_sum_output(est, ps.patterns[i], x);
                std::vector<double> delta = output_delta(outputs, data.labels[i], loss);
                for (std::size_t k = 0; k < est.table.size(); ++k) {
                    const PathId& p = est.table.paths[k];
                    if (!path_active(p, ps.patterns[i])) continue;
                    double contrib = p.kind == PathKind::Full ? x[p.source] : 1.0;
                    grad[k] += inv * delta[p.output] * contrib;
                }
            }
            if (lr > 0.0) {
                for (std::size_t k = 0; k < est.pw.size(); ++k) est.pw[k] -= lr * grad[k];
            }
        }
        EpochStats stats;
        stats.epoch = e + 1;
        Metrics train = evaluate_with_loss(est, data, ps, loss);
        stats.train_loss = train.loss;
        stats.train_accuracy = train.accuracy;
        if (val != nullptr) {
            Metrics v = evaluate_with_loss(est, *val, *val_ps, loss);
            stats.has_val = true;
            stats.val_loss = v.loss;
            stats.val_accuracy = v.accuracy;
        }
        history.push_back(stats);
    }
    return {std::move(est), std::move(history)};
}

LinearEstimator estimator_direct_solve(const PathTable& table, const Dataset& data,
                                       const PatternSet& ps, double ridge) {
    check_alignment(table, data, ps);
    if (data.size() == 0) throw input_error("estimator_direct_solve: empty dataset");
    if (ridge < 0.0) throw input_error("estimator_direct_solve: ridge must be >= 0");

    std::size_t n = data.size();
    LinearEstimator est;
    est.table = table;
    est.pw.assign(table.size(), 0.0);

    for (std::size_t out = 0; out < table.spec.outputs(); ++out) {
        // Columns: paths to this output that are active for at least one sample.
        std::vector<std::size_t> cols;
        for (std::size_t k = 0; k < table.size(); ++k) {
            if (table.paths[k].output != out) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (path_active(table.paths[k], ps.patterns[i])) {
                    cols.push_back(k);
                    break;
                }
            }
        }
        if (cols.empty()) continue;

        Matrix X(n, cols.size());
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = data.features.row(i);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const PathId& p = table.paths[cols[c]];
                if (!path_active(p, ps.patterns[i])) continue;
                X(i, c) = p.kind == PathKind::Full ? row[p.source] : 1.0;
            }
            y[i] = data.labels[i] == int(out) ? 1.0 : 0.0;
        }
        std::vector<double> w = ridge_least_squares(X, y, ridge);
        for (std::size_t c = 0; c < cols.size(); ++c) est.pw[cols[c]] = w[c];
    }
    return est;
}

LinearEstimator merge_estimators(const LinearEstimator& a, const LinearEstimator& b,
                                 double alpha) {
    if (a.table.spec_fingerprint() != b.table.spec_fingerprint() ||
        a.pw.size() != b.pw.size()) {
        throw input_error("merge_estimators: path tables do not match");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw input_error("merge_estimators: alpha must be in [0, 1]");
    }
    LinearEstimator out = a;
    if (alpha == 1.0) return out;
    if (alpha == 0.0) {
        out.pw = b.pw;
        return out;
    }
    // Equal entries pass through untouched so merging a model with itself is
    // exact for every alpha.
    for (std::size_t k = 0; k < out.pw.size(); ++k) {
        out.pw[k] = a.pw[k] == b.pw[k] ? a.pw[k] : alpha * a.pw[k] + (1.0 - alpha) * b.pw[k];
    }
    return out;
}

LinearEstimator train_with(const LinearEstimator& start, const Dataset& data,
                           const PatternSet& ps, const TrainerConfig& cfg) {
    if (cfg.method == TrainMethod::Direct) {
        return estimator_direct_solve(start.table, data, ps, cfg.ridge);
    }
    return estimator_sgd_train(start, data, ps, cfg.epochs, cfg.lr, cfg.batch, cfg.seed,
                               cfg.loss)
        .first;
}

LinearEstimator incremental_retrain(const LinearEstimator& old_model,
                                    const Dataset& new_data, const PatternSet& ps_new,
                                    std::size_t n_old, std::size_t m_new,
                                    const TrainerConfig& cfg) {
    if (n_old + m_new == 0) {
        throw input_error("incremental_retrain: n_old + m_new must be > 0");
    }
    if (m_new == 0) return old_model;
    LinearEstimator fresh = train_with(old_model, new_data, ps_new, cfg);
    if (n_old == 0) return fresh;
    double alpha = double(n_old) / double(n_old + m_new);
    return merge_estimators(old_model, fresh, alpha);
}

LinearEstimator federated_round(const LinearEstimator& global_model,
                                const std::vector<std::pair<Dataset, PatternSet>>& shards,
                                const TrainerConfig& cfg) {
    if (shards.empty()) throw input_error("federated_round: no shards");
    for (const auto& [data, ps] : shards) check_alignment(global_model.table, data, ps);

    std::vector<LinearEstimator> local(shards.size());
    parallel_for(shards.size(), [&](std::size_t k) {
        local[k] = train_with(global_model, shards[k].first, shards[k].second, cfg);
    });
    if (shards.size() == 1) return std::move(local[0]);

    // Content-ordered fold: the weighted average is summed in a canonical
    // order so shard permutations give bit-identical results.
    std::vector<std::size_t> order(shards.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (shards[i].first.size() != shards[j].first.size()) {
            return shards[i].first.size() < shards[j].first.size();
        }
        return local[i].pw < local[j].pw;
    });

    std::size_t total = 0;
    for (const auto& [data, ps] : shards) total += data.size();
    if (total == 0) throw input_error("federated_round: all shards empty");

    LinearEstimator merged = global_model;
    merged.pw.assign(global_model.pw.size(), 0.0);
    for (std::size_t k : order) {
        double w = double(shards[k].first.size()) / double(total);
        for (std::size_t i = 0; i < merged.pw.size(); ++i) {
            merged.pw[i] += w * local[k].pw[i];
        }
    }
    return merged;
}

}  // namespace glai
