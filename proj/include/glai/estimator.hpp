#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "glai/paths.hpp"

namespace glai {

enum class EstimatorLoss { Cce, Mse };
enum class TrainMethod { Sgd, Direct };

struct TrainerConfig {
    TrainMethod method = TrainMethod::Direct;
    std::size_t epochs = 50;
    double lr = 0.05;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
    EstimatorLoss loss = EstimatorLoss::Cce;
    double ridge = 1e-8;
};

// min ||X w - y||^2 + ridge ||w||^2 via Householder QR on the augmented
// system [X; sqrt(ridge) I]. The direct solver's core; throws rank_error on
// a rank-deficient system when ridge == 0.
std::vector<double> ridge_least_squares(const Matrix& X, const std::vector<double>& y,
                                        double ridge);

// Per-sample gradient of the chosen loss w.r.t. the path weights; flows only
// through active paths (x[source] for full, 1 for bias).
std::vector<double> estimator_loss_gradient(const LinearEstimator& est,
                                            const ActivationPattern& pat,
                                            const std::vector<double>& x, int label,
                                            EstimatorLoss loss);

std::pair<LinearEstimator, std::vector<EpochStats>> estimator_sgd_train(
    LinearEstimator est, const Dataset& data, const PatternSet& ps, std::size_t epochs,
    double lr, std::size_t batch_size, std::uint64_t seed, EstimatorLoss loss,
    const Dataset* val = nullptr, const PatternSet* val_ps = nullptr);

// Ridge least squares against one-hot targets, solved per output via
// Householder QR on the augmented system. Paths active for no sample keep
// pw exactly 0. ridge == 0 on a rank-deficient system raises rank_error.
LinearEstimator estimator_direct_solve(const PathTable& table, const Dataset& data,
                                       const PatternSet& ps, double ridge);

// pw = alpha * a.pw + (1 - alpha) * b.pw, with exact idempotence and
// endpoints. Tables must share a fingerprint.
LinearEstimator merge_estimators(const LinearEstimator& a, const LinearEstimator& b,
                                 double alpha);

// Trains a copy of `start` on (data, ps) with the given config.
LinearEstimator train_with(const LinearEstimator& start, const Dataset& data,
                           const PatternSet& ps, const TrainerConfig& cfg);

// Trains on the new samples only, then merges with the previous model at
// alpha = n_old / (n_old + m_new).
LinearEstimator incremental_retrain(const LinearEstimator& old_model,
                                    const Dataset& new_data, const PatternSet& ps_new,
                                    std::size_t n_old, std::size_t m_new,
                                    const TrainerConfig& cfg);

// One round: every node trains a copy of the global model on its shard; the
// result is the shard-size-weighted parameter average, independent of shard
// order.
LinearEstimator federated_round(const LinearEstimator& global_model,
                                const std::vector<std::pair<Dataset, PatternSet>>& shards,
                                const TrainerConfig& cfg);

// Accuracy and CCE of argmax classification over path_sum_output outputs.
Metrics evaluate_estimator(const LinearEstimator& est, const Dataset& data,
                           const PatternSet& ps);

}  // namespace glai
