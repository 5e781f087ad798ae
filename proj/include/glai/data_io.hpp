#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glai/matrix.hpp"

namespace glai {

struct Dataset {
    Matrix features;          // n_samples x n_features
    std::vector<int> labels;  // one class index per sample
    int n_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t width() const { return features.cols; }
};

// IDX containers (big-endian headers; images magic 0x00000803, labels
// 0x00000801). Pixel bytes are scaled by 1/255 into [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Numeric CSV with a header row. label_column names the label column by
// header name, or, failing that, by 0-based column index.
Dataset load_csv(const std::string& path, const std::string& label_column);

// Companion writer for load_csv (header f0..f{d-1},label).
void write_csv(const Dataset& data, const std::string& path);

// Gaussian blobs at seeded random centers in [0,1]^dims, stddev = spread.
// Samples are emitted class-block by class-block.
Dataset synth_clusters(std::uint64_t seed, int n_classes, std::size_t dims,
                       std::size_t per_class, double spread);

// Seeded permutation split; both sides must be non-empty.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed);

// Per-epoch reshuffled index batches from (seed, epoch); short last batch kept.
std::vector<std::vector<std::size_t>> batches(const Dataset& data, std::size_t batch_size,
                                              std::uint64_t seed, std::uint64_t epoch);

// Row subset in the given index order.
Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices);

// First n rows.
Dataset take(const Dataset& data, std::size_t n);

Dataset concat(const Dataset& a, const Dataset& b);

}  // namespace glai
