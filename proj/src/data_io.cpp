#include "glai/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "glai/errors.hpp"
#include "glai/rng.hpp"

namespace glai {

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path, std::size_t offset) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw format_error(path + ": truncated header at byte " + std::to_string(offset));
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw format_error(path + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                           cell + "'");
    }
    return v;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw input_error("cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw input_error("cannot open " + labels_path);

    std::uint32_t img_magic = read_be32(img, images_path, 0);
    if (img_magic != 0x00000803u) {
        throw format_error(images_path + ": bad image magic at byte 0 (got " +
                           std::to_string(img_magic) + ", want 2051)");
    }
    std::uint32_t n_images = read_be32(img, images_path, 4);
    std::uint32_t rows = read_be32(img, images_path, 8);
    std::uint32_t cols = read_be32(img, images_path, 12);

    std::uint32_t lab_magic = read_be32(lab, labels_path, 0);
    if (lab_magic != 0x00000801u) {
        throw format_error(labels_path + ": bad label magic at byte 0 (got " +
                           std::to_string(lab_magic) + ", want 2049)");
    }
    std::uint32_t n_labels = read_be32(lab, labels_path, 4);
    if (n_labels != n_images) {
        throw format_error(labels_path + ": label count " + std::to_string(n_labels) +
                           " does not match image count " + std::to_string(n_images));
    }

    std::size_t dim = std::size_t(rows) * cols;
    Dataset out;
    out.features = Matrix(n_images, dim);
    out.labels.resize(n_images);

    std::vector<unsigned char> buf(dim);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), std::streamsize(dim))) {
            throw format_error(images_path + ": short file at byte " +
                               std::to_string(16 + std::size_t(i) * dim));
        }
        double* row = out.features.row(i);
        for (std::size_t k = 0; k < dim; ++k) row[k] = buf[k] / 255.0;
    }
    int max_label = -1;
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        char c;
        if (!lab.read(&c, 1)) {
            throw format_error(labels_path + ": short file at byte " +
                               std::to_string(8 + std::size_t(i)));
        }
        out.labels[i] = static_cast<unsigned char>(c);
        max_label = std::max(max_label, out.labels[i]);
    }
    out.n_classes = max_label + 1;
    return out;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw format_error(path + ":1: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_line(line);

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) { label_idx = i; break; }
    }
    if (label_idx == header.size()) {
        std::size_t idx = 0;
        auto [ptr, ec] = std::from_chars(label_column.data(),
                                         label_column.data() + label_column.size(), idx);
        if (ec == std::errc() && ptr == label_column.data() + label_column.size() &&
            idx < header.size()) {
            label_idx = idx;
        } else {
            throw input_error(path + ": no column named '" + label_column + "'");
        }
    }

    Dataset out;
    std::size_t n_features = header.size() - 1;
    std::vector<double> values;
    std::size_t line_no = 1;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw format_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " cells, found " +
                               std::to_string(cells.size()));
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v = parse_cell(cells[i], path, line_no);
            if (i == label_idx) {
                double r = std::nearbyint(v);
                if (r != v || r < 0) {
                    throw format_error(path + ":" + std::to_string(line_no) +
                                       ": label must be a non-negative integer");
                }
                out.labels.push_back(static_cast<int>(r));
                max_label = std::max(max_label, out.labels.back());
            } else {
                values.push_back(v);
            }
        }
    }
    out.features = Matrix(out.labels.size(), n_features);
    out.features.data = std::move(values);
    out.n_classes = max_label + 1;
    return out;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw input_error("cannot write " + tmp);
        for (std::size_t j = 0; j < data.width(); ++j) out << "f" << j << ",";
        out << "label\n";
        char buf[64];
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double* row = data.features.row(i);
            for (std::size_t j = 0; j < data.width(); ++j) {
                auto r = std::to_chars(buf, buf + sizeof(buf), row[j],
                                       std::chars_format::general, 17);
                out.write(buf, r.ptr - buf);
                out << ',';
            }
            out << data.labels[i] << '\n';
        }
        if (!out) throw input_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw input_error("cannot rename " + tmp + " to " + path);
    }
}

Dataset synth_clusters(std::uint64_t seed, int n_classes, std::size_t dims,
                       std::size_t per_class, double spread) {
    if (n_classes < 1 || dims < 1 || per_class < 1) {
        throw input_error("synth_clusters: counts must be >= 1");
    }
    SplitMix64 rng(seed);
    Matrix centers(n_classes, dims);
    for (double& c : centers.data) c = rng.next_double();

    Dataset out;
    out.n_classes = n_classes;
    out.features = Matrix(std::size_t(n_classes) * per_class, dims);
    out.labels.resize(out.features.rows);
    std::size_t r = 0;
    for (int c = 0; c < n_classes; ++c) {
        for (std::size_t s = 0; s < per_class; ++s, ++r) {
            double* row = out.features.row(r);
            for (std::size_t d = 0; d < dims; ++d) {
                row[d] = centers(c, d) + spread * rng.normal();
            }
            out.labels[r] = c;
        }
    }
    return out;
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.n_classes = data.n_classes;
    out.features = Matrix(indices.size(), data.width());
    out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double* src = data.features.row(indices[i]);
        std::copy(src, src + data.width(), out.features.row(i));
        out.labels[i] = data.labels[indices[i]];
    }
    return out;
}

Dataset take(const Dataset& data, std::size_t n) {
    if (n > data.size()) throw input_error("take: not enough samples");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return subset(data, idx);
}

Dataset concat(const Dataset& a, const Dataset& b) {
    if (a.width() != b.width()) throw input_error("concat: feature width mismatch");
    Dataset out;
    out.n_classes = std::max(a.n_classes, b.n_classes);
    out.features = Matrix(a.size() + b.size(), a.width());
    std::copy(a.features.data.begin(), a.features.data.end(), out.features.data.begin());
    std::copy(b.features.data.begin(), b.features.data.end(),
              out.features.data.begin() + std::ptrdiff_t(a.features.data.size()));
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw input_error("split: train_fraction must be in (0, 1)");
    }
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    SplitMix64 rng(seed);
    shuffle(idx, rng);

    auto n_train = static_cast<std::size_t>(std::floor(double(data.size()) * train_fraction));
    if (n_train == 0 || n_train == data.size()) {
        throw input_error("split: a side would be empty");
    }
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + std::ptrdiff_t(n_train));
    std::vector<std::size_t> val_idx(idx.begin() + std::ptrdiff_t(n_train), idx.end());
    return {subset(data, train_idx), subset(data, val_idx)};
}

std::vector<std::vector<std::size_t>> batches(const Dataset& data, std::size_t batch_size,
                                              std::uint64_t seed, std::uint64_t epoch) {
    if (batch_size < 1) throw input_error("batches: batch_size must be >= 1");
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    SplitMix64 rng = stream_rng(seed, epoch);
    shuffle(idx, rng);

    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < idx.size(); start += batch_size) {
        std::size_t end = std::min(idx.size(), start + batch_size);
        out.emplace_back(idx.begin() + std::ptrdiff_t(start), idx.begin() + std::ptrdiff_t(end));
    }
    return out;
}

}  // namespace glai
