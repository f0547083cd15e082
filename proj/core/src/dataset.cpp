// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ceq/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "ceq/error.hpp"
#include "ceq/rng.hpp"

namespace ceq {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        throw Error(ErrorKind::format, "dataset", "truncated IDX header in " + path);
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {
        static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

bool parse_double(std::string_view cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' ||
                             *(last - 1) == '\r')) {
        --last;
    }
    if (first == last) return false;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_csv_line(const std::string& line,
                                             std::vector<std::string_view>& cells) {
    cells.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.emplace_back(line.data() + start, i - start);
            start = i + 1;
        }
    }
    return cells;
}

}  // namespace

LabeledDataset make_dataset(Matrix features, std::vector<int> labels) {
    if (features.rows() == 0 || features.cols() == 0) {
        throw Error(ErrorKind::domain, "dataset", "dataset must have N > 0 and d > 0");
    }
    if (features.rows() != labels.size()) {
        throw Error(ErrorKind::consistency, "dataset",
                    "feature row count does not match label count");
    }
    int max_label = -1;
    for (const int label : labels) {
        if (label < 0) {
            throw Error(ErrorKind::domain, "dataset", "negative class label");
        }
        max_label = std::max(max_label, label);
    }
    for (const double v : features.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::domain, "dataset",
                        "feature value outside [0, 1] after normalization");
        }
    }
    return LabeledDataset{std::move(features), std::move(labels), max_label + 1};
}

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw Error(ErrorKind::io, "dataset", "cannot open " + images_path);
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw Error(ErrorKind::io, "dataset", "cannot open " + labels_path);

    const std::uint32_t images_magic = read_be_u32(images, images_path);
    if (images_magic != kImagesMagic) {
        throw Error(ErrorKind::format, "dataset",
                    "bad IDX image magic number in " + images_path);
    }
    const std::uint32_t n_images = read_be_u32(images, images_path);
    const std::uint32_t n_rows = read_be_u32(images, images_path);
    const std::uint32_t n_cols = read_be_u32(images, images_path);

    const std::uint32_t labels_magic = read_be_u32(labels, labels_path);
    if (labels_magic != kLabelsMagic) {
        throw Error(ErrorKind::format, "dataset",
                    "bad IDX label magic number in " + labels_path);
    }
    const std::uint32_t n_labels = read_be_u32(labels, labels_path);
    if (n_images != n_labels) {
        throw Error(ErrorKind::consistency, "dataset",
                    "IDX image count " + std::to_string(n_images) +
                        " does not match label count " + std::to_string(n_labels));
    }
    if (n_images == 0 || n_rows == 0 || n_cols == 0) {
        throw Error(ErrorKind::format, "dataset", "empty IDX pair " + images_path);
    }

    const std::size_t d = std::size_t(n_rows) * n_cols;
    std::vector<unsigned char> pixel_buf(d);
    Matrix features(n_images, d);
    for (std::size_t i = 0; i < n_images; ++i) {
        images.read(reinterpret_cast<char*>(pixel_buf.data()),
                    static_cast<std::streamsize>(d));
        if (!images) {
            throw Error(ErrorKind::consistency, "dataset",
                        "IDX image data shorter than declared count in " + images_path);
        }
        auto row = features.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = pixel_buf[j] / 255.0;
    }

    std::vector<unsigned char> label_buf(n_labels);
    labels.read(reinterpret_cast<char*>(label_buf.data()),
                static_cast<std::streamsize>(n_labels));
    if (!labels) {
        throw Error(ErrorKind::consistency, "dataset",
                    "IDX label data shorter than declared count in " + labels_path);
    }
    std::vector<int> label_values(label_buf.begin(), label_buf.end());
    return make_dataset(std::move(features), std::move(label_values));
}

void write_idx(const LabeledDataset& dataset, const std::string& images_path,
               const std::string& labels_path, int rows, int cols) {
    if (rows <= 0 || cols <= 0 ||
        std::size_t(rows) * std::size_t(cols) != dataset.dim()) {
        throw Error(ErrorKind::shape, "dataset",
                    "IDX geometry does not match feature dimensionality");
    }
    std::ofstream images(images_path, std::ios::binary);
    if (!images) throw Error(ErrorKind::io, "dataset", "cannot write " + images_path);
    write_be_u32(images, kImagesMagic);
    write_be_u32(images, static_cast<std::uint32_t>(dataset.size()));
    write_be_u32(images, static_cast<std::uint32_t>(rows));
    write_be_u32(images, static_cast<std::uint32_t>(cols));
    std::vector<unsigned char> buf(dataset.dim());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto row = dataset.features.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            buf[j] = static_cast<unsigned char>(std::lround(row[j] * 255.0));
        }
        images.write(reinterpret_cast<const char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size()));
    }

    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels) throw Error(ErrorKind::io, "dataset", "cannot write " + labels_path);
    write_be_u32(labels, kLabelsMagic);
    write_be_u32(labels, static_cast<std::uint32_t>(dataset.size()));
    for (const int label : dataset.labels) {
        const auto byte = static_cast<unsigned char>(label);
        labels.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

LabeledDataset load_csv(const std::string& path, int label_column) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "dataset", "cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::vector<std::string_view> cells;
    std::string line;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        split_csv_line(line, cells);
        std::vector<double> values(cells.size());
        bool all_numeric = true;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (!parse_double(cells[j], values[j])) {
                all_numeric = false;
                break;
            }
        }
        if (!all_numeric) {
            // A non-numeric first row is a header; anywhere else it is a bad cell.
            if (first_data_line) {
                first_data_line = false;
                continue;
            }
            throw Error(ErrorKind::parse, "dataset",
                        "non-numeric cell at line " + std::to_string(line_no) + " of " +
                            path);
        }
        first_data_line = false;
        if (width == 0) {
            width = values.size();
            if (width < 2) {
                throw Error(ErrorKind::format, "dataset",
                            "CSV needs at least one feature column and a label column");
            }
        } else if (values.size() != width) {
            throw Error(ErrorKind::format, "dataset",
                        "ragged CSV row at line " + std::to_string(line_no) + " of " +
                            path);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::format, "dataset", "no data rows in " + path);
    }

    const std::size_t label_idx =
        label_column < 0 ? width - 1 : static_cast<std::size_t>(label_column);
    if (label_idx >= width) {
        throw Error(ErrorKind::config, "dataset", "label column out of range");
    }

    const std::size_t d = width - 1;
    Matrix features(rows.size(), d);
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double raw_label = rows[i][label_idx];
        if (raw_label < 0.0 || raw_label != std::floor(raw_label)) {
            throw Error(ErrorKind::parse, "dataset",
                        "label column must hold non-negative integers");
        }
        labels[i] = static_cast<int>(raw_label);
        auto out = features.row(i);
        std::size_t k = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (j != label_idx) out[k++] = rows[i][j];
        }
    }

    // Per-column min-max normalization; constant columns map to 0.
    for (std::size_t j = 0; j < d; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < features.rows(); ++i) {
            lo = std::min(lo, features(i, j));
            hi = std::max(hi, features(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < features.rows(); ++i) {
            features(i, j) = range > 0.0 ? (features(i, j) - lo) / range : 0.0;
        }
    }
    return make_dataset(std::move(features), std::move(labels));
}

LabeledDataset resize(const LabeledDataset& dataset, const ResizeSpec& spec) {
    if (spec.target_side <= 0 || spec.source_side <= 0 || spec.channels <= 0) {
        throw Error(ErrorKind::config, "dataset", "resize sides must be positive");
    }
    if (spec.target_side > spec.source_side) {
        throw Error(ErrorKind::config, "dataset", "only downsampling is supported");
    }
    const std::size_t s = static_cast<std::size_t>(spec.source_side);
    const std::size_t t = static_cast<std::size_t>(spec.target_side);
    const std::size_t plane = s * s;
    if (dataset.dim() != std::size_t(spec.channels) * plane) {
        throw Error(ErrorKind::shape, "dataset",
                    "feature dimensionality does not match channels * side^2");
    }
    if (t == s) return dataset;

    // Overlap of source cell [c, c+1) with target cell u's span [u*r, (u+1)*r),
    // r = s/t. Every source pixel is covered exactly once across the target
    // grid, which is what makes the global mean exact.
    const double ratio = static_cast<double>(s) / static_cast<double>(t);
    const auto overlap = [ratio](std::size_t u, std::size_t c) {
        const double lo = std::max(static_cast<double>(u) * ratio,
                                   static_cast<double>(c));
        const double hi = std::min((static_cast<double>(u) + 1.0) * ratio,
                                   static_cast<double>(c) + 1.0);
        return std::max(0.0, hi - lo);
    };
    // Precompute the 1-D overlap bands; the 2-D weight is the product.
    std::vector<std::vector<std::pair<std::size_t, double>>> bands(t);
    for (std::size_t u = 0; u < t; ++u) {
        const auto first = static_cast<std::size_t>(std::floor(u * ratio));
        const auto last = std::min(
            s - 1, static_cast<std::size_t>(std::ceil((u + 1) * ratio)));
        for (std::size_t c = first; c <= last; ++c) {
            const double w = overlap(u, c);
            if (w > 0.0) bands[u].emplace_back(c, w);
        }
    }
    const double cell_area = ratio * ratio;

    const std::size_t out_plane = t * t;
    Matrix out(dataset.size(), std::size_t(spec.channels) * out_plane);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto src = dataset.features.row(i);
        auto dst = out.row(i);
        for (int ch = 0; ch < spec.channels; ++ch) {
            const std::size_t src_base = std::size_t(ch) * plane;
            const std::size_t dst_base = std::size_t(ch) * out_plane;
            for (std::size_t u = 0; u < t; ++u) {
                for (std::size_t v = 0; v < t; ++v) {
                    double acc = 0.0;
                    for (const auto& [r, wr] : bands[u]) {
                        double row_acc = 0.0;
                        for (const auto& [c, wc] : bands[v]) {
                            row_acc += wc * src[src_base + r * s + c];
                        }
                        acc += wr * row_acc;
                    }
                    // Clamp: rounding can nudge a hair past the input extremes.
                    dst[dst_base + u * t + v] =
                        std::clamp(acc / cell_area, 0.0, 1.0);
                }
            }
        }
    }
    LabeledDataset result{std::move(out), dataset.labels, dataset.class_count};
    return result;
}

std::vector<Matrix> partition_by_class(const LabeledDataset& dataset) {
    std::vector<std::size_t> counts(dataset.class_count, 0);
    for (const int label : dataset.labels) ++counts[label];

    std::vector<Matrix> classes;
    classes.reserve(dataset.class_count);
    for (int c = 0; c < dataset.class_count; ++c) {
        classes.emplace_back(counts[c], dataset.dim());
    }
    std::vector<std::size_t> next(dataset.class_count, 0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const int c = dataset.labels[i];
        auto dst = classes[c].row(next[c]++);
        const auto src = dataset.features.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return classes;
}

LabeledDataset stratified_subset(const LabeledDataset& dataset, std::size_t max_n,
                                 std::uint64_t seed) {
    if (max_n == 0 || max_n >= dataset.size()) return dataset;
    if (max_n < std::size_t(dataset.class_count)) {
        throw Error(ErrorKind::config, "dataset",
                    "subset size smaller than the number of classes");
    }

    std::vector<std::vector<std::size_t>> by_class(dataset.class_count);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        by_class[dataset.labels[i]].push_back(i);
    }

    // Largest-remainder proportional quotas, at least one row per non-empty class.
    const double scale = static_cast<double>(max_n) / dataset.size();
    std::vector<std::size_t> quota(dataset.class_count, 0);
    std::vector<std::pair<double, int>> remainders;
    std::size_t assigned = 0;
    for (int c = 0; c < dataset.class_count; ++c) {
        if (by_class[c].empty()) continue;
        const double exact = by_class[c].size() * scale;
        quota[c] = std::max<std::size_t>(1, static_cast<std::size_t>(exact));
        quota[c] = std::min(quota[c], by_class[c].size());
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (const auto& [frac, c] : remainders) {
        if (assigned >= max_n) break;
        if (quota[c] < by_class[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }
    while (assigned > max_n) {  // overshoot from the one-per-class floor
        for (int c = dataset.class_count - 1; c >= 0 && assigned > max_n; --c) {
            if (quota[c] > 1) {
                --quota[c];
                --assigned;
            }
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(assigned);
    for (int c = 0; c < dataset.class_count; ++c) {
        auto& pool = by_class[c];
        if (pool.empty()) continue;
        const auto order = rng.permutation(pool.size());
        for (std::size_t k = 0; k < quota[c]; ++k) chosen.push_back(pool[order[k]]);
    }
    std::sort(chosen.begin(), chosen.end());

    Matrix features(chosen.size(), dataset.dim());
    std::vector<int> labels(chosen.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const auto src = dataset.features.row(chosen[i]);
        std::copy(src.begin(), src.end(), features.row(i).begin());
        labels[i] = dataset.labels[chosen[i]];
    }
    LabeledDataset result{std::move(features), std::move(labels), dataset.class_count};
    return result;
}

}  // namespace ceq
