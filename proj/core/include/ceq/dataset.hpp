// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ceq/matrix.hpp"

namespace ceq {

/// Flattened feature vectors with integer class labels. Feature values are
/// normalized to [0, 1] by the loaders; `class_count` is max(label) + 1.
struct LabeledDataset {
    Matrix features;          // N x d
    std::vector<int> labels;  // N entries in [0, class_count)
    int class_count = 0;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

/// Square-image downsampling parameters. Only downsampling is supported.
/// Multi-channel data is laid out channel-planar: channel c occupies feature
/// columns [c * side^2, (c+1) * side^2).
struct ResizeSpec {
    int target_side = 0;
    int source_side = 0;
    int channels = 1;
};

/// Validates labels and feature range and fills in class_count.
LabeledDataset make_dataset(Matrix features, std::vector<int> labels);

/// Reads an IDX ubyte image/label pair (big-endian dims, magic 0x803/0x801).
/// Pixels are scaled by 1/255; images are flattened row-major.
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Writes the dataset back to an IDX pair with the given image geometry.
/// Pixel bytes are recovered as round(value * 255).
void write_idx(const LabeledDataset& dataset, const std::string& images_path,
               const std::string& labels_path, int rows, int cols);

/// Reads a rectangular numeric CSV. An optional header row is detected by a
/// non-numeric first line. The label column must hold non-negative integers;
/// remaining columns are min-max normalized per column (constant columns
/// map to 0). label_column < 0 selects the last column.
LabeledDataset load_csv(const std::string& path, int label_column = -1);

/// Exact area-average downsampling: every output pixel is the overlap-area
/// weighted mean of the source pixels its cell covers, per channel. This is
/// deterministic and preserves the global feature mean exactly; for integer
/// side ratios it reduces to plain block means.
LabeledDataset resize(const LabeledDataset& dataset, const ResizeSpec& spec);

/// Splits features by class id; matrix i holds class i's rows in input order.
/// Classes with no samples yield empty matrices.
std::vector<Matrix> partition_by_class(const LabeledDataset& dataset);

/// Seeded stratified subsample of at most max_n rows (proportional per-class
/// quotas, every class keeps at least one row). Row order follows the input.
/// max_n == 0 or max_n >= N returns the dataset unchanged.
LabeledDataset stratified_subset(const LabeledDataset& dataset, std::size_t max_n,
                                 std::uint64_t seed);

}  // namespace ceq
