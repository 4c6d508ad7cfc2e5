#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "tcn/io.hpp"
#include "tcn/matrix.hpp"

namespace tcn {

// Labeled source-class features plus one semantic vector per class. Class
// indices are global; the split lists say which are source and which target.
struct Dataset {
    Matrix features;               // N × d_f
    std::vector<ClassId> labels;   // N, each a source class
    Matrix semantics;              // (max class + 1) × d_a
    std::vector<ClassId> source_classes;
    std::vector<ClassId> target_classes;
    std::vector<ClassId> val_classes;  // subset of source_classes, may be empty

    std::size_t feature_dim() const noexcept { return features.cols(); }
    std::size_t semantic_dim() const noexcept { return semantics.cols(); }

    Splits splits() const { return {source_classes, target_classes, val_classes}; }
};

// Throws tcn::Error with a kind specific to the violated invariant.
void validate(const Dataset& d);
// Split and semantics checks only; the feature rows may be empty.
void validate_splits(const Dataset& d);

// Checks labels against a known class universe without the source-only rule;
// used for held-out evaluation rows.
void validate_eval_rows(const Matrix& features, const std::vector<ClassId>& labels,
                        const Dataset& d);

struct DatasetPaths {
    std::filesystem::path features;
    std::filesystem::path semantics;
    std::filesystem::path labels;
    std::filesystem::path splits;

    // features.bin, semantics.bin, labels.txt, splits.txt
    static DatasetPaths in_directory(const std::filesystem::path& dir);
};

Dataset load_dataset(const DatasetPaths& paths);
void save_dataset(const Dataset& d, const std::filesystem::path& dir);

// Rows of `semantics` for the given classes, in order.
Matrix select_rows(const Matrix& m, const std::vector<ClassId>& ids);

}  // namespace tcn
