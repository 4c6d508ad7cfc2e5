#include "tcn/dataset.hpp"

#include <algorithm>
#include <set>

#include "tcn/error.hpp"

namespace tcn {

namespace {

void check_class_rows(const std::vector<ClassId>& ids, const Matrix& semantics, const char* split) {
    for (ClassId id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= semantics.rows()) {
            throw Error(ErrorKind::LabelOutOfRange,
                        std::string(split) + " class " + std::to_string(id) +
                            " has no semantic row (semantics has " +
                            std::to_string(semantics.rows()) + " rows)");
        }
    }
}

void check_unique(const std::vector<ClassId>& ids, const char* split) {
    std::set<ClassId> seen;
    for (ClassId id : ids) {
        if (!seen.insert(id).second) {
            throw Error(ErrorKind::InvariantViolation,
                        std::string(split) + " split lists class " + std::to_string(id) + " twice");
        }
    }
}

bool contains(const std::vector<ClassId>& ids, ClassId id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

void validate_splits(const Dataset& d) {
    if (d.source_classes.empty() || d.target_classes.empty()) {
        throw Error(ErrorKind::InvariantViolation, "source and target splits must be nonempty");
    }
    check_unique(d.source_classes, "source");
    check_unique(d.target_classes, "target");
    check_unique(d.val_classes, "val");
    for (ClassId id : d.source_classes) {
        if (contains(d.target_classes, id)) {
            throw Error(ErrorKind::OverlappingSplits,
                        "class " + std::to_string(id) + " is both source and target");
        }
    }
    for (ClassId id : d.val_classes) {
        if (!contains(d.source_classes, id)) {
            throw Error(ErrorKind::InvariantViolation,
                        "val class " + std::to_string(id) + " is not a source class");
        }
    }
    check_class_rows(d.source_classes, d.semantics, "source");
    check_class_rows(d.target_classes, d.semantics, "target");
    if (!d.semantics.all_finite()) {
        throw Error(ErrorKind::InvariantViolation, "non-finite semantic values");
    }
}

void validate(const Dataset& d) {
    validate_splits(d);
    if (d.features.rows() != d.labels.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "features have " + std::to_string(d.features.rows()) + " rows but labels have " +
                        std::to_string(d.labels.size()));
    }
    if (d.features.rows() == 0) {
        throw Error(ErrorKind::InvariantViolation, "dataset has no training rows");
    }
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        const ClassId y = d.labels[i];
        if (contains(d.target_classes, y)) {
            throw Error(ErrorKind::InvariantViolation,
                        "training row " + std::to_string(i) + " is labeled with target class " +
                            std::to_string(y));
        }
        if (!contains(d.source_classes, y)) {
            throw Error(ErrorKind::LabelOutOfRange, "training row " + std::to_string(i) +
                                                        " references unknown class " +
                                                        std::to_string(y));
        }
    }
    if (!d.features.all_finite()) {
        throw Error(ErrorKind::InvariantViolation, "non-finite feature values");
    }
}

void validate_eval_rows(const Matrix& features, const std::vector<ClassId>& labels,
                        const Dataset& d) {
    if (features.rows() != labels.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "test features have " + std::to_string(features.rows()) +
                        " rows but labels have " + std::to_string(labels.size()));
    }
    if (features.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty test set");
    if (features.cols() != d.feature_dim() && d.features.rows() > 0) {
        throw Error(ErrorKind::DimensionMismatch,
                    "test features are " + features.shape_string() + " but training features are " +
                        d.features.shape_string());
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!contains(d.source_classes, labels[i]) && !contains(d.target_classes, labels[i])) {
            throw Error(ErrorKind::LabelOutOfRange, "test row " + std::to_string(i) +
                                                        " references unknown class " +
                                                        std::to_string(labels[i]));
        }
    }
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
    return {dir / "features.bin", dir / "semantics.bin", dir / "labels.txt", dir / "splits.txt"};
}

Dataset load_dataset(const DatasetPaths& paths) {
    Dataset d;
    d.features = read_matrix(paths.features);
    d.semantics = read_matrix(paths.semantics);
    d.labels = read_labels(paths.labels);
    auto splits = read_splits(paths.splits);
    d.source_classes = std::move(splits.source);
    d.target_classes = std::move(splits.target);
    d.val_classes = std::move(splits.val);
    validate(d);
    return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    const auto paths = DatasetPaths::in_directory(dir);
    write_matrix(paths.features, d.features);
    write_matrix(paths.semantics, d.semantics);
    write_labels(paths.labels, d.labels);
    write_splits(paths.splits, d.splits());
}

Matrix select_rows(const Matrix& m, const std::vector<ClassId>& ids) {
    Matrix out(ids.size(), m.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= m.rows()) {
            throw Error(ErrorKind::LabelOutOfRange,
                        "row " + std::to_string(ids[i]) + " outside " + m.shape_string());
        }
        const auto src = m.row(static_cast<std::size_t>(ids[i]));
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace tcn
