#pragma once

#include <filesystem>
#include <vector>

#include "tcn/io.hpp"
#include "tcn/matrix.hpp"

namespace tcn {

// K × L source→target class similarities. Rows are nonnegative and sum to 1.
struct SimilarityMatrix {
    Matrix values;
    std::vector<ClassId> source_order;
    std::vector<ClassId> target_order;

    // Row of values for a source class id; throws LabelOutOfRange if unknown.
    std::size_t row_of(ClassId source) const;
};

// Reconstructs every source semantic from the target semantics with ridge
// regression, clamps negative coefficients to zero and normalizes each row.
// A row with no positive coefficient becomes uniform 1/L.
SimilarityMatrix class_similarity(const Matrix& semantics, const std::vector<ClassId>& source_classes,
                                  const std::vector<ClassId>& target_classes, double beta);

// CSV: header "source,<target ids...>", then one row per source class.
void export_similarity(const SimilarityMatrix& s, const std::filesystem::path& path);
SimilarityMatrix read_similarity_csv(const std::filesystem::path& path);

}  // namespace tcn
