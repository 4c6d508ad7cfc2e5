#include "tcn/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tcn/dataset.hpp"
#include "tcn/error.hpp"
#include "tcn/linalg.hpp"

namespace tcn {

std::size_t SimilarityMatrix::row_of(ClassId source) const {
    const auto it = std::find(source_order.begin(), source_order.end(), source);
    if (it == source_order.end()) {
        throw Error(ErrorKind::LabelOutOfRange,
                    "class " + std::to_string(source) + " is not a source class of the similarity");
    }
    return static_cast<std::size_t>(it - source_order.begin());
}

SimilarityMatrix class_similarity(const Matrix& semantics, const std::vector<ClassId>& source_classes,
                                  const std::vector<ClassId>& target_classes, double beta) {
    if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "similarity: beta must be positive");
    if (source_classes.empty() || target_classes.empty()) {
        throw Error(ErrorKind::InvalidArgument, "similarity: empty source or target list");
    }
    // Columns of the design matrix are the target semantics.
    const Matrix design = transpose(select_rows(semantics, target_classes));
    const Matrix sources = select_rows(semantics, source_classes);
    const std::size_t l = target_classes.size();

    SimilarityMatrix out{Matrix(source_classes.size(), l), source_classes, target_classes};
    for (std::size_t k = 0; k < source_classes.size(); ++k) {
        Matrix b(sources.cols(), 1);
        std::copy(sources.row(k).begin(), sources.row(k).end(), b.values().begin());
        const Matrix coeff = ridge_solve(design, b, beta);

        auto row = out.values.row(k);
        double total = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            row[j] = std::max(0.0, coeff(j, 0));
            total += row[j];
        }
        if (total > 0.0) {
            for (double& v : row) v /= total;
        } else {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(l));
        }
    }
    return out;
}

void export_similarity(const SimilarityMatrix& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "source";
    for (ClassId t : s.target_order) out << ',' << t;
    out << '\n';
    char buf[32];
    for (std::size_t k = 0; k < s.source_order.size(); ++k) {
        out << s.source_order[k];
        for (double v : s.values.row(k)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

SimilarityMatrix read_similarity_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, path.string() + ": empty file");
    const auto header = split(line);
    if (header.empty() || header[0] != "source") {
        throw Error(ErrorKind::Format, path.string() + ": missing 'source' header");
    }
    SimilarityMatrix s;
    for (std::size_t j = 1; j < header.size(); ++j) s.target_order.push_back(std::stoi(header[j]));
    std::vector<double> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::Format, path.string() + ": ragged row");
        }
        s.source_order.push_back(std::stoi(cells[0]));
        for (std::size_t j = 1; j < cells.size(); ++j) data.push_back(std::stod(cells[j]));
    }
    s.values = Matrix(s.source_order.size(), s.target_order.size(), std::move(data));
    return s;
}

}  // namespace tcn
