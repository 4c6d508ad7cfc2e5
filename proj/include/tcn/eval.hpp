#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "tcn/dataset.hpp"
#include "tcn/network.hpp"

namespace tcn {

// All accuracies are percentages in [0, 100].
struct GzslMetrics {
    double ts = 0.0;       // per-class top-1 on unseen classes, search over all classes
    double tr = 0.0;       // per-class top-1 on seen classes, search over all classes
    double h = 0.0;        // harmonic mean of ts and tr
    double zsl_acc = 0.0;  // per-class top-1 on unseen classes, search over unseen only
    std::map<ClassId, double> per_class;  // generalized-setting accuracy per class
};

// Column index of the largest score among `candidates`, per row. Ties go to
// the lowest index.
std::vector<ClassId> predict(const Matrix& scores, const std::vector<ClassId>& candidates);

// Mean over classes of within-class accuracy, ×100. Rows whose label is not
// in class_set are ignored, and classes without rows are left out of the mean.
double per_class_top1(const std::vector<ClassId>& predictions, const std::vector<ClassId>& labels,
                      const std::vector<ClassId>& class_set);

double harmonic_mean(double ts, double tr);

// Metrics from a score grid whose column index is the class id. `search`
// is the generalized candidate set; seen and unseen partition the rows.
GzslMetrics gzsl_metrics(const Matrix& scores, const std::vector<ClassId>& labels,
                         const std::vector<ClassId>& seen, const std::vector<ClassId>& unseen,
                         const std::vector<ClassId>& search);

// Scores every test row against every class of the dataset and reports
// source classes as seen, target classes as unseen.
GzslMetrics evaluate(const TcnParams& params, const Dataset& dataset, const Matrix& test_features,
                     const std::vector<ClassId>& test_labels);

// Flat key=value report: ts, tr, h, zsl_acc, then class.<id>=<acc> lines.
void write_metrics_text(const std::filesystem::path& path, const GzslMetrics& m);
// {"ts":..,"tr":..,"h":..,"zsl_acc":..,"per_class":{"<id>":..}}
void write_metrics_json(const std::filesystem::path& path, const GzslMetrics& m);
GzslMetrics read_metrics_json(const std::filesystem::path& path);

// CSV of a score grid: header "row,label,<class ids...>".
void export_scores(const std::filesystem::path& path, const Matrix& scores,
                   const std::vector<ClassId>& labels);

}  // namespace tcn
