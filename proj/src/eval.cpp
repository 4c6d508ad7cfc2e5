#include "tcn/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>

#include <json.hpp>

#include "tcn/error.hpp"
#include "tcn/linalg.hpp"

namespace tcn {

std::vector<ClassId> predict(const Matrix& scores, const std::vector<ClassId>& candidates) {
    if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "predict: no candidate classes");
    std::vector<ClassId> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());
    for (ClassId c : sorted) {
        if (c < 0 || static_cast<std::size_t>(c) >= scores.cols()) {
            throw Error(ErrorKind::LabelOutOfRange, "predict: candidate " + std::to_string(c) +
                                                        " outside " + scores.shape_string());
        }
    }
    std::vector<ClassId> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        ClassId best = sorted.front();
        double best_score = scores(i, static_cast<std::size_t>(best));
        for (ClassId c : sorted) {
            const double v = scores(i, static_cast<std::size_t>(c));
            if (v > best_score) {
                best = c;
                best_score = v;
            }
        }
        out[i] = best;
    }
    return out;
}

double per_class_top1(const std::vector<ClassId>& predictions, const std::vector<ClassId>& labels,
                      const std::vector<ClassId>& class_set) {
    if (predictions.size() != labels.size()) {
        throw Error(ErrorKind::DimensionMismatch, "per_class_top1: predictions and labels differ");
    }
    const std::set<ClassId> classes(class_set.begin(), class_set.end());
    std::map<ClassId, std::pair<std::size_t, std::size_t>> tally;  // correct, total
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!classes.contains(labels[i])) continue;
        auto& [correct, total] = tally[labels[i]];
        ++total;
        if (predictions[i] == labels[i]) ++correct;
    }
    if (tally.empty()) {
        throw Error(ErrorKind::InvalidArgument, "per_class_top1: no rows for any class in the set");
    }
    double sum = 0.0;
    for (const auto& [cls, ct] : tally) {
        sum += static_cast<double>(ct.first) / static_cast<double>(ct.second);
    }
    return 100.0 * sum / static_cast<double>(tally.size());
}

double harmonic_mean(double ts, double tr) {
    if (ts + tr <= 0.0) return 0.0;
    return 2.0 * ts * tr / (ts + tr);
}

GzslMetrics gzsl_metrics(const Matrix& scores, const std::vector<ClassId>& labels,
                         const std::vector<ClassId>& seen, const std::vector<ClassId>& unseen,
                         const std::vector<ClassId>& search) {
    if (scores.rows() != labels.size()) {
        throw Error(ErrorKind::DimensionMismatch, "metrics: scores and labels differ in rows");
    }
    if (labels.empty()) throw Error(ErrorKind::InvalidArgument, "metrics: empty test set");
    const auto general = predict(scores, search);
    const auto zero_shot = predict(scores, unseen);

    GzslMetrics m;
    const std::set<ClassId> seen_set(seen.begin(), seen.end());
    const std::set<ClassId> unseen_set(unseen.begin(), unseen.end());
    bool has_seen = false, has_unseen = false;
    for (ClassId y : labels) {
        has_seen |= seen_set.contains(y);
        has_unseen |= unseen_set.contains(y);
    }
    if (has_unseen) {
        m.ts = per_class_top1(general, labels, unseen);
        m.zsl_acc = per_class_top1(zero_shot, labels, unseen);
    }
    if (has_seen) m.tr = per_class_top1(general, labels, seen);
    m.h = harmonic_mean(m.ts, m.tr);

    std::map<ClassId, std::pair<std::size_t, std::size_t>> tally;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!seen_set.contains(labels[i]) && !unseen_set.contains(labels[i])) continue;
        auto& [correct, total] = tally[labels[i]];
        ++total;
        if (general[i] == labels[i]) ++correct;
    }
    for (const auto& [cls, ct] : tally) {
        m.per_class[cls] = 100.0 * static_cast<double>(ct.first) / static_cast<double>(ct.second);
    }
    return m;
}

GzslMetrics evaluate(const TcnParams& params, const Dataset& dataset, const Matrix& test_features,
                     const std::vector<ClassId>& test_labels) {
    validate_eval_rows(test_features, test_labels, dataset);
    // Ranking by logits gives the same argmax as ranking the sigmoid scores,
    // without ties from saturation near 1.
    const Matrix logits = contrast_logits(params, test_features, dataset.semantics);
    std::vector<ClassId> search = dataset.source_classes;
    search.insert(search.end(), dataset.target_classes.begin(), dataset.target_classes.end());
    return gzsl_metrics(logits, test_labels, dataset.source_classes, dataset.target_classes, search);
}

void write_metrics_text(const std::filesystem::path& path, const GzslMetrics& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << std::setprecision(17);
    out << "ts=" << m.ts << "\ntr=" << m.tr << "\nh=" << m.h << "\nzsl_acc=" << m.zsl_acc << '\n';
    for (const auto& [cls, acc] : m.per_class) out << "class." << cls << '=' << acc << '\n';
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void write_metrics_json(const std::filesystem::path& path, const GzslMetrics& m) {
    nlohmann::ordered_json j;
    j["ts"] = m.ts;
    j["tr"] = m.tr;
    j["h"] = m.h;
    j["zsl_acc"] = m.zsl_acc;
    j["per_class"] = nlohmann::ordered_json::object();
    for (const auto& [cls, acc] : m.per_class) j["per_class"][std::to_string(cls)] = acc;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

GzslMetrics read_metrics_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
    GzslMetrics m;
    try {
        const auto j = nlohmann::json::parse(in);
        m.ts = j.at("ts").get<double>();
        m.tr = j.at("tr").get<double>();
        m.h = j.at("h").get<double>();
        m.zsl_acc = j.at("zsl_acc").get<double>();
        for (const auto& [key, value] : j.at("per_class").items()) {
            m.per_class[std::stoi(key)] = value.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, path.string() + ": " + e.what());
    }
    return m;
}

void export_scores(const std::filesystem::path& path, const Matrix& scores,
                   const std::vector<ClassId>& labels) {
    if (scores.rows() != labels.size()) {
        throw Error(ErrorKind::DimensionMismatch, "export_scores: rows and labels differ");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "row,label";
    for (std::size_t c = 0; c < scores.cols(); ++c) out << ',' << c;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        out << i << ',' << labels[i];
        for (double v : scores.row(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace tcn
