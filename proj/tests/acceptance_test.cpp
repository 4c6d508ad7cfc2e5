// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// gating criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tcn/eval.hpp"
#include "tcn/gradcheck.hpp"
#include "tcn/linalg.hpp"
#include "tcn/similarity.hpp"
#include "tcn/synthetic.hpp"
#include "tcn/train.hpp"

using namespace tcn;
namespace fs = std::filesystem;

namespace {

constexpr double kTransferMargin = 20.0;  // H points over the alpha = 0 baseline
constexpr double kZslFloor = 90.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli_process(const std::string& args) {
    const std::string cmd = std::string(TCN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

SyntheticSpec transfer_spec() {
    SyntheticSpec spec;
    spec.source_classes = 8;
    spec.target_classes = 4;
    spec.semantic_dim = 16;
    spec.feature_dim = 32;
    spec.per_class_n = 50;
    spec.noise_sigma = 0.1;
    spec.seed = 1;
    return spec;
}

TrainConfig experiment_config() {
    TrainConfig c;
    c.epochs = 100;
    c.learning_rate = 1e-3;
    return c;
}

Outcome harmonic_rows() {
    struct Row { const char* name; double ts, tr, h; };
    const Row rows[] = {{"APY", 24.1, 64.0, 35.1}, {"AWA1", 49.4, 76.5, 60.0}, {"AWA2", 61.2, 65.8, 63.4},
                        {"CUB", 52.6, 52.0, 52.3}, {"SUN", 31.2, 37.3, 34.0}};
    Outcome o{true, ""};
    std::string off;
    for (const Row& r : rows) {
        const double h = harmonic_mean(r.ts, r.tr);
        if (std::abs(h - r.h) > 0.05) {
            o.pass = false;
            off += std::string(" ") + r.name + fmt("(%.2f vs %.1f)", h, r.h);
        }
        o.detail += std::string(r.name) + fmt("=%.2f ", h);
    }
    if (!off.empty()) o.detail += "; outside 0.05:" + off;
    return o;
}

Outcome gradient_exactness() {
    double worst = 0.0;
    int zero_alpha = 0, nonzero_alpha = 0;
    const std::size_t cases = 24;
    for (std::size_t i = 0; i < cases; ++i) {
        const GradcheckCase c = random_gradcheck_case(2024, i);
        (c.alpha == 0.0 ? zero_alpha : nonzero_alpha)++;
        worst = std::max(worst, run_gradcheck(c, 1e-5).max_rel_error);
    }
    return {worst < 1e-4 && zero_alpha > 0 && nonzero_alpha > 0,
            fmt("%.0f configs, max rel err %.3e", static_cast<double>(cases), worst)};
}

Outcome ridge_oracle() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> dim(1, 10);
    std::uniform_real_distribution<double> log_beta(-3.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t p = dim(rng);
        const std::size_t n = dim(rng) + 2;
        const double beta = std::pow(10.0, log_beta(rng));
        const Matrix a = oracle::random_matrix(n, p, rng);
        const Matrix b = oracle::random_matrix(n, 1, rng);
        const Matrix s = ridge_solve(a, b, beta);
        const auto ref = oracle::ridge_descent(a, b, beta);
        for (std::size_t j = 0; j < p; ++j) worst = std::max(worst, std::abs(s(j, 0) - ref[j]));
    }
    return {worst <= 1e-6, fmt("50 instances, max coefficient gap %.3e", worst)};
}

Outcome similarity_contract() {
    std::mt19937_64 rng(5);
    double worst_sum = 0.0;
    bool in_range = true;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix sem = oracle::random_matrix(9, 1 + trial % 12, rng);
        const auto s = class_similarity(sem, {0, 1, 2, 3, 4}, {5, 6, 7, 8}, trial % 2 ? 1e-3 : 10.0);
        for (std::size_t k = 0; k < s.values.rows(); ++k) {
            double sum = 0.0;
            for (double v : s.values.row(k)) {
                in_range = in_range && v >= 0.0 && v <= 1.0;
                sum += v;
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
    }
    double min_mass = 1.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SyntheticSpec spec = transfer_spec();
        spec.noise_sigma = 0.0;
        spec.purity = 1.0;
        spec.seed = seed;
        const auto data = generate_synthetic(spec);
        const auto& d = data.dataset;
        const auto s = class_similarity(d.semantics, d.source_classes, d.target_classes, 1e-3);
        for (std::size_t k = 0; k < d.source_classes.size(); ++k) {
            double mass = 0.0;
            bool covered = false;
            for (std::size_t j = 0; j < d.target_classes.size(); ++j) {
                if (data.mixtures(j, k) > 0.0) {
                    mass += s.values(k, j);
                    covered = true;
                }
            }
            if (covered) min_mass = std::min(min_mass, mass);
        }
    }
    return {in_range && worst_sum <= 1e-9 && min_mass >= 0.8,
            fmt("max |row sum - 1| %.1e, min support mass %.4f", worst_sum, min_mass)};
}

struct SweepOutcome {
    Outcome transfer;
    Outcome shape;
};

SweepOutcome transfer_and_shape() {
    const auto data = generate_synthetic(transfer_spec());
    const EvalSet test{data.test_features, data.test_labels};
    const std::vector<double> alphas{0.0, 0.001, 0.01, 0.1, 1.0};
    const auto results = alpha_sweep(data.dataset, experiment_config(), alphas, test);

    const double base_h = results[0].metrics.h;
    double best_h = -1.0, best_alpha = 0.0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].metrics.h > best_h) {
            best_h = results[i].metrics.h;
            best_alpha = results[i].alpha;
        }
    }
    SweepOutcome o;
    o.transfer = {best_h - base_h >= kTransferMargin,
                  fmt("H(alpha=0)=%.2f, best H=%.2f at alpha=%g", base_h, best_h, best_alpha) +
                      fmt(", margin %.1f", kTransferMargin)};
    bool monotone = true;
    std::string trs;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (i > 1 && results[i].metrics.tr > results[i - 1].metrics.tr) monotone = false;
        trs += fmt("%.2f", results[i].metrics.tr) + (i + 1 < results.size() ? " " : "");
    }
    o.shape = {monotone, "tr over alpha {0.001,0.01,0.1,1}: " + trs};
    return o;
}

Outcome zsl_sanity() {
    SyntheticSpec spec = transfer_spec();
    spec.noise_sigma = 0.0;
    const auto data = generate_synthetic(spec);
    const TrainReport r = train(data.dataset, experiment_config());
    const GzslMetrics m = evaluate(r.params, data.dataset, data.test_features, data.test_labels);
    return {m.zsl_acc >= kZslFloor, fmt("zsl_acc %.2f (floor %.0f)", m.zsl_acc, kZslFloor)};
}

struct CliFixture {
    fs::path root;
    fs::path data;
    CliFixture() {
        std::random_device rd;
        root = fs::temp_directory_path() / ("tcn_acceptance_" + std::to_string(rd()));
        fs::create_directories(root);
        data = root / "data";
        std::ofstream(root / "spec.txt") << "K=6\nL=3\nd_a=8\nd_f=12\nper_class_n=20\ntest_per_class=8\nseed=4\n";
    }
    ~CliFixture() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }
    bool synth() { return run_cli_process("synth --spec " + quoted(root / "spec.txt") + " --out " + quoted(data)) == 0; }
    int train(const fs::path& out, const fs::path& test_labels) {
        return run_cli_process("train --data " + quoted(data) + " --test-features " +
                               quoted(data / "test_features.bin") + " --test-labels " + quoted(test_labels) +
                               " --epochs 5 --lr 1e-3 --seed 11 --out " + quoted(out));
    }
};

Outcome determinism(CliFixture& fx) {
    if (fx.train(fx.root / "run1", fx.data / "test_labels.txt") != 0 ||
        fx.train(fx.root / "run2", fx.data / "test_labels.txt") != 0)
        return {false, "train command failed"};
    bool same = true;
    for (const char* f : {"checkpoint.tcnp", "train_log.csv", "metrics.json", "similarity.csv", "config.txt"})
        same = same && slurp(fx.root / "run1" / f) == slurp(fx.root / "run2" / f) &&
               !slurp(fx.root / "run1" / f).empty();
    return {same, same ? "checkpoint, log, metrics, similarity and config byte-identical"
                       : "outputs differ between runs"};
}

Outcome no_leakage(CliFixture& fx) {
    // Rotate every target-class label to another target class.
    const auto labels = read_labels(fx.data / "test_labels.txt");
    const auto splits = read_splits(fx.data / "splits.txt");
    std::vector<ClassId> poisoned = labels;
    std::size_t changed = 0;
    for (ClassId& y : poisoned) {
        const auto it = std::find(splits.target.begin(), splits.target.end(), y);
        if (it == splits.target.end()) continue;
        y = splits.target[(static_cast<std::size_t>(it - splits.target.begin()) + 1) % splits.target.size()];
        ++changed;
    }
    write_labels(fx.root / "poisoned_labels.txt", poisoned);
    if (fx.train(fx.root / "poisoned", fx.root / "poisoned_labels.txt") != 0)
        return {false, "train command failed"};
    const bool same = slurp(fx.root / "run1" / "checkpoint.tcnp") == slurp(fx.root / "poisoned" / "checkpoint.tcnp") &&
                      slurp(fx.root / "run1" / "train_log.csv") == slurp(fx.root / "poisoned" / "train_log.csv");
    return {same && changed > 0,
            fmt("%.0f target labels corrupted, checkpoint ", static_cast<double>(changed)) +
                (same ? "byte-identical" : "changed")};
}

Outcome real_data_path(CliFixture& fx) {
    const char* env = std::getenv("TCN_REAL_DATA");
    fs::path dir = env ? fs::path(env) : fx.data;
    const std::string source = env ? "TCN_REAL_DATA" : "synthetic stand-in";
    const fs::path model = fx.root / "real_model";
    const fs::path eval = fx.root / "real_eval";
    const std::string test = " --test-features " + quoted(dir / "test_features.bin") + " --test-labels " +
                             quoted(dir / "test_labels.txt");
    if (run_cli_process("train --data " + quoted(dir) + " --epochs 2 --out " + quoted(model)) != 0)
        return {false, source + ": train failed"};
    if (run_cli_process("eval --checkpoint " + quoted(model / "checkpoint.tcnp") + " --data " + quoted(dir) +
                        test + " --out " + quoted(eval)) != 0)
        return {false, source + ": eval failed"};
    const std::string report = slurp(eval / "metrics.txt");
    bool complete = true;
    for (const char* key : {"ts=", "tr=", "h=", "zsl_acc=", "class."})
        complete = complete && report.find(key) != std::string::npos;
    return {complete, source + (complete ? ": full metrics report written" : ": report incomplete")};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, bool gating, const std::function<Outcome()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass && gating) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " [" << name << "] " << o.detail
                  << fmt(" (%.1fs)", secs) << (gating ? "" : " [non-gating]") << std::endl;
    };

    report(1, "harmonic mean rows", true, harmonic_rows);
    report(2, "gradient exactness", true, gradient_exactness);
    report(3, "ridge oracle", true, ridge_oracle);
    report(4, "similarity contract", true, similarity_contract);

    SweepOutcome sweep;
    bool sweep_ran = false;
    auto run_sweep = [&] {
        if (!sweep_ran) {
            sweep = transfer_and_shape();
            sweep_ran = true;
        }
    };
    report(5, "transfer effect", true, [&] {
        run_sweep();
        return sweep.transfer;
    });
    report(6, "zsl sanity", true, zsl_sanity);

    CliFixture fx;
    const bool have_data = fx.synth();
    report(7, "determinism", true, [&] {
        return have_data ? determinism(fx) : Outcome{false, "synth command failed"};
    });
    report(8, "no target-label leakage", true, [&] {
        return have_data ? no_leakage(fx) : Outcome{false, "synth command failed"};
    });
    report(9, "alpha sweep shape", true, [&] {
        run_sweep();
        return sweep.shape;
    });
    report(10, "real-data path", false, [&] {
        return have_data ? real_data_path(fx) : Outcome{false, "synth command failed"};
    });

    std::cout << (failures == 0 ? "acceptance: all gating criteria passed" : "acceptance: failures") << std::endl;
    return failures == 0 ? 0 : 1;
}
