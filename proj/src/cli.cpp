#include "tcn/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tcn/config.hpp"
#include "tcn/dataset.hpp"
#include "tcn/error.hpp"
#include "tcn/eval.hpp"
#include "tcn/gradcheck.hpp"
#include "tcn/linalg.hpp"
#include "tcn/network.hpp"
#include "tcn/similarity.hpp"
#include "tcn/synthetic.hpp"
#include "tcn/train.hpp"

namespace fs = std::filesystem;

namespace tcn {

namespace {

// Tracks the files a command writes so that a failing command leaves nothing
// half-written behind.
class OutputDir {
public:
    explicit OutputDir(const fs::path& dir) : dir_(dir) {
        std::error_code ec;
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_, ec);
            if (ec) throw Error(ErrorKind::Io, "cannot create " + dir_.string() + ": " + ec.message());
            created_ = true;
        } else if (!fs::is_directory(dir_)) {
            throw Error(ErrorKind::Io, dir_.string() + " is not a directory");
        }
    }
    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    ~OutputDir() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
        if (created_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    }

    fs::path file(const std::string& name) {
        files_.push_back(dir_ / name);
        return files_.back();
    }

    void commit() { committed_ = true; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
    bool created_ = false;
    bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

struct DataFlags {
    std::string dir;
    std::string features, semantics, labels, splits;
    std::string test_features, test_labels;

    void add_training(CLI::App& app) {
        add_class_info(app);
        app.add_option("--features", features, "Training features (TCNF binary)");
        app.add_option("--labels", labels, "Training labels, one class index per line");
    }

    void add_class_info(CLI::App& app) {
        app.add_option("--data", dir,
                       "Directory holding features.bin, semantics.bin, labels.txt, splits.txt "
                       "(and test_features.bin, test_labels.txt); explicit file flags win");
        app.add_option("--semantics", semantics, "Class semantics (TCNF binary)");
        app.add_option("--splits", splits, "Class splits file (source:/target:/val:)");
    }

    void add_test(CLI::App& app, const std::string& note) {
        app.add_option("--test-features", test_features, "Held-out features (TCNF binary)" + note);
        app.add_option("--test-labels", test_labels, "Held-out labels" + note);
    }

    fs::path resolve(const std::string& explicit_path, const char* default_name) const {
        if (!explicit_path.empty()) return explicit_path;
        if (!dir.empty()) return fs::path(dir) / default_name;
        throw Error(ErrorKind::InvalidArgument,
                    std::string("missing input: pass --data or the flag for ") + default_name);
    }

    DatasetPaths paths() const {
        return {resolve(features, "features.bin"), resolve(semantics, "semantics.bin"),
                resolve(labels, "labels.txt"), resolve(splits, "splits.txt")};
    }

    Dataset class_info() const {
        Dataset d;
        d.semantics = read_matrix(resolve(semantics, "semantics.bin"));
        auto s = read_splits(resolve(splits, "splits.txt"));
        d.source_classes = std::move(s.source);
        d.target_classes = std::move(s.target);
        d.val_classes = std::move(s.val);
        validate_splits(d);
        return d;
    }

    bool has_test() const {
        if (!test_features.empty() || !test_labels.empty()) return true;
        return !dir.empty() && fs::exists(fs::path(dir) / "test_features.bin") &&
               fs::exists(fs::path(dir) / "test_labels.txt");
    }

    EvalSet test_set() const {
        return {read_matrix(resolve(test_features, "test_features.bin")),
                read_labels(resolve(test_labels, "test_labels.txt"))};
    }
};

struct ConfigFlags {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, beta, lr;
    std::optional<std::size_t> epochs, batch_size;

    void add(CLI::App& app, bool training) {
        app.add_option("--config", config_file, "key=value training config file");
        app.add_option("--seed", seed, "Random seed");
        app.add_option("--beta", beta, "Ridge regularizer of the class similarity");
        if (!training) return;
        app.add_option("--alpha", alpha, "Weight of the transfer loss");
        app.add_option("--epochs", epochs, "Training epochs");
        app.add_option("--batch-size", batch_size, "Mini-batch size");
        app.add_option("--lr", lr, "Adam learning rate");
    }

    // defaults < config file < flags
    TrainConfig resolve() const {
        TrainConfig c;
        if (!config_file.empty()) c = load_train_config(config_file);
        if (seed) c.seed = *seed;
        if (alpha) c.alpha = *alpha;
        if (beta) c.beta = *beta;
        if (lr) c.learning_rate = *lr;
        if (epochs) c.epochs = *epochs;
        if (batch_size) c.batch_size = *batch_size;
        c.validate();
        return c;
    }
};

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> alphas;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        alphas.push_back(parse_real("--alphas", token));
    }
    if (alphas.empty()) throw Error(ErrorKind::InvalidArgument, "--alphas is empty");
    return alphas;
}

void write_mixtures(const fs::path& path, const SyntheticData& data) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "target";
    for (ClassId s : data.dataset.source_classes) out << ',' << s;
    out << '\n';
    char buf[32];
    for (std::size_t j = 0; j < data.dataset.target_classes.size(); ++j) {
        out << data.dataset.target_classes[j];
        for (double v : data.mixtures.row(j)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::string metrics_line(const GzslMetrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "ts=%.2f tr=%.2f h=%.2f zsl_acc=%.2f", m.ts, m.tr, m.h, m.zsl_acc);
    return buf;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transferable contrastive network toolkit for (generalized) zero-shot learning",
                 "tcn"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic dataset");
    std::string synth_spec, synth_out;
    std::optional<std::uint64_t> synth_seed;
    synth->add_option("--spec", synth_spec, "key=value synthetic spec (K, L, d_a, d_f, ...)");
    synth->add_option("--seed", synth_seed, "Random seed (overrides the spec)");
    synth->add_option("--out", synth_out, "Output directory")->required();

    // similarity
    auto* sim = app.add_subcommand("similarity", "Export the source-to-target class similarity CSV");
    DataFlags sim_data;
    ConfigFlags sim_config;
    std::string sim_out;
    sim_data.add_class_info(*sim);
    sim_config.add(*sim, false);
    sim->add_option("--out", sim_out, "Output directory")->required();

    // train
    auto* tr = app.add_subcommand("train", "Train a model; writes log, checkpoint and config");
    DataFlags train_data;
    ConfigFlags train_config;
    std::string train_out;
    train_data.add_training(*tr);
    train_data.add_test(*tr, " (optional: also writes metrics)");
    train_config.add(*tr, true);
    tr->add_option("--out", train_out, "Output directory")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint under ZSL and GZSL");
    DataFlags eval_data;
    std::string eval_checkpoint, eval_out;
    eval_data.add_class_info(*ev);
    eval_data.add_test(*ev, "");
    ev->add_option("--checkpoint", eval_checkpoint, "TCNP checkpoint")->required();
    ev->add_option("--out", eval_out, "Output directory")->required();

    // sweep
    auto* sw = app.add_subcommand("sweep", "Train and evaluate one model per alpha");
    DataFlags sweep_data;
    ConfigFlags sweep_config;
    std::string sweep_out, sweep_alphas = "0,0.001,0.01,0.1,1";
    sweep_data.add_training(*sw);
    sweep_data.add_test(*sw, "");
    sweep_config.add(*sw, true);
    sw->add_option("--alphas", sweep_alphas, "Comma-separated alpha values")
        ->capture_default_str();
    sw->add_option("--out", sweep_out, "Output directory")->required();

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "Compare backprop against finite differences");
    std::uint64_t gc_seed = 7;
    std::size_t gc_cases = 20;
    double gc_tol = 1e-4;
    gc->add_option("--seed", gc_seed, "Seed for the random tiny configurations")
        ->capture_default_str();
    gc->add_option("--cases", gc_cases, "Number of configurations")->capture_default_str();
    gc->add_option("--tolerance", gc_tol, "Maximum allowed relative error")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << '\n';
        return 64;
    }

    try {
        if (synth->parsed()) {
            SyntheticSpec spec;
            if (!synth_spec.empty()) spec.apply(read_key_values(synth_spec));
            if (synth_seed) spec.seed = *synth_seed;
            const auto data = generate_synthetic(spec);
            OutputDir dir(synth_out);
            const auto paths = DatasetPaths::in_directory(synth_out);
            for (const auto& p : {paths.features, paths.semantics, paths.labels, paths.splits})
                dir.file(p.filename().string());
            save_dataset(data.dataset, synth_out);
            write_matrix(dir.file("test_features.bin"), data.test_features);
            write_labels(dir.file("test_labels.txt"), data.test_labels);
            write_mixtures(dir.file("mixtures.csv"), data);
            std::ostringstream echo;
            echo << "K=" << spec.source_classes << "\nL=" << spec.target_classes
                 << "\nd_a=" << spec.semantic_dim << "\nd_f=" << spec.feature_dim
                 << "\nper_class_n=" << spec.per_class_n << "\ntest_per_class=" << spec.test_per_class
                 << "\nnoise_sigma=" << spec.noise_sigma << "\npurity=" << spec.purity
                 << "\nval_classes=" << spec.val_classes << "\nseed=" << spec.seed << '\n';
            write_text(dir.file("synth_spec.txt"), echo.str());
            dir.commit();
            out << "wrote synthetic dataset to " << synth_out << '\n';
        } else if (sim->parsed()) {
            const auto config = sim_config.resolve();
            const auto d = sim_data.class_info();
            const auto s = class_similarity(d.semantics, d.source_classes, d.target_classes, config.beta);
            OutputDir dir(sim_out);
            export_similarity(s, dir.file("similarity.csv"));
            write_text(dir.file("config.txt"), config.to_key_values());
            dir.commit();
            out << "wrote " << s.values.rows() << "x" << s.values.cols() << " similarity to "
                << sim_out << '\n';
        } else if (tr->parsed()) {
            const auto config = train_config.resolve();
            const auto d = load_dataset(train_data.paths());
            std::optional<EvalSet> test;
            if (train_data.has_test()) test = train_data.test_set();
            OutputDir dir(train_out);
            write_text(dir.file("config.txt"), config.to_key_values());
            const auto report = train(d, config);
            write_train_log(dir.file("train_log.csv"), report);
            save_checkpoint(dir.file("checkpoint.tcnp"), report.params);
            export_similarity(report.similarity, dir.file("similarity.csv"));
            if (test) {
                const auto m = evaluate(report.params, d, test->features, test->labels);
                write_metrics_text(dir.file("metrics.txt"), m);
                write_metrics_json(dir.file("metrics.json"), m);
                out << metrics_line(m) << '\n';
            }
            dir.commit();
            out << "trained " << report.records.size() << " epochs, best epoch "
                << report.best_epoch << ", final loss " << report.records.back().total << '\n';
        } else if (ev->parsed()) {
            const auto params = load_checkpoint(eval_checkpoint);
            const auto d = eval_data.class_info();
            const auto test = eval_data.test_set();
            const auto m = evaluate(params, d, test.features, test.labels);
            OutputDir dir(eval_out);
            write_metrics_text(dir.file("metrics.txt"), m);
            write_metrics_json(dir.file("metrics.json"), m);
            export_scores(dir.file("scores.csv"), sigmoid(contrast_logits(params, test.features, d.semantics)),
                          test.labels);
            dir.commit();
            out << metrics_line(m) << '\n';
        } else if (sw->parsed()) {
            const auto config = sweep_config.resolve();
            const auto alphas = parse_alpha_list(sweep_alphas);
            const auto d = load_dataset(sweep_data.paths());
            const auto test = sweep_data.test_set();
            OutputDir dir(sweep_out);
            write_text(dir.file("config.txt"), config.to_key_values());
            const auto results = alpha_sweep(d, config, alphas, test);
            write_sweep_csv(dir.file("sweep.csv"), results);
            dir.commit();
            for (const auto& r : results) out << "alpha=" << r.alpha << ' ' << metrics_line(r.metrics) << '\n';
        } else if (gc->parsed()) {
            double worst = 0.0;
            for (std::size_t i = 0; i < gc_cases; ++i) {
                worst = std::max(worst, run_gradcheck(random_gradcheck_case(gc_seed, i)).max_rel_error);
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "max_rel_err=%.3e", worst);
            out << buf << '\n';
            if (!(worst < gc_tol)) {
                err << "error: gradcheck_failed: max relative error " << worst << " exceeds "
                    << gc_tol << '\n';
                return 1;
            }
        }
    } catch (const Error& e) {
        err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace tcn
