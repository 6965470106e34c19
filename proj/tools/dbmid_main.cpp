#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbmid/checkpoint.hpp"
#include "dbmid/classifier.hpp"
#include "dbmid/csv.hpp"
#include "dbmid/dataset.hpp"
#include "dbmid/deconv.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/harness.hpp"
#include "dbmid/image_io.hpp"
#include "dbmid/network.hpp"
#include "dbmid/pipeline.hpp"
#include "dbmid/plot.hpp"
#include "dbmid/rng.hpp"
#include "dbmid/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalArgs {
    std::uint64_t seed = 0;
    bool verbose = false;
    std::string config_path;
    int workers = int(std::max(1u, std::thread::hardware_concurrency()));
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dbmid::ConfigError("cannot open config file " + path);
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw dbmid::ConfigError("config file must hold a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw dbmid::ConfigError(path + ": " + e.what());
    }
}

// Explicit flags win over --config file values.
template <typename T>
void config_fill(const CLI::Option* opt, const json& cfg, const char* key, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    if (!cfg.contains(key)) return;
    try {
        target = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw dbmid::ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::string resolve_manifest(const std::string& data) {
    if (fs::is_directory(data)) return dbmid::manifest_path(data);
    return data;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dbmid::IoError("cannot write " + path);
    out << text;
    if (!out) throw dbmid::IoError("short write to " + path);
}

dbmid::PipelineConfig pipeline_from_json(const std::string& path) {
    const json j = load_config(path);
    dbmid::PipelineConfig pc;
    const auto need = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_string()) {
            throw dbmid::ConfigError(path + ": pipeline config needs string field '" +
                                     key + "'");
        }
        std::string p = j.at(key).get<std::string>();
        // Checkpoint paths resolve against the config file's directory.
        if (!p.empty() && fs::path(p).is_relative()) {
            p = (fs::path(path).parent_path() / p).string();
        }
        return p;
    };
    pc.classifier_checkpoint = need("classifier");
    pc.defocus_checkpoint = need("defocus");
    pc.motion_checkpoint = need("motion");
    return pc;
}

dbmid::EncoderDecoderNet load_role_net(const std::string& path, const std::string& role) {
    dbmid::ModelWeights w = dbmid::load_checkpoint(path);
    if (w.role != role) {
        throw dbmid::ConfigError("checkpoint " + path + " has role '" + w.role +
                                 "', expected '" + role + "'");
    }
    return dbmid::EncoderDecoderNet(std::move(w));
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    std::string out_dir;
    std::string preset = "desk";
    std::uint64_t master_seed = 0;
    int per_class = -1;
    int size = -1;
    std::string phantom;
    CLI::Option *out_opt = nullptr, *preset_opt = nullptr, *seed_opt = nullptr,
                *per_class_opt = nullptr, *size_opt = nullptr, *phantom_opt = nullptr;
};

int run_synth(const GlobalArgs& g, SynthArgs& a, const json& cfg) {
    config_fill(a.out_opt, cfg, "out", a.out_dir);
    config_fill(a.preset_opt, cfg, "preset", a.preset);
    config_fill(a.seed_opt, cfg, "master_seed", a.master_seed);
    config_fill(a.per_class_opt, cfg, "per_class", a.per_class);
    config_fill(a.size_opt, cfg, "size", a.size);
    config_fill(a.phantom_opt, cfg, "phantom", a.phantom);
    if (a.out_dir.empty()) throw dbmid::ConfigError("synth: --out is required");

    dbmid::SynthConfig sc;
    sc.out_dir = a.out_dir;
    sc.seed = a.seed_opt->count() > 0 || cfg.contains("master_seed") ? a.master_seed
                                                                     : g.seed;
    if (a.preset == "desk") {
        // defaults
    } else if (a.preset == "motion-mix") {
        // Interleaves tissue-like and point-like frames so motion models see
        // both streak contexts during training.
        sc.phantom_mix = {dbmid::PhantomKind::Cells, dbmid::PhantomKind::Spots};
    } else if (a.preset == "shifted") {
        sc.noise_min = 0.0;
        sc.noise_max = 0.016;
        sc.contrast_scale = 0.7;
    } else if (a.preset == "paper") {
        sc.per_class = 1000;
        sc.height = sc.width = 256;
    } else {
        throw dbmid::ConfigError("synth: unknown preset '" + a.preset +
                                 "' (desk|motion-mix|shifted|paper)");
    }
    if (a.per_class > 0) sc.per_class = a.per_class;
    if (a.size > 0) sc.height = sc.width = a.size;
    if (!a.phantom.empty()) sc.phantom = dbmid::phantom_kind_from_string(a.phantom);

    const auto records = dbmid::synthesize_dataset(sc);
    if (g.verbose) {
        std::cout << records.size() << " pairs under " << sc.out_dir << "\n";
    }
    std::cout << dbmid::manifest_path(sc.out_dir) << "\n";
    return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
    std::string task;
    std::string data;
    std::string out;
    std::string resume;
    std::string preset = "desk";
    int steps = -1;
    int epochs = -1;
    int batch = -1;
    int patch = -1;
    double lr = -1.0;
    CLI::Option *task_opt = nullptr, *data_opt = nullptr, *out_opt = nullptr,
                *resume_opt = nullptr, *preset_opt = nullptr;
};

int run_train(const GlobalArgs& g, TrainArgs& a, const json& cfg) {
    config_fill(a.task_opt, cfg, "task", a.task);
    config_fill(a.data_opt, cfg, "data", a.data);
    config_fill(a.out_opt, cfg, "out", a.out);
    config_fill(a.resume_opt, cfg, "resume", a.resume);
    config_fill(a.preset_opt, cfg, "preset", a.preset);
    if (a.task.empty() || a.data.empty() || a.out.empty()) {
        throw dbmid::ConfigError("train: --task, --data and --out are required");
    }
    if (a.preset != "desk" && a.preset != "paper") {
        throw dbmid::ConfigError("train: preset must be desk or paper");
    }
    const std::string manifest = resolve_manifest(a.data);

    json meta;
    meta["manifest"] = manifest;
    meta["preset"] = a.preset;
    meta["seed"] = g.seed;

    dbmid::Table log;
    if (a.task == "classifier") {
        if (!a.resume.empty()) {
            throw dbmid::ConfigError("train: --resume is not supported for the classifier");
        }
        dbmid::ClassifierTrainConfig cc;
        cc.seed = g.seed;
        if (a.epochs > 0) cc.epochs = a.epochs;
        if (a.batch > 0) cc.batch_size = a.batch;
        if (a.lr > 0) cc.learning_rate = a.lr;
        const auto result = dbmid::train_classifier(manifest, cc);
        dbmid::save_checkpoint(result.weights, a.out);
        log.header = {"epoch", "loss", "train_acc", "val_acc"};
        for (const auto& e : result.log) {
            log.rows.push_back({dbmid::fmt_int(e.epoch), dbmid::fmt_double(e.loss),
                                dbmid::fmt_double(e.train_acc),
                                dbmid::fmt_double(e.val_acc)});
        }
        meta["role"] = "classifier";
        meta["epochs"] = cc.epochs;
        if (g.verbose && !result.log.empty()) {
            std::cout << "final val_acc " << result.log.back().val_acc << "\n";
        }
    } else if (a.task == "defocus" || a.task == "motion") {
        dbmid::TrainConfig tc;
        if (a.preset == "paper") tc = dbmid::TrainConfig::paper_preset();
        tc.seed = g.seed;
        if (a.steps >= 0) tc.max_steps = a.steps;
        if (a.batch > 0) tc.batch_size = a.batch;
        if (a.patch > 0) tc.patch_size = a.patch;
        if (a.lr > 0) tc.learning_rate = a.lr;

        dbmid::ModelWeights init;
        const bool warm = !a.resume.empty();
        if (warm) {
            init = dbmid::load_checkpoint(a.resume);
            if (init.role != a.task) {
                throw dbmid::ConfigError("resume checkpoint role '" + init.role +
                                         "' does not match task '" + a.task + "'");
            }
        } else {
            const auto nc = a.preset == "paper" ? dbmid::NetworkConfig::paper()
                                                : dbmid::NetworkConfig::desk();
            init = dbmid::EncoderDecoderNet::build(
                nc, dbmid::Rng::mix(g.seed, a.task == "motion" ? 2 : 1), a.task);
        }
        const auto result = warm ? dbmid::fine_tune(std::move(init), manifest, tc)
                                 : dbmid::train(std::move(init), manifest, tc);
        dbmid::save_checkpoint(result.weights, a.out);
        log.header = {"step", "loss"};
        for (const auto& s : result.log) {
            log.rows.push_back({dbmid::fmt_int(s.step), dbmid::fmt_double(s.loss)});
        }
        meta["role"] = a.task;
        meta["steps"] = tc.max_steps;
        meta["warm_start"] = warm;
        if (warm) meta["resumed_from"] = a.resume;
        if (g.verbose && !result.log.empty()) {
            std::cout << "final loss " << result.log.back().loss << "\n";
        }
    } else {
        throw dbmid::ConfigError("train: task must be defocus, motion or classifier");
    }

    dbmid::write_csv(a.out + ".log.csv", log);
    write_text_file(a.out + ".meta.json", meta.dump(2) + "\n");
    std::cout << a.out << "\n";
    return 0;
}

// ------------------------------------------------------------- classify ----

int run_classify(const GlobalArgs& g, const std::string& model, const std::string& input,
                 bool as_json) {
    dbmid::ModelWeights w = dbmid::load_checkpoint(model);
    if (w.role != "classifier") {
        throw dbmid::ConfigError("classify expects a classifier checkpoint, got role '" +
                                 w.role + "'");
    }
    const dbmid::ClassifierNet net(std::move(w));
    const auto [cls, scores] = net.classify_image(dbmid::load_image(input));
    if (as_json) {
        json j;
        j["class"] = dbmid::to_string(cls);
        j["scores"] = scores;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << dbmid::to_string(cls) << "\n";
        if (g.verbose) {
            for (int c = 0; c < dbmid::kNumBlurClasses; ++c) {
                std::cout << "  " << dbmid::to_string(dbmid::BlurClass(c)) << " "
                          << scores[size_t(c)] << "\n";
            }
        }
    }
    return 0;
}

// --------------------------------------------------------------- deblur ----

struct DeblurArgs {
    std::string pipeline;
    std::string input;
    std::string output;
    std::string report;
    std::string method = "dbmid";
    std::string force_class;
    int iterations = 30;
    int kernel_size = 15;
};

int run_deblur(const GlobalArgs& g, const DeblurArgs& a) {
    const dbmid::Image input = dbmid::load_image(a.input);
    if (a.method == "dbmid") {
        if (a.pipeline.empty()) {
            throw dbmid::ConfigError("deblur: --pipeline is required for the dbmid method");
        }
        dbmid::PipelineConfig pc = pipeline_from_json(a.pipeline);
        if (!a.force_class.empty()) {
            pc.force_class = dbmid::blur_class_from_string(a.force_class);
        }
        const dbmid::Pipeline pipeline(pc);
        const auto [out, report] = pipeline.deblur(input);
        dbmid::save_image(out, a.output);
        if (!a.report.empty()) write_text_file(a.report, report.to_json_string() + "\n");
        if (g.verbose) {
            std::cout << "classified " << dbmid::to_string(report.predicted_class) << "\n";
        }
    } else if (a.method == "blind-deconv") {
        dbmid::DeconvConfig dc;
        dc.iterations = a.iterations;
        dc.kernel_size_guess = a.kernel_size;
        const auto [out, kernel] = dbmid::blind_deconvolve(input, dc);
        dbmid::save_image(out, a.output);
        if (!a.report.empty()) {
            json j;
            j["method"] = "blind-deconv";
            j["iterations"] = dc.iterations;
            j["kernel_size_guess"] = dc.kernel_size_guess;
            j["estimated_kernel_sum"] = kernel.sum();
            write_text_file(a.report, j.dump(2) + "\n");
        }
    } else {
        throw dbmid::ConfigError("deblur: method must be dbmid or blind-deconv");
    }
    return 0;
}

// ----------------------------------------------------------------- bench ----

int run_bench(const GlobalArgs& g, const std::string& pipeline,
              const std::vector<int>& sizes, int reps, int warmup, int iterations,
              const std::string& out) {
    const dbmid::PipelineConfig pc = pipeline_from_json(pipeline);
    const auto defocus = load_role_net(pc.defocus_checkpoint, "defocus");
    const auto motion = load_role_net(pc.motion_checkpoint, "motion");
    dbmid::RuntimeBenchConfig rc;
    if (!sizes.empty()) rc.sizes = sizes;
    rc.reps = reps;
    rc.warmup = warmup;
    rc.blind.iterations = iterations;
    rc.seed = g.seed;
    const dbmid::Table t = dbmid::benchmark_runtime(defocus, motion, rc);
    dbmid::write_csv(out, t);
    std::cout << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dbmid: blur classification and deblurring for microscopy images"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --seed and friends appear after the subcommand

    GlobalArgs g;
    app.add_option("--seed", g.seed, "Master seed for subcommands that draw randomness");
    app.add_flag("--verbose", g.verbose, "Chattier progress output");
    app.add_option("--config", g.config_path,
                   "JSON file with defaults; explicit flags override it");
    app.add_option("--workers", g.workers, "Worker threads for sweeps");

    auto* synth = app.add_subcommand("synth", "Synthesize a paired blur dataset");
    SynthArgs sa;
    sa.out_opt = synth->add_option("--out", sa.out_dir, "Output dataset directory");
    sa.preset_opt =
        synth->add_option("--preset", sa.preset, "desk|motion-mix|shifted|paper");
    sa.seed_opt = synth->add_option("--master-seed", sa.master_seed,
                                    "Dataset seed (defaults to --seed)");
    sa.per_class_opt = synth->add_option("--per-class", sa.per_class, "Pairs per class");
    sa.size_opt = synth->add_option("--size", sa.size, "Square frame side in pixels");
    sa.phantom_opt =
        synth->add_option("--phantom", sa.phantom, "cells|usaf|texture|spots");

    auto* train = app.add_subcommand("train", "Train a classifier or deblurring network");
    TrainArgs ta;
    ta.task_opt = train->add_option("--task", ta.task, "defocus|motion|classifier");
    ta.data_opt = train->add_option("--data", ta.data, "Dataset directory or manifest.csv");
    ta.out_opt = train->add_option("--out", ta.out, "Checkpoint path to write");
    ta.resume_opt = train->add_option("--resume", ta.resume, "Warm-start checkpoint");
    ta.preset_opt = train->add_option("--preset", ta.preset, "desk|paper");
    train->add_option("--steps", ta.steps, "Training steps (networks)");
    train->add_option("--epochs", ta.epochs, "Training epochs (classifier)");
    train->add_option("--batch", ta.batch, "Batch size");
    train->add_option("--patch", ta.patch, "Training patch size (networks)");
    train->add_option("--lr", ta.lr, "Learning rate");

    auto* classify = app.add_subcommand("classify", "Classify the blur type of an image");
    std::string cl_model, cl_input;
    bool cl_json = false;
    classify->add_option("--model", cl_model, "Classifier checkpoint")->required();
    classify->add_option("--input", cl_input, "Image path")->required();
    classify->add_flag("--json", cl_json, "Emit JSON with class and scores");

    auto* deblur = app.add_subcommand("deblur", "Deblur one image");
    DeblurArgs da;
    deblur->add_option("--pipeline", da.pipeline,
                       "Pipeline JSON with classifier/defocus/motion checkpoint paths");
    deblur->add_option("--input", da.input, "Input image")->required();
    deblur->add_option("--output", da.output, "Output image")->required();
    deblur->add_option("--report", da.report, "Write a JSON report here");
    deblur->add_option("--method", da.method, "dbmid|blind-deconv");
    deblur->add_option("--force-class", da.force_class,
                       "Route as this class regardless of the classifier");
    deblur->add_option("--iterations", da.iterations, "Blind-deconv iterations");
    deblur->add_option("--kernel-size", da.kernel_size, "Blind-deconv kernel guess");

    auto* eval = app.add_subcommand("eval", "Run an experiment config");
    std::string ev_experiment, ev_out;
    eval->add_option("--experiment", ev_experiment, "Experiment JSON config")->required();
    eval->add_option("--out", ev_out, "Output directory for CSVs")->required();

    auto* bench = app.add_subcommand("bench", "Runtime comparison dbmid vs blind deconvolution");
    std::string be_pipeline, be_out;
    std::vector<int> be_sizes;
    int be_reps = 3, be_warmup = 2, be_iters = 30;
    bench->add_option("--pipeline", be_pipeline, "Pipeline JSON")->required();
    bench->add_option("--sizes", be_sizes, "Image sides, e.g. 256,512")->delimiter(',');
    bench->add_option("--reps", be_reps, "Timed repetitions per method");
    bench->add_option("--warmup", be_warmup, "Discarded leading runs");
    bench->add_option("--iterations", be_iters, "Blind-deconv iterations");
    bench->add_option("--out", be_out, "Output CSV path")->required();

    auto* plot = app.add_subcommand("plot", "Render a CSV as a line chart or heatmap");
    std::string pl_csv, pl_kind = "line", pl_out, pl_title;
    plot->add_option("--csv", pl_csv, "Harness CSV path")->required();
    plot->add_option("--kind", pl_kind, "line|heatmap");
    plot->add_option("--out", pl_out, "Output image (.png/.tif)")->required();
    plot->add_option("--title", pl_title, "Chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const json cfg = load_config(g.config_path);
        if (synth->parsed()) return run_synth(g, sa, cfg);
        if (train->parsed()) return run_train(g, ta, cfg);
        if (classify->parsed()) return run_classify(g, cl_model, cl_input, cl_json);
        if (deblur->parsed()) return run_deblur(g, da);
        if (eval->parsed()) {
            for (const auto& path :
                 dbmid::run_experiment_file(ev_experiment, ev_out, g.workers)) {
                std::cout << path << "\n";
            }
            return 0;
        }
        if (bench->parsed()) {
            return run_bench(g, be_pipeline, be_sizes, be_reps, be_warmup, be_iters, be_out);
        }
        if (plot->parsed()) {
            dbmid::PlotOptions options;
            options.title = pl_title;
            dbmid::plot_csv(pl_csv, pl_kind, pl_out, options);
            std::cout << pl_out << "\n";
            return 0;
        }
        throw dbmid::ConfigError("no subcommand given");
    } catch (const dbmid::NumericError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const dbmid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
