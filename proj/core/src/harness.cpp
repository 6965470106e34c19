#include "dbmid/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dbmid/blur.hpp"
#include "dbmid/checkpoint.hpp"
#include "dbmid/convolve.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/image_io.hpp"
#include "dbmid/metrics.hpp"
#include "dbmid/parallel.hpp"
#include "dbmid/phantom.hpp"
#include "dbmid/rng.hpp"

namespace fs = std::filesystem;

namespace dbmid {

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd r;
    r.n = int(values.size());
    if (values.empty()) return r;
    double s = 0.0;
    for (double v : values) s += v;
    r.mean = s / r.n;
    if (r.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.mean) * (v - r.mean);
        r.std = std::sqrt(ss / (r.n - 1));
    }
    return r;
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * double(n - 1);
    const size_t lo = size_t(pos);
    const double frac = pos - double(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) throw ArgumentError("median of empty set");
    std::sort(values.begin(), values.end());
    return quantile(values, 0.5);
}

double iqr(std::vector<double> values) {
    if (values.empty()) throw ArgumentError("iqr of empty set");
    std::sort(values.begin(), values.end());
    return quantile(values, 0.75) - quantile(values, 0.25);
}

namespace {

void add_noise(Image& img, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) {
        clamp01(img);
        return;
    }
    Rng rng(seed);
    for (float& v : img.data) {
        v = float(std::clamp(double(v) + sigma * rng.gaussian(), 0.0, 1.0));
    }
}

void push_row(Table& t, std::vector<std::string> row) { t.rows.push_back(std::move(row)); }

// z offset whose defocus disk has this radius (inverse of the 0.32 px/um map).
double z_for_radius(double radius_px) { return radius_px / 0.32; }

}  // namespace

void DefocusSweepConfig::validate() const {
    if (radii.empty()) throw ConfigError("defocus sweep: radii must be non-empty");
    for (double r : radii) {
        if (r < 0.0 || !std::isfinite(r))
            throw ConfigError("defocus sweep: radii must be finite and >= 0");
    }
    if (n_images < 1) throw ConfigError("defocus sweep: n_images must be >= 1");
    if (height < 64 || width < 64) throw ConfigError("defocus sweep: size must be >= 64");
    if (noise_sigma < 0.0) throw ConfigError("defocus sweep: noise_sigma must be >= 0");
    if (contrast_scale <= 0.0 || contrast_scale > 2.0)
        throw ConfigError("defocus sweep: contrast_scale must be in (0, 2]");
}

Table run_defocus_sweep(const std::vector<NamedNet>& models,
                        const DefocusSweepConfig& cfg) {
    cfg.validate();
    if (models.empty()) throw ConfigError("defocus sweep: at least one model");
    for (const auto& [label, net] : models) {
        if (label.empty() || net == nullptr)
            throw ConfigError("defocus sweep: model entries need a label and a network");
    }

    std::vector<Image> sharps(size_t(cfg.n_images));
    parallel_for(cfg.n_images, cfg.workers, [&](int i) {
        Image img = make_phantom(cfg.phantom, cfg.height, cfg.width,
                                 Rng::mix(cfg.seed, std::uint64_t(i)));
        if (cfg.contrast_scale != 1.0) img = scale_contrast(img, cfg.contrast_scale);
        sharps[size_t(i)] = std::move(img);
    });

    Table t;
    t.header = {"radius_px", "z_um", "method", "ssim_mean", "ssim_std", "n"};
    for (size_t p = 0; p < cfg.radii.size(); ++p) {
        const double r = cfg.radii[p];
        std::vector<double> blurred_ssim(size_t(cfg.n_images));
        std::vector<std::vector<double>> model_ssim(
            models.size(), std::vector<double>(size_t(cfg.n_images)));
        parallel_for(cfg.n_images, cfg.workers, [&](int i) {
            const Image& sharp = sharps[size_t(i)];
            Image blurred;
            if (r == 0.0) {
                blurred = sharp;
            } else {
                blurred = convolve_raw(sharp, defocus_kernel(r), Boundary::Reflect);
                add_noise(blurred, cfg.noise_sigma,
                          Rng::mix(Rng::mix(cfg.seed, 1000003 + p), std::uint64_t(i)));
            }
            blurred_ssim[size_t(i)] = ssim(blurred, sharp);
            for (size_t m = 0; m < models.size(); ++m) {
                model_ssim[m][size_t(i)] = ssim(models[m].second->infer(blurred), sharp);
            }
        });
        const auto emit = [&](const std::string& method, const std::vector<double>& v) {
            const MeanStd s = mean_std(v);
            push_row(t, {fmt_double(r), fmt_double(z_for_radius(r)), method,
                         fmt_double(s.mean), fmt_double(s.std), fmt_int(s.n)});
        };
        emit("none", blurred_ssim);
        for (size_t m = 0; m < models.size(); ++m) emit(models[m].first, model_ssim[m]);
    }
    return t;
}

void MotionSweepConfig::validate() const {
    if (lengths.empty()) throw ConfigError("motion sweep: lengths must be non-empty");
    for (int l : lengths) {
        if (l < 1) throw ConfigError("motion sweep: lengths must be >= 1");
        if (l >= std::min(height, width))
            throw ConfigError("motion sweep: length exceeds the image");
    }
    if (directions.empty()) throw ConfigError("motion sweep: directions must be non-empty");
    if (views < 1) throw ConfigError("motion sweep: views must be >= 1");
    if (height < 128 || width < 128) throw ConfigError("motion sweep: size must be >= 128");
    if (spot_spacing < 8) throw ConfigError("motion sweep: spot_spacing must be >= 8");
    if (noise_sigma < 0.0) throw ConfigError("motion sweep: noise_sigma must be >= 0");
}

namespace {

// Half-width of the profile window around each spot. Wide enough to catch a
// 40 px streak plus tails, short enough that a neighbouring spot two grid
// cells away cannot intrude before the half-maximum crossing.
constexpr int kFwhmHalfWindow = 40;

std::vector<std::pair<int, int>> eligible_spots(const SpotField& field, int h, int w) {
    std::vector<std::pair<int, int>> keep;
    for (auto [cy, cx] : field.centers) {
        const int iy = int(std::lround(cy));
        const int ix = int(std::lround(cx));
        if (iy - kFwhmHalfWindow < 0 || iy + kFwhmHalfWindow >= h) continue;
        if (ix - kFwhmHalfWindow < 0 || ix + kFwhmHalfWindow >= w) continue;
        keep.emplace_back(iy, ix);
    }
    return keep;
}

void collect_fwhm(const Image& img, const std::vector<std::pair<int, int>>& spots,
                  MotionDirection dir, std::vector<double>& out) {
    const bool horizontal = dir == MotionDirection::Horizontal;
    for (auto [y, x] : spots) {
        if (auto v = measure_feature_fwhm(img, y, x, horizontal, kFwhmHalfWindow)) {
            out.push_back(*v);
        }
    }
}

}  // namespace

Table run_motion_sweep(const EncoderDecoderNet& motion_net,
                       const MotionSweepConfig& cfg) {
    cfg.validate();

    std::vector<SpotField> fields;
    std::vector<std::vector<std::pair<int, int>>> spots;
    fields.reserve(size_t(cfg.views));
    for (int v = 0; v < cfg.views; ++v) {
        fields.push_back(make_spot_field(cfg.height, cfg.width,
                                         Rng::mix(cfg.seed, 500 + std::uint64_t(v)),
                                         cfg.spot_spacing));
        spots.push_back(eligible_spots(fields.back(), cfg.height, cfg.width));
    }

    Table t;
    t.header = {"length_px", "direction", "method", "fwhm_mean", "fwhm_std", "n"};
    const auto emit = [&](int length, MotionDirection d, const std::string& method,
                          const std::vector<double>& v) {
        const MeanStd s = mean_std(v);
        push_row(t, {fmt_int(length), to_string(d), method, fmt_double(s.mean),
                     fmt_double(s.std), fmt_int(s.n)});
    };

    for (MotionDirection d : cfg.directions) {
        std::vector<double> ref;
        for (int v = 0; v < cfg.views; ++v) {
            collect_fwhm(fields[size_t(v)].image, spots[size_t(v)], d, ref);
        }
        emit(0, d, "in_focus", ref);
    }

    for (size_t p = 0; p < cfg.lengths.size(); ++p) {
        const int length = cfg.lengths[p];
        for (size_t di = 0; di < cfg.directions.size(); ++di) {
            const MotionDirection d = cfg.directions[di];
            std::vector<std::vector<double>> blur_f(size_t(cfg.views));
            std::vector<std::vector<double>> deblur_f(size_t(cfg.views));
            parallel_for(cfg.views, cfg.workers, [&](int v) {
                Image blurred = convolve_raw(fields[size_t(v)].image,
                                             motion_kernel(length, d), Boundary::Reflect);
                add_noise(blurred, cfg.noise_sigma,
                          Rng::mix(Rng::mix(cfg.seed,
                                            9000 + p * cfg.directions.size() + di),
                                   std::uint64_t(v)));
                collect_fwhm(blurred, spots[size_t(v)], d, blur_f[size_t(v)]);
                collect_fwhm(motion_net.infer(blurred), spots[size_t(v)], d,
                             deblur_f[size_t(v)]);
            });
            std::vector<double> blurred_all, deblurred_all;
            for (int v = 0; v < cfg.views; ++v) {
                blurred_all.insert(blurred_all.end(), blur_f[size_t(v)].begin(),
                                   blur_f[size_t(v)].end());
                deblurred_all.insert(deblurred_all.end(), deblur_f[size_t(v)].begin(),
                                     deblur_f[size_t(v)].end());
            }
            emit(length, d, "none", blurred_all);
            emit(length, d, "dl_motion", deblurred_all);
        }
    }
    return t;
}

void MixedGridConfig::validate() const {
    if (radii.empty() || lengths.empty())
        throw ConfigError("mixed grid: radii and lengths must be non-empty");
    for (double r : radii) {
        if (r < 0.0 || !std::isfinite(r))
            throw ConfigError("mixed grid: radii must be finite and >= 0");
    }
    for (int l : lengths) {
        if (l < 0 || l >= std::min(height, width))
            throw ConfigError("mixed grid: lengths must be >= 0 and fit the image");
    }
    if (n_images < 1) throw ConfigError("mixed grid: n_images must be >= 1");
    if (height < 64 || width < 64) throw ConfigError("mixed grid: size must be >= 64");
    if (noise_sigma < 0.0) throw ConfigError("mixed grid: noise_sigma must be >= 0");
}

Table run_mixed_grid(const EncoderDecoderNet& defocus_net,
                     const EncoderDecoderNet& motion_net, const MixedGridConfig& cfg) {
    cfg.validate();

    std::vector<Image> sharps(size_t(cfg.n_images));
    parallel_for(cfg.n_images, cfg.workers, [&](int i) {
        sharps[size_t(i)] = make_phantom(cfg.phantom, cfg.height, cfg.width,
                                         Rng::mix(cfg.seed, std::uint64_t(i)));
    });

    Table t;
    t.header = {"radius_px", "length_px", "surface", "ssim_mean", "n"};
    for (size_t pr = 0; pr < cfg.radii.size(); ++pr) {
        const double r = cfg.radii[pr];
        for (size_t pl = 0; pl < cfg.lengths.size(); ++pl) {
            const int length = cfg.lengths[pl];
            const bool has_r = r > 0.0;
            const bool has_m = length > 1;  // a 1 px streak is the identity
            std::vector<double> s_blur(size_t(cfg.n_images)),
                s_def(size_t(cfg.n_images)), s_mot(size_t(cfg.n_images)),
                s_dbmid(size_t(cfg.n_images));
            parallel_for(cfg.n_images, cfg.workers, [&](int i) {
                const Image& sharp = sharps[size_t(i)];
                Image blurred = sharp;
                if (has_m) {
                    blurred = convolve_raw(blurred, motion_kernel(length, cfg.direction),
                                           Boundary::Reflect);
                }
                if (has_r) {
                    blurred = convolve_raw(blurred, defocus_kernel(r), Boundary::Reflect);
                }
                if (has_r || has_m) {
                    add_noise(blurred, cfg.noise_sigma,
                              Rng::mix(cfg.seed, 7000 + (pr * cfg.lengths.size() + pl) * 1024 +
                                                     std::uint64_t(i)));
                }
                s_blur[size_t(i)] = ssim(blurred, sharp);
                s_def[size_t(i)] = ssim(defocus_net.infer(blurred), sharp);
                s_mot[size_t(i)] = ssim(motion_net.infer(blurred), sharp);
                Image routed = blurred;
                if (has_m) routed = motion_net.infer(routed);
                if (has_r) routed = defocus_net.infer(routed);
                s_dbmid[size_t(i)] = ssim(routed, sharp);
            });
            const auto emit = [&](const std::string& surface, const std::vector<double>& v) {
                const MeanStd s = mean_std(v);
                push_row(t, {fmt_double(r), fmt_int(length), surface, fmt_double(s.mean),
                             fmt_int(s.n)});
            };
            emit("blurred", s_blur);
            emit("dl_defocus", s_def);
            emit("dl_motion", s_mot);
            emit("dbmid", s_dbmid);
        }
    }
    return t;
}

ClassificationEvalResult run_classification_eval(const ClassifierNet& net,
                                                 const std::string& manifest_path) {
    const auto records = load_manifest(manifest_path);
    if (records.empty()) throw DatasetError("classification eval: empty manifest");
    std::vector<BlurClass> predictions, labels;
    predictions.reserve(records.size());
    labels.reserve(records.size());
    for (const SampleRecord& rec : records) {
        predictions.push_back(net.classify_image(load_image(rec.blurred_path)).first);
        labels.push_back(rec.blur_class);
    }
    ClassificationEvalResult result;
    result.matrix = confusion_matrix(predictions, labels);
    result.table.header = {"predicted", "actual", "count"};
    for (int p = 0; p < kNumBlurClasses; ++p) {
        for (int a = 0; a < kNumBlurClasses; ++a) {
            push_row(result.table,
                     {to_string(BlurClass(p)), to_string(BlurClass(a)),
                      fmt_int(result.matrix.counts[size_t(p)][size_t(a)])});
        }
    }
    return result;
}

void RuntimeBenchConfig::validate() const {
    if (sizes.empty()) throw ConfigError("runtime bench: sizes must be non-empty");
    for (int s : sizes) {
        if (s < 64) throw ConfigError("runtime bench: sizes must be >= 64");
    }
    if (reps < 1) throw ConfigError("runtime bench: reps must be >= 1");
    if (warmup < 0) throw ConfigError("runtime bench: warmup must be >= 0");
    blind.validate();
}

Table benchmark_runtime(const EncoderDecoderNet& defocus_net,
                        const EncoderDecoderNet& motion_net,
                        const RuntimeBenchConfig& cfg) {
    cfg.validate();
    Table t;
    t.header = {"method", "height", "width", "median_s", "iqr_s", "reps"};
    // Keeps the timed results observable so the loop cannot be elided.
    volatile float sink = 0.0f;

    for (int size : cfg.sizes) {
        Image blurred = make_phantom(PhantomKind::Cells, size, size,
                                     Rng::mix(cfg.seed, std::uint64_t(size)));
        blurred = convolve_raw(blurred, motion_kernel(10, MotionDirection::Horizontal),
                               Boundary::Reflect);
        blurred = convolve_raw(blurred, defocus_kernel(3.0), Boundary::Reflect);
        add_noise(blurred, 0.002, Rng::mix(cfg.seed, std::uint64_t(size) + 1));

        const auto time_method = [&](auto&& fn) {
            std::vector<double> times;
            for (int rep = 0; rep < cfg.warmup + cfg.reps; ++rep) {
                const auto t0 = std::chrono::steady_clock::now();
                const Image out = fn();
                const double dt =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
                sink = sink + out.data[0];
                if (rep >= cfg.warmup) times.push_back(dt);
            }
            return times;
        };

        const auto emit = [&](const std::string& method, std::vector<double> times) {
            push_row(t, {method, fmt_int(size), fmt_int(size), fmt_double(median(times)),
                         fmt_double(iqr(std::move(times))), fmt_int(cfg.reps)});
        };

        emit("dbmid", time_method([&] { return defocus_net.infer(motion_net.infer(blurred)); }));
        emit("blind_deconv",
             time_method([&] { return blind_deconvolve(blurred, cfg.blind).first; }));
    }
    (void)sink;
    return t;
}

void GeneralizationEvalConfig::validate() const {
    sweep.validate();
    fine_tune.validate();
    if (fine_tune_fraction < 0.0 || fine_tune_fraction > 1.0)
        throw ConfigError("generalization: fine_tune_fraction must be in [0, 1]");
    if (base_train_size < 0)
        throw ConfigError("generalization: base_train_size must be >= 0");
    if (fine_tune_fraction > 0.0 && base_train_size > 0 && work_dir.empty())
        throw ConfigError("generalization: work_dir is required when fine-tuning");
}

GeneralizationEvalResult run_generalization_eval(const ModelWeights& base,
                                                 const GeneralizationEvalConfig& cfg) {
    cfg.validate();
    if (base.role != "defocus") {
        throw ConfigError("generalization eval expects a defocus model, got '" +
                          base.role + "'");
    }
    const EncoderDecoderNet base_net(base);

    ModelWeights tuned = base;
    const int n_ft = int(std::llround(cfg.fine_tune_fraction * cfg.base_train_size));
    if (n_ft > 0) {
        SynthConfig sc = cfg.shifted_synth;
        sc.out_dir = cfg.work_dir;
        sc.per_class = n_ft;
        sc.classes = {BlurClass::Defocus};
        sc.height = cfg.sweep.height;
        sc.width = cfg.sweep.width;
        synthesize_dataset(sc);
        tuned = fine_tune(std::move(tuned), manifest_path(sc.out_dir), cfg.fine_tune).weights;
    }
    const EncoderDecoderNet tuned_net(std::move(tuned));

    GeneralizationEvalResult result;
    result.table = run_defocus_sweep(
        {{"dl_defocus", &base_net}, {"dl_defocus_ft", &tuned_net}}, cfg.sweep);
    result.fine_tuned = tuned_net.weights();
    return result;
}

namespace {

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::string need_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ConfigError(std::string("experiment config needs string field '") + key + "'");
    }
    return j.at(key).get<std::string>();
}

EncoderDecoderNet load_net(const std::string& path, const std::string& role) {
    ModelWeights w = load_checkpoint(path);
    if (w.role != role) {
        throw ConfigError("checkpoint " + path + " has role '" + w.role + "', expected '" +
                          role + "'");
    }
    return EncoderDecoderNet(std::move(w));
}

DefocusSweepConfig parse_sweep(const nlohmann::json& j, int workers) {
    DefocusSweepConfig cfg;
    cfg.radii = get_or(j, "radii", cfg.radii);
    cfg.n_images = get_or(j, "n_images", cfg.n_images);
    cfg.height = get_or(j, "height", cfg.height);
    cfg.width = get_or(j, "width", cfg.width);
    cfg.phantom = phantom_kind_from_string(
        get_or<std::string>(j, "phantom", to_string(cfg.phantom)));
    cfg.noise_sigma = get_or(j, "noise_sigma", cfg.noise_sigma);
    cfg.contrast_scale = get_or(j, "contrast_scale", cfg.contrast_scale);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.workers = workers;
    return cfg;
}

SynthConfig parse_synth(const nlohmann::json& j) {
    SynthConfig sc;
    sc.radius_min = get_or(j, "radius_min", sc.radius_min);
    sc.radius_max = get_or(j, "radius_max", sc.radius_max);
    sc.length_min = get_or(j, "length_min", sc.length_min);
    sc.length_max = get_or(j, "length_max", sc.length_max);
    sc.noise_min = get_or(j, "noise_min", sc.noise_min);
    sc.noise_max = get_or(j, "noise_max", sc.noise_max);
    sc.contrast_scale = get_or(j, "contrast_scale", sc.contrast_scale);
    sc.seed = get_or<std::uint64_t>(j, "seed", sc.seed);
    if (j.contains("phantom")) {
        sc.phantom = phantom_kind_from_string(j.at("phantom").get<std::string>());
    }
    return sc;
}

TrainConfig parse_train(const nlohmann::json& j) {
    TrainConfig tc;
    tc.learning_rate = get_or(j, "learning_rate", tc.learning_rate);
    tc.batch_size = get_or(j, "batch_size", tc.batch_size);
    tc.max_steps = get_or(j, "max_steps", tc.max_steps);
    tc.patch_size = get_or(j, "patch_size", tc.patch_size);
    tc.seed = get_or<std::uint64_t>(j, "seed", tc.seed);
    tc.log_every = get_or(j, "log_every", tc.log_every);
    return tc;
}

std::string write_table(const Table& t, const std::string& out_dir,
                        const std::string& name) {
    const std::string path = (fs::path(out_dir) / name).string();
    write_csv(path, t);
    return path;
}

}  // namespace

std::vector<std::string> run_experiment_file(const std::string& config_path,
                                             const std::string& out_dir, int workers) {
    const nlohmann::json j = load_json_file(config_path);
    const std::string experiment = need_string(j, "experiment");
    fs::create_directories(out_dir);
    std::vector<std::string> written;

    if (experiment == "defocus_sweep") {
        const DefocusSweepConfig cfg = parse_sweep(j, workers);
        std::vector<EncoderDecoderNet> nets;
        std::vector<NamedNet> named;
        if (j.contains("models")) {
            for (const auto& m : j.at("models")) {
                nets.push_back(load_net(need_string(m, "checkpoint"), "defocus"));
            }
            size_t idx = 0;
            for (const auto& m : j.at("models")) {
                named.emplace_back(get_or<std::string>(m, "label", "dl_defocus"),
                                   &nets[idx++]);
            }
        } else {
            nets.push_back(load_net(need_string(j, "defocus_checkpoint"), "defocus"));
            named.emplace_back("dl_defocus", &nets[0]);
        }
        written.push_back(write_table(run_defocus_sweep(named, cfg), out_dir,
                                      "defocus_sweep.csv"));
    } else if (experiment == "motion_sweep") {
        MotionSweepConfig cfg;
        cfg.lengths = get_or(j, "lengths", cfg.lengths);
        if (j.contains("directions")) {
            cfg.directions.clear();
            for (const auto& d : j.at("directions")) {
                cfg.directions.push_back(
                    motion_direction_from_string(d.get<std::string>()));
            }
        }
        cfg.views = get_or(j, "views", cfg.views);
        cfg.height = get_or(j, "height", cfg.height);
        cfg.width = get_or(j, "width", cfg.width);
        cfg.spot_spacing = get_or(j, "spot_spacing", cfg.spot_spacing);
        cfg.noise_sigma = get_or(j, "noise_sigma", cfg.noise_sigma);
        cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
        cfg.workers = workers;
        const EncoderDecoderNet net = load_net(need_string(j, "motion_checkpoint"), "motion");
        written.push_back(write_table(run_motion_sweep(net, cfg), out_dir,
                                      "motion_sweep.csv"));
    } else if (experiment == "mixed_grid") {
        MixedGridConfig cfg;
        cfg.radii = get_or(j, "radii", cfg.radii);
        cfg.lengths = get_or(j, "lengths", cfg.lengths);
        cfg.n_images = get_or(j, "n_images", cfg.n_images);
        cfg.height = get_or(j, "height", cfg.height);
        cfg.width = get_or(j, "width", cfg.width);
        cfg.phantom = phantom_kind_from_string(
            get_or<std::string>(j, "phantom", to_string(cfg.phantom)));
        if (j.contains("direction")) {
            cfg.direction = motion_direction_from_string(j.at("direction").get<std::string>());
        }
        cfg.noise_sigma = get_or(j, "noise_sigma", cfg.noise_sigma);
        cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
        cfg.workers = workers;
        const EncoderDecoderNet defocus = load_net(need_string(j, "defocus_checkpoint"),
                                                   "defocus");
        const EncoderDecoderNet motion = load_net(need_string(j, "motion_checkpoint"),
                                                  "motion");
        written.push_back(write_table(run_mixed_grid(defocus, motion, cfg), out_dir,
                                      "mixed_grid.csv"));
    } else if (experiment == "classification") {
        ModelWeights w = load_checkpoint(need_string(j, "classifier_checkpoint"));
        if (w.role != "classifier") {
            throw ConfigError("classification eval expects a classifier checkpoint");
        }
        const ClassifierNet net(std::move(w));
        const auto result = run_classification_eval(net, need_string(j, "manifest"));
        written.push_back(write_table(result.table, out_dir, "classification.csv"));
    } else if (experiment == "runtime") {
        RuntimeBenchConfig cfg;
        cfg.sizes = get_or(j, "sizes", cfg.sizes);
        cfg.reps = get_or(j, "reps", cfg.reps);
        cfg.warmup = get_or(j, "warmup", cfg.warmup);
        cfg.blind.iterations = get_or(j, "blind_iterations", cfg.blind.iterations);
        cfg.blind.kernel_size_guess =
            get_or(j, "kernel_size_guess", cfg.blind.kernel_size_guess);
        cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
        const EncoderDecoderNet defocus = load_net(need_string(j, "defocus_checkpoint"),
                                                   "defocus");
        const EncoderDecoderNet motion = load_net(need_string(j, "motion_checkpoint"),
                                                  "motion");
        written.push_back(write_table(benchmark_runtime(defocus, motion, cfg), out_dir,
                                      "runtime.csv"));
    } else if (experiment == "generalization") {
        GeneralizationEvalConfig cfg;
        cfg.sweep = parse_sweep(j.contains("sweep") ? j.at("sweep") : j, workers);
        cfg.fine_tune_fraction = get_or(j, "fine_tune_fraction", cfg.fine_tune_fraction);
        cfg.base_train_size = get_or(j, "base_train_size", cfg.base_train_size);
        if (j.contains("fine_tune")) cfg.fine_tune = parse_train(j.at("fine_tune"));
        if (j.contains("shifted_synth")) cfg.shifted_synth = parse_synth(j.at("shifted_synth"));
        cfg.work_dir = get_or<std::string>(j, "work_dir",
                                           (fs::path(out_dir) / "ft_data").string());
        const ModelWeights base = load_checkpoint(need_string(j, "base_checkpoint"));
        auto result = run_generalization_eval(base, cfg);
        written.push_back(write_table(result.table, out_dir, "generalization.csv"));
        const std::string ckpt = (fs::path(out_dir) / "fine_tuned.ckpt").string();
        save_checkpoint(result.fine_tuned, ckpt);
        written.push_back(ckpt);
    } else {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    return written;
}

}  // namespace dbmid
