#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dbmid/classifier.hpp"
#include "dbmid/csv.hpp"
#include "dbmid/dataset.hpp"
#include "dbmid/deconv.hpp"
#include "dbmid/network.hpp"
#include "dbmid/train.hpp"

namespace dbmid {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    int n = 0;
};

MeanStd mean_std(const std::vector<double>& values);
double median(std::vector<double> values);
// Interquartile range via linearly interpolated quartiles; 0 for n == 1.
double iqr(std::vector<double> values);

// Nets carry the method label they appear under in the CSVs, so one sweep can
// compare base vs fine-tuned or per-phantom vs combined models.
using NamedNet = std::pair<std::string, const EncoderDecoderNet*>;

struct DefocusSweepConfig {
    std::vector<double> radii = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
    int n_images = 50;
    int height = 128;
    int width = 128;
    PhantomKind phantom = PhantomKind::Cells;
    double noise_sigma = 0.002;
    double contrast_scale = 1.0;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

// Schema: radius_px,z_um,method,ssim_mean,ssim_std,n. The same sharp frames
// are reused across radii (paired comparison); radius 0 rows are pristine, so
// the blurred ("none") method scores exactly 1 there.
Table run_defocus_sweep(const std::vector<NamedNet>& models,
                        const DefocusSweepConfig& cfg);

struct MotionSweepConfig {
    std::vector<int> lengths = {1, 5, 10, 15, 20};
    std::vector<MotionDirection> directions = {MotionDirection::Horizontal,
                                               MotionDirection::Vertical};
    int views = 8;  // spot-field images per sweep point
    int height = 256;
    int width = 256;
    int spot_spacing = 64;
    double noise_sigma = 0.002;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

// Schema: length_px,direction,method,fwhm_mean,fwhm_std,n. Emits an in_focus
// reference row (length_px 0) per direction plus none/dl_motion rows per
// sweep point. FWHM is taken along the motion axis at the known spot centres.
Table run_motion_sweep(const EncoderDecoderNet& motion_net,
                       const MotionSweepConfig& cfg);

struct MixedGridConfig {
    std::vector<double> radii = {0.0, 1.5, 3.0, 4.5, 6.0};
    std::vector<int> lengths = {0, 5, 10, 15, 20};
    int n_images = 6;
    int height = 128;
    int width = 128;
    PhantomKind phantom = PhantomKind::Cells;
    MotionDirection direction = MotionDirection::Horizontal;
    double noise_sigma = 0.002;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

// Schema: radius_px,length_px,surface,ssim_mean,n with surfaces blurred,
// dl_defocus, dl_motion, dbmid. The dbmid surface routes by the cell's ground
// truth class, so the (0,0) corner is exactly 1 regardless of training state.
Table run_mixed_grid(const EncoderDecoderNet& defocus_net,
                     const EncoderDecoderNet& motion_net, const MixedGridConfig& cfg);

struct ClassificationEvalResult {
    Table table;  // predicted,actual,count in fixed class order
    ConfusionMatrix matrix;
};

ClassificationEvalResult run_classification_eval(const ClassifierNet& net,
                                                 const std::string& manifest_path);

struct RuntimeBenchConfig {
    std::vector<int> sizes = {256, 512};
    int reps = 3;
    int warmup = 2;  // discarded leading runs per method and size
    DeconvConfig blind;
    std::uint64_t seed = 0;

    void validate() const;
};

// Schema: method,height,width,median_s,iqr_s,reps. Methods: dbmid (motion then
// defocus inference on a mixed-blurred phantom) and blind_deconv.
Table benchmark_runtime(const EncoderDecoderNet& defocus_net,
                        const EncoderDecoderNet& motion_net,
                        const RuntimeBenchConfig& cfg);

struct GeneralizationEvalConfig {
    // Sweep over the shifted distribution; its noise_sigma/contrast_scale
    // define the shift (reference protocol: noise x4, contrast x0.7).
    DefocusSweepConfig sweep;
    // Fine-tune set size = fraction * base_train_size defocus pairs,
    // synthesized under the same shift. Fraction 0 skips fine-tuning.
    double fine_tune_fraction = 0.1;
    int base_train_size = 200;
    TrainConfig fine_tune;
    // Template for the fine-tune set; out_dir/per_class/classes are filled in
    // here. Its noise/contrast ranges carry the shift for training data.
    SynthConfig shifted_synth;
    std::string work_dir;  // fine-tune set location

    void validate() const;
};

struct GeneralizationEvalResult {
    Table table;  // defocus-sweep schema, methods none/dl_defocus/dl_defocus_ft
    ModelWeights fine_tuned;
};

GeneralizationEvalResult run_generalization_eval(const ModelWeights& base,
                                                 const GeneralizationEvalConfig& cfg);

// `eval` entry point: reads a JSON experiment config ({"experiment": ...} plus
// that experiment's fields and checkpoint paths) and writes its CSVs under
// out_dir. Returns the written paths.
std::vector<std::string> run_experiment_file(const std::string& config_path,
                                             const std::string& out_dir, int workers);

}  // namespace dbmid
