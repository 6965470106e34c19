#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbmid/classifier.hpp"
#include "dbmid/network.hpp"

namespace dbmid {

struct TrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 8;  // desk preset; the reference setup used 64
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_steps = 2000;
    int patch_size = 64;
    std::uint64_t seed = 0;
    int log_every = 10;

    void validate() const;
    static TrainConfig paper_preset() {
        TrainConfig t;
        t.batch_size = 64;
        return t;
    }
};

struct StepLoss {
    int step = 0;  // 1-based
    double loss = 0.0;
};

struct TrainResult {
    ModelWeights weights;
    std::vector<StepLoss> log;
    bool warm_start = false;
    std::string manifest;
    std::uint64_t seed = 0;
    int steps = 0;
};

// Minimizes patchwise MSE between the restored blurred patch and the sharp
// patch over manifest rows whose class matches the model role (defocus or
// motion). Deterministic in (weights, manifest, config).
TrainResult train(ModelWeights model, const std::string& manifest_path,
                  const TrainConfig& tc);

// Same loop warm-started from previously trained weights; the result records
// the warm start. max_steps = 0 leaves the weights untouched.
TrainResult fine_tune(ModelWeights model, const std::string& manifest_path,
                      const TrainConfig& tc);

struct ClassifierTrainConfig {
    ClassifierConfig arch;
    double learning_rate = 1e-3;
    int batch_size = 16;
    int epochs = 12;
    double val_fraction = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

struct ClassifierTrainResult {
    ModelWeights weights;
    std::vector<EpochStats> log;
};

// Trains the 4-way blur classifier on blurred manifest images. Every class
// needs at least 2 samples. The validation split is carved from the manifest
// by the seed and only feeds the log.
ClassifierTrainResult train_classifier(const std::string& manifest_path,
                                       const ClassifierTrainConfig& cfg);

}  // namespace dbmid
