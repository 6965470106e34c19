#include "dbmid/train.hpp"

#include <cmath>

#include "dbmid/dataset.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/image_io.hpp"
#include "dbmid/patches.hpp"
#include "dbmid/rng.hpp"

namespace dbmid {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("train: learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (max_steps < 0) throw ConfigError("train: max_steps must be >= 0");
    if (patch_size < 16) throw ConfigError("train: patch_size must be >= 16");
    if (log_every < 1) throw ConfigError("train: log_every must be >= 1");
}

namespace {

struct Pair {
    Image blurred;
    Image sharp;
};

std::vector<Pair> load_pairs(const std::string& manifest_path, BlurClass wanted) {
    const auto records = filter_by_class(load_manifest(manifest_path), wanted);
    if (records.empty()) {
        throw DatasetError("no " + std::string(to_string(wanted)) + " pairs in " +
                           manifest_path);
    }
    std::vector<Pair> pairs;
    pairs.reserve(records.size());
    for (const SampleRecord& r : records) {
        Pair p;
        p.blurred = to_3_channels(load_image(r.blurred_path));
        p.sharp = to_3_channels(load_image(r.sharp_path));
        if (!p.blurred.same_shape(p.sharp)) {
            throw DatasetError("pair shape mismatch at index " + std::to_string(r.index));
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

TrainResult run_training(ModelWeights model, const std::string& manifest_path,
                         const TrainConfig& tc, bool warm_start) {
    tc.validate();
    BlurClass wanted;
    if (model.role == "defocus") {
        wanted = BlurClass::Defocus;
    } else if (model.role == "motion") {
        wanted = BlurClass::Motion;
    } else {
        throw ConfigError("training expects a defocus or motion model, got '" +
                          model.role + "'");
    }

    EncoderDecoderNet net(std::move(model));
    const int align = net.config().alignment();
    if (tc.patch_size % align != 0) {
        throw ConfigError("train: patch_size must be a multiple of " + std::to_string(align));
    }
    const std::vector<Pair> pairs = load_pairs(manifest_path, wanted);
    for (const Pair& p : pairs) {
        if (p.blurred.h < tc.patch_size || p.blurred.w < tc.patch_size) {
            throw DatasetError("train: image smaller than patch size");
        }
    }

    TrainResult result;
    result.warm_start = warm_start;
    result.manifest = manifest_path;
    result.seed = tc.seed;
    result.steps = tc.max_steps;

    Rng rng(tc.seed);
    Adam opt(tc.learning_rate, tc.beta1, tc.beta2, tc.epsilon);
    auto params = net.parameters();
    std::vector<std::vector<float>> grads(params.size());

    const int ps = tc.patch_size;
    const size_t patch_elems = size_t(3) * ps * ps;
    std::vector<float> grad_out(patch_elems);

    for (int step = 1; step <= tc.max_steps; ++step) {
        for (size_t i = 0; i < params.size(); ++i) grads[i].assign(params[i]->v.size(), 0.0f);
        double batch_loss = 0.0;
        for (int b = 0; b < tc.batch_size; ++b) {
            const Pair& pair = pairs[rng.below(pairs.size())];
            const int y0 = int(rng.below(size_t(pair.blurred.h - ps + 1)));
            const int x0 = int(rng.below(size_t(pair.blurred.w - ps + 1)));
            const Image in = crop_patch(pair.blurred, y0, x0, ps);
            const Image target = crop_patch(pair.sharp, y0, x0, ps);

            EncoderDecoderNet::Trace trace;
            std::vector<float> out;
            net.forward(in.data.data(), ps, ps, out, &trace);
            batch_loss += mse_loss(out.data(), target.data.data(), patch_elems,
                                   grad_out.data(), 1.0 / tc.batch_size);
            net.backward(trace, grad_out, grads);
        }
        batch_loss /= tc.batch_size;
        if (!std::isfinite(batch_loss)) {
            throw NumericError("training loss diverged at step " + std::to_string(step));
        }
        opt.step(params, grads);
        if (step % tc.log_every == 0 || step == tc.max_steps) {
            result.log.push_back({step, batch_loss});
        }
    }

    result.weights = std::move(net.weights());
    return result;
}

}  // namespace

TrainResult train(ModelWeights model, const std::string& manifest_path,
                  const TrainConfig& tc) {
    return run_training(std::move(model), manifest_path, tc, false);
}

TrainResult fine_tune(ModelWeights model, const std::string& manifest_path,
                      const TrainConfig& tc) {
    return run_training(std::move(model), manifest_path, tc, true);
}

void ClassifierTrainConfig::validate() const {
    arch.validate();
    if (learning_rate <= 0.0) throw ConfigError("classifier train: learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("classifier train: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("classifier train: epochs must be >= 1");
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
        throw ConfigError("classifier train: val_fraction must be in [0, 1)");
    }
}

ClassifierTrainResult train_classifier(const std::string& manifest_path,
                                       const ClassifierTrainConfig& cfg) {
    cfg.validate();
    const auto records = load_manifest(manifest_path);
    int per_class[4] = {0, 0, 0, 0};
    for (const SampleRecord& r : records) ++per_class[int(r.blur_class)];
    for (int c = 0; c < 4; ++c) {
        if (per_class[c] < 2) {
            throw DatasetError(std::string("classifier training needs >= 2 samples of ") +
                               to_string(BlurClass(c)));
        }
    }

    ClassifierNet net(ClassifierNet::build(cfg.arch, Rng::mix(cfg.seed, 0xC1A55)));
    std::vector<std::vector<float>> inputs;
    std::vector<int> labels;
    inputs.reserve(records.size());
    for (const SampleRecord& r : records) {
        const Image prep = net.preprocess(load_image(r.blurred_path));
        inputs.push_back(prep.data);
        labels.push_back(int(r.blur_class));
    }

    Rng rng(cfg.seed);
    std::vector<size_t> order(records.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const size_t n_val = size_t(std::llround(cfg.val_fraction * double(order.size())));
    std::vector<size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<size_t> train_idx(order.begin() + n_val, order.end());
    if (train_idx.empty()) throw DatasetError("classifier training split is empty");

    Adam opt(cfg.learning_rate);
    auto params = net.parameters();
    std::vector<std::vector<float>> grads(params.size());

    ClassifierTrainResult result;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(train_idx);
        double loss_sum = 0.0;
        int correct = 0;
        for (size_t start = 0; start < train_idx.size(); start += size_t(cfg.batch_size)) {
            const size_t end = std::min(train_idx.size(), start + size_t(cfg.batch_size));
            const int nb = int(end - start);
            for (size_t i = 0; i < params.size(); ++i) {
                grads[i].assign(params[i]->v.size(), 0.0f);
            }
            for (size_t i = start; i < end; ++i) {
                const size_t s = train_idx[i];
                ClassifierNet::Trace trace;
                float logits[4];
                net.forward(inputs[s].data(), logits, &trace);
                float glogits[4];
                loss_sum += softmax_cross_entropy(logits, 4, labels[s], glogits);
                for (float& g : glogits) g /= float(nb);
                net.backward(trace, glogits, grads);
                int best = 0;
                for (int k = 1; k < 4; ++k)
                    if (logits[k] > logits[best]) best = k;
                if (best == labels[s]) ++correct;
            }
            opt.step(params, grads);
        }
        if (!std::isfinite(loss_sum)) {
            throw NumericError("classifier loss diverged in epoch " + std::to_string(epoch));
        }

        int val_correct = 0;
        for (size_t s : val_idx) {
            float logits[4];
            net.forward(inputs[s].data(), logits, nullptr);
            int best = 0;
            for (int k = 1; k < 4; ++k)
                if (logits[k] > logits[best]) best = k;
            if (best == labels[s]) ++val_correct;
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.loss = loss_sum / double(train_idx.size());
        stats.train_acc = double(correct) / double(train_idx.size());
        stats.val_acc = val_idx.empty() ? 0.0 : double(val_correct) / double(val_idx.size());
        result.log.push_back(stats);
    }

    result.weights = std::move(net.weights());
    return result;
}

}  // namespace dbmid
