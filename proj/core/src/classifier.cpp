#include "dbmid/classifier.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "dbmid/errors.hpp"
#include "dbmid/rng.hpp"

namespace dbmid {

void ClassifierConfig::validate() const {
    if (stages < 1) throw ConfigError("classifier: stages must be >= 1");
    if (layers_per_stage < 1) throw ConfigError("classifier: layers_per_stage must be >= 1");
    if (int(channels.size()) != stages) {
        throw ConfigError("classifier: channels list must have one entry per stage");
    }
    if (kernel_size != 3 && kernel_size != 5) {
        throw ConfigError("classifier: kernel_size must be 3 or 5");
    }
    if (num_classes != 4) throw ConfigError("classifier: four blur classes expected");
    const int min_side = 1 << (stages - 1);
    if (input_size < min_side || input_size % min_side != 0) {
        throw ConfigError("classifier: input_size must be a positive multiple of " +
                          std::to_string(min_side));
    }
}

std::string ClassifierConfig::to_json_string() const {
    nlohmann::json j;
    j["stages"] = stages;
    j["layers_per_stage"] = layers_per_stage;
    j["channels"] = channels;
    j["kernel_size"] = kernel_size;
    j["input_size"] = input_size;
    j["num_classes"] = num_classes;
    return j.dump();
}

ClassifierConfig ClassifierConfig::from_json_string(const std::string& text) {
    ClassifierConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        c.stages = j.value("stages", c.stages);
        c.layers_per_stage = j.value("layers_per_stage", c.layers_per_stage);
        if (j.contains("channels")) c.channels = j.at("channels").get<std::vector<int>>();
        c.kernel_size = j.value("kernel_size", c.kernel_size);
        c.input_size = j.value("input_size", c.input_size);
        c.num_classes = j.value("num_classes", c.num_classes);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad classifier config json: ") + e.what());
    }
    c.validate();
    return c;
}

std::vector<LayerSpec> plan_classifier(const ClassifierConfig& cfg) {
    cfg.validate();
    std::vector<LayerSpec> plan;
    for (int i = 0; i < cfg.stages * cfg.layers_per_stage; ++i) {
        const int stage = i / cfg.layers_per_stage;
        LayerSpec L;
        L.cin = i == 0 ? 3 : cfg.channels[size_t((i - 1) / cfg.layers_per_stage)];
        L.cout = cfg.channels[size_t(stage)];
        L.k = cfg.kernel_size;
        L.pad = cfg.kernel_size / 2;
        L.stride = (i % cfg.layers_per_stage == 0 && stage > 0) ? 2 : 1;
        plan.push_back(L);
    }
    return plan;
}

namespace {

std::string conv_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "conv%02d", i);
    return buf;
}

}  // namespace

ModelWeights ClassifierNet::build(const ClassifierConfig& cfg, std::uint64_t seed) {
    const auto plan = plan_classifier(cfg);
    ModelWeights w;
    w.role = "classifier";
    w.config_json = cfg.to_json_string();
    Rng rng(seed);
    for (size_t t = 0; t < plan.size(); ++t) {
        const LayerSpec& L = plan[t];
        Tensor wt = Tensor::zeros(conv_name(int(t)) + ".weight", {L.cout, L.cin, L.k, L.k});
        const double sd = std::sqrt(2.0 / (double(L.cin) * L.k * L.k));
        for (float& v : wt.v) v = float(rng.gaussian(0.0, sd));
        w.tensors.push_back(std::move(wt));
        w.tensors.push_back(Tensor::zeros(conv_name(int(t)) + ".bias", {L.cout}));
    }
    const int feat = cfg.channels.back();
    Tensor head = Tensor::zeros("head.weight", {cfg.num_classes, feat});
    const double sd = std::sqrt(1.0 / feat);
    for (float& v : head.v) v = float(rng.gaussian(0.0, sd));
    w.tensors.push_back(std::move(head));
    w.tensors.push_back(Tensor::zeros("head.bias", {cfg.num_classes}));
    return w;
}

ClassifierNet::ClassifierNet(ModelWeights weights) : weights_(std::move(weights)) {
    if (weights_.role != "classifier") {
        throw ConfigError("expected a classifier checkpoint, got role '" + weights_.role +
                          "'");
    }
    cfg_ = ClassifierConfig::from_json_string(weights_.config_json);
    plan_ = plan_classifier(cfg_);
    if (weights_.tensors.size() != plan_.size() * 2 + 2) {
        throw CheckpointError("tensor count does not match classifier plan");
    }
    for (size_t t = 0; t < plan_.size(); ++t) {
        const LayerSpec& L = plan_[t];
        const Tensor& wt = weights_.tensors[2 * t];
        if (wt.shape != std::vector<int>{L.cout, L.cin, L.k, L.k}) {
            throw CheckpointError("tensor " + wt.name + " inconsistent with config");
        }
    }
    if (weights_.tensor("head.weight").shape !=
        std::vector<int>{cfg_.num_classes, cfg_.channels.back()}) {
        throw CheckpointError("classifier head shape mismatch");
    }
    weights_.validate_finite();
}

std::vector<Tensor*> ClassifierNet::parameters() {
    std::vector<Tensor*> p;
    for (Tensor& t : weights_.tensors) p.push_back(&t);
    return p;
}

Image ClassifierNet::preprocess(const Image& image) const {
    image.validate();
    Image rgb = to_3_channels(image);
    const int side = std::min(rgb.h, rgb.w);
    if (rgb.h != rgb.w) rgb = center_crop(rgb, side);
    if (side != cfg_.input_size) rgb = resize_bilinear(rgb, cfg_.input_size, cfg_.input_size);
    return rgb;
}

void ClassifierNet::forward(const float* in, float* logits, Trace* trace) const {
    const int n = int(plan_.size());
    const int s = cfg_.input_size;
    std::vector<float> cur(in, in + size_t(3) * s * s);
    int ch = s, cw = s;
    if (trace) {
        trace->act.assign(size_t(n) + 1, {});
        trace->hw.assign(size_t(n) + 1, {0, 0});
        trace->act[0] = cur;
        trace->hw[0] = {ch, cw};
    }
    for (int t = 0; t < n; ++t) {
        const LayerSpec& L = plan_[size_t(t)];
        const int oh = conv_out_dim(ch, L.k, L.stride, L.pad);
        const int ow = conv_out_dim(cw, L.k, L.stride, L.pad);
        std::vector<float> next(size_t(L.cout) * oh * ow);
        conv_forward(cur.data(), L.cin, ch, cw, weights_.tensors[size_t(2 * t)].v.data(),
                     weights_.tensors[size_t(2 * t) + 1].v.data(), L.cout, L.k, L.stride,
                     L.pad, next.data(), oh, ow);
        relu_forward(next.data(), next.size());
        cur = std::move(next);
        ch = oh;
        cw = ow;
        if (trace) {
            trace->act[size_t(t) + 1] = cur;
            trace->hw[size_t(t) + 1] = {ch, cw};
        }
    }
    const int feat = cfg_.channels.back();
    std::vector<float> pooled(static_cast<size_t>(feat));
    gap_forward(cur.data(), feat, ch, cw, pooled.data());
    if (trace) trace->pooled = pooled;
    dense_forward(pooled.data(), weights_.tensor("head.weight").v.data(),
                  weights_.tensor("head.bias").v.data(), feat, cfg_.num_classes, logits);
}

void ClassifierNet::backward(const Trace& trace, const float* grad_logits,
                             std::vector<std::vector<float>>& grads) const {
    const int n = int(plan_.size());
    const int feat = cfg_.channels.back();
    if (grads.size() != weights_.tensors.size()) {
        throw ArgumentError("grads must be sized like the tensor list");
    }
    std::vector<float> gpooled(static_cast<size_t>(feat));
    dense_backward(trace.pooled.data(), weights_.tensor("head.weight").v.data(),
                   grad_logits, feat, cfg_.num_classes, gpooled.data(),
                   grads[size_t(2 * n)].data(), grads[size_t(2 * n) + 1].data());

    const int fh = trace.hw[size_t(n)][0], fw = trace.hw[size_t(n)][1];
    std::vector<float> cur(size_t(feat) * fh * fw);
    gap_backward(gpooled.data(), feat, fh, fw, cur.data());

    for (int t = n - 1; t >= 0; --t) {
        const LayerSpec& L = plan_[size_t(t)];
        const auto& in_act = trace.act[size_t(t)];
        const auto& out_act = trace.act[size_t(t) + 1];
        const int ih = trace.hw[size_t(t)][0], iw = trace.hw[size_t(t)][1];
        const int oh = trace.hw[size_t(t) + 1][0], ow = trace.hw[size_t(t) + 1][1];
        relu_backward(out_act.data(), cur.data(), cur.size());
        conv_backward_weights(in_act.data(), L.cin, ih, iw, cur.data(), L.cout, oh, ow,
                              L.k, L.stride, L.pad, grads[size_t(2 * t)].data(),
                              grads[size_t(2 * t) + 1].data());
        std::vector<float> gin(in_act.size());
        conv_backward_data(cur.data(), L.cout, oh, ow,
                           weights_.tensors[size_t(2 * t)].v.data(), L.cin, L.k, L.stride,
                           L.pad, gin.data(), ih, iw);
        cur = std::move(gin);
    }
}

std::pair<BlurClass, std::array<double, 4>> ClassifierNet::classify_image(
    const Image& image) const {
    const Image prep = preprocess(image);
    float logits[4];
    forward(prep.data.data(), logits, nullptr);
    for (float v : logits) {
        if (!std::isfinite(v)) throw NumericError("non-finite classifier logits");
    }
    const std::array<double, 4> scores = softmax4(logits);
    int best = 0;
    for (int i = 1; i < 4; ++i) {
        if (scores[size_t(i)] > scores[size_t(best)]) best = i;  // ties keep the earlier class
    }
    return {BlurClass(best), scores};
}

std::pair<BlurClass, std::array<double, 4>> classify(const Image& image,
                                                     const ModelWeights& model) {
    ClassifierNet net(model);
    return net.classify_image(image);
}

ConfusionMatrix confusion_matrix(const std::vector<BlurClass>& predictions,
                                 const std::vector<BlurClass>& labels) {
    if (predictions.size() != labels.size()) {
        throw ArgumentError("confusion matrix needs equal-length inputs");
    }
    if (predictions.empty()) throw ArgumentError("confusion matrix needs at least one sample");
    ConfusionMatrix m;
    int correct = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        ++m.counts[size_t(int(predictions[i]))][size_t(int(labels[i]))];
        if (predictions[i] == labels[i]) ++correct;
    }
    m.total = int(predictions.size());
    m.accuracy = double(correct) / m.total;
    return m;
}

}  // namespace dbmid
