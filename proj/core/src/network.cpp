#include "dbmid/network.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "dbmid/errors.hpp"
#include "dbmid/rng.hpp"

namespace dbmid {

void NetworkConfig::validate() const {
    if (stages < 1) throw ConfigError("network: stages must be >= 1");
    if (layers_per_stage < 1) throw ConfigError("network: layers_per_stage must be >= 1");
    if (int(channels.size()) != stages) {
        throw ConfigError("network: channels list must have one entry per stage");
    }
    for (int c : channels)
        if (c < 1) throw ConfigError("network: channel counts must be positive");
    if (kernel_size != 3 && kernel_size != 5) {
        throw ConfigError("network: kernel_size must be 3 or 5");
    }
    if (skip_interval < 1) throw ConfigError("network: skip_interval must be >= 1");
}

std::string NetworkConfig::to_json_string() const {
    nlohmann::json j;
    j["stages"] = stages;
    j["layers_per_stage"] = layers_per_stage;
    j["channels"] = channels;
    j["kernel_size"] = kernel_size;
    j["skip_interval"] = skip_interval;
    return j.dump();
}

NetworkConfig NetworkConfig::from_json_string(const std::string& text) {
    NetworkConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        c.stages = j.value("stages", c.stages);
        c.layers_per_stage = j.value("layers_per_stage", c.layers_per_stage);
        if (j.contains("channels")) c.channels = j.at("channels").get<std::vector<int>>();
        c.kernel_size = j.value("kernel_size", c.kernel_size);
        c.skip_interval = j.value("skip_interval", c.skip_interval);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad network config json: ") + e.what());
    }
    c.validate();
    return c;
}

Tensor& ModelWeights::tensor(const std::string& name) {
    for (Tensor& t : tensors)
        if (t.name == name) return t;
    throw CheckpointError("missing tensor: " + name);
}

const Tensor& ModelWeights::tensor(const std::string& name) const {
    for (const Tensor& t : tensors)
        if (t.name == name) return t;
    throw CheckpointError("missing tensor: " + name);
}

void ModelWeights::validate_finite() const {
    for (const Tensor& t : tensors) {
        for (float v : t.v) {
            if (!std::isfinite(v)) {
                throw CheckpointError("non-finite value in tensor " + t.name);
            }
        }
    }
}

std::vector<LayerSpec> plan_encoder_decoder(const NetworkConfig& cfg) {
    cfg.validate();
    const int n = cfg.encoder_layers();
    const int lps = cfg.layers_per_stage;
    std::vector<LayerSpec> plan;
    plan.reserve(size_t(2) * n);

    // Encoder: channels step up at stage boundaries, where stride 2 applies.
    for (int i = 0; i < n; ++i) {
        const int stage = i / lps;
        LayerSpec L;
        L.cin = i == 0 ? NetworkConfig::input_channels : cfg.channels[size_t((i - 1) / lps)];
        L.cout = cfg.channels[size_t(stage)];
        L.k = cfg.kernel_size;
        L.pad = cfg.kernel_size / 2;
        L.stride = (i % lps == 0 && stage > 0) ? 2 : 1;
        plan.push_back(L);
    }
    // Decoder: transposed mirror of encoder layer e = n-1-j. A skip lands on
    // every decoder output whose mirrored encoder depth is a multiple of
    // skip_interval; depth 0 is the network input, so that one is a global
    // residual.
    for (int j = 0; j < n; ++j) {
        const LayerSpec& e = plan[size_t(n - 1 - j)];
        LayerSpec L;
        L.transposed = true;
        L.cin = e.cout;
        L.cout = e.cin;
        L.k = e.k;
        L.pad = e.pad;
        L.stride = e.stride;
        L.out_pad = e.stride - 1;
        L.relu = j != n - 1;  // final layer: 3 channels, no activation
        if ((n - 1 - j) % cfg.skip_interval == 0) L.skip_from = n - 1 - j;
        plan.push_back(L);
    }
    return plan;
}

namespace {

std::string layer_name(const std::vector<LayerSpec>& plan, size_t t) {
    char buf[24];
    const int n = int(plan.size()) / 2;
    if (int(t) < n) {
        std::snprintf(buf, sizeof buf, "enc%02d", int(t));
    } else {
        std::snprintf(buf, sizeof buf, "dec%02d", int(t) - n);
    }
    return buf;
}

}  // namespace

ModelWeights EncoderDecoderNet::build(const NetworkConfig& cfg, std::uint64_t seed,
                                      const std::string& role) {
    if (role != "defocus" && role != "motion") {
        throw ConfigError("restoration net role must be defocus or motion");
    }
    const auto plan = plan_encoder_decoder(cfg);
    ModelWeights w;
    w.role = role;
    w.config_json = cfg.to_json_string();
    Rng rng(seed);
    for (size_t t = 0; t < plan.size(); ++t) {
        const LayerSpec& L = plan[t];
        const std::string base = layer_name(plan, t);
        // Weight layout is [cout][cin][k][k] for convs; transposed convs keep
        // their adjoint-conv layout [cin][cout][k][k].
        Tensor wt = L.transposed
                        ? Tensor::zeros(base + ".weight", {L.cin, L.cout, L.k, L.k})
                        : Tensor::zeros(base + ".weight", {L.cout, L.cin, L.k, L.k});
        // He-style fan-in scaling; transposed layers spread each input over
        // stride^2 output sites. The linear output layer drops the ReLU gain.
        double fan = double(L.cin) * L.k * L.k;
        if (L.transposed) fan /= double(L.stride) * L.stride;
        const double gain = L.relu ? 2.0 : 1.0;
        const double sd = std::sqrt(gain / fan);
        for (float& v : wt.v) v = float(rng.gaussian(0.0, sd));
        w.tensors.push_back(std::move(wt));
        w.tensors.push_back(Tensor::zeros(base + ".bias", {L.cout}));
    }
    return w;
}

EncoderDecoderNet::EncoderDecoderNet(ModelWeights weights)
    : weights_(std::move(weights)) {
    if (weights_.role != "defocus" && weights_.role != "motion") {
        throw ConfigError("restoration net role must be defocus or motion, got '" +
                          weights_.role + "'");
    }
    cfg_ = NetworkConfig::from_json_string(weights_.config_json);
    plan_ = plan_encoder_decoder(cfg_);
    if (weights_.tensors.size() != plan_.size() * 2) {
        throw CheckpointError("tensor count does not match network plan");
    }
    for (size_t t = 0; t < plan_.size(); ++t) {
        const LayerSpec& L = plan_[t];
        const Tensor& wt = weights_.tensors[2 * t];
        const Tensor& bt = weights_.tensors[2 * t + 1];
        const std::vector<int> want_w = L.transposed
                                            ? std::vector<int>{L.cin, L.cout, L.k, L.k}
                                            : std::vector<int>{L.cout, L.cin, L.k, L.k};
        if (wt.name != layer_name(plan_, t) + ".weight" || wt.shape != want_w ||
            bt.shape != std::vector<int>{L.cout}) {
            throw CheckpointError("tensor " + wt.name + " inconsistent with config");
        }
    }
    weights_.validate_finite();
}

std::vector<Tensor*> EncoderDecoderNet::parameters() {
    std::vector<Tensor*> p;
    p.reserve(weights_.tensors.size());
    for (Tensor& t : weights_.tensors) p.push_back(&t);
    return p;
}

void EncoderDecoderNet::forward(const float* in, int h, int w, std::vector<float>& out,
                                Trace* trace) const {
    const int align = cfg_.alignment();
    if (h % align != 0 || w % align != 0) {
        throw ArgumentError("forward input sides must be multiples of " +
                            std::to_string(align));
    }
    const int n = int(plan_.size());
    // Skip sources: inputs of encoder layers at depths hit by the decoder.
    std::vector<std::vector<float>> stash(size_t(n) / 2 + 1);
    std::vector<std::array<int, 2>> stash_hw(stash.size());

    std::vector<float> cur(in, in + size_t(3) * h * w);
    int ch = h, cw = w;
    int cc = 3;
    if (trace) {
        trace->act.assign(size_t(n) + 1, {});
        trace->hw.assign(size_t(n) + 1, {0, 0});
        trace->act[0] = cur;
        trace->hw[0] = {h, w};
    }
    for (int t = 0; t < n; ++t) {
        const LayerSpec& L = plan_[size_t(t)];
        if (L.cin != cc) throw NumericError("internal channel mismatch");
        if (!trace && t < n / 2 && t % cfg_.skip_interval == 0) {
            stash[size_t(t)] = cur;  // encoder depth t input
            stash_hw[size_t(t)] = {ch, cw};
        }
        const float* wp = weights_.tensors[size_t(2 * t)].v.data();
        const float* bp = weights_.tensors[size_t(2 * t) + 1].v.data();
        int oh, ow;
        std::vector<float> next;
        if (!L.transposed) {
            oh = conv_out_dim(ch, L.k, L.stride, L.pad);
            ow = conv_out_dim(cw, L.k, L.stride, L.pad);
            next.resize(size_t(L.cout) * oh * ow);
            conv_forward(cur.data(), L.cin, ch, cw, wp, bp, L.cout, L.k, L.stride, L.pad,
                         next.data(), oh, ow);
        } else {
            oh = (ch - 1) * L.stride - 2 * L.pad + L.k + L.out_pad;
            ow = (cw - 1) * L.stride - 2 * L.pad + L.k + L.out_pad;
            next.resize(size_t(L.cout) * oh * ow);
            conv_backward_data(cur.data(), L.cin, ch, cw, wp, L.cout, L.k, L.stride,
                               L.pad, next.data(), oh, ow);
            const size_t npix = size_t(oh) * ow;
            for (int co = 0; co < L.cout; ++co) {
                float* plane = next.data() + size_t(co) * npix;
                for (size_t i = 0; i < npix; ++i) plane[i] += bp[co];
            }
        }
        if (L.skip_from >= 0) {
            const std::vector<float>& src =
                trace ? trace->act[size_t(L.skip_from)] : stash[size_t(L.skip_from)];
            const auto& shw = trace ? trace->hw[size_t(L.skip_from)]
                                    : stash_hw[size_t(L.skip_from)];
            if (src.size() != next.size() || shw[0] != oh || shw[1] != ow) {
                throw NumericError("skip connection shape mismatch");
            }
            for (size_t i = 0; i < next.size(); ++i) next[i] += src[i];
        }
        if (L.relu) relu_forward(next.data(), next.size());
        cur = std::move(next);
        ch = oh;
        cw = ow;
        cc = L.cout;
        if (trace) {
            trace->act[size_t(t) + 1] = cur;
            trace->hw[size_t(t) + 1] = {ch, cw};
        }
    }
    out = std::move(cur);
}

void EncoderDecoderNet::backward(const Trace& trace, std::vector<float> grad_out,
                                 std::vector<std::vector<float>>& grads) const {
    const int n = int(plan_.size());
    if (int(trace.act.size()) != n + 1) throw ArgumentError("trace does not match network");
    if (grads.size() != weights_.tensors.size()) {
        throw ArgumentError("grads must be sized like the tensor list");
    }
    std::vector<std::vector<float>> skip_grads(static_cast<size_t>(n));

    std::vector<float> cur = std::move(grad_out);
    for (int t = n - 1; t >= 0; --t) {
        const LayerSpec& L = plan_[size_t(t)];
        const auto& in_act = trace.act[size_t(t)];
        const auto& out_act = trace.act[size_t(t) + 1];
        const int ih = trace.hw[size_t(t)][0], iw = trace.hw[size_t(t)][1];
        const int oh = trace.hw[size_t(t) + 1][0], ow = trace.hw[size_t(t) + 1][1];
        if (cur.size() != out_act.size()) throw NumericError("gradient shape mismatch");

        if (L.relu) relu_backward(out_act.data(), cur.data(), cur.size());
        if (L.skip_from >= 0) skip_grads[size_t(L.skip_from)] = cur;

        const float* wp = weights_.tensors[size_t(2 * t)].v.data();
        float* gw = grads[size_t(2 * t)].data();
        float* gb = grads[size_t(2 * t) + 1].data();
        std::vector<float> gin(in_act.size());
        if (!L.transposed) {
            conv_backward_weights(in_act.data(), L.cin, ih, iw, cur.data(), L.cout, oh,
                                  ow, L.k, L.stride, L.pad, gw, gb);
            conv_backward_data(cur.data(), L.cout, oh, ow, wp, L.cin, L.k, L.stride,
                               L.pad, gin.data(), ih, iw);
        } else {
            // Adjoint pair: forward was a gather, so data backward is the
            // plain conv and the weight gradient swaps the operand roles.
            const size_t npix = size_t(oh) * ow;
            for (int co = 0; co < L.cout; ++co) {
                const float* plane = cur.data() + size_t(co) * npix;
                double acc = 0.0;
                for (size_t i = 0; i < npix; ++i) acc += plane[i];
                gb[co] += float(acc);
            }
            conv_backward_weights(cur.data(), L.cout, oh, ow, in_act.data(), L.cin, ih,
                                  iw, L.k, L.stride, L.pad, gw, nullptr);
            conv_forward(cur.data(), L.cout, oh, ow, wp, nullptr, L.cin, L.k, L.stride,
                         L.pad, gin.data(), ih, iw);
        }
        cur = std::move(gin);
        if (t < n && !skip_grads[size_t(t)].empty()) {
            // This encoder layer's input doubles as a skip source.
            const auto& sg = skip_grads[size_t(t)];
            if (sg.size() != cur.size()) throw NumericError("skip gradient shape mismatch");
            for (size_t i = 0; i < cur.size(); ++i) cur[i] += sg[i];
        }
    }
}

namespace {

int reflect_idx(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

}  // namespace

Image EncoderDecoderNet::infer(const Image& image) const {
    image.validate();
    if (image.h < 16 || image.w < 16) {
        throw ArgumentError("inference needs at least 16x16 input");
    }
    const Image rgb = to_3_channels(image);
    const int align = cfg_.alignment();
    const int ph = (align - rgb.h % align) % align;
    const int pw = (align - rgb.w % align) % align;

    const int fh = rgb.h + ph, fw = rgb.w + pw;
    std::vector<float> in(size_t(3) * fh * fw);
    for (int c = 0; c < 3; ++c) {
        const float* src = rgb.plane(c);
        for (int y = 0; y < fh; ++y) {
            const int sy = reflect_idx(y, rgb.h);
            for (int x = 0; x < fw; ++x) {
                in[(size_t(c) * fh + y) * fw + x] = src[size_t(sy) * rgb.w + reflect_idx(x, rgb.w)];
            }
        }
    }

    std::vector<float> out;
    forward(in.data(), fh, fw, out, nullptr);
    for (float v : out) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite activation in " + weights_.role + " inference");
        }
    }

    Image result;
    result.h = rgb.h;
    result.w = rgb.w;
    result.c = image.c;
    result.data.resize(size_t(image.c) * rgb.h * rgb.w);
    result.z_offset_um = image.z_offset_um;
    result.stain = image.stain;
    for (int y = 0; y < rgb.h; ++y) {
        for (int x = 0; x < rgb.w; ++x) {
            if (image.c == 3) {
                for (int c = 0; c < 3; ++c) {
                    result.at(y, x, c) = out[(size_t(c) * fh + y) * fw + x];
                }
            } else {
                // Grayscale in, grayscale out: average the three net channels.
                double acc = 0.0;
                for (int c = 0; c < 3; ++c) acc += out[(size_t(c) * fh + y) * fw + x];
                result.at(y, x, 0) = float(acc / 3.0);
            }
        }
    }
    clamp01(result);
    return result;
}

}  // namespace dbmid
