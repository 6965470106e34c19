#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dbmid/image.hpp"
#include "dbmid/nn.hpp"

namespace dbmid {

// Shape of one restoration network. Downsampling/upsampling factor is fixed
// at 2 (one stride-2 layer at each stage transition), input channels at 3.
struct NetworkConfig {
    int stages = 3;
    int layers_per_stage = 2;
    std::vector<int> channels = {32, 64, 128};
    int kernel_size = 3;
    int skip_interval = 2;

    static constexpr int input_channels = 3;
    static constexpr int downsample_factor = 2;

    int encoder_layers() const { return stages * layers_per_stage; }
    // Input sides must be divisible by this for an unpadded forward pass.
    int alignment() const { return 1 << (stages - 1); }

    void validate() const;
    std::string to_json_string() const;
    static NetworkConfig from_json_string(const std::string& text);

    static NetworkConfig desk() { return {}; }
    static NetworkConfig paper() {
        NetworkConfig c;
        c.layers_per_stage = 7;
        return c;
    }
};

// A named-tensor bundle: the only thing checkpoints store and networks need.
struct ModelWeights {
    std::string role;         // defocus | motion | classifier
    std::string config_json;  // serialized NetworkConfig or ClassifierConfig
    std::vector<Tensor> tensors;

    Tensor& tensor(const std::string& name);
    const Tensor& tensor(const std::string& name) const;
    // Throws CheckpointError if any value is non-finite.
    void validate_finite() const;
};

// One conv or transposed-conv layer of the planned network.
struct LayerSpec {
    bool transposed = false;
    int cin = 0;
    int cout = 0;
    int k = 3;
    int stride = 1;
    int pad = 1;
    int out_pad = 0;
    bool relu = true;
    // Decoder side: encoder depth whose layer input is summed into this
    // layer's output (0 = the network input), or -1.
    int skip_from = -1;
};

// Encoder layers followed by decoder layers, mirrored. Exposed for the
// trainer and for parameter-count assertions.
std::vector<LayerSpec> plan_encoder_decoder(const NetworkConfig& config);

class EncoderDecoderNet {
  public:
    // Fresh He-initialized weights, deterministic in the seed.
    static ModelWeights build(const NetworkConfig& config, std::uint64_t seed,
                              const std::string& role);

    explicit EncoderDecoderNet(ModelWeights weights);

    const NetworkConfig& config() const { return cfg_; }
    const ModelWeights& weights() const { return weights_; }
    ModelWeights& weights() { return weights_; }
    std::vector<Tensor*> parameters();

    // Full-image restoration: promotes to 3 channels, reflect-pads to the
    // alignment, runs the network, crops back, clamps to [0,1]. Output shape
    // (and channel count) equals the input's.
    Image infer(const Image& image) const;

    // Layer activations of one forward pass; act[0] is the input,
    // act[t + 1] the output of layer t.
    struct Trace {
        std::vector<std::vector<float>> act;
        std::vector<std::array<int, 2>> hw;
    };

    // Raw forward over a planar [3, h, w] buffer; h and w must be multiples
    // of alignment(). No clamping. Pass a trace to enable backward().
    void forward(const float* in, int h, int w, std::vector<float>& out,
                 Trace* trace) const;

    // Accumulates dLoss/dparam into grads (indexed like weights().tensors)
    // given the output gradient. grads vectors must be pre-sized and zeroed
    // (or accumulated across a batch).
    void backward(const Trace& trace, std::vector<float> grad_out,
                  std::vector<std::vector<float>>& grads) const;

  private:
    NetworkConfig cfg_;
    ModelWeights weights_;
    std::vector<LayerSpec> plan_;
};

}  // namespace dbmid
