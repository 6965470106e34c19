#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "dbmid/image.hpp"
#include "dbmid/network.hpp"

namespace dbmid {

struct ClassifierConfig {
    int stages = 4;
    int layers_per_stage = 2;
    std::vector<int> channels = {16, 32, 64, 128};
    int kernel_size = 3;
    int input_size = 128;
    int num_classes = 4;

    void validate() const;
    std::string to_json_string() const;
    static ClassifierConfig from_json_string(const std::string& text);
};

// Conv layers of the classifier trunk (stride 2 entering every stage after
// the first), before global average pooling and the linear head.
std::vector<LayerSpec> plan_classifier(const ClassifierConfig& config);

class ClassifierNet {
  public:
    static ModelWeights build(const ClassifierConfig& config, std::uint64_t seed);

    explicit ClassifierNet(ModelWeights weights);

    const ClassifierConfig& config() const { return cfg_; }
    const ModelWeights& weights() const { return weights_; }
    ModelWeights& weights() { return weights_; }
    std::vector<Tensor*> parameters();

    // Center-crop to square and bilinear-resize to the input size, 3-channel.
    Image preprocess(const Image& image) const;

    struct Trace {
        std::vector<std::vector<float>> act;
        std::vector<std::array<int, 2>> hw;
        std::vector<float> pooled;
    };

    // Logits for a preprocessed planar [3, S, S] buffer.
    void forward(const float* in, float* logits, Trace* trace) const;
    void backward(const Trace& trace, const float* grad_logits,
                  std::vector<std::vector<float>>& grads) const;

    std::pair<BlurClass, std::array<double, 4>> classify_image(const Image& image) const;

  private:
    ClassifierConfig cfg_;
    ModelWeights weights_;
    std::vector<LayerSpec> plan_;
};

// One-shot classification: scores are softmax probabilities summing to 1;
// ties resolve to the earlier class in the fixed order.
std::pair<BlurClass, std::array<double, 4>> classify(const Image& image,
                                                     const ModelWeights& model);

struct ConfusionMatrix {
    // counts[predicted][actual]
    std::array<std::array<int, 4>, 4> counts{};
    int total = 0;
    double accuracy = 0.0;
};

ConfusionMatrix confusion_matrix(const std::vector<BlurClass>& predictions,
                                 const std::vector<BlurClass>& labels);

}  // namespace dbmid
