#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbmid/classifier.hpp"
#include "dbmid/image.hpp"
#include "dbmid/network.hpp"

namespace dbmid {

struct PipelineConfig {
    std::string classifier_checkpoint;
    std::string defocus_checkpoint;
    std::string motion_checkpoint;
    std::optional<BlurClass> force_class;  // ablations only
};

enum class Stage { None, DlMotion, DlDefocus };

const char* to_string(Stage s);

struct DeblurReport {
    BlurClass predicted_class = BlurClass::InFocus;
    std::array<double, 4> class_scores{};
    std::optional<BlurClass> forced_class;
    std::vector<Stage> stages_applied;
    std::vector<double> stage_seconds;  // one entry per applied stage

    std::string to_json_string() const;
};

// Stages for a given classification, honoring an ablation override. InFocus
// is a no-op; Mixed runs motion first, then defocus.
std::vector<Stage> route(BlurClass predicted, std::optional<BlurClass> forced);

// Loads the three checkpoints once and serves any number of deblur calls.
class Pipeline {
  public:
    explicit Pipeline(const PipelineConfig& config);

    std::pair<Image, DeblurReport> deblur(const Image& image) const;

    const PipelineConfig& config() const { return cfg_; }

  private:
    PipelineConfig cfg_;
    ClassifierNet classifier_;
    EncoderDecoderNet defocus_net_;
    EncoderDecoderNet motion_net_;
};

// One-shot convenience wrapper; loads the checkpoints on every call.
std::pair<Image, DeblurReport> deblur(const Image& image, const PipelineConfig& config);

}  // namespace dbmid
