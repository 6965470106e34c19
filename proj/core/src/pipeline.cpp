#include "dbmid/pipeline.hpp"

#include <chrono>

#include <json.hpp>

#include "dbmid/checkpoint.hpp"
#include "dbmid/errors.hpp"

namespace dbmid {

namespace {

ModelWeights load_with_role(const std::string& path, const std::string& role) {
    ModelWeights w = load_checkpoint(path);
    if (w.role != role) {
        throw ConfigError("checkpoint " + path + " has role '" + w.role +
                          "', expected '" + role + "'");
    }
    return w;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const char* to_string(Stage s) {
    switch (s) {
        case Stage::None: return "none";
        case Stage::DlMotion: return "dl_motion";
        default: return "dl_defocus";
    }
}

std::vector<Stage> route(BlurClass predicted, std::optional<BlurClass> forced) {
    switch (forced.value_or(predicted)) {
        case BlurClass::InFocus: return {Stage::None};
        case BlurClass::Defocus: return {Stage::DlDefocus};
        case BlurClass::Motion: return {Stage::DlMotion};
        default: return {Stage::DlMotion, Stage::DlDefocus};
    }
}

std::string DeblurReport::to_json_string() const {
    nlohmann::json j;
    j["predicted_class"] = to_string(predicted_class);
    j["class_scores"] = class_scores;
    if (forced_class) {
        j["forced_class"] = to_string(*forced_class);
    } else {
        j["forced_class"] = nullptr;
    }
    auto stages = nlohmann::json::array();
    for (Stage s : stages_applied) stages.push_back(to_string(s));
    j["stages_applied"] = stages;
    j["stage_seconds"] = stage_seconds;
    return j.dump(2);
}

Pipeline::Pipeline(const PipelineConfig& config)
    : cfg_(config),
      classifier_(load_with_role(config.classifier_checkpoint, "classifier")),
      defocus_net_(load_with_role(config.defocus_checkpoint, "defocus")),
      motion_net_(load_with_role(config.motion_checkpoint, "motion")) {}

std::pair<Image, DeblurReport> Pipeline::deblur(const Image& image) const {
    image.validate();
    DeblurReport report;
    try {
        auto [cls, scores] = classifier_.classify_image(image);
        report.predicted_class = cls;
        report.class_scores = scores;
    } catch (const NumericError& e) {
        throw NumericError(std::string("classifier stage: ") + e.what());
    }
    report.forced_class = cfg_.force_class;
    report.stages_applied = route(report.predicted_class, cfg_.force_class);

    Image out = image;
    for (Stage stage : report.stages_applied) {
        const auto t0 = std::chrono::steady_clock::now();
        if (stage != Stage::None) {
            const EncoderDecoderNet& net =
                stage == Stage::DlMotion ? motion_net_ : defocus_net_;
            try {
                out = net.infer(out);
            } catch (const NumericError& e) {
                throw NumericError(std::string(to_string(stage)) + " stage: " + e.what());
            }
        }
        report.stage_seconds.push_back(seconds_since(t0));
    }
    return {std::move(out), std::move(report)};
}

std::pair<Image, DeblurReport> deblur(const Image& image, const PipelineConfig& config) {
    return Pipeline(config).deblur(image);
}

}  // namespace dbmid
