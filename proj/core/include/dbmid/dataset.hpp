#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbmid/blur.hpp"
#include "dbmid/image.hpp"
#include "dbmid/phantom.hpp"

namespace dbmid {

// One manifest row. Paths are stored relative to the manifest and resolved on
// load, so a dataset directory can be moved wholesale.
struct SampleRecord {
    int index = 0;
    std::string sharp_path;
    std::string blurred_path;
    BlurClass blur_class = BlurClass::InFocus;
    double defocus_radius_px = 0.0;
    int motion_length_px = 0;
    MotionDirection motion_direction = MotionDirection::Horizontal;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

struct SynthConfig {
    std::string out_dir;
    int per_class = 200;
    int height = 128;
    int width = 128;
    std::vector<BlurClass> classes = {BlurClass::InFocus, BlurClass::Defocus,
                                      BlurClass::Motion, BlurClass::Mixed};
    double radius_min = 3.0;
    double radius_max = 10.0;
    int length_min = 5;
    int length_max = 40;
    double noise_min = 0.0;
    double noise_max = 0.004;
    // Contrast of the sharp frames around mid-grey; < 1 flattens them. Models
    // a different sensor/illumination profile for generalization studies.
    double contrast_scale = 1.0;
    std::uint64_t seed = 0;
    // When set, sharp frames are drawn from image files in this directory
    // (sorted, cycled, centre-cropped and resized) instead of phantoms.
    std::string source_dir;
    PhantomKind phantom = PhantomKind::Cells;
    // Non-empty: sample i uses phantom_mix[i % size] instead of `phantom`, so
    // a set can interleave tissue-like and point-like content.
    std::vector<PhantomKind> phantom_mix;

    void validate() const;
};

// Generates (sharp, blurred) pairs plus manifest.csv under config.out_dir.
// Deterministic: same config -> byte-identical images and manifest.
std::vector<SampleRecord> synthesize_dataset(const SynthConfig& config);

// Manifest path for a dataset directory.
std::string manifest_path(const std::string& dataset_dir);

// Reads a manifest; sample paths come back resolved against its directory.
std::vector<SampleRecord> load_manifest(const std::string& path);

// Rows of a given class, in manifest order.
std::vector<SampleRecord> filter_by_class(const std::vector<SampleRecord>& records,
                                          BlurClass blur_class);

}  // namespace dbmid
