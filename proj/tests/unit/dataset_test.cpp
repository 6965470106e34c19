#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dbmid/csv.hpp"
#include "dbmid/dataset.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/image_io.hpp"
#include "helpers.hpp"

using namespace dbmid;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("dataset");

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

SynthConfig small_config(const std::string& out_dir) {
    SynthConfig cfg;
    cfg.out_dir = out_dir;
    cfg.per_class = 4;
    cfg.height = 64;
    cfg.width = 64;
    cfg.radius_min = 2.0;
    cfg.radius_max = 4.0;
    cfg.length_min = 5;
    cfg.length_max = 11;
    cfg.noise_max = 0.002;
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("synthesis bookkeeping: rows, params and files line up per class") {
    testutil::TempDir tmp("synth_book");
    const SynthConfig cfg = small_config(tmp.str());
    const auto records = synthesize_dataset(cfg);

    REQUIRE(records.size() == 16);
    for (int i = 0; i < 16; ++i) {
        const SampleRecord& r = records[size_t(i)];
        CHECK(r.index == i);
        CHECK(r.blur_class == cfg.classes[size_t(i / 4)]);
        CHECK(r.noise_sigma >= cfg.noise_min);
        CHECK(r.noise_sigma <= cfg.noise_max);

        const bool has_defocus = r.blur_class == BlurClass::Defocus || r.blur_class == BlurClass::Mixed;
        const bool has_motion = r.blur_class == BlurClass::Motion || r.blur_class == BlurClass::Mixed;
        if (has_defocus) {
            CHECK(r.defocus_radius_px >= cfg.radius_min);
            CHECK(r.defocus_radius_px <= cfg.radius_max);
        } else {
            CHECK(r.defocus_radius_px == 0.0);
        }
        if (has_motion) {
            CHECK(r.motion_length_px >= cfg.length_min);
            CHECK(r.motion_length_px <= cfg.length_max);
        } else {
            CHECK(r.motion_length_px == 0);
        }

        // Relative paths in the record, real files on disk.
        CHECK(r.sharp_path == "sharp/" + std::string(i < 10 ? "00000" : "0000") +
                                  std::to_string(i) + ".png");
        const Image sharp = load_image((fs::path(cfg.out_dir) / r.sharp_path).string());
        const Image blurred = load_image((fs::path(cfg.out_dir) / r.blurred_path).string());
        CHECK(sharp.h == 64);
        CHECK(sharp.w == 64);
        CHECK(sharp.c == 3);
        CHECK(blurred.h == 64);
        CHECK(blurred.c == 3);
    }
}

TEST_CASE("same config regenerates byte-identical artifacts") {
    testutil::TempDir tmp_a("synth_rep_a");
    testutil::TempDir tmp_b("synth_rep_b");
    SynthConfig cfg = small_config(tmp_a.str());
    cfg.per_class = 2;
    synthesize_dataset(cfg);
    cfg.out_dir = tmp_b.str();
    synthesize_dataset(cfg);

    CHECK(slurp(manifest_path(tmp_a.str())) == slurp(manifest_path(tmp_b.str())));
    for (const char* rel : {"sharp/000000.png", "blurred/000003.png", "blurred/000007.png"}) {
        CHECK(slurp((fs::path(tmp_a.str()) / rel).string()) ==
              slurp((fs::path(tmp_b.str()) / rel).string()));
    }
}

TEST_CASE("load_manifest resolves paths and round trips every field") {
    testutil::TempDir tmp("synth_load");
    SynthConfig cfg = small_config(tmp.str());
    cfg.per_class = 2;
    const auto written = synthesize_dataset(cfg);
    const auto loaded = load_manifest(manifest_path(tmp.str()));

    REQUIRE(loaded.size() == written.size());
    for (size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].index == written[i].index);
        CHECK(loaded[i].blur_class == written[i].blur_class);
        CHECK(loaded[i].defocus_radius_px ==
              doctest::Approx(written[i].defocus_radius_px).epsilon(1e-9));
        CHECK(loaded[i].motion_length_px == written[i].motion_length_px);
        CHECK(loaded[i].motion_direction == written[i].motion_direction);
        CHECK(loaded[i].noise_sigma == doctest::Approx(written[i].noise_sigma).epsilon(1e-9));
        CHECK(loaded[i].seed == written[i].seed);
        // Resolved against the manifest directory, so directly loadable.
        CHECK(fs::path(loaded[i].sharp_path).is_absolute());
        const Image img = load_image(loaded[i].sharp_path);
        CHECK(img.h == 64);
    }
}

TEST_CASE("filter_by_class keeps order and picks the right rows") {
    testutil::TempDir tmp("synth_filter");
    const SynthConfig cfg = small_config(tmp.str());
    const auto records = synthesize_dataset(cfg);
    for (BlurClass cls : {BlurClass::InFocus, BlurClass::Defocus, BlurClass::Motion,
                          BlurClass::Mixed}) {
        const auto subset = filter_by_class(records, cls);
        REQUIRE(subset.size() == 4);
        for (size_t i = 0; i < subset.size(); ++i) {
            CHECK(subset[i].blur_class == cls);
            if (i > 0) CHECK(subset[i].index > subset[i - 1].index);
        }
    }
}

TEST_CASE("in-focus pairs with zero noise are bitwise copies of the sharp frame") {
    testutil::TempDir tmp("synth_infocus");
    SynthConfig cfg = small_config(tmp.str());
    cfg.classes = {BlurClass::InFocus};
    cfg.per_class = 2;
    cfg.noise_max = 0.0;
    const auto records = synthesize_dataset(cfg);
    for (const SampleRecord& r : records) {
        CHECK(slurp((fs::path(tmp.str()) / r.sharp_path).string()) ==
              slurp((fs::path(tmp.str()) / r.blurred_path).string()));
    }
}

TEST_CASE("phantom_mix cycles content across consecutive samples") {
    testutil::TempDir tmp("synth_mix");
    SynthConfig cfg = small_config(tmp.str());
    cfg.classes = {BlurClass::InFocus};
    cfg.phantom_mix = {PhantomKind::Cells, PhantomKind::Spots};
    const auto records = synthesize_dataset(cfg);
    REQUIRE(records.size() == 4);
    for (size_t i = 0; i < records.size(); ++i) {
        const Image sharp = load_image((fs::path(tmp.str()) / records[i].sharp_path).string());
        const double mean = mean_intensity(sharp);
        // Cells sit on a bright background, spot fields on a dark one.
        if (i % 2 == 0) {
            CHECK(mean > 0.5);
        } else {
            CHECK(mean < 0.3);
        }
    }
}

TEST_CASE("contrast_scale flattens the sharp frames around mid-grey") {
    testutil::TempDir tmp_full("synth_c1");
    testutil::TempDir tmp_flat("synth_c2");
    SynthConfig cfg = small_config(tmp_full.str());
    cfg.classes = {BlurClass::InFocus};
    cfg.per_class = 1;
    cfg.noise_max = 0.0;
    synthesize_dataset(cfg);
    cfg.out_dir = tmp_flat.str();
    cfg.contrast_scale = 0.7;
    synthesize_dataset(cfg);

    const Image full = load_image((fs::path(tmp_full.str()) / "sharp/000000.png").string());
    const Image flat = load_image((fs::path(tmp_flat.str()) / "sharp/000000.png").string());
    const Image expect = scale_contrast(full, 0.7);
    REQUIRE(flat.data.size() == expect.data.size());
    float worst = 0.0f;
    for (size_t i = 0; i < flat.data.size(); ++i) {
        worst = std::max(worst, std::abs(flat.data[i] - expect.data[i]));
    }
    // Two 8-bit quantization steps of slack: both sides went through PNG.
    CHECK(worst <= 2.0f / 255.0f);
}

TEST_CASE("source_dir draws sharp frames from existing images") {
    testutil::TempDir src("synth_src");
    testutil::TempDir out("synth_from_src");
    const Image tex = testutil::textured_image(96, 80, 3, 5);
    save_image(tex, src.file("frame.png"));

    SynthConfig cfg = small_config(out.str());
    cfg.classes = {BlurClass::InFocus};
    cfg.per_class = 2;
    cfg.noise_max = 0.0;
    cfg.source_dir = src.str();
    const auto records = synthesize_dataset(cfg);
    const Image sharp = load_image((fs::path(out.str()) / records[0].sharp_path).string());
    CHECK(sharp.h == 64);
    CHECK(sharp.w == 64);
    CHECK(sharp.c == 3);

    SUBCASE("empty source directory is a dataset error") {
        testutil::TempDir empty("synth_src_empty");
        cfg.source_dir = empty.str();
        cfg.out_dir = out.file("again");
        CHECK_THROWS_AS(synthesize_dataset(cfg), DatasetError);
    }
}

TEST_CASE("config validation rejects inconsistent settings") {
    SynthConfig cfg = small_config("unused");
    CHECK_NOTHROW(cfg.validate());

    SynthConfig bad = cfg;
    bad.out_dir.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.per_class = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.height = 16;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.classes.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.radius_min = 0.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.radius_max = bad.radius_min - 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.length_min = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.noise_min = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.contrast_scale = 2.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.length_max = 64;  // as large as the image
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("loading a missing or empty manifest fails loudly") {
    testutil::TempDir tmp("manifest_bad");
    CHECK_THROWS_AS(load_manifest(tmp.file("missing.csv")), IoError);

    Table t;
    t.header = {"index", "sharp_path", "blurred_path", "blur_class", "defocus_radius_px",
                "motion_length_px", "motion_direction", "noise_sigma", "seed"};
    const std::string path = tmp.file("empty.csv");
    write_csv(path, t);
    CHECK_THROWS_AS(load_manifest(path), DatasetError);
}

TEST_SUITE_END();
