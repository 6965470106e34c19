#include "dbmid/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "dbmid/csv.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/image_io.hpp"
#include "dbmid/rng.hpp"

namespace fs = std::filesystem;

namespace dbmid {

void SynthConfig::validate() const {
    if (out_dir.empty()) throw ConfigError("synth: out_dir is required");
    if (per_class < 1) throw ConfigError("synth: per_class must be >= 1");
    if (height < 32 || width < 32) throw ConfigError("synth: size must be >= 32");
    if (classes.empty()) throw ConfigError("synth: at least one class");
    if (radius_min < 0.5 || radius_max < radius_min)
        throw ConfigError("synth: need 0.5 <= radius_min <= radius_max");
    if (length_min < 2 || length_max < length_min)
        throw ConfigError("synth: need 2 <= length_min <= length_max");
    if (noise_min < 0.0 || noise_max < noise_min)
        throw ConfigError("synth: need 0 <= noise_min <= noise_max");
    if (contrast_scale <= 0.0 || contrast_scale > 2.0)
        throw ConfigError("synth: contrast_scale must be in (0, 2]");
    if (length_max >= std::min(height, width))
        throw ConfigError("synth: motion length must be smaller than the image");
}

namespace {

std::vector<std::string> list_source_images(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });
        if (ext == ".png" || ext == ".tif" || ext == ".tiff") {
            files.push_back(e.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DatasetError("no .png/.tif images in " + dir);
    return files;
}

Image sharp_frame(const SynthConfig& cfg, const std::vector<std::string>& sources,
                  int global_index, std::uint64_t sample_seed) {
    if (!sources.empty()) {
        Image img = load_image(sources[size_t(global_index) % sources.size()]);
        img = to_3_channels(img);
        const int side = std::min(img.h, img.w);
        img = center_crop(img, side);
        return resize_bilinear(img, cfg.height, cfg.width);
    }
    PhantomKind kind = cfg.phantom;
    if (!cfg.phantom_mix.empty()) {
        kind = cfg.phantom_mix[size_t(global_index) % cfg.phantom_mix.size()];
    }
    return to_3_channels(make_phantom(kind, cfg.height, cfg.width, sample_seed));
}

std::string sample_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d.png", index);
    return buf;
}

}  // namespace

std::vector<SampleRecord> synthesize_dataset(const SynthConfig& config) {
    config.validate();
    std::vector<std::string> sources;
    if (!config.source_dir.empty()) sources = list_source_images(config.source_dir);

    fs::create_directories(fs::path(config.out_dir) / "sharp");
    fs::create_directories(fs::path(config.out_dir) / "blurred");

    std::vector<SampleRecord> records;
    int index = 0;
    for (BlurClass cls : config.classes) {
        for (int i = 0; i < config.per_class; ++i, ++index) {
            const std::uint64_t sample_seed = Rng::mix(config.seed, std::uint64_t(index));
            Rng rng(sample_seed);

            SampleRecord rec;
            rec.index = index;
            rec.blur_class = cls;
            rec.seed = sample_seed;
            rec.noise_sigma = rng.uniform(config.noise_min, config.noise_max);
            if (cls == BlurClass::Defocus || cls == BlurClass::Mixed) {
                rec.defocus_radius_px = rng.uniform(config.radius_min, config.radius_max);
            }
            if (cls == BlurClass::Motion || cls == BlurClass::Mixed) {
                rec.motion_length_px = rng.uniform_int(config.length_min, config.length_max);
                rec.motion_direction =
                    rng.coin() ? MotionDirection::Horizontal : MotionDirection::Vertical;
            }

            Image sharp = sharp_frame(config, sources, index, sample_seed);
            if (config.contrast_scale != 1.0) sharp = scale_contrast(sharp, config.contrast_scale);
            BlurSpec spec;
            spec.blur_class = rec.blur_class;
            spec.defocus_radius_px = rec.defocus_radius_px;
            spec.motion_length_px = rec.motion_length_px;
            spec.motion_direction = rec.motion_direction;
            spec.noise_sigma = rec.noise_sigma;
            spec.seed = Rng::mix(sample_seed, 1);
            Image blurred = apply_blur(sharp, spec);

            rec.sharp_path = (fs::path("sharp") / sample_name(index)).string();
            rec.blurred_path = (fs::path("blurred") / sample_name(index)).string();
            save_image(sharp, (fs::path(config.out_dir) / rec.sharp_path).string());
            save_image(blurred, (fs::path(config.out_dir) / rec.blurred_path).string());
            records.push_back(std::move(rec));
        }
    }

    Table t;
    t.header = {"index",         "sharp_path",       "blurred_path",
                "blur_class",    "defocus_radius_px", "motion_length_px",
                "motion_direction", "noise_sigma",   "seed"};
    for (const SampleRecord& r : records) {
        t.rows.push_back({fmt_int(r.index), r.sharp_path, r.blurred_path,
                          to_string(r.blur_class), fmt_double(r.defocus_radius_px),
                          fmt_int(r.motion_length_px), to_string(r.motion_direction),
                          fmt_double(r.noise_sigma), fmt_u64(r.seed)});
    }
    write_csv(manifest_path(config.out_dir), t);
    return records;
}

std::string manifest_path(const std::string& dataset_dir) {
    return (fs::path(dataset_dir) / "manifest.csv").string();
}

std::vector<SampleRecord> load_manifest(const std::string& path) {
    const Table t = read_csv(path);
    const fs::path base = fs::path(path).parent_path();
    const size_t ci = t.column("index"), cs = t.column("sharp_path"),
                 cb = t.column("blurred_path"), cc = t.column("blur_class"),
                 cr = t.column("defocus_radius_px"), cl = t.column("motion_length_px"),
                 cd = t.column("motion_direction"), cn = t.column("noise_sigma"),
                 ce = t.column("seed");
    std::vector<SampleRecord> records;
    records.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        SampleRecord r;
        r.index = int(parse_int(row[ci]));
        r.sharp_path = (base / row[cs]).string();
        r.blurred_path = (base / row[cb]).string();
        r.blur_class = blur_class_from_string(row[cc]);
        r.defocus_radius_px = parse_double(row[cr]);
        r.motion_length_px = int(parse_int(row[cl]));
        r.motion_direction = motion_direction_from_string(row[cd]);
        r.noise_sigma = parse_double(row[cn]);
        r.seed = parse_u64(row[ce]);
        records.push_back(std::move(r));
    }
    if (records.empty()) throw DatasetError("manifest has no rows: " + path);
    return records;
}

std::vector<SampleRecord> filter_by_class(const std::vector<SampleRecord>& records,
                                          BlurClass blur_class) {
    std::vector<SampleRecord> out;
    for (const SampleRecord& r : records)
        if (r.blur_class == blur_class) out.push_back(r);
    return out;
}

}  // namespace dbmid
