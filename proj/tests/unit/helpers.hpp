#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "dbmid/image.hpp"
#include "dbmid/rng.hpp"

namespace testutil {

inline dbmid::Image random_image(int h, int w, int c, std::uint64_t seed) {
    dbmid::Image img(h, w, c);
    dbmid::Rng rng(seed);
    for (auto& v : img.data) v = float(rng.uniform());
    return img;
}

// Smooth-ish random field so SSIM and registration tests have structure to
// latch onto instead of pure white noise.
inline dbmid::Image textured_image(int h, int w, int c, std::uint64_t seed) {
    dbmid::Image img(h, w, c);
    dbmid::Rng rng(seed);
    for (int ch = 0; ch < c; ++ch) {
        const double fy = 2.0 + rng.uniform() * 6.0;
        const double fx = 2.0 + rng.uniform() * 6.0;
        const double phase = rng.uniform() * 6.28318;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double v = 0.5 + 0.25 * std::sin(fy * y * 6.28318 / h + phase) *
                                     std::cos(fx * x * 6.28318 / w);
                v += 0.1 * (rng.uniform() - 0.5);
                img.at(y, x, ch) = float(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return img;
}

// Scratch directory wiped on destruction. Unique per seed string so suites
// can run concurrently.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("dbmid_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

}  // namespace testutil
