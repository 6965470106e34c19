#include <doctest.h>

#include "dbmid/errors.hpp"
#include "dbmid/patches.hpp"
#include "helpers.hpp"

using namespace dbmid;

TEST_SUITE_BEGIN("patches");

TEST_CASE("patch positions tile with an edge-aligned tail") {
    CHECK(patch_positions(64, 64, 64) == std::vector<int>{0});
    CHECK(patch_positions(128, 64, 64) == std::vector<int>{0, 64});
    CHECK(patch_positions(100, 64, 64) == std::vector<int>{0, 36});
    CHECK(patch_positions(100, 64, 32) == std::vector<int>{0, 32, 36});
    CHECK(patch_positions(65, 64, 64) == std::vector<int>{0, 1});
}

TEST_CASE("whole-image patch") {
    const Image img = testutil::random_image(64, 64, 3, 1);
    const auto patches = extract_patches(img, 64, 64);
    REQUIRE(patches.size() == 1);
    CHECK(patches[0].data == img.data);
}

TEST_CASE("exact 2x2 tiling of a 128x128 image") {
    const Image img = testutil::random_image(128, 128, 1, 2);
    const auto patches = extract_patches(img, 64, 64);
    REQUIRE(patches.size() == 4);
    // Row-major enumeration: patch 3 is the bottom-right tile.
    CHECK(patches[3].at(0, 0) == img.at(64, 64));
    CHECK(patches[1].at(5, 7) == img.at(5, 64 + 7));
}

TEST_CASE("100x100 with size 64 stride 64 overlaps at the far edge") {
    const Image img = testutil::random_image(100, 100, 1, 3);
    const auto patches = extract_patches(img, 64, 64);
    REQUIRE(patches.size() == 4);
    CHECK(patches[3].at(63, 63) == img.at(99, 99));
    CHECK(patches[3].at(0, 0) == img.at(36, 36));
}

TEST_CASE("crop_patch bounds checking") {
    const Image img = testutil::random_image(32, 32, 1, 4);
    const Image p = crop_patch(img, 8, 16, 16);
    CHECK(p.h == 16);
    CHECK(p.at(0, 0) == img.at(8, 16));
    CHECK_THROWS_AS(crop_patch(img, 20, 20, 16), ArgumentError);
    CHECK_THROWS_AS(crop_patch(img, -1, 0, 16), ArgumentError);
}

TEST_CASE("patch size larger than the image is rejected") {
    const Image img = testutil::random_image(32, 32, 1, 5);
    CHECK_THROWS_AS(extract_patches(img, 33, 8), ArgumentError);
    CHECK_THROWS_AS(extract_patches(img, 16, 0), ArgumentError);
}

TEST_SUITE_END();
