#include <string>
#include <vector>

#include "dbmid/csv.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/image.hpp"
#include "dbmid/image_io.hpp"
#include "dbmid/plot.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace dbmid;

namespace {

Table sweep_table() {
    Table t;
    t.header = {"radius_px", "z_um", "method", "ssim_mean", "ssim_std", "n"};
    const char* radii[] = {"0", "2", "4"};
    const char* zs[] = {"0", "6.25", "12.5"};
    const char* none[] = {"1", "0.82", "0.61"};
    const char* dl[] = {"0.97", "0.93", "0.85"};
    for (int i = 0; i < 3; ++i) {
        t.rows.push_back({radii[i], zs[i], "none", none[i], "0.01", "5"});
        t.rows.push_back({radii[i], zs[i], "dl_defocus", dl[i], "0.01", "5"});
    }
    return t;
}

Table grid_table() {
    Table t;
    t.header = {"radius_px", "length_px", "surface", "ssim_mean", "n"};
    const char* surfaces[] = {"blurred", "dl_defocus", "dl_motion", "dbmid"};
    int v = 0;
    for (const char* r : {"0", "2"}) {
        for (const char* l : {"0", "6"}) {
            for (const char* s : surfaces) {
                t.rows.push_back({r, l, s, fmt_double(1.0 - 0.03 * v++), "4"});
            }
        }
    }
    return t;
}

int ink_pixels(const Image& img) {
    int n = 0;
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            if (img.at(y, x, 0) != 1.0f || img.at(y, x, 1) != 1.0f ||
                img.at(y, x, 2) != 1.0f) {
                ++n;
            }
        }
    }
    return n;
}

bool has_color(const Image& img, float r, float g, float b) {
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            if (img.at(y, x, 0) == r && img.at(y, x, 1) == g && img.at(y, x, 2) == b) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

TEST_SUITE("plot") {

TEST_CASE("line chart renders every series onto a white canvas") {
    const Table t = sweep_table();
    const Image img = render_line_chart(t);
    CHECK(img.h == 480);
    CHECK(img.w == 720);
    CHECK(img.c == 3);
    // White background, corner untouched by axes or labels.
    CHECK(img.at(0, 0, 0) == 1.0f);
    // Axes, ticks, labels and two series leave plenty of ink.
    CHECK(ink_pixels(img) > 500);
    // Series markers and legend swatches use the fixed palette; both series
    // colors must survive on the canvas.
    CHECK(has_color(img, 0.12f, 0.47f, 0.71f));
    CHECK(has_color(img, 0.89f, 0.47f, 0.13f));

    PlotOptions opt;
    opt.width = 400;
    opt.height = 300;
    opt.title = "ssim vs radius";
    const Image titled = render_line_chart(t, opt);
    CHECK(titled.h == 300);
    CHECK(titled.w == 400);
    // The title band gets glyphs.
    int top_ink = 0;
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < titled.w; ++x) {
            if (titled.at(y, x, 0) != 1.0f) ++top_ink;
        }
    }
    CHECK(top_ink > 10);
}

TEST_CASE("line chart falls back to the median column") {
    Table t;
    t.header = {"size", "median_s", "iqr_s"};
    t.rows = {{"64", "0.5", "0.01"}, {"128", "1.2", "0.02"}, {"256", "4.8", "0.1"}};
    const Image img = render_line_chart(t);
    CHECK(img.c == 3);
    CHECK(ink_pixels(img) > 300);
}

TEST_CASE("heatmap lays out one panel per surface plus a shared scale") {
    const Table t = grid_table();
    const Image img = render_heatmap(t);
    // Geometry is deterministic: 4 panels of 2x2 cells at 22 px.
    const int cell = 22, ml = 40, mt = 22, gap = 18;
    CHECK(img.h == mt + 2 * cell + 26);
    CHECK(img.w == ml + 4 * (2 * cell + gap) + 60);

    // First panel's first cell is filled with a heat color, not background.
    CHECK(img.at(mt + 1, ml + 1, 2) != 1.0f);
    // Color bar top is the hot end: strongly yellow.
    const int bar_x = img.w - 46;
    CHECK(img.at(mt, bar_x + 2, 0) > 0.9f);
    CHECK(img.at(mt, bar_x + 2, 1) > 0.85f);
    CHECK(img.at(mt, bar_x + 2, 2) < 0.3f);
    // Bottom is the cold end: dark blue.
    CHECK(img.at(mt + 2 * cell - 1, bar_x + 2, 0) < 0.2f);
    CHECK(img.at(mt + 2 * cell - 1, bar_x + 2, 2) > 0.3f);
}

TEST_CASE("heatmap tolerates a single cell") {
    Table t;
    t.header = {"radius_px", "length_px", "surface", "ssim_mean", "n"};
    t.rows = {{"1.5", "10", "dbmid", "0.9", "3"}};
    const Image img = render_heatmap(t);
    // One panel, one cell; the degenerate value range must not divide by zero.
    CHECK(img.h == 22 + 22 + 26);
    CHECK(img.w == 40 + (22 + 18) + 60);
    CHECK(ink_pixels(img) > 0);
}

TEST_CASE("plot_csv writes loadable png files") {
    testutil::TempDir tmp("plot_csv");
    const std::string sweep_csv = tmp.file("sweep.csv");
    write_csv(sweep_csv, sweep_table());
    const std::string grid_csv = tmp.file("grid.csv");
    write_csv(grid_csv, grid_table());

    SUBCASE("line") {
        const std::string out = tmp.file("sweep.png");
        plot_csv(sweep_csv, "line", out);
        const Image img = load_image(out);
        CHECK(img.h == 480);
        CHECK(img.w == 720);
        CHECK(img.c == 3);
    }
    SUBCASE("heatmap") {
        const std::string out = tmp.file("grid.png");
        PlotOptions opt;
        opt.title = "mixed grid";
        plot_csv(grid_csv, "heatmap", out, opt);
        const Image img = load_image(out);
        CHECK(img.c == 3);
        CHECK(img.h > 40);
    }
    SUBCASE("unknown kind") {
        CHECK_THROWS_AS(plot_csv(sweep_csv, "scatter", tmp.file("x.png")), ConfigError);
    }
    SUBCASE("missing csv") {
        CHECK_THROWS_AS(plot_csv(tmp.file("nope.csv"), "line", tmp.file("x.png")),
                        IoError);
    }
    SUBCASE("header-only table") {
        Table empty;
        empty.header = {"radius_px", "method", "ssim_mean"};
        const std::string path = tmp.file("empty.csv");
        write_csv(path, empty);
        CHECK_THROWS_AS(plot_csv(path, "line", tmp.file("x.png")), FormatError);
    }
}

TEST_CASE("tables without a value column are rejected") {
    Table t;
    t.header = {"a", "b", "c"};
    t.rows = {{"1", "2", "3"}};
    CHECK_THROWS_AS(render_line_chart(t), FormatError);
    CHECK_THROWS_AS(render_heatmap(t), FormatError);
}

}  // TEST_SUITE
