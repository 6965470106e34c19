#include "dbmid/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "dbmid/errors.hpp"
#include "dbmid/image_io.hpp"

namespace dbmid {

namespace {

struct Rgb {
    float r, g, b;
};

constexpr Rgb kPalette[] = {
    {0.12f, 0.47f, 0.71f}, {0.89f, 0.47f, 0.13f}, {0.17f, 0.63f, 0.17f},
    {0.84f, 0.15f, 0.16f}, {0.58f, 0.40f, 0.74f}, {0.55f, 0.34f, 0.29f},
    {0.89f, 0.47f, 0.76f}, {0.50f, 0.50f, 0.50f},
};

// 3x5 glyphs, rows top to bottom, 3 bits per row (MSB left).
std::uint16_t glyph_bits(char c) {
    switch (c) {
        case '0': return 0b111101101101111;
        case '1': return 0b010110010010111;
        case '2': return 0b111001111100111;
        case '3': return 0b111001111001111;
        case '4': return 0b101101111001001;
        case '5': return 0b111100111001111;
        case '6': return 0b111100111101111;
        case '7': return 0b111001001001001;
        case '8': return 0b111101111101111;
        case '9': return 0b111101111001111;
        case '-': return 0b000000111000000;
        case '.': return 0b000000000000010;
        case '+': return 0b000010111010000;
        case '_': return 0b000000000000111;
        case '/': return 0b001001010100100;
        case 'a': return 0b010101111101101;
        case 'b': return 0b110101110101110;
        case 'c': return 0b011100100100011;
        case 'd': return 0b110101101101110;
        case 'e': return 0b111100110100111;
        case 'f': return 0b111100110100100;
        case 'g': return 0b011100101101011;
        case 'h': return 0b101101111101101;
        case 'i': return 0b111010010010111;
        case 'j': return 0b001001001101010;
        case 'k': return 0b101110100110101;
        case 'l': return 0b100100100100111;
        case 'm': return 0b101111111101101;
        case 'n': return 0b101111111111101;
        case 'o': return 0b010101101101010;
        case 'p': return 0b110101110100100;
        case 'q': return 0b010101101011001;
        case 'r': return 0b110101110110101;
        case 's': return 0b011100010001110;
        case 't': return 0b111010010010010;
        case 'u': return 0b101101101101111;
        case 'v': return 0b101101101101010;
        case 'w': return 0b101101111111101;
        case 'x': return 0b101101010101101;
        case 'y': return 0b101101010010010;
        case 'z': return 0b111001010100111;
        default: return 0;
    }
}

void put_pixel(Image& img, int y, int x, Rgb c) {
    if (y < 0 || y >= img.h || x < 0 || x >= img.w) return;
    img.at(y, x, 0) = c.r;
    img.at(y, x, 1) = c.g;
    img.at(y, x, 2) = c.b;
}

void fill_rect(Image& img, int y0, int x0, int y1, int x1, Rgb c) {
    for (int y = std::max(0, y0); y <= std::min(img.h - 1, y1); ++y) {
        for (int x = std::max(0, x0); x <= std::min(img.w - 1, x1); ++x) {
            put_pixel(img, y, x, c);
        }
    }
}

void draw_line(Image& img, int y0, int x0, int y1, int x1, Rgb c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put_pixel(img, y0, x0, c);
        if (y0 == y1 && x0 == x1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_text(Image& img, int y, int x, const std::string& text, Rgb c, int scale = 1) {
    int cx = x;
    for (char raw : text) {
        const char ch = char(std::tolower(static_cast<unsigned char>(raw)));
        const std::uint16_t bits = glyph_bits(ch);
        for (int gy = 0; gy < 5; ++gy) {
            for (int gx = 0; gx < 3; ++gx) {
                if (bits & (1u << (14 - (gy * 3 + gx)))) {
                    fill_rect(img, y + gy * scale, cx + gx * scale,
                              y + (gy + 1) * scale - 1, cx + (gx + 1) * scale - 1, c);
                }
            }
        }
        cx += 4 * scale;
    }
}

std::string short_number(double v) {
    char buf[32];
    if (v == 0.0) return "0";
    const double a = std::abs(v);
    if (a >= 0.01 && a < 10000.0) {
        std::snprintf(buf, sizeof buf, "%.3g", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.1e", v);
    }
    return buf;
}

size_t find_value_column(const Table& t) {
    for (size_t i = 0; i < t.header.size(); ++i) {
        const std::string& h = t.header[i];
        if (h.size() > 5 && h.substr(h.size() - 5) == "_mean") return i;
    }
    for (size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == "median_s") return i;
    }
    throw FormatError("no *_mean or median_s column to plot");
}

std::optional<size_t> find_column(const Table& t, const std::string& name) {
    for (size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) return i;
    }
    return std::nullopt;
}

Rgb heat_color(double v) {
    // Dark blue through teal to yellow.
    v = std::clamp(v, 0.0, 1.0);
    const Rgb stops[] = {{0.05f, 0.03f, 0.35f},
                         {0.12f, 0.40f, 0.55f},
                         {0.20f, 0.72f, 0.47f},
                         {0.99f, 0.91f, 0.15f}};
    const double t = v * 3.0;
    const int k = std::min(2, int(t));
    const float f = float(t - k);
    return {stops[k].r + (stops[k + 1].r - stops[k].r) * f,
            stops[k].g + (stops[k + 1].g - stops[k].g) * f,
            stops[k].b + (stops[k + 1].b - stops[k].b) * f};
}

constexpr Rgb kBg{1.0f, 1.0f, 1.0f};
constexpr Rgb kAxis{0.15f, 0.15f, 0.15f};

}  // namespace

Image render_line_chart(const Table& table, const PlotOptions& options) {
    if (table.rows.empty()) throw FormatError("line chart: empty table");
    const size_t xcol = 0;
    const size_t ycol = find_value_column(table);
    std::vector<size_t> key_cols;
    for (const char* name : {"method", "direction", "surface"}) {
        if (auto c = find_column(table, name)) key_cols.push_back(*c);
    }

    // series label -> sorted (x, y) points
    std::map<std::string, std::map<double, double>> series;
    for (const auto& row : table.rows) {
        std::string key;
        for (size_t c : key_cols) {
            if (!key.empty()) key += "/";
            key += row[c];
        }
        if (key.empty()) key = table.header[ycol];
        series[key][parse_double(row[xcol])] = parse_double(row[ycol]);
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [key, pts] : series) {
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    Image img(options.height, options.width, 3);
    fill_rect(img, 0, 0, img.h - 1, img.w - 1, kBg);
    const int ml = 56, mr = 12, mt = options.title.empty() ? 14 : 26, mb = 34;
    const int x0 = ml, x1 = img.w - 1 - mr, y0 = mt, y1 = img.h - 1 - mb;
    const auto px = [&](double x) {
        return x0 + int(std::lround((x - xmin) / (xmax - xmin) * (x1 - x0)));
    };
    const auto py = [&](double y) {
        return y1 - int(std::lround((y - ymin) / (ymax - ymin) * (y1 - y0)));
    };

    draw_line(img, y1, x0, y1, x1, kAxis);
    draw_line(img, y0, x0, y1, x0, kAxis);
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        draw_line(img, y1, px(xv), y1 + 3, px(xv), kAxis);
        draw_text(img, y1 + 6, px(xv) - 8, short_number(xv), kAxis);
        draw_line(img, py(yv), x0 - 3, py(yv), x0, kAxis);
        draw_text(img, py(yv) - 2, 6, short_number(yv), kAxis);
    }
    draw_text(img, img.h - 10, (x0 + x1) / 2 - 2 * int(table.header[xcol].size()),
              table.header[xcol], kAxis);
    if (!options.title.empty()) draw_text(img, 6, ml, options.title, kAxis, 2);

    int si = 0;
    int legend_y = y0 + 6;
    for (const auto& [key, pts] : series) {
        const Rgb c = kPalette[size_t(si) % std::size(kPalette)];
        int prev_x = 0, prev_y = 0;
        bool first = true;
        for (const auto& [x, y] : pts) {
            const int cx = px(x), cy = py(y);
            if (!first) draw_line(img, prev_y, prev_x, cy, cx, c);
            fill_rect(img, cy - 1, cx - 1, cy + 1, cx + 1, c);
            prev_x = cx;
            prev_y = cy;
            first = false;
        }
        fill_rect(img, legend_y, x1 - 110, legend_y + 4, x1 - 104, c);
        draw_text(img, legend_y, x1 - 100, key, kAxis);
        legend_y += 9;
        ++si;
    }
    return img;
}

Image render_heatmap(const Table& table, const PlotOptions& options) {
    if (table.rows.empty()) throw FormatError("heatmap: empty table");
    const size_t xcol = 0, ycol = 1;
    const size_t vcol = find_value_column(table);
    const auto panel_col = find_column(table, "surface");

    std::set<double> xs_set, ys_set;
    std::set<std::string> panels_set;
    for (const auto& row : table.rows) {
        xs_set.insert(parse_double(row[xcol]));
        ys_set.insert(parse_double(row[ycol]));
        panels_set.insert(panel_col ? row[*panel_col] : std::string("value"));
    }
    const std::vector<double> xs(xs_set.begin(), xs_set.end());
    const std::vector<double> ys(ys_set.begin(), ys_set.end());
    const std::vector<std::string> panels(panels_set.begin(), panels_set.end());

    double vmin = 1e300, vmax = -1e300;
    std::map<std::string, std::map<std::pair<double, double>, double>> values;
    for (const auto& row : table.rows) {
        const double v = parse_double(row[vcol]);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        values[panel_col ? row[*panel_col] : std::string("value")]
              [{parse_double(row[xcol]), parse_double(row[ycol])}] = v;
    }
    if (vmax <= vmin) vmax = vmin + 1.0;

    const int cell = 22;
    const int panel_w = int(xs.size()) * cell;
    const int panel_h = int(ys.size()) * cell;
    const int ml = 40, mt = options.title.empty() ? 22 : 34, gap = 18, mb = 26;
    const int W = ml + int(panels.size()) * (panel_w + gap) + 60;
    const int H = mt + panel_h + mb;
    Image img(H, W, 3);
    fill_rect(img, 0, 0, H - 1, W - 1, kBg);
    if (!options.title.empty()) draw_text(img, 6, ml, options.title, kAxis, 2);

    for (size_t p = 0; p < panels.size(); ++p) {
        const int ox = ml + int(p) * (panel_w + gap);
        draw_text(img, mt - 10, ox, panels[p], kAxis);
        const auto& grid = values[panels[p]];
        for (size_t yi = 0; yi < ys.size(); ++yi) {
            for (size_t xi = 0; xi < xs.size(); ++xi) {
                const auto it = grid.find({xs[xi], ys[yi]});
                if (it == grid.end()) continue;
                const double t = (it->second - vmin) / (vmax - vmin);
                fill_rect(img, mt + int(yi) * cell, ox + int(xi) * cell,
                          mt + int(yi + 1) * cell - 2, ox + int(xi + 1) * cell - 2,
                          heat_color(t));
            }
        }
        // axis labels on the first panel only
        if (p == 0) {
            for (size_t yi = 0; yi < ys.size(); ++yi) {
                draw_text(img, mt + int(yi) * cell + cell / 2 - 2, 4,
                          short_number(ys[yi]), kAxis);
            }
        }
        for (size_t xi = 0; xi < xs.size(); ++xi) {
            draw_text(img, mt + panel_h + 4, ox + int(xi) * cell + 2,
                      short_number(xs[xi]), kAxis);
        }
    }
    // shared color scale
    const int bar_x = W - 46;
    for (int i = 0; i < panel_h; ++i) {
        const double t = 1.0 - double(i) / std::max(1, panel_h - 1);
        fill_rect(img, mt + i, bar_x, mt + i, bar_x + 10, heat_color(t));
    }
    draw_text(img, mt - 8, bar_x, short_number(vmax), kAxis);
    draw_text(img, mt + panel_h + 2, bar_x, short_number(vmin), kAxis);
    return img;
}

void plot_csv(const std::string& csv_path, const std::string& kind,
              const std::string& out_path, const PlotOptions& options) {
    const Table table = read_csv(csv_path);
    Image img;
    if (kind == "line") {
        img = render_line_chart(table, options);
    } else if (kind == "heatmap") {
        img = render_heatmap(table, options);
    } else {
        throw ConfigError("plot kind must be line or heatmap, got '" + kind + "'");
    }
    save_image(img, out_path);
}

}  // namespace dbmid
