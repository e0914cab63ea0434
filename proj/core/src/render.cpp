#include "gputherm/render.hpp"
#include "gputherm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace gputherm {

ColorScale ColorScale::auto_range(const TemperatureField& field, int layer) {
    if (layer < 0 || layer >= field.n_layers) throw BadLayerIndex("layer out of range");
    double lo = field.at(layer, 0, 0), hi = lo;
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            const double t = field.at(layer, ix, iy);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    ColorScale scale;
    scale.t_min_K = lo;
    // a degenerate range still needs t_min < t_max
    scale.t_max_K = hi > lo ? hi : lo + 1.0;
    return scale;
}

Rgb ColorScale::color_at(double temp_K) const {
    const double s = std::clamp((temp_K - t_min_K) / (t_max_K - t_min_K), 0.0, 1.0);
    const std::size_t segments = stops.size() - 1;
    const double pos = s * static_cast<double>(segments);
    std::size_t seg = std::min(static_cast<std::size_t>(pos), segments - 1);
    const double f = pos - static_cast<double>(seg);
    Rgb out;
    for (int c = 0; c < 3; ++c) {
        const double v = (1.0 - f) * stops[seg][c] + f * stops[seg + 1][c];
        out[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    return out;
}

HeatmapImage render_layer(const TemperatureField& field, int layer, const ColorScale& scale,
                          int px_per_cell, const Floorplan* overlay) {
    if (layer < 0 || layer >= field.n_layers) throw BadLayerIndex("layer out of range");
    if (px_per_cell < 1) throw InvalidSpec("px_per_cell must be >= 1");
    if (scale.t_min_K >= scale.t_max_K) throw InvalidSpec("color scale needs t_min < t_max");
    if (scale.stops.size() < 2) throw InvalidSpec("color scale needs at least 2 stops");

    HeatmapImage img;
    img.width_px = field.nx * px_per_cell;
    img.height_px = field.ny * px_per_cell;
    img.pixels.resize(static_cast<std::size_t>(img.width_px) * img.height_px * 3);

    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            const Rgb rgb = scale.color_at(field.at(layer, ix, iy));
            for (int py = 0; py < px_per_cell; ++py) {
                // y flipped: grid row 0 is the chip bottom
                const int row = (field.ny - 1 - iy) * px_per_cell + py;
                for (int px = 0; px < px_per_cell; ++px) {
                    const std::size_t off =
                        (static_cast<std::size_t>(row) * img.width_px + ix * px_per_cell + px) * 3;
                    img.pixels[off] = rgb[0];
                    img.pixels[off + 1] = rgb[1];
                    img.pixels[off + 2] = rgb[2];
                }
            }
        }
    }

    if (overlay) {
        auto put_black = [&](int x, int y) {
            if (x < 0 || y < 0 || x >= img.width_px || y >= img.height_px) return;
            const std::size_t off = (static_cast<std::size_t>(y) * img.width_px + x) * 3;
            img.pixels[off] = img.pixels[off + 1] = img.pixels[off + 2] = 0;
        };
        const double sx = img.width_px / overlay->chip_width_m;
        const double sy = img.height_px / overlay->chip_height_m;
        for (const auto& u : overlay->units) {
            int x0 = static_cast<int>(std::lround(u.left_m * sx));
            int x1 = static_cast<int>(std::lround(u.right_m() * sx)) - 1;
            int y1 = img.height_px - 1 - static_cast<int>(std::lround(u.bottom_m * sy));
            int y0 = img.height_px - static_cast<int>(std::lround(u.top_m() * sy));
            x0 = std::clamp(x0, 0, img.width_px - 1);
            x1 = std::clamp(x1, 0, img.width_px - 1);
            y0 = std::clamp(y0, 0, img.height_px - 1);
            y1 = std::clamp(y1, 0, img.height_px - 1);
            for (int x = x0; x <= x1; ++x) {
                put_black(x, y0);
                put_black(x, y1);
            }
            for (int y = y0; y <= y1; ++y) {
                put_black(x0, y);
                put_black(x1, y);
            }
        }
    }
    return img;
}

std::string encode_ppm(const HeatmapImage& img) {
    std::string out = "P6\n" + std::to_string(img.width_px) + " " +
                      std::to_string(img.height_px) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

void write_image(const HeatmapImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    const std::string bytes = encode_ppm(img);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
}

std::string unit_csv(const std::vector<UnitTemperature>& aggregates) {
    std::string out = "unit,mean_K,max_K\n";
    char buf[96];
    for (const auto& a : aggregates) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", a.mean_K, a.max_K);
        out += a.unit;
        out += buf;
    }
    return out;
}

void export_unit_csv(const std::vector<UnitTemperature>& aggregates, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << unit_csv(aggregates);
    if (!out) throw IoError("write failed for " + path);
}

} // namespace gputherm
