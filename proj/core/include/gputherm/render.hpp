#ifndef GPUTHERM_RENDER_HPP
#define GPUTHERM_RENDER_HPP

#include "gputherm/floorplan.hpp"
#include "gputherm/thermal.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gputherm {

using Rgb = std::array<std::uint8_t, 3>;

/// Piecewise-linear color ramp over [t_min_K, t_max_K]; out-of-range
/// temperatures clamp to the endpoint colors.
struct ColorScale {
    double t_min_K = 0.0;
    double t_max_K = 1.0;
    std::vector<Rgb> stops{{0, 0, 255}, {0, 255, 0}, {255, 0, 0}};

    static ColorScale auto_range(const TemperatureField& field, int layer);
    Rgb color_at(double temp_K) const;
};

struct HeatmapImage {
    int width_px = 0;
    int height_px = 0;
    std::vector<std::uint8_t> pixels; // RGB, row-major, top row first
};

/// Rasterizes one layer; bottom_m = 0 lands at the image bottom. When an
/// overlay floorplan is given, unit boundaries are drawn as 1-px black lines.
HeatmapImage render_layer(const TemperatureField& field, int layer, const ColorScale& scale,
                          int px_per_cell = 1, const Floorplan* overlay = nullptr);

/// Binary P6 portable pixmap, byte-exact.
std::string encode_ppm(const HeatmapImage& img);
void write_image(const HeatmapImage& img, const std::string& path);

/// `unit,mean_K,max_K` header plus one row per unit, 6 decimal digits.
std::string unit_csv(const std::vector<UnitTemperature>& aggregates);
void export_unit_csv(const std::vector<UnitTemperature>& aggregates, const std::string& path);

} // namespace gputherm

#endif
