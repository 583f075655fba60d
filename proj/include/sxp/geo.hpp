#pragma once

// WGS-84 transverse Mercator projection (Krüger series to n^6) and MGRS
// 1 km grid cells. Cell ids are the location features of the learner, so
// encoding is deterministic and truncates (never rounds) to km precision.

#include <array>
#include <optional>
#include <string>

namespace sxp {

struct UtmCoord {
    int zone = 0;        // 1..60
    bool north = true;   // hemisphere
    double easting = 0.0;
    double northing = 0.0;
};

struct GridCell {
    int zone = 0;        // 1..60
    char band = 'N';     // C..X minus I,O
    char column = 'A';   // 100 km square column letter
    char row = 'A';      // 100 km square row letter
    int easting_km = 0;  // 0..99
    int northing_km = 0; // 0..99

    bool north_hemisphere() const { return band >= 'N'; }

    // Fixed-width canonical form, e.g. "31UDQ4811".
    std::string str() const;
    static std::optional<GridCell> parse(const std::string& s);

    auto operator<=>(const GridCell&) const = default;
};

// Grid zone for a coordinate, including the Norway and Svalbard exceptions.
int utm_zone_for(double lat, double lon);

// Forward projection into the given zone (or the natural zone if zone==0).
// Valid for lat in [-80, 84]; throws std::invalid_argument outside.
UtmCoord latlon_to_utm(double lat, double lon, int zone = 0);

void utm_to_latlon(const UtmCoord& u, double& lat, double& lon);

GridCell latlon_to_cell(double lat, double lon);

// South-west corner of the 1 km cell in UTM coordinates.
UtmCoord cell_sw_corner_utm(const GridCell& cell);

void cell_center_latlon(const GridCell& cell, double& lat, double& lon);

// The four cell corners as (lat, lon), counterclockwise from the SW corner.
std::array<std::pair<double, double>, 4> cell_corners_latlon(const GridCell& cell);

}  // namespace sxp
