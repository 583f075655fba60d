#include "sxp/geo.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sxp {

namespace {

constexpr double kA = 6378137.0;                 // WGS-84 semi-major axis
constexpr double kF = 1.0 / 298.257223563;       // flattening
constexpr double kK0 = 0.9996;                   // UTM scale at central meridian
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;
constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;

struct Series {
    double n, e, big_a;
    double alpha[6];
    double beta[6];
};

const Series& series() {
    static const Series s = [] {
        Series v{};
        const double n = kF / (2.0 - kF);
        const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
        v.n = n;
        v.e = std::sqrt(kF * (2.0 - kF));
        v.big_a = kA / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
        v.alpha[0] = n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 -
                     127.0 * n5 / 288.0 + 7891.0 * n6 / 37800.0;
        v.alpha[1] = 13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 +
                     281.0 * n5 / 630.0 - 1983433.0 * n6 / 1935360.0;
        v.alpha[2] = 61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 +
                     167603.0 * n6 / 181440.0;
        v.alpha[3] = 49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 +
                     6601661.0 * n6 / 7257600.0;
        v.alpha[4] = 34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0;
        v.alpha[5] = 212378941.0 * n6 / 319334400.0;
        v.beta[0] = n / 2.0 - 2.0 * n2 / 3.0 + 37.0 * n3 / 96.0 - n4 / 360.0 -
                    81.0 * n5 / 512.0 + 96199.0 * n6 / 604800.0;
        v.beta[1] = n2 / 48.0 + n3 / 15.0 - 437.0 * n4 / 1440.0 + 46.0 * n5 / 105.0 -
                    1118711.0 * n6 / 3870720.0;
        v.beta[2] = 17.0 * n3 / 480.0 - 37.0 * n4 / 840.0 - 209.0 * n5 / 4480.0 +
                    5569.0 * n6 / 90720.0;
        v.beta[3] = 4397.0 * n4 / 161280.0 - 11.0 * n5 / 504.0 - 830251.0 * n6 / 7257600.0;
        v.beta[4] = 4583.0 * n5 / 161280.0 - 108847.0 * n6 / 3991680.0;
        v.beta[5] = 20648693.0 * n6 / 638668800.0;
        return v;
    }();
    return s;
}

constexpr char kBandLetters[] = "CDEFGHJKLMNPQRSTUVWX";
constexpr char kRowLetters[] = "ABCDEFGHJKLMNPQRSTUV";  // 20-letter cycle
const char* const kColumnSets[3] = {"STUVWXYZ", "ABCDEFGH", "JKLMNPQR"};
// indexed by zone % 3: zone 1 -> set "ABCDEFGH" (zone%3==1), zone 2 -> "JKLMNPQR",
// zone 3 -> "STUVWXYZ".

char band_letter(double lat) {
    if (lat < -80.0 || lat > 84.0)
        throw std::invalid_argument("latitude outside MGRS bands [-80, 84]");
    int idx = static_cast<int>(std::floor((lat + 80.0) / 8.0));
    if (idx > 19) idx = 19;  // band X spans 72..84
    return kBandLetters[idx];
}

int band_index(char band) {
    for (int i = 0; i < 20; ++i)
        if (kBandLetters[i] == band) return i;
    return -1;
}

int row_letter_index(char row) {
    for (int i = 0; i < 20; ++i)
        if (kRowLetters[i] == row) return i;
    return -1;
}

}  // namespace

int utm_zone_for(double lat, double lon) {
    if (lon == 180.0) lon = -180.0;
    int zone = static_cast<int>(std::floor((lon + 180.0) / 6.0)) + 1;
    // Norway
    if (lat >= 56.0 && lat < 64.0 && lon >= 3.0 && lon < 12.0) zone = 32;
    // Svalbard
    if (lat >= 72.0 && lat <= 84.0) {
        if (lon >= 0.0 && lon < 9.0) zone = 31;
        else if (lon >= 9.0 && lon < 21.0) zone = 33;
        else if (lon >= 21.0 && lon < 33.0) zone = 35;
        else if (lon >= 33.0 && lon < 42.0) zone = 37;
    }
    return zone;
}

UtmCoord latlon_to_utm(double lat, double lon, int zone) {
    if (!(lat >= -80.0 && lat <= 84.0))
        throw std::invalid_argument("latitude outside UTM/MGRS range [-80, 84]");
    if (!(lon > -180.0 && lon <= 180.0) && lon != -180.0)
        throw std::invalid_argument("longitude outside (-180, 180]");
    if (zone == 0) zone = utm_zone_for(lat, lon);

    const Series& s = series();
    const double lam0 = (zone * 6.0 - 183.0) * kDeg;
    const double phi = lat * kDeg;
    double dlam = lon * kDeg - lam0;
    if (dlam > kPi) dlam -= 2.0 * kPi;
    if (dlam < -kPi) dlam += 2.0 * kPi;

    const double sphi = std::sin(phi);
    const double t = std::sinh(std::atanh(sphi) - s.e * std::atanh(s.e * sphi));
    const double xi_p = std::atan2(t, std::cos(dlam));
    const double eta_p = std::asinh(std::sin(dlam) / std::hypot(t, std::cos(dlam)));

    double xi = xi_p, eta = eta_p;
    for (int j = 1; j <= 6; ++j) {
        xi += s.alpha[j - 1] * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
        eta += s.alpha[j - 1] * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
    }

    UtmCoord u;
    u.zone = zone;
    u.north = lat >= 0.0;
    u.easting = kFalseEasting + kK0 * s.big_a * eta;
    u.northing = kK0 * s.big_a * xi + (u.north ? 0.0 : kFalseNorthingSouth);
    return u;
}

void utm_to_latlon(const UtmCoord& u, double& lat, double& lon) {
    const Series& s = series();
    const double lam0 = (u.zone * 6.0 - 183.0) * kDeg;
    const double xi = (u.northing - (u.north ? 0.0 : kFalseNorthingSouth)) / (kK0 * s.big_a);
    const double eta = (u.easting - kFalseEasting) / (kK0 * s.big_a);

    double xi_p = xi, eta_p = eta;
    for (int j = 1; j <= 6; ++j) {
        xi_p -= s.beta[j - 1] * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
        eta_p -= s.beta[j - 1] * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
    }

    // conformal tangent, then invert the conformal-latitude map by iteration
    const double tau_p = std::sin(xi_p) / std::hypot(std::sinh(eta_p), std::cos(xi_p));
    const double psi = std::asinh(tau_p);
    double sphi = std::tanh(psi);
    for (int i = 0; i < 20; ++i)
        sphi = std::tanh(psi + s.e * std::atanh(s.e * sphi));
    lat = std::asin(sphi) / kDeg;
    lon = (lam0 + std::atan2(std::sinh(eta_p), std::cos(xi_p))) / kDeg;
    if (lon > 180.0) lon -= 360.0;
    if (lon <= -180.0) lon += 360.0;
}

GridCell latlon_to_cell(double lat, double lon) {
    const UtmCoord u = latlon_to_utm(lat, lon);
    GridCell c;
    c.zone = u.zone;
    c.band = band_letter(lat);

    const int col_index = static_cast<int>(std::floor(u.easting / 100000.0));  // 1..8
    if (col_index < 1 || col_index > 8)
        throw std::invalid_argument("easting outside MGRS column range");
    c.column = kColumnSets[u.zone % 3][col_index - 1];

    const std::int64_t n100k = static_cast<std::int64_t>(std::floor(u.northing / 100000.0));
    const int row_index = static_cast<int>(((n100k % 20) + 20) % 20);
    const int row_offset = (u.zone % 2 == 1) ? 0 : 5;
    c.row = kRowLetters[(row_index + row_offset) % 20];

    c.easting_km = static_cast<int>(std::floor(std::fmod(u.easting, 100000.0) / 1000.0));
    c.northing_km = static_cast<int>(std::floor(std::fmod(u.northing, 100000.0) / 1000.0));
    return c;
}

std::string GridCell::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d%c%c%c%02d%02d", zone, band, column, row,
                  easting_km, northing_km);
    return buf;
}

std::optional<GridCell> GridCell::parse(const std::string& s) {
    // [z]zBCCeenn : 1-2 digit zone, band, two square letters, 2+2 digits
    std::size_t i = 0;
    int zone = 0, digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && digits < 2) {
        zone = zone * 10 + (s[i++] - '0');
        ++digits;
    }
    if (digits == 0 || zone < 1 || zone > 60) return std::nullopt;
    if (s.size() - i != 7) return std::nullopt;
    GridCell c;
    c.zone = zone;
    c.band = s[i++];
    c.column = s[i++];
    c.row = s[i++];
    if (band_index(c.band) < 0 || row_letter_index(c.row) < 0) return std::nullopt;
    const char* set = kColumnSets[zone % 3];
    if (std::string(set).find(c.column) == std::string::npos) return std::nullopt;
    for (int k = 0; k < 4; ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[i + k]))) return std::nullopt;
    c.easting_km = (s[i] - '0') * 10 + (s[i + 1] - '0');
    c.northing_km = (s[i + 2] - '0') * 10 + (s[i + 3] - '0');
    return c;
}

UtmCoord cell_sw_corner_utm(const GridCell& cell) {
    const char* set = kColumnSets[cell.zone % 3];
    int col_index = -1;
    for (int i = 0; i < 8; ++i)
        if (set[i] == cell.column) col_index = i + 1;
    if (col_index < 0) throw std::invalid_argument("bad MGRS column letter for zone");
    const double easting = col_index * 100000.0 + cell.easting_km * 1000.0;

    const int row_offset = (cell.zone % 2 == 1) ? 0 : 5;
    int row_index = row_letter_index(cell.row);
    if (row_index < 0) throw std::invalid_argument("bad MGRS row letter");
    row_index = (row_index - row_offset + 20) % 20;

    // Resolve the 2000 km row-letter ambiguity with the latitude band span.
    const int bidx = band_index(cell.band);
    if (bidx < 0) throw std::invalid_argument("bad MGRS band letter");
    const double lat_low = -80.0 + 8.0 * bidx;
    const double lat_high = bidx == 19 ? 84.0 : lat_low + 8.0;
    const double lam0_deg = cell.zone * 6.0 - 183.0;
    double n_min = 1e18, n_max = -1e18;
    for (double lat : {lat_low, lat_high}) {
        for (double dl : {0.0, -3.0, 3.0}) {
            const UtmCoord u = latlon_to_utm(lat == 0.0 ? 1e-9 : lat, lam0_deg + dl, cell.zone);
            double n = u.northing + (u.north == cell.north_hemisphere()
                                         ? 0.0
                                         : (cell.north_hemisphere() ? -kFalseNorthingSouth
                                                                    : kFalseNorthingSouth));
            n_min = std::min(n_min, n);
            n_max = std::max(n_max, n);
        }
    }
    const double base = row_index * 100000.0 + cell.northing_km * 1000.0;
    double northing = base;
    while (northing + 100000.0 < n_min - 5000.0) northing += 2000000.0;

    UtmCoord u;
    u.zone = cell.zone;
    u.north = cell.north_hemisphere();
    u.easting = easting;
    u.northing = northing;
    if (northing > n_max + 100000.0 + 5000.0)
        throw std::invalid_argument("MGRS cell outside its latitude band");
    return u;
}

void cell_center_latlon(const GridCell& cell, double& lat, double& lon) {
    UtmCoord u = cell_sw_corner_utm(cell);
    u.easting += 500.0;
    u.northing += 500.0;
    utm_to_latlon(u, lat, lon);
}

std::array<std::pair<double, double>, 4> cell_corners_latlon(const GridCell& cell) {
    const UtmCoord sw = cell_sw_corner_utm(cell);
    std::array<std::pair<double, double>, 4> out;
    const double de[4] = {0.0, 1000.0, 1000.0, 0.0};
    const double dn[4] = {0.0, 0.0, 1000.0, 1000.0};
    for (int i = 0; i < 4; ++i) {
        UtmCoord u = sw;
        u.easting += de[i];
        u.northing += dn[i];
        utm_to_latlon(u, out[i].first, out[i].second);
    }
    return out;
}

}  // namespace sxp
