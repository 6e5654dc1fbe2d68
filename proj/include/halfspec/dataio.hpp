#pragma once

// Data ingestion, Irish-wind-style preprocessing, geographic coordinate
// mapping and seedable simulation of regular monitoring data.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "halfspec/model.hpp"

namespace halfspec {

// p spatial sites observed at n equally spaced times, fully observed.
struct RegularMonitoringData {
    std::vector<std::string> stations;  // p station ids
    Eigen::MatrixXd coords;             // d x p site coordinates (km, chordal R^3)
    Eigen::MatrixXd series;             // p x n
    double dt = 1.0;                    // sampling interval (days)

    int p() const { return static_cast<int>(series.rows()); }
    int n() const { return static_cast<int>(series.cols()); }
};

struct RawStationTable {
    struct Station {
        std::string id;
        double lon = 0.0, lat = 0.0;       // degrees
        std::vector<std::int64_t> days;    // serial day numbers, contiguous
        std::vector<double> values;
    };
    std::vector<Station> stations;
};

// CSV columns: station, lon, lat, date (ISO-8601), value.  Header row
// optional.  Rows may arrive in any order; they are grouped per station and
// sorted by date.
RawStationTable read_raw_csv(const std::string& path);

struct PreprocessOptions {
    int n_harmonics = 4;
    std::vector<std::string> drop;   // stations to discard (e.g. Rosslare)
    bool sqrt_first = true;          // sqrt -> harmonics -> center -> scale; false swaps the first two
    bool pooled_harmonics = true;    // one seasonal fit across stations (per-station otherwise)
};

// sqrt transform, harmonic deseasonalization on sin/cos(2 pi j t / 365.25),
// per-station mean subtraction, then per-station sd division.  Output series
// have mean 0 and sd 1 per station.  Missing values and zero-sd stations are
// errors.
RegularMonitoringData preprocess(const RawStationTable& raw, const PreprocessOptions& opts = {});

// Point on the radius-6371 km sphere; chordal distances between outputs are
// the spatial lags used by every model.
Eigen::Vector3d lonlat_to_xyz(double lon_deg, double lat_deg);

// Unit vector in the local east-to-west tangent direction at the site
// centroid; default phase direction for asymmetric fits.
Eigen::Vector3d east_to_west_direction(const Eigen::MatrixXd& coords);

// Exact Gaussian draw on the block-Toeplitz covariance of the model at the
// given sites, via the innovations factorization.  Reproducible per seed.
RegularMonitoringData simulate(const HalfSpectralModel& m, const Eigen::MatrixXd& coords,
                               int n, std::uint64_t seed);

// Data files: JSON header {stations, coords, n, dt, matrix_csv} next to a
// plain CSV value matrix (n rows, p comma-separated columns).
void write_data(const RegularMonitoringData& data, const std::string& json_path);
RegularMonitoringData read_data(const std::string& json_path);

}  // namespace halfspec
