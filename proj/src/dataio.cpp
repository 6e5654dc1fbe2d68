#include "halfspec/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "halfspec/detail/wwr.hpp"
#include "halfspec/exactlik.hpp"

namespace halfspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDaysPerYear = 365.25;

[[noreturn]] void io_fail(const std::string& msg) {
    throw std::runtime_error("dataio: " + msg);
}

// Serial day number from a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t parse_iso_date(const std::string& s) {
    int y, m, d;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3) {
        io_fail("bad date '" + s + "' (expected YYYY-MM-DD)");
    }
    return days_from_civil(y, m, d);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct BoxMuller {
    std::mt19937_64 rng;
    double cached = 0.0;
    bool has_cached = false;

    explicit BoxMuller(std::uint64_t seed) : rng(seed) {}

    double operator()() {
        if (has_cached) {
            has_cached = false;
            return cached;
        }
        // u1 in (0,1], u2 in [0,1)
        const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached = r * std::sin(2.0 * kPi * u2);
        has_cached = true;
        return r * std::cos(2.0 * kPi * u2);
    }
};

}  // namespace

RawStationTable read_raw_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) io_fail("cannot open '" + path + "'");
    std::map<std::string, RawStationTable::Station> by_id;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (first) {
            first = false;
            if (cols.size() >= 5 && (cols[0] == "station" || cols[0] == "id")) continue;
        }
        if (cols.size() < 5) io_fail("expected 5 columns (station,lon,lat,date,value)");
        auto& st = by_id[cols[0]];
        st.id = cols[0];
        st.lon = std::stod(cols[1]);
        st.lat = std::stod(cols[2]);
        st.days.push_back(parse_iso_date(cols[3]));
        st.values.push_back(std::stod(cols[4]));
    }
    RawStationTable raw;
    for (auto& [id, st] : by_id) {
        // Sort observations by date.
        std::vector<std::size_t> order(st.days.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return st.days[a] < st.days[b]; });
        RawStationTable::Station sorted;
        sorted.id = st.id;
        sorted.lon = st.lon;
        sorted.lat = st.lat;
        for (std::size_t i : order) {
            sorted.days.push_back(st.days[i]);
            sorted.values.push_back(st.values[i]);
        }
        raw.stations.push_back(std::move(sorted));
    }
    return raw;
}

RegularMonitoringData preprocess(const RawStationTable& raw, const PreprocessOptions& opts) {
    std::vector<const RawStationTable::Station*> keep;
    for (const auto& st : raw.stations) {
        if (std::find(opts.drop.begin(), opts.drop.end(), st.id) == opts.drop.end()) {
            keep.push_back(&st);
        }
    }
    if (keep.empty()) io_fail("no stations left after drops");

    // Contiguity per station, then alignment on the common date window.
    std::int64_t lo = keep[0]->days.front(), hi = keep[0]->days.back();
    for (const auto* st : keep) {
        if (st->days.empty()) io_fail("station '" + st->id + "' has no observations");
        for (std::size_t i = 1; i < st->days.size(); ++i) {
            if (st->days[i] != st->days[i - 1] + 1) {
                io_fail("station '" + st->id + "' has a gap or duplicate at day index " +
                        std::to_string(i) + " (no imputation)");
            }
        }
        lo = std::max(lo, st->days.front());
        hi = std::min(hi, st->days.back());
    }
    if (hi < lo) io_fail("stations share no common date range");
    const int n = static_cast<int>(hi - lo + 1);
    const int p = static_cast<int>(keep.size());

    Eigen::MatrixXd Y(p, n);
    for (int i = 0; i < p; ++i) {
        const auto* st = keep[i];
        const std::int64_t off = lo - st->days.front();
        for (int t = 0; t < n; ++t) {
            const double v = st->values[static_cast<std::size_t>(off) + t];
            if (!std::isfinite(v)) io_fail("non-finite value in station '" + st->id + "'");
            Y(i, t) = v;
        }
    }

    const auto apply_sqrt = [&](Eigen::MatrixXd& M) {
        if ((M.array() < 0.0).any()) io_fail("negative values: sqrt transform undefined");
        M = M.array().sqrt().matrix();
    };

    // Harmonic regression on sin/cos(2 pi j t / 365.25) with intercept.
    // keep_level subtracts only the seasonal part (raw-scale use, so the
    // subsequent sqrt stays defined).
    const auto deseasonalize = [&](Eigen::MatrixXd& M, bool keep_level) {
        const int H = opts.n_harmonics;
        const int q = 1 + 2 * H;
        Eigen::MatrixXd X(n, q);
        for (int t = 0; t < n; ++t) {
            X(t, 0) = 1.0;
            for (int j = 1; j <= H; ++j) {
                const double ang = 2.0 * kPi * j * static_cast<double>(t) / kDaysPerYear;
                X(t, 2 * j - 1) = std::sin(ang);
                X(t, 2 * j) = std::cos(ang);
            }
        }
        const Eigen::MatrixXd XtX = X.transpose() * X;
        const Eigen::LLT<Eigen::MatrixXd> llt(XtX);
        const auto seasonal = [&](Eigen::VectorXd coef) {
            if (keep_level) coef(0) = 0.0;
            return (X * coef).eval();
        };
        if (opts.pooled_harmonics) {
            // One seasonal signal shared by all stations.
            Eigen::VectorXd xty = Eigen::VectorXd::Zero(q);
            for (int i = 0; i < p; ++i) xty += X.transpose() * M.row(i).transpose();
            const Eigen::VectorXd fitted = seasonal(llt.solve(xty / p));
            for (int i = 0; i < p; ++i) M.row(i) -= fitted.transpose();
        } else {
            for (int i = 0; i < p; ++i) {
                const Eigen::VectorXd coef = llt.solve(X.transpose() * M.row(i).transpose());
                M.row(i) -= seasonal(coef).transpose();
            }
        }
    };

    if (opts.sqrt_first) {
        apply_sqrt(Y);
        deseasonalize(Y, false);
    } else {
        deseasonalize(Y, true);
        apply_sqrt(Y);
    }

    for (int i = 0; i < p; ++i) {
        Y.row(i).array() -= Y.row(i).mean();
        const double sd = std::sqrt(Y.row(i).squaredNorm() / (n - 1));
        if (!(sd > 0.0)) io_fail("station '" + keep[i]->id + "' has zero variance after centering");
        Y.row(i) /= sd;
    }

    RegularMonitoringData data;
    data.series = Y;
    data.dt = 1.0;
    data.coords.resize(3, p);
    for (int i = 0; i < p; ++i) {
        data.stations.push_back(keep[i]->id);
        data.coords.col(i) = lonlat_to_xyz(keep[i]->lon, keep[i]->lat);
    }
    return data;
}

Eigen::Vector3d lonlat_to_xyz(double lon_deg, double lat_deg) {
    const double lon = lon_deg * kPi / 180.0;
    const double lat = lat_deg * kPi / 180.0;
    return {kEarthRadiusKm * std::cos(lat) * std::cos(lon),
            kEarthRadiusKm * std::cos(lat) * std::sin(lon),
            kEarthRadiusKm * std::sin(lat)};
}

Eigen::Vector3d east_to_west_direction(const Eigen::MatrixXd& coords) {
    if (coords.rows() != 3 || coords.cols() < 1) {
        io_fail("east_to_west_direction expects 3 x p coordinates");
    }
    const Eigen::Vector3d c = coords.rowwise().mean();
    const double lon = std::atan2(c(1), c(0));
    return {std::sin(lon), -std::cos(lon), 0.0};
}

RegularMonitoringData simulate(const HalfSpectralModel& m, const Eigen::MatrixXd& coords,
                               int n, std::uint64_t seed) {
    const int p = static_cast<int>(coords.cols());
    if (static_cast<long>(p) * n > 50000) {
        throw std::invalid_argument("simulate: p*n exceeds the 50000 exact-draw guard");
    }
    const BlockCovarianceSequence seq = block_sequence(m, coords, n);
    detail::WwrEngine eng(seq);
    BoxMuller normal(seed);

    Eigen::MatrixXd X(p, n);
    for (int t = 0; t < n; ++t) {
        if (t > 0) eng.advance();
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
        for (int k = 1; k <= t; ++k) mean.noalias() += eng.F(k) * X.col(t - k);
        Eigen::VectorXd z(p);
        for (int i = 0; i < p; ++i) z(i) = normal();
        X.col(t) = mean + eng.sigma_f_llt().matrixL() * z;
    }

    RegularMonitoringData data;
    data.coords = coords;
    data.series = X;
    data.dt = 1.0;
    for (int i = 0; i < p; ++i) data.stations.push_back("s" + std::to_string(i));
    return data;
}

void write_data(const RegularMonitoringData& data, const std::string& json_path) {
    std::string matrix_path = json_path;
    const auto dot = matrix_path.rfind(".json");
    if (dot != std::string::npos) matrix_path = matrix_path.substr(0, dot);
    matrix_path += ".csv";

    nlohmann::json j;
    j["stations"] = data.stations;
    std::vector<std::vector<double>> coords;
    for (int i = 0; i < data.coords.cols(); ++i) {
        coords.push_back({data.coords(0, i), data.coords(1, i), data.coords(2, i)});
    }
    j["coords"] = coords;
    j["n"] = data.n();
    j["dt"] = data.dt;
    // Matrix file referenced relative to the header's directory.
    std::string base = matrix_path;
    const auto slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    j["matrix_csv"] = base;

    std::ofstream out(json_path);
    if (!out) io_fail("cannot write '" + json_path + "'");
    out << j.dump(2) << "\n";

    std::ofstream mat(matrix_path);
    if (!mat) io_fail("cannot write '" + matrix_path + "'");
    char buf[32];
    for (int t = 0; t < data.n(); ++t) {
        for (int i = 0; i < data.p(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", data.series(i, t));
            mat << buf << (i + 1 == data.p() ? '\n' : ',');
        }
    }
}

RegularMonitoringData read_data(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) io_fail("cannot open '" + json_path + "'");
    nlohmann::json j;
    in >> j;

    RegularMonitoringData data;
    data.stations = j.at("stations").get<std::vector<std::string>>();
    const auto coords = j.at("coords").get<std::vector<std::vector<double>>>();
    const int p = static_cast<int>(coords.size());
    if (p == 0 || static_cast<int>(data.stations.size()) != p) io_fail("bad header: stations/coords mismatch");
    data.coords.resize(3, p);
    for (int i = 0; i < p; ++i) {
        if (coords[i].size() != 3) io_fail("bad header: coords must be xyz triples");
        for (int k = 0; k < 3; ++k) data.coords(k, i) = coords[i][k];
    }
    const int n = j.at("n").get<int>();
    data.dt = j.value("dt", 1.0);

    std::string matrix_path = j.at("matrix_csv").get<std::string>();
    const auto slash = json_path.find_last_of('/');
    if (slash != std::string::npos && matrix_path.find('/') == std::string::npos) {
        matrix_path = json_path.substr(0, slash + 1) + matrix_path;
    }
    std::ifstream mat(matrix_path);
    if (!mat) io_fail("cannot open matrix file '" + matrix_path + "'");
    data.series.resize(p, n);
    std::string line;
    for (int t = 0; t < n; ++t) {
        if (!std::getline(mat, line)) io_fail("matrix file truncated at row " + std::to_string(t));
        const auto cols = split_csv_line(line);
        if (static_cast<int>(cols.size()) != p) io_fail("matrix row " + std::to_string(t) + " has wrong width");
        for (int i = 0; i < p; ++i) data.series(i, t) = std::stod(cols[i]);
    }
    return data;
}

}  // namespace halfspec
