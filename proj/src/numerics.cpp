#include "halfspec/numerics.hpp"

#include <atomic>
#include <cstdlib>

namespace halfspec {

namespace {

std::atomic<int> g_thread_cap{-1};

int default_threads() {
    if (const char* env = std::getenv("HALFSPEC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace

int thread_cap() {
    const int v = g_thread_cap.load();
    return v > 0 ? v : default_threads();
}

void set_thread_cap(int n) { g_thread_cap.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(thread_cap(), n);
    if (workers <= 1 || n < 32) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(err);
}

std::vector<std::vector<double>> halton_ball(int dim, double radius, int count) {
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    if (dim < 1 || dim > 8) throw std::invalid_argument("halton_ball: dim must be in [1,8]");
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    std::uint64_t idx = 1;
    while (static_cast<int>(pts.size()) < count) {
        std::vector<double> p(dim);
        double norm2 = 0.0;
        for (int j = 0; j < dim; ++j) {
            p[j] = radius * (2.0 * halton(idx, primes[j]) - 1.0);
            norm2 += p[j] * p[j];
        }
        ++idx;
        if (norm2 <= radius * radius) pts.push_back(std::move(p));
        if (idx > 1000000ULL * static_cast<std::uint64_t>(count + 1)) {
            throw std::runtime_error("halton_ball: rejection sampling stalled");
        }
    }
    return pts;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 knots");
    y2_.assign(n, 0.0);
    std::vector<double> u(n - 1, 0.0);
    for (std::size_t i = 1; i < n - 1; ++i) {
        const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
        const double p = sig * y2_[i - 1] + 2.0;
        y2_[i] = (sig - 1.0) / p;
        u[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) - (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
        u[i] = (6.0 * u[i] / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        y2_[k] = y2_[k] * y2_[k + 1] + u[k];
    }
}

double CubicSpline::operator()(double xq) const {
    const std::size_t n = x_.size();
    std::size_t lo = 0, hi = n - 1;
    if (xq <= x_.front()) {
        hi = 1;
    } else if (xq >= x_.back()) {
        lo = n - 2;
    } else {
        const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        hi = static_cast<std::size_t>(it - x_.begin());
        lo = hi - 1;
    }
    const double h = x_[hi] - x_[lo];
    const double a = (x_[hi] - xq) / h;
    const double b = (xq - x_[lo]) / h;
    return a * y_[lo] + b * y_[hi] +
           ((a * a * a - a) * y2_[lo] + (b * b * b - b) * y2_[hi]) * (h * h) / 6.0;
}

}  // namespace halfspec
