#pragma once

// Small numerical utilities shared across modules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace halfspec {

// Pairwise (tree) summation with a fixed reduction order.  The result does
// not depend on how the terms were produced (thread count included), only
// on their values and order.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Worker cap for parallel maps: HALFSPEC_THREADS env var, overridable per
// call; 0 means hardware concurrency.
int thread_cap();
void set_thread_cap(int n);

// Evaluates fn(i) for i in [0, n) over a static partition of at most
// thread_cap() workers.  fn must only write to its own slot(s); reductions
// happen afterwards in deterministic order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Halton low-discrepancy sequence (deterministic quasi-random points).
inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

// First `count` Halton points inside the radius-R ball of dimension dim,
// obtained by rejection from the enclosing cube.  Deterministic.
std::vector<std::vector<double>> halton_ball(int dim, double radius, int count);

// Natural cubic spline interpolant on a strictly increasing grid.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, y2_;
};

}  // namespace halfspec
