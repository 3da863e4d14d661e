#include "tables.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// Lane-wise mirror of scalar.cpp. std::max(a, b) is (a < b) ? b : a, which is
// _mm256_max_pd(b, a); keeping that operand order preserves signed zeros and
// NaN propagation exactly.

namespace swingsafe::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

void primal_step(std::span<double> z, std::span<const double> g, double coef) noexcept {
    const std::size_t n = z.size();
    const __m256d c = _mm256_set1_pd(coef);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d zv = _mm256_loadu_pd(z.data() + i);
        const __m256d gv = _mm256_loadu_pd(g.data() + i);
        _mm256_storeu_pd(z.data() + i, _mm256_sub_pd(zv, _mm256_mul_pd(c, gv)));
    }
    for (; i < n; ++i) z[i] = z[i] - coef * g[i];
}

void dual_ineq_step(std::span<double> eta, std::span<const double> r, double coef) noexcept {
    const std::size_t n = eta.size();
    const __m256d c = _mm256_set1_pd(coef);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d ev = _mm256_loadu_pd(eta.data() + i);
        const __m256d rv = _mm256_loadu_pd(r.data() + i);
        const __m256d active = _mm256_cmp_pd(ev, zero, _CMP_GT_OQ);
        const __m256d d = _mm256_blendv_pd(_mm256_max_pd(zero, rv), rv, active);
        const __m256d next = _mm256_add_pd(ev, _mm256_mul_pd(c, d));
        _mm256_storeu_pd(eta.data() + i, _mm256_max_pd(zero, next));
    }
    for (; i < n; ++i) {
        const double d = eta[i] > 0.0 ? r[i] : std::max(r[i], 0.0);
        eta[i] = std::max(eta[i] + coef * d, 0.0);
    }
}

void dual_eq_step(std::span<double> mu, std::span<const double> r, double coef) noexcept {
    const std::size_t n = mu.size();
    const __m256d c = _mm256_set1_pd(coef);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d mv = _mm256_loadu_pd(mu.data() + i);
        const __m256d rv = _mm256_loadu_pd(r.data() + i);
        _mm256_storeu_pd(mu.data() + i, _mm256_add_pd(mv, _mm256_mul_pd(c, rv)));
    }
    for (; i < n; ++i) mu[i] = mu[i] + coef * r[i];
}

void projected_direction(std::span<double> out, std::span<const double> r,
                         std::span<const double> eta) noexcept {
    const std::size_t n = out.size();
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d ev = _mm256_loadu_pd(eta.data() + i);
        const __m256d rv = _mm256_loadu_pd(r.data() + i);
        const __m256d active = _mm256_cmp_pd(ev, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(_mm256_max_pd(zero, rv), rv, active));
    }
    for (; i < n; ++i) out[i] = eta[i] > 0.0 ? r[i] : std::max(r[i], 0.0);
}

void axpy(std::span<double> y, double a, std::span<const double> x) noexcept {
    const std::size_t n = y.size();
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d yv = _mm256_loadu_pd(y.data() + i);
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void add_scaled(std::span<double> out, std::span<const double> x, double a,
                std::span<const double> y) noexcept {
    const std::size_t n = out.size();
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d yv = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(xv, _mm256_mul_pd(av, yv)));
    }
    for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine(std::span<double> out, std::span<const double> x, double c,
                 std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) noexcept {
    const std::size_t n = out.size();
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1.data() + i),
                                  _mm256_mul_pd(two, _mm256_loadu_pd(k2.data() + i)));
        s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(k3.data() + i)));
        s = _mm256_add_pd(s, _mm256_loadu_pd(k4.data() + i));
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(xv, _mm256_mul_pd(cv, s)));
    }
    for (; i < n; ++i) {
        const double s = ((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i];
        out[i] = x[i] + c * s;
    }
}

double horizontal_sum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t n = a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                                               _mm256_loadu_pd(b.data() + i)));
    double s = horizontal_sum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double max_abs(std::span<const double> a) noexcept {
    const std::size_t n = a.size();
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        m = _mm256_max_pd(_mm256_andnot_pd(sign, _mm256_loadu_pd(a.data() + i)), m);
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, m);
    double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) r = std::max(r, std::abs(a[i]));
    return r;
}

double positive_part_sq(std::span<const double> a) noexcept {
    const std::size_t n = a.size();
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d p = _mm256_max_pd(zero, _mm256_loadu_pd(a.data() + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(p, p));
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i) {
        const double p = std::max(a[i], 0.0);
        s += p * p;
    }
    return s;
}

} // namespace

const Table kTable{
    primal_step, dual_ineq_step, dual_eq_step, projected_direction, axpy,
    add_scaled,  rk4_combine,    dot,          max_abs,             positive_part_sq,
};

} // namespace swingsafe::kernels::avx2
