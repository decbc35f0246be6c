#pragma once
/// Numerical primitives shared across the library: stable polynomial-times-
/// exponential integrals, Gauss-Legendre quadrature, normal distribution.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mchjm {

/// phibar_j(x) = integral_0^1 s^j exp(-x(1-s)) ds, entire in x.
/// Building block for int_0^w z^j e^{a(z-w)} dz = w^{j+1} phibar_j(a w),
/// stable for mean reversions all the way down to zero.
inline double phibar(int j, double x) {
    if (std::abs(x) < 2.0) {
        // j! * sum_m (-x)^m / (j+m+1)!
        double term = 1.0 / (j + 1);
        double sum = term;
        for (int m = 1; m < 40; ++m) {
            term *= -x / (j + m + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    if (x < -700.0) throw std::domain_error("phibar: exponent out of double range");
    const double e = std::exp(-x);
    double f = (1.0 - e) / x;
    for (int k = 1; k <= j; ++k) f = (1.0 - k * f) / x;
    return f;
}

/// integral_s^u (c0 + c1 y + c2 y^2 + c3 y^3) e^{a (y-u)} dy,
/// exact up to round-off for any real a (including a = 0).
inline double poly_exp_integral(const std::array<double, 4>& c, double a, double s, double u) {
    const double w = u - s;
    if (w == 0.0) return 0.0;
    // re-expand the polynomial around s: p(s+z) = b0 + b1 z + b2 z^2 + b3 z^3
    const double b0 = ((c[3] * s + c[2]) * s + c[1]) * s + c[0];
    const double b1 = (3.0 * c[3] * s + 2.0 * c[2]) * s + c[1];
    const double b2 = 3.0 * c[3] * s + c[2];
    const double b3 = c[3];
    const double x = a * w;
    double wp = w;
    double r = b0 * wp * phibar(0, x);
    wp *= w;
    r += b1 * wp * phibar(1, x);
    wp *= w;
    r += b2 * wp * phibar(2, x);
    wp *= w;
    r += b3 * wp * phibar(3, x);
    return r;
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        const double pi = 3.14159265358979323846;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

inline const GaussLegendre& gl64() {
    static const GaussLegendre g(64);
    return g;
}
inline const GaussLegendre& gl32() {
    static const GaussLegendre g(32);
    return g;
}

/// Composite Gauss-Legendre over [a, b] with a fixed panel count.
template <typename F>
double integrate_gl(const F& f, double a, double b, const GaussLegendre& rule, int panels = 1) {
    if (b == a) return 0.0;
    if (panels < 1) panels = 1;
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double half = 0.5 * h;
        const double mid = lo + half;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(mid + half * rule.x[i]);
        total += acc * half;
    }
    return total;
}

/// Panel count so that each panel sees at most ~8 e-folds of the stiffest rate.
inline int decay_panels(double rate, double width) {
    const double folds = std::abs(rate) * std::abs(width);
    return folds <= 8.0 ? 1 : static_cast<int>(std::ceil(folds / 8.0));
}

inline double norm_pdf(double z) {
    return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

inline double norm_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

} // namespace mchjm
