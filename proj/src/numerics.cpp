#include "pilotgeom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace pilotgeom {

namespace {

using detail::kGk15;

struct PanelResult {
    double value = 0.0;
    double error = 0.0;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g7 = kGk15[0][1] * f0;
    double k15 = kGk15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGk15[i][0];
        const double fsum = f(mid + dx) + f(mid - dx);
        g7 += kGk15[i][1] * fsum;
        k15 += kGk15[i][2] * fsum;
    }
    g7 *= half;
    k15 *= half;
    PanelResult r;
    r.value = k15;
    // QUADPACK-style sharpened estimate, capped at the raw G/K difference
    const double diff = std::fabs(k15 - g7);
    r.error = std::min(std::pow(200.0 * diff, 1.5), diff);
    r.error = std::max(r.error, std::fabs(k15) * 1e-16);
    return r;
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

double integrate_finite(const std::function<double(double)>& f, double a,
                        double b, const QuadratureSpec& spec) {
    if (a == b) return 0.0;
    std::priority_queue<Panel> panels;
    PanelResult first = gk15(f, a, b);
    panels.push({a, b, first.value, first.error});
    double total = first.value;
    double err = first.error;
    int splits = 0;
    while (err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
        if (splits >= spec.max_subdivisions)
            throw QuadratureError("quadrature did not converge after " +
                                      std::to_string(splits) + " subdivisions",
                                  total);
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError("quadrature interval collapsed", total);
        PanelResult left = gk15(f, worst.a, mid);
        PanelResult right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        panels.push({worst.a, mid, left.value, left.error});
        panels.push({mid, worst.b, right.value, right.error});
        ++splits;
    }
    return total;
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const QuadratureSpec& spec) {
    if (!std::isinf(b)) return integrate_finite(f, a, b, spec);
    // Improper upper limit: doubling segments until the tail is negligible.
    double acc = 0.0;
    double lo = a;
    double h = std::max(1.0, 0.5 * std::fabs(a));
    bool seen_mass = false;
    int quiet = 0;
    for (int k = 0; k < 64; ++k) {
        const double hi = lo + h;
        const double seg = integrate_finite(f, lo, hi, spec);
        acc += seg;
        const bool negligible =
            std::fabs(seg) <=
            std::max(spec.abs_tol, spec.tail_cutoff * std::fabs(acc));
        if (!negligible) {
            seen_mass = true;
            quiet = 0;
        } else if (seen_mass && ++quiet >= 2) {
            return acc;
        }
        lo = hi;
        h *= 2.0;
    }
    if (!seen_mass) return acc;  // f vanished everywhere we looked
    throw QuadratureError("improper integral tail did not settle", acc);
}

double find_root_monotone(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw BracketError("find_root_monotone: no sign change on bracket");
    // Brent's method.
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() *
                                std::fabs(b) +
                            0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q),
                                   std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1)
            b += d;
        else
            b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double x, double a, double b) {
    constexpr int kMaxIter = 400;
    constexpr double kEps = 3e-15;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction stalled");
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

// --- RngStream ---

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    std::uint64_t s = x;
    return splitmix64(s);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t s = mix64(seed, stream_id);
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
    return a + (b - a) * uniform();
}

RngStream RngStream::substream(std::uint64_t idx) const {
    return RngStream(seed_, mix64(stream_id_ + 1, idx));
}

int RngStream::poisson_small(double mu) {
    const double u = uniform();
    double p = std::exp(-mu);
    double cum = p;
    int k = 0;
    const int cap = static_cast<int>(mu + 20.0 * std::sqrt(mu) + 200.0);
    while (u > cum && k < cap) {
        ++k;
        p *= mu / k;
        cum += p;
    }
    return k;
}

int RngStream::poisson(double mu) {
    if (mu <= 0.0) return 0;
    if (mu < 30.0) return poisson_small(mu);
    // exact split by Poisson additivity
    const double half = 0.5 * mu;
    return poisson(half) + poisson(mu - half);
}

int RngStream::zero_truncated_poisson(double mu) {
    if (mu <= 0.0) return 1;  // degenerate limit
    if (mu >= 30.0) {
        int k = 0;
        do {
            k = poisson(mu);
        } while (k == 0);
        return k;
    }
    const double p0 = std::exp(-mu);
    const double t = p0 + uniform() * (1.0 - p0);
    double p = p0 * mu;
    double cum = p0 + p;
    int k = 1;
    const int cap = static_cast<int>(mu + 20.0 * std::sqrt(mu) + 200.0);
    while (t > cum && k < cap) {
        ++k;
        p *= mu / k;
        cum += p;
    }
    return k;
}

}  // namespace pilotgeom
