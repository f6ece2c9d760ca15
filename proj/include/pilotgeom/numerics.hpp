#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace pilotgeom {

constexpr double kPi = 3.14159265358979323846;

/// Tolerances and limits for adaptive quadrature.
struct QuadratureSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_subdivisions = 400;
    // For an improper upper limit the integration proceeds over doubling
    // segments and stops once two consecutive segments each contribute less
    // than tail_cutoff * |accumulated integral|.
    double tail_cutoff = 1e-14;
};

/// Thrown when the subdivision budget is exhausted; carries the best estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double best_estimate)
        : std::runtime_error(what), best_(best_estimate) {}
    double best_estimate() const { return best_; }

private:
    double best_;
};

class BracketError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over (a, b].
/// b may be +infinity; the tail is truncated per QuadratureSpec::tail_cutoff.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const QuadratureSpec& spec = {});

namespace detail {
// Gauss-Kronrod (7,15) abscissae on [-1,1]: node, Gauss-7 weight, Kronrod-15
// weight.
inline constexpr double kGk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};
}  // namespace detail

/// Single Kronrod-15 panel without adaptivity or allocation; meant for short
/// smooth segments in hot loops.
template <typename F>
double gauss_kronrod_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double k15 = detail::kGk15[0][2] * f(mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * detail::kGk15[i][0];
        k15 += detail::kGk15[i][2] * (f(mid + dx) + f(mid - dx));
    }
    return k15 * half;
}

/// Root of a monotone function bracketed by [lo, hi] (Brent).
/// Returns x with |f(x)| <= tol or bracket width <= tol.
double find_root_monotone(const std::function<double(double)>& f, double lo,
                          double hi, double tol);

// --- special functions ---

double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b), x in [0, 1].
double regularized_incomplete_beta(double x, double a, double b);

// --- random numbers ---

/// Splittable deterministic stream: identical (seed, stream_id) reproduce the
/// same draw sequence; distinct stream_ids give statistically independent
/// streams. xoshiro256++ state derived from (seed, stream_id) via splitmix64.
class RngStream {
public:
    RngStream() : RngStream(1, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double a, double b);
    int poisson(double mu);
    /// Poisson conditioned on being >= 1.
    int zero_truncated_poisson(double mu);

    /// Independent stream derived from this stream's identity and idx.
    /// Does not advance this stream.
    RngStream substream(std::uint64_t idx) const;

private:
    std::uint64_t state_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;

    int poisson_small(double mu);
};

}  // namespace pilotgeom
