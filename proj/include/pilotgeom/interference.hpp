#pragma once

#include <vector>

#include "pilotgeom/network.hpp"

namespace pilotgeom {

class DivergenceError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Scaled threshold radius r_c * sqrt(lambda) = kappa / sqrt(pi c2).
inline double scaled_threshold_radius(double kappa, double c2) {
    return kappa / std::sqrt(kPi * c2);
}

/// Unit-density inverse moment E[X_C(1, kappa/sqrt(pi c2))^-1] of the fitted
/// cell-center area law (atom included). Cached per (kappa, c2).
InverseMomentResult cc_unit_inverse_moment(double kappa, double c2);

/// Pair correlation of the one-point-per-cell interfering processes with
/// respect to the tagged BS, in scaled units r_scaled = r * sqrt(lambda).
double cc_pair_correlation(double r_scaled, double kappa, double c2 = 1.25);
double ce_pair_correlation(double r_scaled, double kappa, double c2,
                           double p_has_edge);

/// Non-homogeneous PPP approximation of the same-pilot interfering users:
/// radial density, intensity measure (cumulative grid built eagerly), and the
/// dominant (nearest) interferer distance law. Immutable after construction.
class RadialDensityModel {
public:
    static RadialDensityModel cc_pilot(double lambda0, double kappa, double c2,
                                       double utilization);
    static RadialDensityModel ce_pilot(double lambda0, double kappa, double c2,
                                       double utilization, double p_has_edge,
                                       double group_inclusion = 1.0);

    RegionKind kind() const { return kind_; }
    double lambda0() const { return lambda0_; }
    double r_c() const { return r_c_; }
    double plateau() const { return plateau_; }
    double grid_upper() const { return r_up_; }

    double density(double r) const;
    /// Intensity measure: expected interferer count within radius r.
    double intensity(double r) const;
    double nearest_cdf(double d) const;
    double nearest_pdf(double d) const;
    double nearest_quantile(double p) const;

private:
    RegionKind kind_ = RegionKind::cell_center;
    double lambda0_ = 0.0, kappa_ = 0.0, c2_ = 0.0, r_c_ = 0.0;
    double plateau_ = 0.0;
    double cc_exponent_scale_ = 0.0;  // 2 pi lambda0 E[X_C(1,.)^-1]
    double ce_exponent_scale_ = 0.0;  // pi (14/5) e^(k^2/c2) P[edge] lambda0
    double r_start_ = 0.0;            // density support starts here
    double r_up_ = 0.0;
    std::vector<double> nodes_;       // ascending, nodes_[0] == r_start_
    std::vector<double> cum_;         // intensity at nodes_

    void build_grid();
};

/// Campbell mean of the residual interference beyond the dominant interferer:
/// 2 pi Int_d^inf r^(-2 alpha) rho(r) r dr. Throws DivergenceError when
/// 2 alpha <= 2.
double mean_residual_interference(const RadialDensityModel& model, double d_hat,
                                  double alpha);

/// Precomputed residual-interference curve for coverage hot loops.
class ResidualInterferenceTable {
public:
    ResidualInterferenceTable(const RadialDensityModel& model, double alpha);
    double operator()(double d) const;

private:
    const RadialDensityModel* model_;
    double alpha_ = 0.0;
    double r_up_ = 0.0;
    double tail_coeff_ = 0.0;  // 2 pi plateau / (2 alpha - 2)
    std::vector<double> nodes_;
    std::vector<double> tail_;  // residual integral from node to infinity
};

}  // namespace pilotgeom
