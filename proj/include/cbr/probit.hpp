#pragma once

namespace cbr {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse of the standard normal CDF. Throws DomainError unless 0 < p < 1.
///
/// Acklam's rational approximation followed by one Halley step against erfc;
/// absolute residual |Phi(x) - p| stays below 1e-12 over the whole open interval.
/// The upper half is evaluated as -normal_quantile(1 - p), so the function is
/// exactly odd about 1/2 wherever 1 - p is representable.
double normal_quantile(double p);

/// Confidence level eta together with the quantities the SCW closed form needs:
/// phi = normal_quantile(eta), psi = 1 + phi^2/2, zeta = 1 + phi^2.
struct ProbitParams {
    double eta = 0.0;
    double phi = 0.0;
    double psi = 1.0;
    double zeta = 1.0;

    /// eta must lie in (0.5, 1); InvalidInput otherwise.
    static ProbitParams from_eta(double eta);

    /// Builds the derived terms from phi directly (phi > 0); eta is back-filled via normal_cdf.
    static ProbitParams from_phi(double phi);

    friend bool operator==(const ProbitParams&, const ProbitParams&) = default;
};

}  // namespace cbr
