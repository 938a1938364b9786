// Altitude-dependent wind and the crab geometry that keeps the aircraft on its
// prescribed ground track.
#pragma once

#include <vector>

namespace cda::env {

struct WindBreakpoint {
    double altitude = 0.0;  ///< m
    double along = 0.0;     ///< W_h, m/s, positive = tailwind
    double cross = 0.0;     ///< W_c, m/s, positive = from the left (blowing to the right of track)
};

/// Wind components and their altitude gradients at one altitude.
struct WindSample {
    double along = 0.0;
    double cross = 0.0;
    double dalong_dh = 0.0;  ///< 1/s
    double dcross_dh = 0.0;  ///< 1/s
};

/// Piecewise-linear wind profile W_h(h), W_c(h). Outside the breakpoint span
/// the end values are held and the shear is zero.
class WindProfile {
public:
    WindProfile() = default;
    /// Throws ValidationError unless altitudes are strictly increasing and non-empty.
    explicit WindProfile(std::vector<WindBreakpoint> breakpoints);

    static WindProfile constant(double along, double cross = 0.0);

    WindSample at(double h) const;
    const std::vector<WindBreakpoint>& breakpoints() const noexcept { return points_; }
    /// Interior breakpoint altitudes where the shear jumps.
    std::vector<double> kinks() const;
    double max_abs_cross() const;

private:
    std::vector<WindBreakpoint> points_{WindBreakpoint{}};
};

/// Crab geometry and the shear coupling term W_h,chi = c dW_h/dh + s dW_c/dh,
/// with the partials the adjoint equations need.
struct WindEffect {
    double c = 1.0;  ///< cos(psi_w)
    double s = 0.0;  ///< sin(psi_w)
    double along = 0.0;
    double dalong_dh = 0.0;
    double whchi = 0.0;
    double dc_dv = 0.0;
    double dc_dh = 0.0;
    double dwhchi_dv = 0.0;
    double dwhchi_dh = 0.0;

    double ground_speed(double tas) const { return c * tas + along; }
};

/// Throws InfeasibleCrabError when |W_c| >= V_T.
WindEffect wind_effect(const WindProfile& wind, double tas, double h);

}  // namespace cda::env
