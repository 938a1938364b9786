// International Standard Atmosphere and airspeed conversions.
#pragma once

namespace cda::air {

inline constexpr double kGravity = 9.80665;         // m/s^2
inline constexpr double kGasConstant = 287.05287;   // J/(kg K)
inline constexpr double kLapseRate = -0.0065;       // K/m, troposphere
inline constexpr double kSeaLevelTemperature = 288.15;  // K
inline constexpr double kSeaLevelPressure = 101325.0;   // Pa
inline constexpr double kTropopause = 11000.0;      // m
inline constexpr double kCeiling = 20000.0;         // m
inline constexpr double kHeatRatio = 1.4;

/// Atmospheric state at one altitude.
struct AtmosState {
    double temperature = 0.0;        ///< K
    double pressure = 0.0;           ///< Pa
    double density = 0.0;            ///< kg/m^3
    double pressure_ratio = 0.0;     ///< delta = p / p0
    double temperature_ratio = 0.0;  ///< theta = T / T0
    double sound_speed = 0.0;        ///< m/s
    double dtemperature_dh = 0.0;    ///< K/m (lapse rate, zero above the tropopause)
};

/// First partial derivatives of a scalar f(V_T, h).
struct Partials {
    double d_dv = 0.0;
    double d_dh = 0.0;
};

/// ISA state for 0 <= h <= 20,000 m. Throws DomainError outside.
AtmosState atmos_at(double h);

/// Calibrated airspeed from true airspeed (compressible pitot relation).
double cas_from_tas(double tas, double h);

/// Inverse of cas_from_tas; closed form, refined by Newton to 1e-10 relative.
double tas_from_cas(double cas, double h);

double mach(double tas, double h);
double tas_from_mach(double mach_number, double h);

/// Analytic derivatives of CAS with respect to true airspeed and altitude.
Partials cas_partials(double tas, double h);

/// Analytic derivatives of the Mach number.
Partials mach_partials(double tas, double h);

}  // namespace cda::air
