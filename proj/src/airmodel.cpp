#include "cda/airmodel.hpp"

#include <cmath>
#include <sstream>

#include "cda/error.hpp"

namespace cda::air {
namespace {

constexpr double kTropopauseTemperature = kSeaLevelTemperature + kLapseRate * kTropopause;
constexpr double kPressureExponent = -kGravity / (kGasConstant * kLapseRate);
// 7 R T0, the stagnation factor of the CAS relation.
constexpr double kSevenRT0 = 7.0 * kGasConstant * kSeaLevelTemperature;

void require_altitude(double h) {
    if (!(h >= 0.0 && h <= kCeiling)) {
        std::ostringstream os;
        os << "altitude " << h << " m outside ISA model range [0, " << kCeiling << "]";
        throw DomainError(os.str());
    }
}

}  // namespace

AtmosState atmos_at(double h) {
    require_altitude(h);
    AtmosState s;
    if (h < kTropopause) {
        s.temperature = kSeaLevelTemperature + kLapseRate * h;
        s.pressure = kSeaLevelPressure * std::pow(s.temperature / kSeaLevelTemperature, kPressureExponent);
        s.dtemperature_dh = kLapseRate;
    } else {
        const double p11 = kSeaLevelPressure *
                           std::pow(kTropopauseTemperature / kSeaLevelTemperature, kPressureExponent);
        s.temperature = kTropopauseTemperature;
        s.pressure = p11 * std::exp(-kGravity * (h - kTropopause) / (kGasConstant * kTropopauseTemperature));
        s.dtemperature_dh = 0.0;
    }
    s.density = s.pressure / (kGasConstant * s.temperature);
    s.pressure_ratio = s.pressure / kSeaLevelPressure;
    s.temperature_ratio = s.temperature / kSeaLevelTemperature;
    s.sound_speed = std::sqrt(kHeatRatio * kGasConstant * s.temperature);
    return s;
}

double cas_from_tas(double tas, double h) {
    if (!(tas >= 0.0)) throw DomainError("true airspeed must be non-negative");
    const AtmosState a = atmos_at(h);
    const double ratio = 1.0 + tas * tas / (7.0 * kGasConstant * a.temperature);
    const double inner = 1.0 + a.pressure_ratio * (std::pow(ratio, 3.5) - 1.0);
    return std::sqrt(kSevenRT0 * (std::pow(inner, 2.0 / 7.0) - 1.0));
}

Partials cas_partials(double tas, double h) {
    const AtmosState a = atmos_at(h);
    const double rt = kGasConstant * a.temperature;
    const double ratio = 1.0 + tas * tas / (7.0 * rt);
    const double q = std::pow(ratio, 3.5) - 1.0;
    const double inner = 1.0 + a.pressure_ratio * q;
    const double cas = std::sqrt(kSevenRT0 * (std::pow(inner, 2.0 / 7.0) - 1.0));
    // d(cas^2) = 2 R T0 inner^(-5/7) d(inner)
    const double dcas2_dinner = 2.0 * kGasConstant * kSeaLevelTemperature * std::pow(inner, -5.0 / 7.0);
    const double ratio_25 = std::pow(ratio, 2.5);
    const double dinner_dv = a.pressure_ratio * ratio_25 * tas / rt;
    const double ddelta_dh = -kGravity * a.pressure_ratio / rt;
    const double dinner_dh = q * ddelta_dh - a.pressure_ratio * ratio_25 * tas * tas /
                                                 (2.0 * rt * a.temperature) * a.dtemperature_dh;
    Partials p;
    if (cas > 0.0) {
        p.d_dv = dcas2_dinner * dinner_dv / (2.0 * cas);
        p.d_dh = dcas2_dinner * dinner_dh / (2.0 * cas);
    } else {
        p.d_dv = 1.0 / std::sqrt(a.pressure_ratio / a.temperature_ratio);
    }
    return p;
}

double tas_from_cas(double cas, double h) {
    if (!(cas > 0.0)) throw DomainError("calibrated airspeed must be positive");
    const AtmosState a = atmos_at(h);
    // Impact pressure from CAS, then invert the subsonic pitot relation at altitude.
    const double qc = kSeaLevelPressure * (std::pow(1.0 + cas * cas / kSevenRT0, 3.5) - 1.0);
    double tas = std::sqrt(7.0 * kGasConstant * a.temperature *
                           (std::pow(1.0 + qc / a.pressure, 2.0 / 7.0) - 1.0));
    for (int it = 0; it < 20; ++it) {
        const double residual = cas_from_tas(tas, h) - cas;
        const double step = residual / cas_partials(tas, h).d_dv;
        tas -= step;
        if (std::abs(step) <= 1e-12 * tas) return tas;
    }
    const double residual = cas_from_tas(tas, h) - cas;
    if (std::abs(residual) <= 1e-10 * cas) return tas;
    throw NumericError("tas_from_cas: Newton iteration did not converge");
}

double mach(double tas, double h) { return tas / atmos_at(h).sound_speed; }

double tas_from_mach(double mach_number, double h) { return mach_number * atmos_at(h).sound_speed; }

Partials mach_partials(double tas, double h) {
    const AtmosState a = atmos_at(h);
    const double m = tas / a.sound_speed;
    return {1.0 / a.sound_speed, -0.5 * m / a.temperature * a.dtemperature_dh};
}

}  // namespace cda::air
