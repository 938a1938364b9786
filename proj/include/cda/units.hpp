// Unit conversion constants. Everything inside the library is SI; these are
// only applied when reading or writing files.
#pragma once

namespace cda::units {

inline constexpr double kKnot = 1852.0 / 3600.0;  // m/s per kt
inline constexpr double kFoot = 0.3048;           // m per ft
inline constexpr double kNauticalMile = 1852.0;   // m per NM
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegree = kPi / 180.0;    // rad per deg

constexpr double kt_to_ms(double kt) { return kt * kKnot; }
constexpr double ms_to_kt(double ms) { return ms / kKnot; }
constexpr double ft_to_m(double ft) { return ft * kFoot; }
constexpr double m_to_ft(double m) { return m / kFoot; }
constexpr double nm_to_m(double nm) { return nm * kNauticalMile; }
constexpr double m_to_nm(double m) { return m / kNauticalMile; }
constexpr double deg_to_rad(double deg) { return deg * kDegree; }
constexpr double rad_to_deg(double rad) { return rad / kDegree; }

}  // namespace cda::units
