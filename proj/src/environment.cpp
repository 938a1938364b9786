#include "cda/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cda/error.hpp"

namespace cda::env {

WindProfile::WindProfile(std::vector<WindBreakpoint> breakpoints) : points_(std::move(breakpoints)) {
    if (points_.empty()) throw ValidationError("wind profile needs at least one breakpoint");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i].altitude > points_[i - 1].altitude)) {
            throw ValidationError("wind profile altitudes must be strictly increasing");
        }
    }
}

WindProfile WindProfile::constant(double along, double cross) {
    return WindProfile({WindBreakpoint{0.0, along, cross}});
}

WindSample WindProfile::at(double h) const {
    const auto& p = points_;
    if (p.size() == 1 || h <= p.front().altitude) return {p.front().along, p.front().cross, 0.0, 0.0};
    if (h > p.back().altitude) return {p.back().along, p.back().cross, 0.0, 0.0};
    // At a breakpoint the segment below supplies the shear: a descent leaves
    // every breakpoint downward, and a level arc flown at one must see the
    // same shear as the arc that continues below it.
    auto hi = std::lower_bound(p.begin(), p.end(), h,
                               [](const WindBreakpoint& b, double alt) { return b.altitude < alt; });
    auto lo = hi - 1;
    const double span = hi->altitude - lo->altitude;
    const double f = (h - lo->altitude) / span;
    WindSample w;
    w.along = lo->along + f * (hi->along - lo->along);
    w.cross = lo->cross + f * (hi->cross - lo->cross);
    w.dalong_dh = (hi->along - lo->along) / span;
    w.dcross_dh = (hi->cross - lo->cross) / span;
    return w;
}

std::vector<double> WindProfile::kinks() const {
    std::vector<double> out;
    for (const auto& b : points_) out.push_back(b.altitude);
    if (points_.size() == 1) out.clear();
    return out;
}

double WindProfile::max_abs_cross() const {
    double m = 0.0;
    for (const auto& b : points_) m = std::max(m, std::abs(b.cross));
    return m;
}

WindEffect wind_effect(const WindProfile& wind, double tas, double h) {
    const WindSample w = wind.at(h);
    if (!(std::abs(w.cross) < tas)) {
        std::ostringstream os;
        os << "cross wind " << w.cross << " m/s at h=" << h << " m not below airspeed " << tas << " m/s";
        throw InfeasibleCrabError(os.str());
    }
    WindEffect e;
    e.s = -w.cross / tas;
    e.c = std::sqrt(1.0 - e.s * e.s);
    e.along = w.along;
    e.dalong_dh = w.dalong_dh;
    e.whchi = e.c * w.dalong_dh + e.s * w.dcross_dh;

    const double ds_dv = w.cross / (tas * tas);
    const double ds_dh = -w.dcross_dh / tas;
    e.dc_dv = -e.s * ds_dv / e.c;
    e.dc_dh = -e.s * ds_dh / e.c;
    // second wind derivatives vanish inside linear segments
    e.dwhchi_dv = e.dc_dv * w.dalong_dh + ds_dv * w.dcross_dh;
    e.dwhchi_dh = e.dc_dh * w.dalong_dh + ds_dh * w.dcross_dh;
    return e;
}

}  // namespace cda::env
