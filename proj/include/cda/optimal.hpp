// Necessary conditions for the idle-descent problem and the trajectory
// generator built on them.
#pragma once

#include <string>
#include <vector>

#include "cda/trajectory.hpp"

namespace cda::opt {

struct Costate {
    double lv = 0.0;  // lambda_V
    double lx = 0.0;  // lambda_x, zero on optimal trajectories
    double lh = 0.0;  // lambda_h
};

/// K_cr * V_cr, the cost-rate scale for H and H_gamma.
double rate_scale(const dyn::Problem& p);
/// K_cr * m * g^2, the scale of Gamma_s.
double gamma_s_scale(const dyn::Problem& p);

double hamiltonian(const dyn::Problem& p, const dyn::State& s, const Costate& l, double gamma);
/// H_gamma = -lambda_V (g + V W_h,chi) + lambda_h V.
double switching(const dyn::Problem& p, const dyn::State& s, const Costate& l);
/// Partials of H with respect to V_T and h (the adjoint right-hand sides, negated).
air::Partials hamiltonian_partials(const dyn::Problem& p, const dyn::State& s, const Costate& l, double gamma);

/// Costates where H = 0 and H_gamma = 0 hold together.
Costate costates_on_arc(const dyn::Problem& p, double tas, double h);

/// Singular-arc residual; negative to the right (faster side) of the arc.
double gamma_s_residual(const dyn::Problem& p, double tas, double h);
air::Partials gamma_s_partials(const dyn::Problem& p, double tas, double h);

/// Time derivative of H_gamma with the gamma terms removed, for given costates.
double switching_rate(const dyn::Problem& p, double tas, double h, const Costate& l);

/// Control that keeps Gamma_s = 0 along the flow. Throws NumericError when the
/// arc is tangent to the flow.
double singular_control(const dyn::Problem& p, double tas, double h);

/// Generalised Legendre-Clebsch value with costates frozen at the arc values; <= 0 required.
double glc_value(const dyn::Problem& p, double tas, double h);

struct SingularSample {
    double h = 0.0;
    double tas = 0.0;    // arc speed, or the active bound when invalid
    double gamma = 0.0;  // singular control (valid samples)
    double glc = 0.0;
    bool valid = false;  // root inside the speed envelope
    int bound = -1;      // constraint that takes over when invalid
};

struct SingularArcCurve {
    std::vector<SingularSample> samples;
};

/// Root of Gamma_s in the envelope at altitude h. Returns false and sets the
/// bound that replaces it when there is no sign change.
bool singular_speed(const dyn::Problem& p, double h, double& tas, int& bound);

/// Samples the arc from h_lo to h_hi; altitude samples run in parallel.
SingularArcCurve singular_arc_curve(const dyn::Problem& p, double h_lo, double h_hi, double dh);
SingularArcCurve singular_arc_curve_serial(const dyn::Problem& p, double h_lo, double h_hi, double dh);

/// Flight-path angle that keeps constraint `id` active.
double boundary_gamma(const dyn::Problem& p, int id, double tas, double h);
/// Boundary multiplier sign test; >= 0 on a valid boundary arc. Uses the
/// normalised Gamma_s.
double eta_a(const dyn::Problem& p, int id, double tas, double h, double gamma);

struct GenerateOptions {
    double step = 0.5;       // s
    double curve_dh = 25.0;  // m
    double junction_tol = 1e-6;  // relative speed mismatch at the STEP-2 junction
};

/// Four-step synthesis: singular curve, forward initial bang, backward final
/// bang, backward integration along the singular/boundary manifold.
/// Throws SynthesisError carrying the step trace on failure.
Trajectory generate_trajectory(const Scenario& sc, const GenerateOptions& opt = {});

struct SampleDiagnostics {
    double hamiltonian = 0.0;  // normalised
    double switching = 0.0;    // normalised
    double gamma_s = 0.0;      // normalised
    std::array<double, 4> constraints{};
    Costate costate;
};

struct CheckItem {
    std::string name;
    bool pass = true;
    double worst = 0.0;
    std::string detail;
};

struct OptimalityReport {
    std::vector<CheckItem> items;
    std::vector<std::vector<SampleDiagnostics>> samples;  // per arc, per sample

    bool pass() const;
    const CheckItem* find(const std::string& name) const;
};

/// Recomputes costates along the trajectory and tests every necessary condition.
OptimalityReport check_optimality(const Trajectory& traj, const Scenario& sc);

}  // namespace cda::opt
