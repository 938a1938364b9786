#include "cda/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cda/error.hpp"
#include "cda/units.hpp"

namespace cda::io {
namespace {

using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

// Reads one speed with its unit from keys like "wh_kt" or "wh_ms".
double speed_field(const json& j, const std::string& stem, double fallback) {
    if (j.contains(stem + "_kt")) return units::kt_to_ms(j.at(stem + "_kt").get<double>());
    if (j.contains(stem + "_ms")) return j.at(stem + "_ms").get<double>();
    return fallback;
}

double altitude_field(const json& j) {
    if (j.contains("h_ft")) return units::ft_to_m(j.at("h_ft").get<double>());
    if (j.contains("h_m")) return j.at("h_m").get<double>();
    throw ValidationError("missing altitude (h_ft or h_m)");
}

double speed_at(const json& j, double h) {
    if (j.contains("cas_kt")) return air::tas_from_cas(units::kt_to_ms(j.at("cas_kt").get<double>()), h);
    if (j.contains("mach")) return air::tas_from_mach(j.at("mach").get<double>(), h);
    throw ValidationError("missing speed (cas_kt or mach)");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

perf::AircraftModel aircraft_from_json(const json& j) {
    try {
        perf::AircraftModel ac;
        ac.name = j.value("name", std::string("aircraft"));
        ac.mass = j.at("mass_kg").get<double>();
        ac.wing_area = j.at("wing_area_m2").get<double>();
        ac.cd0 = j.at("cd0").get<double>();
        ac.cd2 = j.at("cd2").get<double>();
        const json& t = j.at("idle_thrust");
        ac.ct1 = t.at("ct1_N").get<double>();
        ac.ct2 = t.at("ct2_m").get<double>();
        ac.ct3 = t.at("ct3_per_m2").get<double>();
        const json& f = j.at("idle_fuel");
        ac.cf3 = f.at("cf3_kg_per_min").get<double>();
        ac.cf4 = f.at("cf4_m").get<double>();
        ac.cruise_fuel_flow = j.at("cruise_fuel_flow_kg_s").get<double>();
        if (j.contains("emission_index")) {
            for (const auto& [key, table] : j.at("emission_index").items()) {
                auto& dst = ac.ei_tables[static_cast<std::size_t>(perf::species_from_name(key))];
                for (const auto& row : table) dst.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
            }
        }
        const json& e = j.at("envelope");
        ac.envelope.cas_min = units::kt_to_ms(e.at("cas_min_kt").get<double>());
        ac.envelope.cas_max = units::kt_to_ms(e.at("cas_max_kt").get<double>());
        ac.envelope.mach_min = e.at("mach_min").get<double>();
        ac.envelope.mach_max = e.at("mach_max").get<double>();
        ac.validate();
        return ac;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("aircraft file: ") + e.what());
    }
}

perf::AircraftModel load_aircraft(const std::string& path) { return aircraft_from_json(read_json(path)); }

void refresh_cost(Scenario& sc) {
    auto& p = sc.problem;
    const env::WindEffect w = env::wind_effect(p.wind, sc.tas0, sc.h0);
    p.cost = perf::make_cost(p.aircraft, p.cost.kind, p.cost.species, sc.tas0, sc.h0, w.ground_speed(sc.tas0),
                             p.cost.d_max);
}

Scenario scenario_from_json(const json& j, const std::string& base_dir, const std::string& aircraft_override) {
    try {
        Scenario sc;
        sc.name = j.value("name", std::string("scenario"));
        std::string ac_path = aircraft_override;
        if (ac_path.empty()) {
            ac_path = j.at("aircraft").get<std::string>();
            if (std::filesystem::path(ac_path).is_relative()) ac_path = (std::filesystem::path(base_dir) / ac_path).string();
        }
        auto& p = sc.problem;
        p.aircraft = load_aircraft(ac_path);

        std::vector<env::WindBreakpoint> bps;
        if (j.contains("wind")) {
            for (const auto& w : j.at("wind")) {
                const double h = w.contains("h_ft") || w.contains("h_m") ? altitude_field(w) : 0.0;
                bps.push_back({h, speed_field(w, "wh", 0.0), speed_field(w, "wc", 0.0)});
            }
        }
        p.wind = bps.empty() ? env::WindProfile::constant(0.0) : env::WindProfile(bps);

        const json& ini = j.at("initial");
        sc.h0 = altitude_field(ini);
        sc.tas0 = speed_at(ini, sc.h0);
        const json& fin = j.at("final");
        sc.h_f = altitude_field(fin);
        sc.tas_f = speed_at(fin, sc.h_f);
        sc.s_f = units::nm_to_m(fin.at("x_nm").get<double>());

        const json& lim = j.at("limits");
        p.limits.gamma_min = units::deg_to_rad(lim.at("gamma_min_deg").get<double>());
        p.limits.gamma_max = units::deg_to_rad(lim.at("gamma_max_deg").get<double>());
        p.limits.rod_min = lim.at("rod_min_ms").get<double>();
        p.limits.rod_max = lim.at("rod_max_ms").get<double>();
        p.limits.level_allowed = lim.value("level_allowed", true);

        const json& cost = j.at("cost");
        const std::string kind = cost.at("kind").get<std::string>();
        if (kind == "fuel") {
            p.cost.kind = perf::CostKind::kFuel;
        } else if (kind == "emission") {
            p.cost.kind = perf::CostKind::kEmission;
            p.cost.species = perf::species_from_name(cost.at("species").get<std::string>());
        } else {
            throw ValidationError("cost kind must be fuel or emission, got " + kind);
        }
        p.cost.d_max = units::nm_to_m(j.at("d_max_nm").get<double>());
        refresh_cost(sc);
        sc.validate();
        return sc;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario file: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path, const std::string& aircraft_override) {
    const auto dir = std::filesystem::path(path).parent_path().string();
    return scenario_from_json(read_json(path), dir.empty() ? "." : dir, aircraft_override);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const opt::OptimalityReport& report,
                          const Scenario& sc) {
    os << "# scenario " << sc.name << "; SI units; 1 kt = 1852/3600 m/s, 1 ft = 0.3048 m, 1 NM = 1852 m\n";
    os << "t_s,tas_ms,cas_ms,mach,h_m,x_m,gamma_rad,arc,H,H_gamma,Gamma_s,S1,S2,S3,S4\n";
    for (std::size_t i = 0; i < traj.arcs.size(); ++i) {
        const Arc& a = traj.arcs[i];
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            const auto& y = a.samples[k];
            const double v = y[dyn::kV];
            const double h = y[dyn::kH];
            os << fmt(y[dyn::kT]) << ',' << fmt(v) << ',' << fmt(air::cas_from_tas(v, h)) << ','
               << fmt(air::mach(v, h)) << ',' << fmt(h) << ',' << fmt(y[dyn::kX]) << ',' << fmt(a.gammas[k]) << ','
               << a.label();
            if (i < report.samples.size() && k < report.samples[i].size()) {
                const auto& d = report.samples[i][k];
                os << ',' << fmt(d.hamiltonian) << ',' << fmt(d.switching) << ',' << fmt(d.gamma_s);
                for (double s : d.constraints) os << ',' << fmt(s);
            } else {
                os << ",,,,,,,";
            }
            os << '\n';
        }
    }
}

Trajectory read_trajectory_csv(std::istream& is) {
    Trajectory tr;
    std::string line;
    std::string current;
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("t_s,", 0) == 0) continue;
        ++row;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.size() < 8) throw ValidationError("trajectory row " + std::to_string(row) + " has too few columns");
        dyn::Aug y{};
        double gamma = 0.0;
        try {
            y[dyn::kT] = std::stod(cols[0]);
            y[dyn::kV] = std::stod(cols[1]);
            y[dyn::kH] = std::stod(cols[4]);
            y[dyn::kX] = std::stod(cols[5]);
            gamma = std::stod(cols[6]);
        } catch (const std::exception&) {
            throw ValidationError("trajectory row " + std::to_string(row) + " has a malformed number");
        }
        const std::string& label = cols[7];
        if (tr.arcs.empty() || label != current) {
            Arc a;
            if (label == "level") {
                a.kind = ArcKind::kBangHigh;
            } else if (label == "steepest") {
                a.kind = ArcKind::kBangLow;
            } else if (label == "singular") {
                a.kind = ArcKind::kSingular;
            } else if (label.rfind("boundary:", 0) == 0) {
                a.kind = ArcKind::kBoundary;
                const std::string c = label.substr(9);
                for (int id = 0; id < dyn::kConstraintCount; ++id) {
                    if (dyn::constraint_name(id) == c) a.constraint = id;
                }
                if (a.constraint < 0) throw ValidationError("unknown constraint in arc label " + label);
            } else {
                throw ValidationError("unknown arc label " + label);
            }
            tr.arcs.push_back(a);
            current = label;
        }
        tr.arcs.back().samples.push_back(y);
        tr.arcs.back().gammas.push_back(gamma);
    }
    if (tr.arcs.empty()) throw ValidationError("trajectory file has no samples");
    for (std::size_t k = 1; k < tr.arcs.size(); ++k) {
        Junction j;
        j.from = k - 1;
        j.to = k;
        const auto& a = tr.arcs[k - 1].samples.back();
        const auto& b = tr.arcs[k].samples.front();
        j.t = b[dyn::kT];
        j.tas = b[dyn::kV];
        j.h = b[dyn::kH];
        j.x = b[dyn::kX];
        j.state_gap = std::abs(a[dyn::kV] - b[dyn::kV]) + std::abs(a[dyn::kH] - b[dyn::kH]);
        tr.junctions.push_back(j);
    }
    return tr;
}

nlohmann::json summary_json(const Trajectory& traj, const Scenario& sc) {
    const Totals& t = traj.totals;
    json j;
    j["scenario"] = sc.name;
    j["aircraft"] = sc.problem.aircraft.name;
    j["cost_kind"] = sc.problem.cost.label();
    j["structure"] = traj.structure_label();
    j["TOD_nm"] = units::m_to_nm(t.tod);
    j["TA_s"] = t.arrival_time;
    j["descent_time_s"] = t.descent_time;
    j["fuel_kg"] = t.fuel;
    json em;
    for (std::size_t s = 0; s < perf::kSpeciesCount; ++s) {
        if (!sc.problem.aircraft.ei_tables[s].empty()) em[perf::species_name(static_cast<perf::Species>(s))] = t.emissions[s];
    }
    j["emissions_g"] = em;
    j["cost"] = t.cost;
    json arcs = json::array();
    for (const auto& a : traj.arcs) {
        const auto& f = a.samples.front();
        const auto& b = a.samples.back();
        arcs.push_back({{"kind", a.label()},
                        {"t_start_s", f[dyn::kT]},
                        {"t_end_s", b[dyn::kT]},
                        {"h_start_ft", units::m_to_ft(f[dyn::kH])},
                        {"h_end_ft", units::m_to_ft(b[dyn::kH])},
                        {"cas_start_kt", units::ms_to_kt(air::cas_from_tas(f[dyn::kV], f[dyn::kH]))},
                        {"cas_end_kt", units::ms_to_kt(air::cas_from_tas(b[dyn::kV], b[dyn::kH]))}});
    }
    j["arcs"] = arcs;
    return j;
}

nlohmann::json report_json(const opt::OptimalityReport& report) {
    json j;
    j["pass"] = report.pass();
    json items = json::array();
    for (const auto& i : report.items) {
        items.push_back({{"name", i.name}, {"pass", i.pass}, {"worst", i.worst}, {"detail", i.detail}});
    }
    j["checks"] = items;
    return j;
}

nlohmann::json comparison_json(const verify::Comparison& c, const verify::DpResult& dp) {
    return json{{"grid", dp.grid.str()},
                {"generator_cost", c.gen_cost},
                {"dp_cost", c.dp_cost},
                {"relative_cost_gap", c.cost_gap},
                {"tod_gap_nm", units::m_to_nm(c.tod_gap)},
                {"dp_TOD_nm", units::m_to_nm(dp.tod)},
                {"max_cas_deviation_kt", units::ms_to_kt(c.max_cas_dev)}};
}

void write_curve_csv(std::ostream& os, const opt::SingularArcCurve& curve) {
    os << "h_m,tas_ms,cas_ms,gamma_rad,glc,valid,bound\n";
    for (const auto& s : curve.samples) {
        os << fmt(s.h) << ',' << fmt(s.tas) << ',' << fmt(air::cas_from_tas(s.tas, s.h)) << ',' << fmt(s.gamma)
           << ',' << fmt(s.glc) << ',' << (s.valid ? 1 : 0) << ',' << dyn::constraint_name(s.bound) << '\n';
    }
}

}  // namespace cda::io
