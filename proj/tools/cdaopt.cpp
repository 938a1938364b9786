// Command-line front end: solve, sweep, check, oracle.
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cda/error.hpp"
#include "cda/io.hpp"
#include "cda/units.hpp"

namespace {

using namespace cda;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitCheck = 4;

struct Common {
    std::string scenario;
    std::string aircraft;
    std::string out;
    std::string format = "json";
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    // write then rename so a reader never sees a half-written file
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw ValidationError("cannot write " + path.string());
        f << text;
    }
    std::filesystem::rename(tmp, path);
}

std::string summary_csv_header() { return "scenario,cost,wind,TOD_nm,TA_s,fuel_kg,NOx_g,structure,check\n"; }

std::string summary_csv_row(const json& s, const std::string& wind, bool pass) {
    std::ostringstream os;
    os.precision(10);
    os << s["scenario"].get<std::string>() << ',' << s["cost_kind"].get<std::string>() << ',' << wind << ','
       << s["TOD_nm"].get<double>() << ',' << s["TA_s"].get<double>() << ',' << s["fuel_kg"].get<double>() << ','
       << (s["emissions_g"].contains("NOx") ? s["emissions_g"]["NOx"].get<double>() : 0.0) << ','
       << s["structure"].get<std::string>() << ',' << (pass ? "pass" : "fail") << '\n';
    return os.str();
}

int run_solve(const Common& c) {
    const Scenario sc = io::load_scenario(c.scenario, c.aircraft);
    const Trajectory tr = opt::generate_trajectory(sc);
    const opt::OptimalityReport rep = opt::check_optimality(tr, sc);
    json s = io::summary_json(tr, sc);
    s["check"] = io::report_json(rep);
    if (!c.out.empty()) {
        const std::filesystem::path dir(c.out);
        std::filesystem::create_directories(dir);
        std::ostringstream csv;
        io::write_trajectory_csv(csv, tr, rep, sc);
        write_file(dir / (sc.name + "_trajectory.csv"), csv.str());
        write_file(dir / (sc.name + "_summary.json"), s.dump(2) + "\n");
        std::ostringstream curve;
        io::write_curve_csv(curve, opt::singular_arc_curve(sc.problem, sc.h_f, sc.h0, 50.0));
        write_file(dir / (sc.name + "_singular_curve.csv"), curve.str());
    }
    if (c.format == "csv") {
        std::cout << summary_csv_header() << summary_csv_row(s, "file", rep.pass());
    } else {
        std::cout << s.dump(2) << '\n';
    }
    return rep.pass() ? 0 : kExitCheck;
}

struct SweepPoint {
    std::string label;
    Scenario sc;
};

int run_sweep(const Common& c, const std::vector<double>& speeds, const std::vector<double>& directions,
              double magnitude, const std::vector<double>& shears) {
    const Scenario base = io::load_scenario(c.scenario, c.aircraft);
    std::vector<SweepPoint> points;
    auto add = [&](const std::string& label, env::WindProfile w) {
        SweepPoint p{label, base};
        p.sc.problem.wind = std::move(w);
        p.sc.name = base.name + "_" + label;
        io::refresh_cost(p.sc);
        points.push_back(std::move(p));
    };
    for (double v : speeds) add("wh" + std::to_string(static_cast<int>(std::lround(v))), env::WindProfile::constant(v));
    for (double d : directions) {
        const double r = units::deg_to_rad(d);
        add("dir" + std::to_string(static_cast<int>(std::lround(d))),
            env::WindProfile::constant(magnitude * std::cos(r), magnitude * std::sin(r)));
    }
    for (double s : shears) {
        // along-track wind growing linearly with altitude from zero at the final altitude
        std::ostringstream os;
        os << "shear" << s;
        add(os.str(), env::WindProfile({{base.h_f, 0.0, 0.0}, {base.h0, s * (base.h0 - base.h_f), 0.0}}));
    }
    if (points.empty()) throw ValidationError("sweep needs --wind-speeds, --wind-directions or --shears");

    std::vector<json> rows(points.size());
    std::vector<std::string> errors(points.size());
    std::vector<int> pass(points.size(), 0);
    const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            const Trajectory tr = opt::generate_trajectory(points[i].sc);
            const opt::OptimalityReport rep = opt::check_optimality(tr, points[i].sc);
            rows[i] = io::summary_json(tr, points[i].sc);
            pass[i] = rep.pass();
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    json table = json::array();
    std::ostringstream csv;
    csv << summary_csv_header();
    for (int i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            std::cerr << points[i].label << ": " << errors[i] << '\n';
            continue;
        }
        rows[i]["wind"] = points[i].label;
        rows[i]["check"] = pass[i] != 0;
        table.push_back(rows[i]);
        csv << summary_csv_row(rows[i], points[i].label, pass[i] != 0);
    }
    json diag;
    if (!speeds.empty() && table.size() == points.size()) {
        bool tod_up = true;
        bool ta_down = true;
        for (std::size_t i = 1; i < speeds.size(); ++i) {
            tod_up = tod_up && std::abs(table[i]["TOD_nm"].get<double>()) > std::abs(table[i - 1]["TOD_nm"].get<double>());
            ta_down = ta_down && table[i]["TA_s"].get<double>() < table[i - 1]["TA_s"].get<double>();
        }
        diag["abs_TOD_increasing_with_tailwind"] = tod_up;
        diag["TA_decreasing_with_tailwind"] = ta_down;
    }
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        write_file(std::filesystem::path(c.out) / (base.name + "_sweep.csv"), csv.str());
        write_file(std::filesystem::path(c.out) / (base.name + "_sweep.json"),
                   json{{"rows", table}, {"diagnostics", diag}}.dump(2) + "\n");
    }
    if (c.format == "csv") {
        std::cout << csv.str();
        for (const auto& [k, v] : diag.items()) std::cout << "# " << k << ": " << (v.get<bool>() ? "yes" : "no") << '\n';
    } else {
        std::cout << json{{"rows", table}, {"diagnostics", diag}}.dump(2) << '\n';
    }
    for (const auto& e : errors) {
        if (!e.empty()) return kExitSynthesis;
    }
    return 0;
}

int run_check(const Common& c, const std::string& traj_path) {
    const Scenario sc = io::load_scenario(c.scenario, c.aircraft);
    std::ifstream in(traj_path);
    if (!in) throw ValidationError("cannot open " + traj_path);
    const Trajectory tr = io::read_trajectory_csv(in);
    const opt::OptimalityReport rep = opt::check_optimality(tr, sc);
    if (c.format == "csv") {
        std::cout << "check,pass,worst,detail\n";
        for (const auto& i : rep.items) {
            std::cout << i.name << ',' << (i.pass ? "pass" : "fail") << ',' << i.worst << ',' << i.detail << '\n';
        }
    } else {
        std::cout << io::report_json(rep).dump(2) << '\n';
    }
    return rep.pass() ? 0 : kExitCheck;
}

int run_oracle(const Common& c, const std::string& grid_text) {
    const Scenario sc = io::load_scenario(c.scenario, c.aircraft);
    const verify::GridSpec grid = verify::GridSpec::parse(grid_text);
    const Trajectory tr = opt::generate_trajectory(sc);
    const verify::DpResult dp = verify::dp_solve(sc, grid);
    const verify::Comparison cmp = verify::compare(tr, dp);
    const json j = io::comparison_json(cmp, dp);
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        write_file(std::filesystem::path(c.out) / (sc.name + "_oracle_" + grid.str() + ".json"), j.dump(2) + "\n");
    }
    if (c.format == "csv") {
        std::cout << "grid,generator_cost,dp_cost,relative_cost_gap,tod_gap_nm,max_cas_deviation_kt\n"
                  << grid.str() << ',' << cmp.gen_cost << ',' << cmp.dp_cost << ',' << cmp.cost_gap << ','
                  << units::m_to_nm(cmp.tod_gap) << ',' << units::ms_to_kt(cmp.max_cas_dev) << '\n';
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--scenario", c.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
    app->add_option("--aircraft", c.aircraft, "aircraft JSON file overriding the scenario's")->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "output directory");
    app->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal idle-descent trajectory generator"};
    app.require_subcommand(1);
    Common common;

    auto* solve = app.add_subcommand("solve", "generate the optimal trajectory for a scenario");
    add_common(solve, common);

    auto* sweep = app.add_subcommand("sweep", "solve a scenario over a set of winds");
    add_common(sweep, common);
    std::vector<double> speeds;
    std::vector<double> directions;
    std::vector<double> shears;
    double magnitude = 30.0;
    sweep->add_option("--wind-speeds", speeds, "constant along-track winds, m/s (tailwind positive)")->delimiter(',');
    sweep->add_option("--wind-directions", directions, "wind-to-track angles, deg")->delimiter(',');
    sweep->add_option("--wind-magnitude", magnitude, "wind magnitude for --wind-directions, m/s");
    sweep->add_option("--shears", shears, "along-track shear values, 1/s")->delimiter(',');

    auto* check = app.add_subcommand("check", "test a trajectory file against the necessary conditions");
    add_common(check, common);
    std::string traj_path;
    check->add_option("--trajectory", traj_path, "trajectory CSV")->required();

    auto* oracle = app.add_subcommand("oracle", "compare the generator with the grid DP solution");
    add_common(oracle, common);
    std::string grid = "400x200x21";
    oracle->add_option("--grid", grid, "DP grid NHxNVxNG");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    try {
        if (*solve) return run_solve(common);
        if (*sweep) return run_sweep(common, speeds, directions, magnitude, shears);
        if (*check) return run_check(common, traj_path);
        if (*oracle) return run_oracle(common, grid);
    } catch (const SynthesisError& e) {
        std::cerr << "synthesis failed: " << e.what() << '\n';
        for (const auto& t : e.trace()) std::cerr << "  " << t << '\n';
        return kExitSynthesis;
    } catch (const Error& e) {
        std::cerr << (e.error_class() == ErrorClass::kValidation ? "invalid input: " : "synthesis failed: ")
                  << e.what() << '\n';
        return e.error_class() == ErrorClass::kValidation ? kExitValidation : kExitSynthesis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
