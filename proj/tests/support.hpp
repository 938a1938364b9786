// Shared fixtures for the unit tests.
#pragma once

#include <string>

#include "cda/io.hpp"

namespace test {

inline std::string data(const std::string& rel) { return std::string(CDA_DATA_DIR) + "/" + rel; }

inline cda::Scenario scenario(const std::string& name) {
    return cda::io::load_scenario(data("scenarios/" + name + ".json"));
}

inline cda::perf::AircraftModel syn735() { return cda::io::load_aircraft(data("aircraft/syn735.json")); }

}  // namespace test
