#pragma once

// Scenario files: one JSON document per scenario.
//
//   {
//     "horizon": 3, "users": 2, "wrap_allowed": false, "billing": "daily",
//     "pricing": {"kind": "quadratic", "coefficients": [1]},
//     "loads": [
//       {"id": "u1-fixed", "owner": 1, "rate_kwh": 1, "duration": 1,
//        "kind": "fixed", "window_start": 1, "window_end": 1},
//       ...
//     ]
//   }
//
// Rational fields (rate_kwh, coefficients) accept JSON numbers, taken as the exact
// decimal they are written as, or strings such as "2/3".

#include "dsm/model.hpp"

#include <stdexcept>
#include <string>

namespace dsm {

struct ScenarioFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Serializes with exact rational strings; parse_scenario(write_scenario(s)) == s.
std::string write_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace dsm
