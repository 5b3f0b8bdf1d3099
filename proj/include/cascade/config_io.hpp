#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "cascade/model.hpp"
#include "cascade/stability.hpp"

namespace cascade {

// JSON documents shared by config files and inline command-line strings:
//   cascade:      {"n":4, "alpha":[...], "beta":[...], "leak":1, "feedback":0}
//                 ("alpha"/"beta" may be scalars, repeated n times)
//   input:        {"kind":"peak", "r0":5, "lambda":2}; kinds impulse, exp, peak,
//                 rect (r0, t0), sinc (eps), sampled (times, values)
//   perturbation: {"entries":[{"row":3, "col":1, "value":0.1}, ...]}
// Malformed documents throw Error{ParseError}; well-formed but invalid
// parameters throw the usual validation errors.

Cascade cascade_from_json(const nlohmann::json& j);
Cascade cascade_from_json(std::string_view text);
nlohmann::json to_json(const Cascade& c);

InputSignal input_from_json(const nlohmann::json& j);
InputSignal input_from_json(std::string_view text);
nlohmann::json to_json(const InputSignal& r);

PerturbationSpec perturbation_from_json(const nlohmann::json& j);
PerturbationSpec perturbation_from_json(std::string_view text);

/// Shortest round-trip decimal form of a cascade (doubles parse back bit-equal).
std::string serialize(const Cascade& c);

}  // namespace cascade
