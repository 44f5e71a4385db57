#pragma once

#include "anonprice/quadrature.hpp"
#include "anonprice/revenue.hpp"

#include <cstddef>
#include <string>

namespace anonprice {

// {"distributions":[...],"gamma":null|number}. Unknown fields, missing fields and
// wrong types raise std::invalid_argument.
Instance parse_instance(const std::string& text);
Instance read_instance_file(const std::string& path);

// Full round-trip precision. PotentialShiftedDist has no serialized form.
std::string instance_to_json(const Instance& inst);

struct RunConfig {
    QuadratureConfig quad;
    std::size_t grid_points = 2048;  // log points of the feasibility grid
    unsigned mc_shards = 1;
};

// {"quadrature":{"abs_tol","rel_tol","tail_cutoff","max_subdivisions"},
//  "grid_points", "mc_shards"}; every field optional, unknown fields rejected.
RunConfig parse_config(const std::string& text);
RunConfig read_config_file(const std::string& path);

// 10 significant digits, "." decimal separator.
std::string format_number(double x);

}  // namespace anonprice
