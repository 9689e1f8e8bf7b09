#pragma once

#include "vpatch/grid.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace vpatch {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct Check {
    int id;
    std::string name;
    std::function<CheckResult()> run;
};

// The fourteen acceptance properties, in order.
const std::vector<Check>& acceptance_checks();

// Zero-mean trigonometric polynomial of degree <= max_mode, scaled to max|xi| = amplitude.
Vec random_field(const Grid& grid, int max_mode, double amplitude, std::mt19937_64& rng);

std::string format_result(const CheckResult& r);

} // namespace vpatch
