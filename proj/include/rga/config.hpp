#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rga {

// Shared knobs for the verification suites and the command line front end.
struct SuiteConfig {
    std::string group = "A1";   // preset name, "I2:m", or overridden by root_file
    std::string root_file;      // whitespace-separated root vectors, one per line
    int trivial_dim = 1;        // ambient dimension for the TRIVIAL preset
    int n = 257;                // points per axis
    double box = 8.0;           // half-width W of [-W, W]^N
    int k_min = 0;
    int k_max = 4;
    std::vector<int> M_values = {1, 2, 3};
    double tol = 1e-10;         // inversion tail tolerance
    std::uint64_t seed = 42;
    int sample_budget = 100000;
    bool parallel = false;      // run the combined suite's parts concurrently
    bool timing = false;        // include wall time in emitted reports

    void validate() const; // throws ConfigInvalid
};

} // namespace rga
