#pragma once

#include <memory>

#include "rga/config.hpp"
#include "rga/kernels.hpp"

namespace rga {

// Group / grid / corpus factories shared by the suites, the CLI, and the
// acceptance battery.
ReflectionGroup make_group(const SuiteConfig& cfg);
std::shared_ptr<const Grid> make_grid(const SuiteConfig& cfg);

// Seeded smooth G-invariant test functions (random symmetrized Gaussian
// mixtures; mean removed when mean_zero is set).
std::vector<GridFunction> invariant_corpus(std::shared_ptr<const Grid> grid,
                                           int count, std::uint64_t seed,
                                           bool mean_zero = false);

// Named suites: group, aoi, reproduce, cz, t1, paraproduct, norms, all.
VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg);
std::vector<std::string> suite_names();

} // namespace rga
