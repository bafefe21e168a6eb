#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gtube/cli/report.hpp"
#include "gtube/cli/spec.hpp"

namespace gtube::cli {

struct RunOptions {
    std::string command{};               // verify | jets | obstruct | flow | counterexample
    std::string target{};                // built-in name, "identities", or empty with a spec file
    std::optional<std::string> spec_path{};
    int n = 2;
    std::string mode = "exact";          // exact | float
    int order = 4;
    std::optional<double> tol{};         // default: 0 exact, 1e-9 float
    std::uint64_t seed = 1;
    int lattice = 3;
    double step = 1e-3;
    double flow_time = 1.0;
    int threads = 1;
};

// Applies a spec document's options to fields not set explicitly on the command line.
struct ExplicitFlags {
    bool mode = false, order = false, tol = false, lattice = false, step = false;
};
void merge_spec_options(RunOptions& opt, const SpecOptions& spec, const ExplicitFlags& set);

// Runs one command and returns its report; input errors propagate as exceptions.
Report run(const RunOptions& opt);

// Spec document named by the options: the file, or the built-in target.
SpecDocument resolve_spec(const RunOptions& opt);

int exit_code(const Report& r);

// Output path with GTUBE_OUT_DIR applied to relative paths.
std::string resolve_output_path(const std::string& out);

// Worker count from GTUBE_THREADS (at least 1).
int threads_from_env();

}  // namespace gtube::cli
