// Acceptance runner: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "skyrmion/testing/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string suite = "all";
    std::uint64_t seed = 1;
    app.add_option("--suite", suite, "analytic, grid, rigidity, minimizer, fast, all");
    app.add_option("--seed", seed, "Seed for randomized criteria");
    CLI11_PARSE(app, argc, argv);
    const auto ids = skyrmion::acceptance::suite(suite);
    if (ids.empty()) {
        std::cerr << "unknown suite " << suite << "\n";
        return 64;
    }
    return skyrmion::acceptance::run_suite(ids, seed, std::cout) ? 0 : 2;
}
