#pragma once

// Subcommand bodies for the wlsprec command-line tool. Each returns the
// process exit code: 0 success, 1 input error, 2 a mathematical check failed.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wlsprec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitViolation = 2;

struct CommonArgs {
    std::uint64_t seed = 42;
    std::optional<std::string> output;
    double tol = 1e-8;
};

struct VerifyArgs {
    CommonArgs common;
    std::string aPath;
    std::string aTildePath;
    std::string wPath;
    std::optional<double> kappaW;
    bool csv = false;
};

struct ExampleSweepArgs {
    CommonArgs common;
    std::string variant = "both";  // plus2 | stable | both
    double alphaMin = 1.0;
    double alphaMax = 1e4;
    std::size_t points = 17;
};

struct Figure1Args {
    CommonArgs common;
    double kappaMin = 1.0;
    double kappaMax = 1e6;
    std::size_t points = 60;
    std::vector<double> mValues{10.0, 100.0};
};

struct FourDVarDemoArgs {
    CommonArgs common;
    std::string layoutPath;
    std::optional<std::string> variant;
    double dKappa = 1.0;          // D diagonal, log-spaced over [1, dKappa]
    bool observations = false;    // adds H_j = I, R_j = obsVariance·I
    double obsVariance = 1.0;
    bool csv = false;
};

struct RandomSuiteArgs {
    CommonArgs common;
    std::size_t count = 1000;
    std::size_t maxDim = 12;
    double radiusScale = 1.0;  // detector self-test hook
    bool csv = false;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_example_sweep(const ExampleSweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_figure1(const Figure1Args& args, std::ostream& out, std::ostream& err);
int cmd_fourdvar_demo(const FourDVarDemoArgs& args, std::ostream& out, std::ostream& err);
int cmd_random_suite(const RandomSuiteArgs& args, std::ostream& out, std::ostream& err);

// CSV number rendering: 17 significant digits, "NaN" for NaN.
std::string csv_number(double v);

} // namespace wlsprec::cli
