#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wlsprec/cli.hpp"

namespace {

void add_common(CLI::App* cmd, wlsprec::cli::CommonArgs& common) {
    cmd->add_option("--seed", common.seed, "PRNG seed")->capture_default_str();
    cmd->add_option("--output", common.output, "write CSV to this path instead of standard output");
    cmd->add_option("--tol", common.tol, "relative residual tolerance for PCG")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    using namespace wlsprec::cli;

    CLI::App app{"Spectral diagnostics for approximate-model preconditioners of weighted least squares"};
    app.require_subcommand(1);

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "spectrum of the preconditioned normal matrix vs. its a-priori ball");
    verify_cmd->add_option("A", verify.aPath, "model matrix file")->required();
    verify_cmd->add_option("Atilde", verify.aTildePath, "approximate model matrix file")->required();
    verify_cmd->add_option("W", verify.wPath, "SPD weight matrix file")->required();
    verify_cmd->add_option("--kappa-w", verify.kappaW, "known condition number of W (computed when omitted)");
    verify_cmd->add_flag("--csv", verify.csv, "also print a CSV row after the report");
    add_common(verify_cmd, verify.common);

    ExampleSweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("example-sweep", "two-by-two example family over an alpha grid (CSV)");
    sweep_cmd->add_option("--variant", sweep.variant, "plus2, stable or both")
        ->check(CLI::IsMember({"plus2", "stable", "both"}))
        ->capture_default_str();
    sweep_cmd->add_option("--alpha-min", sweep.alphaMin)->capture_default_str();
    sweep_cmd->add_option("--alpha-max", sweep.alphaMax)->capture_default_str();
    sweep_cmd->add_option("--points", sweep.points)->capture_default_str();
    add_common(sweep_cmd, sweep.common);

    Figure1Args fig;
    auto* fig_cmd = app.add_subcommand("figure1", "admissible error and error budget g(kappa, M) over a kappa grid (CSV)");
    fig_cmd->add_option("--kappa-min", fig.kappaMin)->capture_default_str();
    fig_cmd->add_option("--kappa-max", fig.kappaMax)->capture_default_str();
    fig_cmd->add_option("--points", fig.points)->capture_default_str();
    fig_cmd->add_option("--m", fig.mValues, "target condition numbers M (repeatable)")->capture_default_str();
    add_common(fig_cmd, fig.common);

    FourDVarDemoArgs demo;
    auto* demo_cmd = app.add_subcommand("fourdvar-demo", "background preconditioner analysis and PCG counts for a 4D-Var layout");
    demo_cmd->add_option("layout", demo.layoutPath, "layout file")->required();
    demo_cmd->add_option("--variant", demo.variant, "override the layout's approximation: zero, identity, custom");
    demo_cmd->add_option("--d-kappa", demo.dKappa, "condition number of the diagonal background covariance D")
        ->capture_default_str();
    demo_cmd->add_flag("--obs", demo.observations, "add identity observations to every window");
    demo_cmd->add_option("--obs-variance", demo.obsVariance, "observation error variance")->capture_default_str();
    demo_cmd->add_flag("--csv", demo.csv, "also print CSV rows after the report");
    add_common(demo_cmd, demo.common);

    RandomSuiteArgs suite;
    auto* suite_cmd = app.add_subcommand("random-suite", "randomized verification of every spectral bound");
    suite_cmd->add_option("--count", suite.count)->capture_default_str();
    suite_cmd->add_option("--max-dim", suite.maxDim)->capture_default_str();
    suite_cmd->add_flag("--csv", suite.csv, "also print per-check CSV after the summary");
    suite_cmd->add_option("--inject-radius-scale", suite.radiusScale)->group("");
    add_common(suite_cmd, suite.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInputError;
    }

    if (*verify_cmd) return cmd_verify(verify, std::cout, std::cerr);
    if (*sweep_cmd) return cmd_example_sweep(sweep, std::cout, std::cerr);
    if (*fig_cmd) return cmd_figure1(fig, std::cout, std::cerr);
    if (*demo_cmd) return cmd_fourdvar_demo(demo, std::cout, std::cerr);
    if (*suite_cmd) return cmd_random_suite(suite, std::cout, std::cerr);
    return kExitInputError;
}
