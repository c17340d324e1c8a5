#include "wlsprec/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "wlsprec/example_gallery.hpp"
#include "wlsprec/fourdvar.hpp"
#include "wlsprec/krylov.hpp"
#include "wlsprec/precond_theory.hpp"
#include "wlsprec/property_suite.hpp"
#include "wlsprec/random_instances.hpp"

namespace wlsprec::cli {

std::string csv_number(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const char* yes_no(bool b) { return b ? "yes" : "no"; }
const char* csv_bool(bool b) { return b ? "true" : "false"; }

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) line += ',';
        line += cells[i];
    }
    return line + '\n';
}

// Writes CSV to the --output file when given, otherwise to `fallback` (which
// may be null when stdout is reserved for the text report).
int emit_csv(const CommonArgs& common, const std::string& csv, std::ostream* fallback, std::ostream& err) {
    if (common.output) {
        std::ofstream file(*common.output);
        if (!file) {
            err << "error: cannot open " << *common.output << " for writing\n";
            return kExitInputError;
        }
        file << csv;
        return kExitOk;
    }
    if (fallback) *fallback << csv;
    return kExitOk;
}

template <typename F>
auto with_context(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const DenseMatrix a = load_matrix(args.aPath);
        const DenseMatrix aTilde = load_matrix(args.aTildePath);
        const DenseMatrix wRaw = load_matrix(args.wPath);
        if (!a.square()) throw ParseError(args.aPath + ": matrix must be square");
        if (aTilde.rows() != a.rows() || aTilde.cols() != a.cols()) {
            throw ParseError(args.aTildePath + ": dimensions do not match " + args.aPath);
        }
        if (wRaw.rows() != a.rows() || wRaw.cols() != a.cols()) {
            throw ParseError(args.wPath + ": dimensions do not match " + args.aPath);
        }
        const SpdMatrix w = with_context(args.wPath, [&] { return SpdMatrix(wRaw); });
        with_context(args.aPath, [&] { return LuFactor(a); });
        with_context(args.aTildePath, [&] { return LuFactor(aTilde); });

        VerifyOptions options;
        options.kappaW = args.kappaW;
        const PrecondReport r = verify_spectrum(a, aTilde, w, options);
        const double threshold = admissible_error(r.kappaW);

        out << "dimension        " << a.rows() << '\n'
            << "kappa_w          " << csv_number(r.kappaW) << '\n'
            << "enorm            " << csv_number(r.eNorm) << '\n'
            << "radius           " << csv_number(r.ball.radius) << '\n'
            << "lambda_min       " << csv_number(r.eigenvalues.front()) << '\n'
            << "lambda_max       " << csv_number(r.eigenvalues.back()) << '\n'
            << "cond_measured    " << csv_number(r.condMeasured) << '\n'
            << "admissible       " << yes_no(r.admissible) << " (threshold " << csv_number(threshold) << ")\n"
            << "cond_bound       " << (r.condBound ? csv_number(*r.condBound) : std::string("n/a")) << '\n'
            << "contained        " << yes_no(r.contained) << '\n';

        if (args.csv || args.common.output) {
            std::string csv = join({"n", "lambda_min", "lambda_max", "enorm", "kappa_w", "radius", "cond_measured",
                                    "cond_bound_or_nan", "admissible", "contained"});
            csv += join({std::to_string(a.rows()), csv_number(r.eigenvalues.front()), csv_number(r.eigenvalues.back()),
                         csv_number(r.eNorm), csv_number(r.kappaW), csv_number(r.ball.radius),
                         csv_number(r.condMeasured), csv_number(r.condBound.value_or(std::nan(""))),
                         csv_bool(r.admissible), csv_bool(r.contained)});
            if (const int rc = emit_csv(args.common, csv, &out, err); rc != kExitOk) return rc;
        }
        if (!r.contained) {
            err << "violation: an eigenvalue lies outside the predicted ball\n";
            return kExitViolation;
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int cmd_example_sweep(const ExampleSweepArgs& args, std::ostream& out, std::ostream& err) {
    try {
        std::vector<ExampleTag> tags;
        if (args.variant == "both") {
            tags = {ExampleTag::Plus2, ExampleTag::Stable};
        } else {
            tags = {parse_example_tag(args.variant)};
        }
        const std::vector<double> grid = log_grid(args.alphaMin, args.alphaMax, args.points);
        if (args.alphaMin < 1.0) throw InvalidArgument("alpha must be >= 1");

        std::string csv = join({"alpha", "variant", "lambda_min", "lambda_max", "lambda_min_closed",
                                "lambda_max_closed", "enorm", "kappa_w", "radius", "cond_measured",
                                "cond_bound_or_nan", "contained"});
        bool all_contained = true;
        for (double alpha : grid) {
            for (ExampleTag tag : tags) {
                const ExampleVariant v(tag, alpha);
                const ExampleInstance inst = example_instance(v);
                const PrecondReport r = verify_spectrum(inst.a, inst.aTilde, inst.w);
                const auto [lo, hi] = closed_form_eigs(v);
                all_contained = all_contained && r.contained;
                csv += join({csv_number(alpha), std::string(to_string(tag)), csv_number(r.eigenvalues.front()),
                             csv_number(r.eigenvalues.back()), csv_number(lo), csv_number(hi), csv_number(r.eNorm),
                             csv_number(r.kappaW), csv_number(r.ball.radius), csv_number(r.condMeasured),
                             csv_number(r.condBound.value_or(std::nan(""))), csv_bool(r.contained)});
            }
        }
        if (const int rc = emit_csv(args.common, csv, &out, err); rc != kExitOk) return rc;
        return all_contained ? kExitOk : kExitViolation;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int cmd_figure1(const Figure1Args& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.kappaMin < 1.0) throw InvalidArgument("kappa grid must start at >= 1");
        if (args.mValues.empty()) throw InvalidArgument("at least one M value is required");
        for (double m : args.mValues) {
            if (!(m > 1.0)) throw InvalidArgument("M values must exceed 1");
        }
        const std::vector<double> grid = log_grid(args.kappaMin, args.kappaMax, args.points);

        std::vector<std::string> header{"kappa_w", "admissible_error"};
        for (double m : args.mValues) header.push_back("g_M" + csv_number(m));
        std::string csv = join(header);
        for (double kappa : grid) {
            std::vector<std::string> row{csv_number(kappa), csv_number(admissible_error(kappa))};
            for (double m : args.mValues) row.push_back(csv_number(error_budget(kappa, m)));
            csv += join(row);
        }
        return emit_csv(args.common, csv, &out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

namespace {

BlockCovariances demo_covariances(const FourDVarLayout& layout, const FourDVarDemoArgs& args) {
    if (!(args.dKappa >= 1.0)) throw InvalidArgument("--d-kappa must be >= 1");
    if (!(args.obsVariance > 0.0)) throw InvalidArgument("--obs-variance must be positive");
    const std::size_t dim = layout.dimension();
    Vector diag(dim, 1.0);
    if (dim > 1 && args.dKappa > 1.0) diag = log_grid(1.0, args.dKappa, dim);
    BlockCovariances cov;
    for (std::size_t k = 0; k <= layout.nSw; ++k) {
        cov.dBlocks.emplace_back(DenseMatrix::diagonal(std::span<const double>(diag).subspan(k * layout.n, layout.n)));
    }
    if (args.observations) {
        cov.hBlocks.emplace(layout.nSw + 1, DenseMatrix::identity(layout.n));
        cov.rBlocks.emplace(layout.nSw + 1, SpdMatrix(args.obsVariance * DenseMatrix::identity(layout.n)));
    }
    return cov;
}

} // namespace

int cmd_fourdvar_demo(const FourDVarDemoArgs& args, std::ostream& out, std::ostream& err) {
    try {
        FourDVarLayout layout = load_layout(args.layoutPath);
        if (args.variant) {
            const ApproxVariant v = parse_approx_variant(*args.variant);
            if (v == ApproxVariant::Custom && layout.variant != ApproxVariant::Custom) {
                throw InvalidArgument(args.layoutPath + ": custom variant needs approximation blocks in the layout file");
            }
            layout = layout.with_variant(v);
        }
        const BlockCovariances cov = demo_covariances(layout, args);

        std::mt19937_64 rng = instance_rng(args.common.seed, 0);
        std::normal_distribution<double> normal;
        Vector rhs(layout.dimension());
        for (double& v : rhs) v = normal(rng);
        PcgOptions popt;
        popt.tol = args.common.tol;

        std::vector<ApproxVariant> variants{ApproxVariant::Zero, ApproxVariant::Identity};
        if (layout.variant == ApproxVariant::Custom) variants.push_back(ApproxVariant::Custom);

        out << "layout           n=" << layout.n << " nSw=" << layout.nSw << " dimension=" << layout.dimension()
            << " variant=" << to_string(layout.variant) << '\n'
            << "observations     " << yes_no(cov.has_observations()) << '\n';

        std::string csv = join({"preconditioner", "rho", "enorm", "kappa_d", "radius_rho", "radius_e", "lambda_min",
                                "lambda_max", "contained_rho", "contained_e", "pcg_iterations", "pcg_converged"});
        bool all_contained = true;

        const OperatorPair base = fourdvar_operators(layout, cov);
        const PcgTrace plain = pcg(base.system, identity_operator(layout.dimension()), rhs, popt);
        out << "none             pcg_iterations=" << plain.iterations << " converged=" << yes_no(plain.converged) << '\n';
        const double nan = std::nan("");
        csv += join({"none", csv_number(nan), csv_number(nan), csv_number(nan), csv_number(nan), csv_number(nan),
                     csv_number(nan), csv_number(nan), csv_bool(true), csv_bool(true), std::to_string(plain.iterations),
                     csv_bool(plain.converged)});

        for (ApproxVariant v : variants) {
            const FourDVarLayout lv = layout.with_variant(v);
            const BackgroundReport bg = background_spectrum_check(lv, cov);
            const OperatorPair ops = fourdvar_operators(lv, cov);
            const PcgTrace trace = pcg(ops.system, ops.precond, rhs, popt);
            const bool contained = bg.containedE && (!bg.rho || bg.containedRho);
            all_contained = all_contained && contained;
            const auto& s = bg.spectrum;

            out << to_string(v) << std::string(17 - to_string(v).size(), ' ')
                << "rho=" << (bg.rho ? csv_number(*bg.rho) : std::string("n/a")) << " enorm=" << csv_number(s.eNorm)
                << " kappa_d=" << csv_number(bg.kappaD) << '\n'
                << "                 radius_rho=" << (bg.rho ? csv_number(bg.radiusRho) : std::string("n/a"))
                << " radius_e=" << csv_number(s.ball.radius) << '\n'
                << "                 spectrum=[" << csv_number(s.eigenvalues.front()) << ", "
                << csv_number(s.eigenvalues.back()) << "] contained_rho="
                << (bg.rho ? yes_no(bg.containedRho) : "n/a") << " contained_e=" << yes_no(bg.containedE) << '\n'
                << "                 pcg_iterations=" << trace.iterations << " converged=" << yes_no(trace.converged)
                << '\n';
            csv += join({std::string(to_string(v)), csv_number(bg.rho.value_or(nan)), csv_number(s.eNorm),
                         csv_number(bg.kappaD), csv_number(bg.rho ? bg.radiusRho : nan), csv_number(s.ball.radius),
                         csv_number(s.eigenvalues.front()), csv_number(s.eigenvalues.back()),
                         csv_bool(bg.rho ? bg.containedRho : true), csv_bool(bg.containedE),
                         std::to_string(trace.iterations), csv_bool(trace.converged)});
        }

        if (args.csv || args.common.output) {
            if (const int rc = emit_csv(args.common, csv, &out, err); rc != kExitOk) return rc;
        }
        if (!all_contained) {
            err << "violation: background spectrum escapes a predicted ball\n";
            return kExitViolation;
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int cmd_random_suite(const RandomSuiteArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.count < 1) throw InvalidArgument("--count must be >= 1");
        if (args.maxDim < 2) throw InvalidArgument("--max-dim must be >= 2");
        SuiteOptions options;
        options.count = args.count;
        options.maxDim = args.maxDim;
        options.seed = args.common.seed;
        options.radiusScale = args.radiusScale;
        const SuiteSummary summary = run_property_suite(options);

        out << "random suite: count=" << args.count << " max_dim=" << args.maxDim << " seed=" << args.common.seed
            << '\n';
        std::string csv = join({"check", "applicable", "passed"});
        for (const auto& c : summary.checks) {
            char line[128];
            std::snprintf(line, sizeof line, "  %-24s %6zu / %-6zu %s\n", c.name.c_str(), c.passed, c.applicable,
                          c.ok() ? "ok" : "FAIL");
            out << line;
            csv += join({c.name, std::to_string(c.applicable), std::to_string(c.passed)});
        }
        out << "worst slack (max (|lambda-1| - r)/r): " << csv_number(summary.worstSlack) << '\n';

        if (args.csv || args.common.output) {
            if (const int rc = emit_csv(args.common, csv, &out, err); rc != kExitOk) return rc;
        }
        if (!summary.ok()) {
            for (const auto& c : summary.checks) {
                if (c.firstFailure) err << "violation: reproduce with " << *c.firstFailure << '\n';
            }
            return kExitViolation;
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace wlsprec::cli
