#include "wlsprec/property_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "wlsprec/fourdvar.hpp"
#include "wlsprec/precond_theory.hpp"
#include "wlsprec/random_instances.hpp"

namespace wlsprec {

namespace {

enum Family : std::uint64_t { kWlsq = 0, kSpdPair = 1, kLayout = 2 };

std::uint64_t stream_index(Family family, std::size_t i) { return (static_cast<std::uint64_t>(family) << 48) | i; }

class Recorder {
public:
    Recorder(SuiteSummary& summary, std::uint64_t seed) : summary_(summary), seed_(seed) {}

    void record(const std::string& name, std::size_t instance, bool passed) {
        auto it = std::find_if(summary_.checks.begin(), summary_.checks.end(),
                               [&](const CheckTally& t) { return t.name == name; });
        if (it == summary_.checks.end()) {
            summary_.checks.push_back(CheckTally{name, 0, 0, std::nullopt});
            it = summary_.checks.end() - 1;
        }
        ++it->applicable;
        if (passed) {
            ++it->passed;
        } else if (!it->firstFailure) {
            it->firstFailure = "seed=" + std::to_string(seed_) + " instance=" + std::to_string(instance) + " check=" + name;
        }
    }

    // Runs `body`; an exception counts as a failure of `name`.
    void guarded(const std::string& name, std::size_t instance, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception&) {
            record(name, instance, false);
        }
    }

private:
    SuiteSummary& summary_;
    std::uint64_t seed_;
};

} // namespace

bool SuiteSummary::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckTally& t) { return t.ok(); });
}

SuiteSummary run_property_suite(const SuiteOptions& options) {
    SuiteSummary summary;
    Recorder rec(summary, options.seed);
    summary.worstSlack = -std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < options.count; ++i) {
        rec.guarded("containment", i, [&] {
            const WlsqInstance inst = random_wlsq_instance(options.seed, stream_index(kWlsq, i), options.maxDim);
            VerifyOptions vopt;
            vopt.radiusScale = options.radiusScale;
            const PrecondReport report = verify_spectrum(inst.a, inst.aTilde, inst.w, vopt);
            rec.record("containment", i, report.contained);
            if (report.ball.radius > 0.0) {
                summary.worstSlack = std::max(summary.worstSlack,
                                              (report.maxDeviation - report.ball.radius) / report.ball.radius);
            }
            rec.record("positivity", i, report.eigenvalues.front() > 0.0);
            if (report.admissible) {
                rec.record("condition-bound", i, report.condMeasured <= *report.condBound * (1.0 + 1e-9));
            }
        });

        rec.guarded("relative-condition", i, [&] {
            auto rng = instance_rng(options.seed, stream_index(kSpdPair, i));
            std::uniform_int_distribution<std::size_t> dim(2, std::max<std::size_t>(2, std::min<std::size_t>(options.maxDim, 6)));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const std::size_t n = dim(rng);
            const SpdMatrix d = random_spd(rng, n, std::pow(10.0, 3.0 * unit(rng)));
            const SpdMatrix c = random_spd(rng, n, std::pow(10.0, 3.0 * unit(rng)));
            const Vector ev = generalized_eigs(d, c);
            const double kappa = relative_condition(d, c);
            bool inside = std::abs(kappa - ev.back() / ev.front()) <= 1e-12 * kappa;
            std::normal_distribution<double> normal;
            for (int s = 0; s < 64 && inside; ++s) {
                Vector x(n);
                for (double& e : x) e = normal(rng);
                const double ratio = dot(x, d.apply(x)) / dot(x, c.apply(x));
                inside = ratio >= ev.front() * (1.0 - 1e-9) && ratio <= ev.back() * (1.0 + 1e-9);
            }
            rec.record("relative-condition", i, inside);
        });

        const auto variant = static_cast<ApproxVariant>(i % 3);
        rec.guarded("error-blocks", i, [&] {
            const FourDVarLayout layout = random_layout(options.seed, stream_index(kLayout, i), options.maxLayoutN,
                                                        options.maxLayoutWindows, variant);
            const DenseMatrix diff = error_blocks(layout) - error_blocks_direct(layout);
            rec.record("error-blocks", i, diff.max_abs() <= 1e-12);

            if (variant == ApproxVariant::Custom) return;
            const double rho = rho_bound(layout);
            const double e_norm = spectral_norm(error_blocks(layout));
            rec.record("rho-bound", i, e_norm <= rho * (1.0 + 1e-9) + 1e-300);
            if (variant == ApproxVariant::Zero) {
                rec.record("rho-exact-zero", i, std::abs(e_norm - rho) <= 1e-10 * std::max(rho, 1e-300));
            }
            auto rng = instance_rng(options.seed, stream_index(kLayout, i) ^ 0x5bd1e995u);
            const BlockCovariances cov = random_covariances(rng, layout, 1e3);
            const BackgroundReport bg = background_spectrum_check(layout, cov);
            rec.record("background-containment", i, bg.containedE && bg.containedRho);
        });
    }
    return summary;
}

} // namespace wlsprec
