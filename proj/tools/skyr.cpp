// skyr: command-line front end. Every subcommand writes CSV with a header row
// to stdout; diagnostics go to stderr.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "skyrmion/skyrmion.hpp"
#include "skyrmion/testing/acceptance.hpp"

using namespace skyrmion;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitVerify = 2;
constexpr int kExitUsage = 64;

struct RunConfig {
    double sigma = 0.3;
    double lambda = 1.0;
    double K = k_star();
    double rho = 1.0;
    double theta = 0.0;
    std::optional<double> L;
    double box = 10.0;
    std::size_t n = 256;
    std::size_t max_iter = 20000;
    double grad_tol = 1e-3;
    unsigned threads = 0;
    std::uint64_t seed = 1;
    std::string input;
    std::string output;
    std::string suite = "fast";
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SpinField input_field(const RunConfig& c) {
    if (c.input.empty()) throw UsageError("missing -i <file.sfd>");
    return load_sfld(c.input);
}

void write_breakdown(CsvWriter& w, const EnergyBreakdown& e) {
    w.header({"exchange", "anisotropy", "dmi", "f_vol", "f_surf", "total"});
    w.row(e.exchange, e.anisotropy, e.dmi, e.f_vol, e.f_surf, e.total);
}

int cmd_sample(const RunConfig& c) {
    if (c.output.empty()) throw UsageError("sample needs -o <file.sfd>");
    if (!(c.box > 0.0) || c.n < 4) throw DomainError("sample: need --box > 0 and --n >= 4");
    CsvWriter w(std::cout);
    if (c.L) {
        bool warn = false;
        const auto f = sample(TruncatedProfile{c.rho, c.theta, *c.L}, c.box, c.n, &warn);
        save_sfld(c.output, f);
        if (warn) std::cerr << "warning: box half-width below 3 rho L, tail is clipped\n";
        w.header({"nx", "ny", "h", "charge", "tail_warning"});
        w.row(f.nx(), f.ny(), f.h(), topological_charge(f), warn);
    } else {
        const auto f = sample(BPProfile{c.rho, c.theta}, c.box, c.n);
        save_sfld(c.output, f);
        w.header({"nx", "ny", "h", "charge", "tail_warning"});
        w.row(f.nx(), f.ny(), f.h(), topological_charge(f), false);
    }
    return 0;
}

int cmd_energy(const RunConfig& c) {
    const auto f = input_field(c);
    const EnergyParams p(c.sigma, c.lambda);
    SpectralPlan plan(f.geometry());
    CsvWriter w(std::cout);
    write_breakdown(w, total_energy(f, p, plan));
    return 0;
}

int cmd_minimize(const RunConfig& c) {
    const EnergyParams p(c.sigma, c.lambda);
    const SpinField init = c.input.empty() ? sample(reduced_initial_profile(c.sigma, c.lambda), c.box, c.n)
                                           : input_field(c);
    const auto adv = advise_resolution(init.geometry(), p);
    if (!adv.resolved)
        std::cerr << "warning: predicted radius " << adv.rho << " spans fewer than 5 cells; use h <= " << adv.required_h
                  << "\n";
    if (!adv.box_ok) std::cerr << "warning: box half-width below 3 rho L = " << 3.0 * adv.tail << "\n";
    MinimizeConfig cfg;
    cfg.max_iter = c.max_iter;
    cfg.grad_tol = c.grad_tol;
    const auto r = minimize(init, p, cfg);
    if (!c.output.empty()) save_sfld(c.output, r.field);
    CsvWriter w(std::cout);
    w.header({"iteration", "energy"});
    for (std::size_t k = 0; k < r.report.trace.size(); ++k) w.row(k, r.report.trace[k]);
    std::cerr << "stop: " << to_string(r.report.reason) << " after " << r.report.iterations
              << " iterations, grad " << r.report.grad_norm << ", charge " << r.report.final_charge << "\n";
    return 0;
}

int cmd_fit(const RunConfig& c) {
    const auto r = dirichlet_distance(input_field(c));
    CsvWriter w(std::cout);
    w.header({"rho", "theta", "x0", "y0", "distance_sq", "excess", "ratio", "tilted"});
    w.row(r.profile.rho, r.theta(), r.profile.x0, r.profile.y0, r.distance_sq, r.excess, r.ratio, r.tilted());
    return 0;
}

int cmd_charge(const RunConfig& c) {
    const int q = topological_charge(input_field(c));
    CsvWriter w(std::cout);
    w.header({"charge"});
    w.row(q);
    return 0;
}

int cmd_reduced_min(const RunConfig& c) {
    const auto m = reduced_minimize(c.sigma, c.lambda, c.K);
    if (m.sigma_warning) std::cerr << "warning: sigma > 0.05, asymptotic regime not reached\n";
    if (m.k_warning) std::cerr << "warning: K outside [K*/2, 2K*]\n";
    const double expansion = m.expansion_terms.evaluate(c.sigma);
    CsvWriter w(std::cout);
    w.header({"sigma", "lambda", "K", "rho0", "theta0", "L0", "min_energy", "expansion", "gap"});
    w.row(c.sigma, c.lambda, c.K, m.rho0, m.theta0_plus, m.L0, m.min_energy, expansion, m.min_energy - expansion);
    return 0;
}

int cmd_bp_energy(const RunConfig& c) {
    if (!c.L) throw UsageError("bp-energy needs --L");
    const auto e = truncated_energy_closed_form(TruncatedProfile{c.rho, c.theta, *c.L}, EnergyParams(c.sigma, c.lambda));
    CsvWriter w(std::cout);
    write_breakdown(w, e.breakdown);
    return 0;
}

int cmd_spectral(const RunConfig& c) {
    const auto r = gap_report(static_cast<int>(c.n));
    CsvWriter w(std::cout);
    w.header({"n", "multiplicity", "eigenvalue", "hessian_eigenvalue", "ratio", "max_deviation"});
    for (const auto& row : r.rows)
        w.row(row.n, row.multiplicity, row.eigenvalue, row.hessian_eigenvalue, row.ratio, row.max_deviation);
    std::cerr << "null dimension " << r.null_dimension << ", min ratio " << r.min_ratio << " at n = " << r.argmin_n
              << "\n";
    return 0;
}

int cmd_verify(const RunConfig& c) {
    const auto ids = acceptance::suite(c.suite);
    if (ids.empty()) throw UsageError("unknown suite '" + c.suite + "' (analytic, grid, rigidity, minimizer, fast, all)");
    return acceptance::run_suite(ids, c.seed, std::cout) ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skyrmion energy toolkit"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file; flags override it");
    app.allow_config_extras(false);

    RunConfig c;
    std::size_t n = 0;
    app.add_option("--sigma", c.sigma, "Coupling sigma > 0");
    app.add_option("--lambda", c.lambda, "DMI fraction in [0, 1]");
    app.add_option("--K", c.K, "Constant of the reduced energy (default K*)");
    app.add_option("--rho", c.rho, "Profile radius");
    app.add_option("--theta", c.theta, "Profile rotation about e3");
    auto* L_opt = app.add_option("--L", "Truncation parameter L > 1");
    app.add_option("--box", c.box, "Box half-width R");
    auto* n_opt = app.add_option("--n", n, "Cells per side (spectral: n_max)");
    app.add_option("--max-iter", c.max_iter, "Minimizer iteration cap");
    app.add_option("--grad-tol", c.grad_tol, "Minimizer gradient tolerance");
    app.add_option("--threads", c.threads, "Worker threads (default SKYR_THREADS or hardware)");
    app.add_option("--seed", c.seed, "Seed for randomized checks");
    app.add_option("-i", c.input, "Input SFLD file");
    app.add_option("-o", c.output, "Output SFLD file");
    app.add_option("--suite", c.suite, "verify suite: analytic, grid, rigidity, minimizer, fast, all");

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
    };
    const Sub subs[] = {
        {"sample", "Write a sampled profile (truncated when --L is given)", cmd_sample},
        {"energy", "Energy breakdown of a field", cmd_energy},
        {"minimize", "Minimize from -i or from the reduced optimum", cmd_minimize},
        {"fit", "Closest BP profile in the Dirichlet seminorm", cmd_fit},
        {"charge", "Topological charge", cmd_charge},
        {"reduced-min", "Closed-form minimum of the reduced energy", cmd_reduced_min},
        {"bp-energy", "Closed-form energies of a truncated profile", cmd_bp_energy},
        {"spectral", "Spectral gap table", cmd_spectral},
        {"verify", "Run an acceptance suite", cmd_verify},
    };
    for (const auto& s : subs) app.add_subcommand(s.name, s.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (L_opt->count()) c.L = L_opt->as<double>();
        if (n_opt->count())
            c.n = n;
        else if (app.got_subcommand("spectral"))
            c.n = 6;
        if (c.threads > 0) setenv("SKYR_THREADS", std::to_string(c.threads).c_str(), 1);
        for (const auto& s : subs)
            if (app.got_subcommand(s.name)) return s.fn(c);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
