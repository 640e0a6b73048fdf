#pragma once

// Experiment runner: binds every module behind the CLI subcommands
//   spectrum | traces | pressure | ensemble | correlate | average | thresholds
// plus `run <config.json>` which executes the experiment named in the file.
// Exit codes: 0 ok, 2 config error, 3 numerical gate failure.

#include <iostream>

#include "skewlab/mixing.hpp"
#include "skewlab/pressure.hpp"
#include "skewlab/report_io.hpp"

namespace skewlab {

using json = nlohmann::json;

namespace cli {

struct ParamDef {
    const char* key;
    enum Kind { Int, Real, Str } kind;
    json def;
    const char* help;
};

struct ExperimentDef {
    const char* name;
    std::vector<ParamDef> params;
};

inline const std::vector<ExperimentDef>& experiment_table() {
    static const std::vector<ExperimentDef> defs = {
        {"spectrum",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"},
          {"shear-eps", ParamDef::Real, 0.0, "volume-preserving shear amplitude"},
          {"tau", ParamDef::Str, "halfcos", "roof function: zero|halfcos|<path.json>"},
          {"q", ParamDef::Int, 1, "circle-fiber frequency"},
          {"r", ParamDef::Real, 0.02, "weight radius"},
          {"K", ParamDef::Int, 16, "truncation box radius"},
          {"grid", ParamDef::Int, 0, "FFT grid (0 = automatic)"},
          {"nmax", ParamDef::Int, 8, "trace orders to report"},
          {"kgate", ParamDef::Int, 1, "run the K-stability gate (K vs K+4)"}}},
        {"traces",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"},
          {"shear-eps", ParamDef::Real, 0.0, "volume-preserving shear amplitude"},
          {"tau", ParamDef::Str, "zero", "roof function: zero|halfcos|<path.json>"},
          {"q", ParamDef::Int, 0, "circle-fiber frequency"},
          {"r", ParamDef::Real, 0.02, "weight radius"},
          {"K", ParamDef::Int, 16, "truncation box radius"},
          {"grid", ParamDef::Int, 0, "FFT grid (0 = automatic)"},
          {"nmax", ParamDef::Int, 6, "trace orders"}}},
        {"pressure",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"},
          {"shear-eps", ParamDef::Real, 0.0, "volume-preserving shear amplitude"},
          {"n", ParamDef::Int, 12, "orbit period for the estimator"},
          {"sigma-min", ParamDef::Real, 0.0, "sigma grid start"},
          {"sigma-max", ParamDef::Real, 3.0, "sigma grid end"},
          {"sigma-steps", ParamDef::Int, 13, "sigma grid points"}}},
        {"ensemble",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"},
          {"shear-eps", ParamDef::Real, 0.0, "volume-preserving shear amplitude"},
          {"N", ParamDef::Real, 39.478417604357434, "Laplace cutoff (default 4 pi^2)"},
          {"q", ParamDef::Int, 1, "circle-fiber frequency"},
          {"n", ParamDef::Int, 2, "orbit period"},
          {"samples", ParamDef::Int, 20000, "Monte Carlo samples"}}},
        {"correlate",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"},
          {"shear-eps", ParamDef::Real, 0.0, "volume-preserving shear amplitude"},
          {"tau", ParamDef::Str, "halfcos", "roof function: zero|halfcos|<path.json>"},
          {"q", ParamDef::Int, 1, "circle-fiber frequency"},
          {"f", ParamDef::Str, "1,0", "observable mode alpha for f = e_alpha"},
          {"g", ParamDef::Str, "-1,0", "observable mode beta for g = e_beta"},
          {"N", ParamDef::Int, 24, "series length"},
          {"r", ParamDef::Real, 0.02, "weight radius"},
          {"K", ParamDef::Int, 8, "truncation box radius"},
          {"grid", ParamDef::Int, 0, "FFT grid (0 = automatic)"},
          {"route", ParamDef::Str, "spectral", "spectral|direct|both"},
          {"direct-grid", ParamDef::Int, 512, "quadrature grid for the direct route"},
          {"sweep-samples", ParamDef::Int, 0, "ensemble sweep sample count (0 = single run)"},
          {"qmax", ParamDef::Int, 20, "sweep frequency range 1..qmax"},
          {"ensemble-N", ParamDef::Real, 78.956835208714868, "sweep Laplace cutoff (8 pi^2)"}}},
        {"average",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"},
          {"shear-eps", ParamDef::Real, 0.0, "volume-preserving shear amplitude"},
          {"tau", ParamDef::Str, "halfcos", "roof function: zero|halfcos|<path.json>"},
          {"n", ParamDef::Int, 0, "orbit period (0 = the 2,3,4 battery)"},
          {"T", ParamDef::Int, 0, "bump dilation (0 = the 8,16,32 battery)"},
          {"bump-grid", ParamDef::Int, 2001, "bump quadrature points"}}},
        {"thresholds",
         {{"mat", ParamDef::Str, "2,1,1,1", "integer matrix a,b,c,d"}}},
    };
    return defs;
}

struct Context {
    std::filesystem::path out = "out";
    unsigned threads = 1;
    std::uint64_t seed = 0;
};

inline const ExperimentDef& find_experiment(const std::string& name) {
    for (const auto& e : experiment_table())
        if (name == e.name) return e;
    throw ConfigError("unknown experiment \"" + name + "\"");
}

inline json resolve_params(const ExperimentDef& def, const json& given) {
    json out = json::object();
    for (const auto& p : def.params) out[p.key] = p.def;
    for (auto it = given.begin(); it != given.end(); ++it) {
        const ParamDef* pd = nullptr;
        for (const auto& p : def.params)
            if (it.key() == p.key) pd = &p;
        if (!pd) throw ConfigError("unknown key \"" + it.key() + "\" for experiment " + def.name);
        const json& v = it.value();
        switch (pd->kind) {
            case ParamDef::Int:
                if (v.is_number_integer())
                    out[pd->key] = v.get<long long>();
                else if (v.is_string()) {
                    try {
                        std::size_t pos = 0;
                        const long long n = std::stoll(v.get<std::string>(), &pos);
                        if (pos != v.get<std::string>().size()) throw std::invalid_argument("");
                        out[pd->key] = n;
                    } catch (...) {
                        throw ConfigError("key \"" + it.key() + "\" expects an integer");
                    }
                } else {
                    throw ConfigError("key \"" + it.key() + "\" expects an integer");
                }
                break;
            case ParamDef::Real:
                if (v.is_number())
                    out[pd->key] = v.get<double>();
                else if (v.is_string()) {
                    try {
                        std::size_t pos = 0;
                        const double d = std::stod(v.get<std::string>(), &pos);
                        if (pos != v.get<std::string>().size()) throw std::invalid_argument("");
                        out[pd->key] = d;
                    } catch (...) {
                        throw ConfigError("key \"" + it.key() + "\" expects a number");
                    }
                } else {
                    throw ConfigError("key \"" + it.key() + "\" expects a number");
                }
                break;
            case ParamDef::Str:
                if (!v.is_string()) throw ConfigError("key \"" + it.key() + "\" expects a string");
                out[pd->key] = v;
                break;
        }
    }
    return out;
}

inline IMat2 parse_matrix(const std::string& spec) {
    IMat2 M;
    long long* slots[4] = {&M.a, &M.b, &M.c, &M.d};
    std::stringstream ss(spec);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 4) throw ConfigError("key \"mat\" expects four integers a,b,c,d");
        try {
            *slots[i++] = std::stoll(tok);
        } catch (...) {
            throw ConfigError("key \"mat\" expects four integers a,b,c,d");
        }
    }
    if (i != 4) throw ConfigError("key \"mat\" expects four integers a,b,c,d");
    return M;
}

inline FreqPair parse_mode(const std::string& spec, const char* key) {
    std::stringstream ss(spec);
    std::string tok;
    int vals[2];
    int i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 2) throw ConfigError(std::string("key \"") + key + "\" expects two integers");
        try {
            vals[i++] = std::stoi(tok);
        } catch (...) {
            throw ConfigError(std::string("key \"") + key + "\" expects two integers");
        }
    }
    if (i != 2) throw ConfigError(std::string("key \"") + key + "\" expects two integers");
    return {vals[0], vals[1]};
}

inline AnosovMap make_map(const json& P) {
    const IMat2 M = parse_matrix(P["mat"].get<std::string>());
    const double eps = P["shear-eps"].get<double>();
    if (eps == 0.0) return AnosovMap(M);
    return AnosovMap(M, {Shear{0, TrigPoly::sine({0, 1}, eps)}});
}

inline TrigPoly make_tau(const std::string& spec) {
    if (spec == "zero") return TrigPoly::zero();
    if (spec == "halfcos") return TrigPoly::cosine({1, 0}, 0.5);
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        std::ifstream is(spec);
        if (!is) throw ConfigError("cannot open tau file " + spec);
        json j;
        try {
            is >> j;
        } catch (const std::exception& e) {
            throw ConfigError("tau file " + spec + " is not valid JSON: " + e.what());
        }
        TrigPoly p = TrigPoly::from_json(j);
        if (!p.is_real_valued(1e-10)) throw ConfigError("tau file " + spec + " is not real-valued");
        return p;
    }
    throw ConfigError("key \"tau\" expects zero|halfcos|<path.json>");
}

inline json audit(const std::string& experiment, const json& P, const Context& ctx) {
    json config = P;
    config["experiment"] = experiment;
    config["out"] = ctx.out.string();
    config["threads"] = ctx.threads;
    config["seed"] = ctx.seed;
    return config;
}

inline json eigen_list(const std::vector<cpx>& eig, std::size_t count) {
    json arr = json::array();
    for (std::size_t i = 0; i < std::min(count, eig.size()); ++i)
        arr.push_back({{"re", eig[i].real()}, {"im", eig[i].imag()}, {"abs", std::abs(eig[i])}});
    return arr;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

inline int run_spectrum(const json& P, const Context& ctx) {
    const AnosovMap A = make_map(P);
    const TrigPoly tau = make_tau(P["tau"].get<std::string>());
    const int q = P["q"].get<int>();
    const int K = P["K"].get<int>();
    const int nmax = P["nmax"].get<int>();
    const WeightScheme scheme(A.linear_part(), P["r"].get<double>());
    const int G = P["grid"].get<int>();

    TruncatedOperator T = (G == 0) ? assemble_auto(A, tau, q, scheme, K, nullptr, ctx.threads)
                                   : assemble(A, tau, q, scheme, K, G, nullptr, ctx.threads);
    if (P["kgate"].get<int>() != 0) {
        TruncatedOperator T2 = (G == 0)
                                   ? assemble_auto(A, tau, q, scheme, K + 4, nullptr, ctx.threads)
                                   : assemble(A, tau, q, scheme, K + 4, G, nullptr, ctx.threads);
        const double gap = top_moduli_gap(T, T2, 5);
        if (gap > 1e-6) {
            std::ostringstream msg;
            msg << "K-stability gate failed: top-5 eigenvalue moduli moved by " << gap
                << " between K=" << K << " and K=" << K + 4;
            throw NumericalGateError(msg.str());
        }
    }
    const SpectralReport rep = build_spectral_report(T, nmax, std::max(nmax, 10));

    const json config = audit("spectrum", P, ctx);
    json out{{"version", kVersion},
             {"config", config},
             {"spectral_radius", rep.spectral_radius},
             {"resolved_count", rep.resolved_count},
             {"trace_gap", rep.trace_gap},
             {"aliasing_tail", T.meta().aliasing_tail},
             {"grid", T.meta().G},
             {"eigenvalues", eigen_list(rep.eigenvalues, 32)}};
    json traces = json::array();
    for (std::size_t n = 0; n < rep.traces.size(); ++n)
        traces.push_back({{"n", n + 1}, {"re", rep.traces[n].real()}, {"im", rep.traces[n].imag()}});
    out["traces"] = traces;
    json fred = json::array();
    for (std::size_t m = 0; m < rep.fredholm.size(); ++m)
        fred.push_back({{"m", m}, {"re", rep.fredholm[m].real()}, {"im", rep.fredholm[m].imag()}});
    out["fredholm"] = fred;
    write_json_file(ctx.out / "spectrum_summary.json", out);

    CsvWriter eig_csv("k,re,im,abs", config);
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k)
        eig_csv.row({std::to_string(k + 1), fmt_g17(rep.eigenvalues[k].real()),
                     fmt_g17(rep.eigenvalues[k].imag()), fmt_g17(std::abs(rep.eigenvalues[k]))});
    write_text_file(ctx.out / "eigenvalues.csv", eig_csv.str());

    CsvWriter sv_csv("k,mu", config);
    for (std::size_t k = 0; k < rep.singular_values.size(); ++k)
        sv_csv.row({std::to_string(k + 1), fmt_g17(rep.singular_values[k])});
    write_text_file(ctx.out / "singular_values.csv", sv_csv.str());

    std::cout << "spectrum: rho=" << rep.spectral_radius << " resolved=" << rep.resolved_count
              << " tail=" << T.meta().aliasing_tail << " -> " << ctx.out.string() << "\n";
    return 0;
}

inline int run_traces(const json& P, const Context& ctx) {
    const AnosovMap A = make_map(P);
    const TrigPoly tau = make_tau(P["tau"].get<std::string>());
    const int q = P["q"].get<int>();
    const int K = P["K"].get<int>();
    const int nmax = P["nmax"].get<int>();
    const WeightScheme scheme(A.linear_part(), P["r"].get<double>());
    const int G = P["grid"].get<int>();

    TruncatedOperator T = (G == 0) ? assemble_auto(A, tau, q, scheme, K, nullptr, ctx.threads)
                                   : assemble(A, tau, q, scheme, K, G, nullptr, ctx.threads);
    const json config = audit("traces", P, ctx);
    CsvWriter csv("n,orbit_re,orbit_im,matrix_re,matrix_im,abs_gap", config);
    double worst = 0;
    for (int n = 1; n <= nmax; ++n) {
        const cpx orb = orbit_trace_sum(A, tau, q, n);
        const cpx mat = matrix_trace(T, n);
        worst = std::max(worst, std::abs(orb - mat));
        csv.row({std::to_string(n), fmt_g17(orb.real()), fmt_g17(orb.imag()),
                 fmt_g17(mat.real()), fmt_g17(mat.imag()), fmt_g17(std::abs(orb - mat))});
    }
    write_text_file(ctx.out / "traces.csv", csv.str());
    write_json_file(ctx.out / "traces_summary.json",
                    json{{"version", kVersion}, {"config", config}, {"max_gap", worst}});
    std::cout << "traces: n<=" << nmax << " max |orbit - matrix| = " << worst << " -> "
              << ctx.out.string() << "\n";
    return 0;
}

inline int run_pressure(const json& P, const Context& ctx) {
    const AnosovMap A = make_map(P);
    const int n = P["n"].get<int>();
    const double lo = P["sigma-min"].get<double>();
    const double hi = P["sigma-max"].get<double>();
    const int steps = P["sigma-steps"].get<int>();
    if (steps < 1) throw ConfigError("key \"sigma-steps\" must be positive");

    PeriodicOrbitSet set = periodic_points(A, n);
    unstable_frame(A, set);
    const json config = audit("pressure", P, ctx);
    CsvWriter csv("n,sigma,estimate,closed_form,gap", config);
    double max_gap = 0;
    for (int i = 0; i < steps; ++i) {
        const double sigma = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
        const double est = pressure_estimate(A, sigma, set);
        const double cf = linear_pressure_closed_form(A.linear_part(), sigma);
        max_gap = std::max(max_gap, std::abs(est - cf));
        csv.row({std::to_string(n), fmt_g17(sigma), fmt_g17(est), fmt_g17(cf),
                 fmt_g17(std::abs(est - cf))});
    }
    write_text_file(ctx.out / "pressure.csv", csv.str());
    write_json_file(ctx.out / "pressure_summary.json",
                    json{{"version", kVersion}, {"config", config}, {"max_gap_vs_linear", max_gap}});
    std::cout << "pressure: n=" << n << " max |estimate - closed form| = " << max_gap << " -> "
              << ctx.out.string() << "\n";
    return 0;
}

inline int run_ensemble(const json& P, const Context& ctx) {
    const AnosovMap A = make_map(P);
    EnsembleConfig cfg;
    cfg.N = P["N"].get<double>();
    cfg.q = P["q"].get<int>();
    cfg.n = P["n"].get<int>();
    cfg.samples = P["samples"].get<int>();
    cfg.seed = ctx.seed;

    const LaplaceEigenbasis basis(cfg.N);
    const double closed = expected_trace_sq(basis, A, cfg.q, cfg.n);
    const double diag = diagonal_weight_sum(A, cfg.n);
    const MonteCarloResult mc = monte_carlo_trace_sq(cfg, A, ctx.threads);

    const json config = audit("ensemble", P, ctx);
    write_json_file(ctx.out / "ensemble_summary.json",
                    json{{"version", kVersion},
                         {"config", config},
                         {"closed_form", closed},
                         {"mc_mean", mc.mean},
                         {"mc_stderr", mc.std_error},
                         {"diag_sum", diag},
                         {"basis_dim", basis.dim()}});
    std::cout << "ensemble: closed=" << closed << " mc=" << mc.mean << " +- " << mc.std_error
              << " diag=" << diag << " -> " << ctx.out.string() << "\n";
    return 0;
}

inline void write_series_outputs(const Context& ctx, const json& config, const std::string& stem,
                                 const std::vector<cpx>& series) {
    CsvWriter csv("N,re,im,abs", config);
    std::ostringstream dat;
    for (std::size_t N = 0; N < series.size(); ++N) {
        csv.row({std::to_string(N), fmt_g17(series[N].real()), fmt_g17(series[N].imag()),
                 fmt_g17(std::abs(series[N]))});
        dat << N << ' ' << fmt_g17(std::abs(series[N])) << '\n';
    }
    write_text_file(ctx.out / (stem + ".csv"), csv.str());
    write_text_file(ctx.out / (stem + ".dat"), dat.str());
}

inline int run_correlate(const json& P, const Context& ctx) {
    const AnosovMap A = make_map(P);
    const int K = P["K"].get<int>();
    const int N_max = P["N"].get<int>();
    const WeightScheme scheme(A.linear_part(), P["r"].get<double>());
    const auto [thr_lo, thr_hi] = rate_thresholds(A.linear_part());
    const json config = audit("correlate", P, ctx);

    const int sweep = P["sweep-samples"].get<int>();
    if (sweep > 0) {
        // Ensemble sweep: fitted decay bases over samples x q-grid x mode pairs.
        if (!A.is_linear())
            throw ConfigError("sweep mode runs on the linear map; drop shear-eps");
        const int qmax = P["qmax"].get<int>();
        const LaplaceEigenbasis basis(P["ensemble-N"].get<double>());
        const std::vector<FreqPair> fmodes = {{1, 0}, {0, 1}, {1, 1}};
        std::vector<double> bases;
        double max_base = 0;
        SweepAssembler engine(A, scheme, K);
        for (int s = 0; s < sweep; ++s) {
            const TrigPoly tau = sample(basis, ctx.seed, s);
            engine.set_sample(tau);
            for (int q = 1; q <= qmax; ++q) {
                TruncatedOperator T = engine.assemble_q(q);
                for (const FreqPair& fa : fmodes) {
                    const TrigPoly f = TrigPoly::mode(fa, 1.0);
                    const TrigPoly g = TrigPoly::mode({-fa[0], -fa[1]}, 1.0);
                    const auto series = correlation_spectral_series(T, f, g, N_max);
                    const DecayFit fit = decay_rate_fit(series);
                    if (fit.below_noise) continue;
                    bases.push_back(fit.base);
                    max_base = std::max(max_base, fit.base);
                }
            }
        }
        // Histogram of fitted bases on [0, 1].
        const int nbins = 50;
        std::vector<int> hist(nbins, 0);
        for (const double b : bases) {
            const int bin = std::min(nbins - 1, std::max(0, int(b * nbins)));
            ++hist[bin];
        }
        CsvWriter csv("bin_lo,bin_hi,count", config);
        for (int i = 0; i < nbins; ++i)
            csv.row({fmt_g17(double(i) / nbins), fmt_g17(double(i + 1) / nbins),
                     std::to_string(hist[i])});
        write_text_file(ctx.out / "decay_hist.csv", csv.str());
        write_json_file(ctx.out / "correlate_summary.json",
                        json{{"version", kVersion},
                             {"config", config},
                             {"max_fitted_base", max_base},
                             {"fits", bases.size()},
                             {"threshold_unconditional", thr_lo},
                             {"threshold_probabilistic", thr_hi}});
        std::cout << "correlate sweep: max fitted base " << max_base << " vs thresholds "
                  << thr_lo << " / " << thr_hi << " -> " << ctx.out.string() << "\n";
        return 0;
    }

    const TrigPoly tau = make_tau(P["tau"].get<std::string>());
    const int q = P["q"].get<int>();
    const TrigPoly f = TrigPoly::mode(parse_mode(P["f"].get<std::string>(), "f"), 1.0);
    const TrigPoly g = TrigPoly::mode(parse_mode(P["g"].get<std::string>(), "g"), 1.0);
    const std::string route = P["route"].get<std::string>();
    if (route != "spectral" && route != "direct" && route != "both")
        throw ConfigError("key \"route\" expects spectral|direct|both");

    json out{{"version", kVersion},
             {"config", config},
             {"threshold_unconditional", thr_lo},
             {"threshold_probabilistic", thr_hi}};
    if (route == "spectral" || route == "both") {
        const int G = P["grid"].get<int>();
        TruncatedOperator T = (G == 0) ? assemble_auto(A, tau, q, scheme, K, nullptr, ctx.threads)
                                       : assemble(A, tau, q, scheme, K, G, nullptr, ctx.threads);
        const auto series = correlation_spectral_series(T, f, g, N_max);
        write_series_outputs(ctx, config, "correlation_spectral", series);
        const DecayFit fit = decay_rate_fit(series);
        out["spectral"] = {{"fitted_base", fit.base},
                           {"oscillatory", fit.oscillatory},
                           {"below_noise", fit.below_noise},
                           {"points_used", fit.points_used},
                           {"spectral_radius", std::abs(T.eigenvalues().front())}};
    }
    if (route == "direct" || route == "both") {
        const auto series =
            correlation_direct_series(A, tau, q, f, g, N_max, P["direct-grid"].get<int>());
        write_series_outputs(ctx, config, "correlation_direct", series);
        const DecayFit fit = decay_rate_fit(series);
        out["direct"] = {{"fitted_base", fit.base},
                         {"oscillatory", fit.oscillatory},
                         {"below_noise", fit.below_noise},
                         {"points_used", fit.points_used}};
    }
    write_json_file(ctx.out / "correlate_summary.json", out);
    std::cout << "correlate: q=" << q << " series length " << N_max + 1 << " -> "
              << ctx.out.string() << "\n";
    return 0;
}

inline int run_average(const json& P, const Context& ctx) {
    const AnosovMap A = make_map(P);
    const TrigPoly tau = make_tau(P["tau"].get<std::string>());
    const int bump_grid = P["bump-grid"].get<int>();
    std::vector<int> ns, Ts;
    if (P["n"].get<int>() == 0)
        ns = {2, 3, 4};
    else
        ns = {P["n"].get<int>()};
    if (P["T"].get<int>() == 0)
        Ts = {8, 16, 32};
    else
        Ts = {P["T"].get<int>()};

    const json config = audit("average", P, ctx);
    CsvWriter csv("n,T,lhs,rhs,diag_sum,psi_hat0,tail,holds", config);
    bool all_hold = true;
    for (const int n : ns)
        for (const int T : Ts) {
            const FrequencyAverageReport rep = frequency_average(A, tau, n, T, bump_grid);
            all_hold = all_hold && rep.holds;
            csv.row({std::to_string(n), std::to_string(T), fmt_g17(rep.lhs), fmt_g17(rep.rhs),
                     fmt_g17(rep.diag_sum), fmt_g17(rep.psi_hat0), fmt_g17(rep.tail),
                     rep.holds ? "1" : "0"});
        }
    write_text_file(ctx.out / "average.csv", csv.str());
    write_json_file(ctx.out / "average_summary.json",
                    json{{"version", kVersion}, {"config", config}, {"all_hold", all_hold}});
    if (!all_hold) throw NumericalGateError("frequency-averaging inequality failed");
    std::cout << "average: inequality holds on all " << ns.size() * Ts.size() << " cells -> "
              << ctx.out.string() << "\n";
    return 0;
}

inline int run_thresholds(const json& P, const Context& ctx) {
    const IMat2 M = parse_matrix(P["mat"].get<std::string>());
    const auto [lo, hi] = rate_thresholds(M);
    const json config = audit("thresholds", P, ctx);
    write_json_file(ctx.out / "thresholds.json",
                    json{{"version", kVersion},
                         {"config", config},
                         {"rate_unconditional", lo},
                         {"rate_probabilistic", hi}});
    char buf[128];
    std::snprintf(buf, sizeof(buf), "thresholds: unconditional %.10g probabilistic %.10g\n", lo, hi);
    std::cout << buf;
    return 0;
}

inline int dispatch(const std::string& name, const json& raw_params, const Context& ctx) {
    const ExperimentDef& def = find_experiment(name);
    const json P = resolve_params(def, raw_params);
    if (name == "spectrum") return run_spectrum(P, ctx);
    if (name == "traces") return run_traces(P, ctx);
    if (name == "pressure") return run_pressure(P, ctx);
    if (name == "ensemble") return run_ensemble(P, ctx);
    if (name == "correlate") return run_correlate(P, ctx);
    if (name == "average") return run_average(P, ctx);
    if (name == "thresholds") return run_thresholds(P, ctx);
    throw ConfigError("unknown experiment \"" + name + "\"");
}

inline void usage(std::ostream& os) {
    os << "usage: skewlab <experiment> [--key value ...] [--out DIR] [--threads N] [--seed S]\n";
    os << "       skewlab run <config.json> [--out DIR] [--threads N] [--seed S]\n";
    os << "experiments:\n";
    for (const auto& e : experiment_table()) {
        os << "  " << e.name << "\n";
        for (const auto& p : e.params) os << "      --" << p.key << "  " << p.help << "\n";
    }
}

}  // namespace cli

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 ok, 2 config error, 3 numerical gate failure.
inline int run_cli(std::vector<std::string> args) {
    using namespace cli;
    try {
        if (args.empty() || args[0] == "--help" || args[0] == "-h") {
            usage(std::cout);
            return args.empty() ? 2 : 0;
        }
        std::string name = args[0];
        json raw = json::object();
        Context ctx;
        std::size_t i = 1;
        std::string config_path;
        if (name == "run") {
            if (args.size() < 2 || args[1].rfind("--", 0) == 0)
                throw ConfigError("run expects a config file path");
            config_path = args[1];
            i = 2;
        }
        for (; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a.rfind("--", 0) != 0) throw ConfigError("unexpected argument \"" + a + "\"");
            const std::string key = a.substr(2);
            if (i + 1 >= args.size()) throw ConfigError("flag --" + key + " expects a value");
            const std::string val = args[++i];
            if (key == "out")
                ctx.out = val;
            else if (key == "threads")
                ctx.threads = unsigned(std::stoul(val));
            else if (key == "seed")
                ctx.seed = std::stoull(val);
            else
                raw[key] = val;
        }
        if (name == "run") {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot open config file " + config_path);
            json file;
            try {
                is >> file;
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
            }
            if (!file.is_object() || !file.contains("experiment"))
                throw ConfigError("config file must be an object with an \"experiment\" key");
            name = file["experiment"].get<std::string>();
            for (auto it = file.begin(); it != file.end(); ++it) {
                if (it.key() == "experiment") continue;
                if (it.key() == "out") {
                    ctx.out = it.value().get<std::string>();
                    continue;
                }
                if (it.key() == "threads") {
                    ctx.threads = it.value().get<unsigned>();
                    continue;
                }
                if (it.key() == "seed") {
                    ctx.seed = it.value().get<std::uint64_t>();
                    continue;
                }
                raw[it.key()] = it.value();
            }
        }
        return dispatch(name, raw, ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalGateError& e) {
        std::cerr << "numerical gate failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace skewlab
