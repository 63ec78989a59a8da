#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <zmoments/identities.hpp>
#include <zmoments/io.hpp>
#include <zmoments/meanvalue.hpp>

using namespace zmoments;

namespace {

std::vector<real> parse_list(const std::string& s) {
    std::vector<real> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(io::parse_real(tok, "--sweep"));
    if (v.empty()) throw DomainError("--sweep needs at least one value");
    return v;
}

// every option of the active subcommand, as resolved after parsing
std::vector<std::pair<std::string, std::string>> resolved_config(const CLI::App* sub) {
    std::vector<std::pair<std::string, std::string>> out{{"command", sub->get_name()}};
    for (auto* opt : sub->get_options()) {
        if (opt->get_name() == "--help") continue;
        std::string v = opt->as<std::string>();
        out.push_back({"config." + opt->get_name().substr(2), v.empty() ? "(default)" : v});
    }
    return out;
}

void print_result(const IdentityResult& r) {
    std::printf("%-4s %-55s max residual %.3e (tol %.0e, %zu cases)\n", r.pass() ? "PASS" : "FAIL", r.name.c_str(),
                static_cast<double>(r.max_residual), static_cast<double>(r.tolerance), r.cases);
}

// zeros must reach past the last endpoint so it can be snapped
constexpr real snap_headroom = 10;

ZeroData warm_zeros(const std::string& cache, real T, const PrecisionConfig& cfg) {
    T += snap_headroom;
    ZeroList z;
    if (!cache.empty() && std::filesystem::exists(cache)) {
        z = io::load_zeros(cache);
        if (z.T < T || !z.certified)
            throw CertificationError("zero cache " + cache + " does not certify up to T = " + io::fmt(T) +
                                     "; run `zmoments zeros --T " + io::fmt(T) + " --cache " + cache + "`");
    } else {
        if (!cache.empty()) std::fprintf(stderr, "zero cache %s missing; computing zeros to %s\n", cache.c_str(), io::fmt(T).c_str());
        z = find_zeros(T, cfg);
        if (!cache.empty()) {
            io::FileLock lock(cache);
            io::save_zeros(cache, z);
        }
    }
    return ZeroData::build(std::move(z), cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moments of zeta'(rho) twisted by Dirichlet polynomials: experiments and checks"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    real precision = 1e-14L;
    auto add_precision = [&](CLI::App* c) {
        c->add_option("--precision", precision, "target absolute error of zeta evaluations")->capture_default_str();
    };

    // zeros
    auto* zeros = app.add_subcommand("zeros", "compute or extend a certified zero cache");
    real zT = 0;
    std::string cache;
    zeros->add_option("--T", zT, "height")->required();
    zeros->add_option("--cache", cache, "cache file")->required();
    add_precision(zeros);

    // verify-identities
    auto* verify = app.add_subcommand("verify-identities", "run the arithmetic and character identity suites");
    std::string scope = "all";
    long bound = -1;
    verify->add_option("--scope", scope, "arith | characters | all")
        ->check(CLI::IsMember({"arith", "characters", "all"}))
        ->capture_default_str();
    verify->add_option("--bound", bound, "n bound (arith) or modulus bound (characters); default 1e4 / 60");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "derive main-term constants and write them to a file");
    std::string out = "zmoments_constants.txt";
    std::uint64_t seed = CalibrationBudget{}.seed;
    std::string mode = "calibrate";
    calibrate->add_option("--out", out, "constants file")->capture_default_str();
    calibrate->add_option("--seed", seed, "seed of the synthetic round-trip check")->capture_default_str();
    calibrate->add_option("--mode", mode, "calibrate | laurent")
        ->check(CLI::IsMember({"calibrate", "laurent"}))
        ->capture_default_str();

    // compare
    auto* compare = app.add_subcommand("compare", "discrete sum over zeros vs the main term along a T sweep");
    std::string sweep = "500,1000,2000,5000", kase = "divisor", constants = "zmoments_constants.txt", out_stem;
    real theta = 0.2L;
    bool contour = false;
    compare->add_option("--sweep", sweep, "comma-separated T values")->capture_default_str();
    compare->add_option("--theta", theta, "M = floor(T^theta)")->capture_default_str();
    compare->add_option("--case", kase, "divisor | indicator")
        ->check(CLI::IsMember({"divisor", "indicator"}))
        ->capture_default_str();
    compare->add_option("--cache", cache, "zero cache file");
    compare->add_option("--constants", constants, "constants file from `calibrate`")->capture_default_str();
    compare->add_option("--out", out_stem, "report stem (writes .json and .txt)");
    compare->add_flag("--contour", contour, "also evaluate S_R and the mid-level identity");
    add_precision(compare);

    // shu-check
    auto* shu = app.add_subcommand("shu-check", "brute-force sums of (Lambda*log)(hu) vs the residue main term");
    std::uint64_t h = 1, k = 1;
    std::string xs = "10000,100000,1000000", bracket = "corrected";
    shu->add_option("--h", h)->capture_default_str();
    shu->add_option("--k", k)->capture_default_str();
    shu->add_option("--sweep", xs, "comma-separated x values")->capture_default_str();
    shu->add_option("--bracket", bracket, "corrected | literal")
        ->check(CLI::IsMember({"corrected", "literal"}))
        ->capture_default_str();
    shu->add_option("--constants", constants)->capture_default_str();
    shu->add_option("--out", out_stem, "report stem");

    // gonek-check
    auto* gonek = app.add_subcommand("gonek-check", "contour integral of chi(1-s) r^-s against delta(r) e(-r)");
    real r = 0, gT = 0, kappa = 0;
    gonek->add_option("--r", r, "r (omit for the built-in set of triples)");
    gonek->add_option("--T", gT, "height");
    gonek->add_option("--kappa", kappa, "abscissa, default 1 + 1/log T");

    // m0-check
    auto* m0 = app.add_subcommand("m0-check", "brute-force M0 vs its main term along a T sweep");
    std::string m0sweep = "500,1000,2000,4000";
    std::uint64_t M = 8;
    m0->add_option("--sweep", m0sweep, "comma-separated T values")->capture_default_str();
    m0->add_option("--M", M)->capture_default_str();
    m0->add_option("--constants", constants)->capture_default_str();
    m0->add_option("--out", out_stem, "report stem");

    CLI11_PARSE(app, argc, argv);

    try {
        PrecisionConfig cfg;
        cfg.target_abs_error = precision;
        cfg.validate();

        if (zeros->parsed()) {
            io::FileLock lock(cache);
            if (std::filesystem::exists(cache)) {
                auto z = io::load_zeros(cache);
                if (z.certified && z.T >= zT) {
                    std::printf("cache %s already certifies %zu zeros below T = %s\n", cache.c_str(), z.size(),
                                io::fmt(z.T).c_str());
                    return 0;
                }
            }
            ZeroCertificate cert;
            auto z = find_zeros(zT, cfg, &cert);
            io::save_zeros(cache, z);
            std::printf("%zu zeros below T = %s, certified = %s\n", z.size(), io::fmt(zT).c_str(),
                        z.certified ? "true" : "false");
            std::printf("argument-principle count %ld (raw %.6f); Turing check %s\n", cert.argument_count,
                        static_cast<double>(cert.argument_raw),
                        cert.turing_applicable ? (cert.turing_found == cert.turing_gram_index + 1 ? "passed" : "FAILED")
                                               : "not applicable below 168 pi");
            return z.certified ? 0 : 1;
        }

        if (verify->parsed()) {
            std::vector<IdentityResult> res;
            if (scope != "characters") {
                auto a = arith_identity_suite(bound < 0 ? 10000 : bound);
                res.insert(res.end(), a.begin(), a.end());
            }
            if (scope != "arith") {
                std::uint64_t b = bound < 0 ? 0 : bound;
                auto c = bound < 0 ? character_identity_suite() : character_identity_suite(b, b, b, b);
                res.insert(res.end(), c.begin(), c.end());
            }
            bool ok = true;
            for (auto& x : res) {
                print_result(x);
                ok = ok && x.pass();
            }
            return ok ? 0 : 1;
        }

        if (calibrate->parsed()) {
            CalibrationBudget B;
            B.seed = seed;
            auto K = derive_constants(mode == "laurent" ? DeriveMode::laurent : DeriveMode::calibrate, B);
            auto rt = calibration_round_trip(B);
            K.diagnostics["round_trip_max_error"] = rt.max_abs_error;
            io::save_constants(out, K);
            std::fputs(io::constants_to_text(K).c_str(), stdout);
            return rt.max_abs_error < 1e-3L ? 0 : 1;
        }

        if (compare->parsed()) {
            auto K = io::load_constants(constants);
            auto Ts = parse_list(sweep);
            auto zd = warm_zeros(cache, *std::max_element(Ts.begin(), Ts.end()), cfg);
            std::vector<MeanValueParams> pts;
            for (real T_raw : Ts) {
                real T = snap_endpoint(T_raw, zd.zeros);
                pts.push_back(kase == "divisor" ? MeanValueParams::divisor_case(T, theta) : MeanValueParams::indicator(T));
            }
            EndToEndOptions opt;
            opt.with_contour = contour;
            auto rep = end_to_end_report(pts, K, zd, cfg, opt);
            auto meta = resolved_config(compare);
            rep.metadata.insert(rep.metadata.end(), meta.begin(), meta.end());
            std::fputs(io::report_to_table(rep).c_str(), stdout);
            std::printf("trend inversions: %d\n", rep.inversions());
            if (!out_stem.empty()) io::save_report(out_stem, rep);
            return 0;
        }

        if (shu->parsed()) {
            auto K = io::load_constants(constants);
            auto x = parse_list(xs);
            std::sort(x.begin(), x.end());
            auto rep = shu_sum_check(h, k, x, K, bracket == "literal" ? ShuBracket::literal : ShuBracket::corrected);
            auto meta = resolved_config(shu);
            rep.metadata.insert(rep.metadata.end(), meta.begin(), meta.end());
            std::fputs(io::report_to_table(rep).c_str(), stdout);
            if (!out_stem.empty()) io::save_report(out_stem, rep);
            bool ok = rep.rows.back().rel_error < 0.05L &&
                      (rep.rows.size() < 2 || rep.rows.back().rel_error < rep.rows.front().rel_error);
            std::printf("%s: rel error %.3e at x = %g\n", ok ? "PASS" : "FAIL",
                        static_cast<double>(rep.rows.back().rel_error), static_cast<double>(x.back()));
            return ok ? 0 : 1;
        }

        if (gonek->parsed()) {
            struct Triple { real r, T, kappa; };
            std::vector<Triple> triples;
            if (r > 0) {
                if (!(gT > 0)) throw DomainError("--T is required with --r");
                triples.push_back({r, gT, kappa > 0 ? kappa : 1 + 1 / std::log(gT)});
            } else {
                triples = {{1.5, 200, 1.1},  {2.25, 500, 1.1}, {1, 1000, 1},     {10, 1000, 1.5},    {50, 2000, 1.2},
                           {3.7, 5000, 1.1}, {500, 1000, 1.1}, {1000, 1000, 1.3}, {300, 500, 2},   {2000, 5000, 1.1}};
            }
            bool ok = true;
            std::printf("%10s %8s %6s %12s %12s %24s %s\n", "r", "T", "kappa", "residual", "envelope", "predicted", "");
            for (auto& t : triples) {
                auto g = gonek_integral_check(t.r, t.T, t.kappa);
                ok = ok && g.within;
                std::printf("%10.4g %8.6g %6.3g %12.4e %12.4e %11.6f%+11.6fi %s\n", static_cast<double>(t.r),
                            static_cast<double>(t.T), static_cast<double>(t.kappa), static_cast<double>(g.residual),
                            static_cast<double>(g.envelope), static_cast<double>(g.predicted.real()),
                            static_cast<double>(g.predicted.imag()), g.within ? "within" : "OUTSIDE");
            }
            return ok ? 0 : 1;
        }

        if (m0->parsed()) {
            auto K = io::load_constants(constants);
            ComparisonReport rep;
            rep.kind = "m0";
            rep.metadata = resolved_config(m0);
            rep.metadata.push_back({"constants", K.source});
            for (real T : parse_list(m0sweep)) {
                auto p = MeanValueParams::with_M(T, M);
                rep.add({{"T", T}, {"M", real(M)}}, m0_direct(p), m0_main_term(p, K));
            }
            std::fputs(io::report_to_table(rep).c_str(), stdout);
            if (!out_stem.empty()) io::save_report(out_stem, rep);
            bool ok = rep.inversions() <= 1;
            std::printf("%s: %d trend inversion(s); final rel error %.3e\n", ok ? "PASS" : "FAIL", rep.inversions(),
                        static_cast<double>(rep.rows.back().rel_error));
            return ok ? 0 : 1;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
