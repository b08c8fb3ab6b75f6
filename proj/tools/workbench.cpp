// Command-line front end: reads JSON documents describing complexes, towers,
// and systems, runs the requested computation or verification, and reports
// verdicts.  Exit codes: 0 all verdicts pass, 1 some verdict fails,
// 2 malformed input (diagnostics on stderr).
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "wb/document.hpp"

using namespace wb;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

FgAbGroup load_fg_coeff(const std::string& file) {
    Json j = load_document(file);
    if (is_divisible_coeff(j))
        throw InputError(file +
                         ": this command needs finitely generated "
                         "coefficients, not a divisible group");
    return group_from_json(j, file);
}

void write_report(const std::optional<std::string>& out, const Json& j) {
    if (!out) return;
    std::ofstream f(*out);
    if (!f) throw InputError("cannot write report to " + *out);
    f << j.dump(2) << "\n";
}

// Degrees to sweep: one past the stored range on each side.
std::pair<int, int> degree_range(const CochainComplex& c) {
    if (c.empty()) return {0, 0};
    return {c.lo - 1, c.hi() + 1};
}

int run(int argc, char** argv) {
    CLI::App app{"workbench: cochain complexes, cone homology, and limits of "
                 "inverse systems"};
    app.require_subcommand(1);

    std::string complex_file, coeff_file, report_file_s;
    std::optional<std::string> report_file;
    int degree = 0;
    bool all_degrees = false;

    auto add_report = [&](CLI::App* cmd) {
        cmd->add_option("--report", report_file_s,
                        "write a JSON report with witnesses");
    };

    // cohomology
    auto* coh = app.add_subcommand("cohomology", "cohomology of a complex");
    coh->add_option("complex", complex_file)->required();
    auto* coh_deg = coh->add_option("--degree", degree);

    // cone-homology
    auto* coneh =
        app.add_subcommand("cone-homology", "cone-based homology groups");
    coneh->add_option("complex", complex_file)->required();
    coneh->add_option("--coeff", coeff_file)->required();
    auto* coneh_deg = coneh->add_option("--degree", degree);

    // ucf-verify
    auto* ucf = app.add_subcommand(
        "ucf-verify", "verify the coefficient sequence at one or all degrees");
    ucf->add_option("complex", complex_file)->required();
    ucf->add_option("--coeff", coeff_file)->required();
    auto* ucf_deg = ucf->add_option("--degree", degree);
    ucf->add_flag("--all-degrees", all_degrees);
    add_report(ucf);

    // classical-compare
    auto* cc = app.add_subcommand(
        "classical-compare",
        "compare with the classical homology of Hom(C;G) (free complexes)");
    cc->add_option("complex", complex_file)->required();
    cc->add_option("--coeff", coeff_file)->required();
    auto* cc_deg = cc->add_option("--degree", degree);
    cc->add_flag("--all-degrees", all_degrees);
    add_report(cc);

    // ker-xi-verify
    auto* kx = app.add_subcommand("ker-xi-verify",
                                  "verify the kernel description of xi");
    kx->add_option("complex", complex_file)->required();
    kx->add_option("--coeff", coeff_file)->required();
    auto* kx_deg = kx->add_option("--degree", degree);
    kx->add_flag("--all-degrees", all_degrees);
    add_report(kx);

    // naturality-verify
    auto* nat = app.add_subcommand("naturality-verify",
                                   "verify naturality for a map of complexes");
    nat->add_option("map", complex_file)->required();
    nat->add_option("--coeff", coeff_file)->required();
    nat->add_option("--degree", degree)->required();
    add_report(nat);

    // tower lim / lim1
    auto* tower = app.add_subcommand("tower", "limits of towers of groups");
    tower->require_subcommand(1);
    auto* tlim = tower->add_subcommand("lim", "inverse limit");
    tlim->add_option("tower", complex_file)->required();
    add_report(tlim);
    auto* tlim1 = tower->add_subcommand("lim1", "derived limit verdict");
    tlim1->add_option("tower", complex_file)->required();
    add_report(tlim1);

    // system verify
    auto* sys = app.add_subcommand("system", "inverse systems of complexes");
    sys->require_subcommand(1);
    auto* sv = sys->add_subcommand("verify", "run one verification");
    sv->add_option("system", complex_file)->required();
    sv->add_option("--coeff", coeff_file)->required();
    auto* sv_deg = sv->add_option("--degree", degree);
    int truncate = 0, which_index = -1;
    sv->add_option("--truncate", truncate, "override the truncation depth");
    sv->add_option("--index", which_index,
                   "limit-sequence piece to check (0, 1, or both by default)");
    bool f_lemma2 = false, f_cor2 = false, f_lemma4 = false, f_cor3 = false,
         f_theorem3 = false, f_milnor = false, f_cor5 = false;
    sv->add_flag("--lemma2", f_lemma2, "continuity of cone homology");
    sv->add_flag("--cor2", f_cor2, "derived limit of Hom into injectives");
    sv->add_flag("--lemma4", f_lemma4, "derived limit of the xi kernels");
    sv->add_flag("--cor3", f_cor3, "derived limit of the cycle towers");
    sv->add_flag("--theorem3", f_theorem3, "limit coefficient sequence");
    sv->add_flag("--milnor", f_milnor, "main limit sequence");
    sv->add_flag("--cor5", f_cor5, "xi iso for divisible coefficients");
    add_report(sv);

    // simplicial import
    auto* simp = app.add_subcommand("simplicial", "simplicial complexes");
    simp->require_subcommand(1);
    auto* imp = simp->add_subcommand(
        "import", "facet list -> cochain complex document");
    std::string pair_file, out_file;
    imp->add_option("facets", complex_file)->required();
    imp->add_option("--pair", pair_file, "subcomplex facet list");
    imp->add_option("--out", out_file, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!report_file_s.empty()) report_file = report_file_s;

    if (*coh) {
        CochainComplex c = complex_from_json(load_document(complex_file),
                                             complex_file);
        auto [lo, hi] = degree_range(c);
        if (*coh_deg) lo = hi = degree;
        for (int n = lo; n <= hi; ++n)
            std::cout << "H^" << n << " = " << cohomology(c, n).h.describe()
                      << "\n";
        return 0;
    }

    if (*coneh) {
        CochainComplex c = complex_from_json(load_document(complex_file),
                                             complex_file);
        Json cj = load_document(coeff_file);
        auto [lo, hi] = degree_range(c);
        if (*coneh_deg) lo = hi = degree;
        if (is_divisible_coeff(cj)) {
            ConeUcf u(c, self_resolution(divisible_from_json(cj, coeff_file)));
            for (int n = lo; n <= hi; ++n) {
                const ConeHomology& h = u.homology(n);
                std::cout << "Hbar_" << n << " = "
                          << (h.fg ? h.group.describe()
                                   : std::string("(not finitely generated)"))
                          << "\n";
            }
        } else {
            ConeUcf u(c, standard_resolution(group_from_json(cj, coeff_file)));
            for (int n = lo; n <= hi; ++n)
                std::cout << "Hbar_" << n << " = "
                          << u.homology(n).group.describe() << "\n";
        }
        return 0;
    }

    if (*ucf || *cc || *kx) {
        CochainComplex c = complex_from_json(load_document(complex_file),
                                             complex_file);
        FgAbGroup g = load_fg_coeff(coeff_file);
        auto [lo, hi] = degree_range(c);
        bool has_deg = (*ucf && *ucf_deg) || (*cc && *cc_deg) ||
                       (*kx && *kx_deg);
        if (has_deg && !all_degrees) lo = hi = degree;
        bool all_ok = true;
        Json results = Json::array();
        ConeUcf u(c, standard_resolution(g));
        for (int n = lo; n <= hi; ++n) {
            bool ok;
            if (*ucf) {
                UcfReport r = u.verify(n);
                ok = r.exact();
                results.push_back(report_to_json(r));
            } else if (*cc) {
                ClassicalCompare r = classical_compare(c, g, n);
                ok = r.ok();
                results.push_back(report_to_json(r));
            } else {
                KerXiReport r = u.verify_ker_xi(n);
                ok = r.ok();
                results.push_back(report_to_json(r));
            }
            all_ok = all_ok && ok;
            std::cout << "degree " << n << ": " << (ok ? "ok" : "FAILED")
                      << "\n";
        }
        write_report(report_file, results);
        return all_ok ? 0 : 1;
    }

    if (*nat) {
        CochainMap f = cochain_map_from_json(load_document(complex_file),
                                             complex_file);
        FgAbGroup g = load_fg_coeff(coeff_file);
        NaturalityReport r = naturality_check(f, g, degree);
        std::cout << "degree " << degree << ": "
                  << (r.ok() ? "ok" : "FAILED") << "\n";
        write_report(report_file, report_to_json(r));
        return r.ok() ? 0 : 1;
    }

    if (*tlim || *tlim1) {
        TowerOfGroups t = tower_from_json(load_document(complex_file),
                                          complex_file);
        if (*tlim) {
            LimResult r = lim_tower(t);
            std::cout << "lim = " << r.group.describe()
                      << (r.complete ? "" : "  (truncated value only)")
                      << "\n";
            write_report(report_file, report_to_json(r));
            return r.complete ? 0 : 1;
        }
        Lim1Certificate r = lim1_tower(t);
        std::cout << "lim^1 verdict: " << to_string(r.verdict);
        if (r.verdict == Lim1Verdict::Nonzero)
            std::cout << "  (index " << r.index_factor << " at depth "
                      << r.depth << ")";
        std::cout << "\n";
        write_report(report_file, report_to_json(r));
        return r.verdict == Lim1Verdict::Unknown ? 1 : 0;
    }

    if (*sv) {
        int picked = f_lemma2 + f_cor2 + f_lemma4 + f_cor3 + f_theorem3 +
                     f_milnor + f_cor5;
        if (picked != 1)
            throw InputError("pick exactly one of --lemma2 --cor2 --lemma4 "
                             "--cor3 --theorem3 --milnor --cor5");
        if (!*sv_deg && !f_cor5)
            throw InputError("--degree is required for this verification");
        TowerOfComplexes s = system_from_json(load_document(complex_file),
                                              complex_file);
        Json cj = load_document(coeff_file);
        bool ok;
        Json rj;
        if (f_cor5) {
            if (!is_divisible_coeff(cj))
                throw InputError(coeff_file +
                                 ": --cor5 needs divisible coefficients, "
                                 "e.g. {\"divisible\": {\"q\": 0, \"qz\": 1}}");
            QZGroup w = divisible_from_json(cj, coeff_file);
            Cor5Report r = verify_cor5(s, degree, w);
            ok = r.ok();
            rj = report_to_json(r);
        } else if (f_cor2) {
            Cor2Report r = verify_cor2(s, degree, truncate);
            ok = r.ok();
            rj = report_to_json(r);
        } else {
            FgAbGroup g = group_from_json(cj, coeff_file);
            if (f_lemma2) {
                Lemma2Report r = verify_lemma2(s, g, degree, truncate);
                ok = r.ok();
                rj = report_to_json(r);
            } else if (f_lemma4) {
                Lemma4Report r = verify_lemma4(s, g, degree, truncate);
                ok = r.ok();
                rj = report_to_json(r);
            } else if (f_cor3) {
                Cor3Report r = verify_cor3(s, g, degree, truncate);
                ok = r.ok();
                rj = report_to_json(r);
            } else if (f_theorem3) {
                rj = Json::array();
                ok = true;
                for (int i = 0; i <= 1; ++i) {
                    if (which_index >= 0 && i != which_index) continue;
                    Theorem3Report r =
                        verify_theorem3(s, g, degree, i, truncate);
                    ok = ok && r.ok();
                    rj.push_back(report_to_json(r));
                }
            } else {  // milnor
                MilnorReport r = verify_main_sequence(s, g, degree);
                ok = r.ok();
                rj = report_to_json(r);
                std::cout << (r.exact_mode ? "exact mode"
                                           : "certificate mode")
                          << "\n";
            }
        }
        std::cout << "verification: " << (ok ? "ok" : "FAILED") << "\n";
        write_report(report_file, rj);
        return ok ? 0 : 1;
    }

    if (*imp) {
        SimplicialComplex k = simplicial_from_json(load_document(complex_file),
                                                   complex_file);
        CochainComplex c;
        if (!pair_file.empty()) {
            SimplicialComplex l =
                simplicial_from_json(load_document(pair_file), pair_file);
            c = cochain_of_pair(k, l);
        } else {
            c = cochain_of(k);
        }
        Json out = complex_to_json(c);
        if (out_file.empty()) {
            std::cout << out.dump(2) << "\n";
        } else {
            std::ofstream f(out_file);
            if (!f) throw InputError("cannot write " + out_file);
            f << out.dump(2) << "\n";
        }
        return 0;
    }

    return 2;  // unreachable: a subcommand is required
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DocumentError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidSubcomplex& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NotSimplicial& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NotFree& e) {
        std::cerr << "input error: " << e.what()
                  << " (this check needs a degreewise free complex)\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
