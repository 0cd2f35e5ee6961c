#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "carnot/numerics.hpp"
#include "carnot/spec_json.hpp"

namespace carnot {

namespace exit_code {
constexpr int ok = 0;            // verdict true / pass
constexpr int input_error = 2;   // malformed spec or parameter violation
constexpr int verdict_false = 3; // check ran, verdict is false (witness in report)
constexpr int not_found = 4;     // search ran, nothing found
} // namespace exit_code

struct CliOptions {
    std::string spec_path;
    std::string group;            // "heisenberg:1" style descriptor
    std::string example = "gradient";
    std::string task;             // for `check`
    std::string format = "text";  // text | json | csv
    std::string out;              // output path; empty = stdout
    std::string box = "1";        // quadrature half-width, rational
    int degree = 1;
    int dim_f = 1;
    int bump = 4;
    int ell = 1;
    double p = 1.0;
    uint64_t seed = 0;
    std::vector<int> grid = {16, 32, 64};
    bool check_reduction = false;
};

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

inline void emit(const CliOptions& opt, const std::string& text_form, const Json& report,
                 const std::string& csv_form = "") {
    std::string payload;
    if (opt.format == "text") {
        payload = text_form;
    } else if (opt.format == "json") {
        payload = report.dump(2) + "\n";
    } else if (opt.format == "csv") {
        if (csv_form.empty()) throw SpecError("csv format is only available for numeric reports");
        payload = csv_form;
    } else {
        throw SpecError("unknown format '" + opt.format + "' (text|json|csv)");
    }
    if (opt.out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw SpecError("cannot open output file '" + opt.out + "'");
        f << payload;
    }
}

inline Json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SpecError("cannot open spec file '" + path + "'");
    Json j;
    try {
        f >> j;
    } catch (const Json::parse_error& e) {
        throw SpecError("spec file '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

inline SpecDocument load_spec(const CliOptions& opt) {
    if (opt.spec_path.empty()) throw SpecError("this command needs --spec PATH");
    return parse_spec_document(load_json_file(opt.spec_path));
}

inline AlgebraPtr group_from_options(const CliOptions& opt) {
    if (!opt.group.empty()) return parse_group_string(opt.group);
    if (!opt.spec_path.empty()) return load_spec(opt).alg;
    throw SpecError("this command needs --group or --spec");
}

inline int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const SpecError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_code::input_error;
    } catch (const AlgebraError& e) {
        std::cerr << "algebra validation failed: " << e.what() << "\n";
        return exit_code::input_error;
    } catch (const CertificateError& e) {
        std::cerr << "internal certificate failure: " << e.what() << "\n";
        return 1;
    }
}

} // namespace detail

// carnot check <cocanceling|canceling|compose-zero> --spec FILE
inline int cmd_check(const CliOptions& opt) {
    return detail::run_guarded([&]() -> int {
        detail::Stopwatch clock;
        SpecDocument doc = detail::load_spec(opt);
        if (!doc.op) throw SpecError("spec document needs an 'operator' block for checks");
        Json report = report_envelope("check:" + opt.task, *doc.alg, opt.seed);
        std::ostringstream text;
        int code = exit_code::ok;

        if (opt.task == "cocanceling") {
            CocancelingVerdict v = check_cocanceling(symmetrize(*doc.op));
            report["verdicts"] = Json{{"cocanceling", cocanceling_to_json(v)}};
            text << "cocanceling: " << (v.cocanceling ? "yes" : "no") << "\n";
            if (!v.cocanceling) {
                text << "common kernel dimension: " << v.common_kernel.cols() << "\n";
                code = exit_code::verdict_false;
            }
        } else if (opt.task == "canceling") {
            if (doc.alg->step != 1)
                throw SpecError("canceling is a Euclidean notion; the group must be abelian");
            CancelingVerdict v = check_canceling_euclidean(*doc.op, 16, opt.seed);
            Json jv{{"certified", v.certified}, {"samples_used", v.samples.size()}};
            if (!v.certified) jv["candidate_subspace"] = matrix_to_json(v.candidate);
            report["verdicts"] = Json{{"canceling", jv}};
            if (v.certified) {
                text << "canceling: certified (" << v.samples.size() << " sample points)\n";
            } else {
                text << "canceling: not certified; candidate common image subspace of dim "
                     << v.candidate.cols() << " survives exact re-checks\n";
                code = exit_code::verdict_false;
            }
        } else if (opt.task == "compose-zero") {
            if (!doc.annihilator)
                throw SpecError("compose-zero needs an 'annihilator' block in the spec");
            std::vector<UeaElement> residual = to_uea_matrix(compose(*doc.annihilator, *doc.op));
            const bool zero = uea_matrix_is_zero(residual);
            report["verdicts"] = Json{{"compose_zero", zero}};
            text << "L(D) o A(D) = 0: " << (zero ? "yes" : "no") << "\n";
            if (!zero) {
                for (size_t i = 0; i < residual.size(); ++i)
                    if (!residual[i].is_zero()) {
                        std::string entry = to_string(*doc.alg, residual[i]);
                        report["verdicts"]["first_nonzero_entry"] = entry;
                        text << "first nonzero entry: " << entry << "\n";
                        break;
                    }
                code = exit_code::verdict_false;
            }
        } else {
            throw SpecError("unknown check task '" + opt.task +
                            "' (cocanceling|canceling|compose-zero)");
        }
        text << "elapsed: " << clock.seconds() << " s\n";
        detail::emit(opt, text.str(), report);
        return code;
    });
}

// carnot verify-example <gradient|powers:K|korn> --group G [--check-reduction]
inline int cmd_verify_example(const CliOptions& opt) {
    return detail::run_guarded([&]() -> int {
        detail::Stopwatch clock;
        AlgebraPtr alg = detail::group_from_options(opt);
        ExampleId id = parse_example(opt.example);
        ClosedFormResult res = closed_form_annihilator(id, alg);

        Json report = report_envelope("verify-example:" + id.str(), *alg, opt.seed);
        report["verdicts"] = Json{{"residual_zero", res.cert.residual_zero()},
                                  {"sym_N_zero", res.sym_N_zero},
                                  {"sym_M_injective_at_ones", res.sym_M_full_rank_at_ones},
                                  {"sym_L0_cocanceling", res.l0_cocanceling},
                                  {"sym_ML0_cocanceling", res.ml0_cocanceling},
                                  {"sym_L_cocanceling", res.cert.cocancel.cocanceling}};
        report["orders"] = Json{{"A", res.A.order},
                                {"L0", res.L0.order},
                                {"M", res.M.order},
                                {"N", res.N.order},
                                {"L", res.L.order}};
        report["certificate"] = certificate_to_json(res.cert);

        std::ostringstream text;
        text << "verify " << id.str() << " on " << alg->preset << "\n"
             << "  orders: L0=" << res.L0.order << " M=" << res.M.order << " N=" << res.N.order
             << " L=" << res.L.order << "\n"
             << "  (M o L0 - N) o A = 0 in the enveloping algebra: "
             << (res.cert.residual_zero() ? "yes" : "NO") << "\n"
             << "  Sym(N) = 0: " << (res.sym_N_zero ? "yes" : "NO") << "\n"
             << "  Sym(M)(1,..,1) injective: " << (res.sym_M_full_rank_at_ones ? "yes" : "NO") << "\n"
             << "  Sym(L0) cocanceling: " << (res.l0_cocanceling ? "yes" : "NO") << "\n"
             << "  Sym(M o L0) cocanceling: " << (res.ml0_cocanceling ? "yes" : "NO") << "\n"
             << "  Sym(L) cocanceling: " << (res.cert.cocancel.cocanceling ? "yes" : "NO") << "\n";

        if (opt.check_reduction) {
            KornReductionReport red = korn_reduction_check(alg);
            Json entries = Json::array();
            for (const auto& e : red.entries) entries.push_back(Json{{"label", e.label}, {"ok", e.ok}});
            report["korn_reduction"] = Json{{"k", red.k}, {"all_ok", red.all_ok}, {"entries", entries}};
            text << "  korn reduction (k=" << red.k << "): " << (red.all_ok ? "all residuals zero" : "FAILED")
                 << " (" << red.entries.size() << " identities)\n";
        }
        text << "elapsed: " << clock.seconds() << " s\n";
        detail::emit(opt, text.str(), report);
        return exit_code::ok;
    });
}

// carnot find-annihilator --spec FILE --degree N [--dimf F] [--seed S]
inline int cmd_find_annihilator(const CliOptions& opt) {
    return detail::run_guarded([&]() -> int {
        detail::Stopwatch clock;
        if (opt.degree < 1) throw SpecError("--degree must be >= 1");
        SpecDocument doc = detail::load_spec(opt);
        if (!doc.op) throw SpecError("spec document needs an 'operator' block");
        FindResult res = find_annihilator(*doc.op, opt.degree, opt.dim_f, opt.seed);

        Json report = report_envelope("find-annihilator", *doc.alg, opt.seed);
        report["degree"] = opt.degree;
        report["dimF"] = opt.dim_f;
        report["solution_space_dim"] = res.solution_space_dim;
        std::ostringstream text;
        text << "solution space of L o A = 0 at order " << opt.degree << ": dimension "
             << res.solution_space_dim << "\n";
        int code = exit_code::ok;
        if (res.certificate) {
            report["certificate"] = certificate_to_json(*res.certificate);
            text << "cocanceling annihilator found; certificate verified\n";
        } else {
            report["certificate"] = nullptr;
            text << "no cocanceling annihilator at this degree\n";
            code = exit_code::not_found;
        }
        text << "elapsed: " << clock.seconds() << " s\n";
        detail::emit(opt, text.str(), report);
        return code;
    });
}

// carnot sobolev/hardy --group G --example E --bump P --grid n1,n2,..
inline int cmd_numeric(const CliOptions& opt, bool hardy) {
    return detail::run_guarded([&]() -> int {
        detail::Stopwatch clock;
        // numerics default to the smallest nonabelian group
        AlgebraPtr alg = (opt.group.empty() && opt.spec_path.empty())
                             ? make_heisenberg(1)
                             : detail::group_from_options(opt);
        ExampleId id = parse_example(opt.example);
        BumpFunction bump;
        bump.power = opt.bump;
        QuadratureGrid base_grid{parse_rat(opt.box), 1};

        auto producer = [&](int n) {
            QuadratureGrid grid{base_grid.half_width, n};
            return hardy ? hardy_report(alg, id, bump, opt.ell, opt.p, grid)
                         : sobolev_report(alg, id, bump, grid);
        };
        RefineStudy study = refine_study(producer, opt.grid);

        const std::string task = hardy ? "hardy" : "sobolev";
        Json report = report_envelope(task + ":" + id.str(), *alg, opt.seed);
        Json rows = Json::array();
        for (const auto& r : study.rows)
            rows.push_back(Json{{"n", r.n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}});
        report["refinement"] = rows;
        report["pass"] = study.pass;
        report["degenerate"] = study.degenerate;
        report["tolerance"] = study.tolerance;
        report["bump_power"] = opt.bump;
        report["box_half_width"] = rat_str(base_grid.half_width);
        if (hardy) {
            report["ell"] = opt.ell;
            report["p"] = opt.p;
        }

        std::ostringstream text;
        text << task << " study for " << id.str() << " on " << alg->preset << " (bump power "
             << opt.bump << ")\n";
        text << "  n        lhs           rhs           ratio\n";
        text.precision(6);
        for (const auto& r : study.rows)
            text << "  " << r.n << "\t" << r.lhs << "\t" << r.rhs << "\t" << r.ratio << "\n";
        text << (study.degenerate ? "  DEGENERATE (0/0 ratios)\n"
                                  : (study.pass ? "  PASS: ratios stable within tolerance\n"
                                                : "  FAIL: ratios not stable within tolerance\n"));
        text << "elapsed: " << clock.seconds() << " s\n";
        detail::emit(opt, text.str(), report, refine_csv(study));
        return study.degenerate ? exit_code::verdict_false
                                : (study.pass ? exit_code::ok : exit_code::verdict_false);
    });
}

// carnot group-info --group G
inline int cmd_group_info(const CliOptions& opt) {
    return detail::run_guarded([&]() -> int {
        AlgebraPtr alg = detail::group_from_options(opt);
        Json report = report_envelope("group-info", *alg, opt.seed);
        std::ostringstream text;
        text << alg->preset << ": m=" << alg->m << " step=" << alg->step << " Q=" << alg->Q
             << " dim=" << alg->dim << "\n"
             << "basis convention: " << alg->basis_convention << "\n"
             << "basis:";
        for (const auto& n : alg->basis_names) text << " " << n;
        text << "\nnonzero brackets (a < b):\n";
        for (int a = 0; a < alg->dim; ++a)
            for (int b = a + 1; b < alg->dim; ++b) {
                const auto& sv = alg->brackets[static_cast<size_t>(a)][static_cast<size_t>(b)];
                if (sv.empty()) continue;
                text << "  [" << alg->basis_names[static_cast<size_t>(a)] << ","
                     << alg->basis_names[static_cast<size_t>(b)] << "] =";
                for (const auto& [k, c] : sv)
                    text << " " << (rat_str(c) == "1" ? "" : "(" + rat_str(c) + ") ")
                         << alg->basis_names[static_cast<size_t>(k)];
                text << "\n";
            }
        detail::emit(opt, text.str(), report);
        return exit_code::ok;
    });
}

} // namespace carnot
