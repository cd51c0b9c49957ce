#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "subdiag/determinant.hpp"
#include "subdiag/factor.hpp"
#include "subdiag/harness.hpp"
#include "subdiag/io.hpp"
#include "subdiag/outerness.hpp"

namespace {

using namespace subdiag;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

PNorm parse_p(const std::string& token) {
    if (token == "inf") return PNorm::inf();
    try {
        const double v = std::stod(token);
        PNorm p{v};
        p.validate();
        return p;
    } catch (const std::invalid_argument&) {
        throw ParseError("--p", "expected a real >= 1 or the token 'inf'");
    }
}

std::pair<int, int> parse_dims(const std::string& token) {
    const std::size_t pos = token.find("..");
    if (pos == std::string::npos) throw ParseError("--dims", "expected a range like 2..5");
    try {
        const int lo = std::stoi(token.substr(0, pos));
        const int hi = std::stoi(token.substr(pos + 2));
        return {lo, hi};
    } catch (const std::exception&) {
        throw ParseError("--dims", "expected a range like 2..5");
    }
}

struct Cli {
    std::string input;
    std::string p_token = "2";
    std::string mode = "inner-outer";
    std::string dump, dump_u, dump_d;
    std::string proj_file;
    std::string report;
    std::string dims = "2..5";
    int restarts = 16;
    int trials = 100;
    double tol = -1.0;
    std::uint64_t seed = 0;
};

int cmd_det(const Cli& cli) {
    const MatrixFile mf = read_matrix_file(cli.input);
    std::cout << fmt(fk_det(mf.matrix).value) << "\n";
    return 0;
}

int cmd_factor(const Cli& cli) {
    const MatrixFile mf = read_matrix_file(cli.input);
    const PNorm p = parse_p(cli.p_token);
    if (cli.mode == "inner-outer" || cli.mode == "riesz-szego") {
        const FactorizationResult res = cli.mode == "inner-outer"
                                            ? inner_outer(mf.matrix, mf.blocks)
                                            : riesz_szego_positive(mf.matrix, mf.blocks);
        std::cout << "mode: " << cli.mode << "\n"
                  << "residual: " << fmt(res.residual) << "\n"
                  << "u_unitarity_defect: " << fmt(res.u_unitarity_defect) << "\n"
                  << "h_outer: " << (res.h_outer ? "true" : "false") << "\n";
        if (!cli.dump.empty()) write_matrix_file(cli.dump, res.h, mf.blocks);
        if (!cli.dump_u.empty()) write_matrix_file(cli.dump_u, res.u, mf.blocks);
        return 0;
    }
    if (cli.mode == "uniform-seq") {
        const std::vector<UniformOuterStep> steps =
            uniform_outer_sequence(mf.matrix, mf.blocks, default_outer_schedule(mf.matrix), p);
        std::cout << "n op_norm_ha p_dist_to_one det_ha\n";
        for (const UniformOuterStep& st : steps)
            std::cout << st.n << " " << fmt(st.op_norm_ha) << " " << fmt(st.p_dist_to_one) << " "
                      << fmt(st.det_ha) << "\n";
        if (!cli.dump.empty() && !steps.empty())
            write_matrix_file(cli.dump, steps.back().a_n, mf.blocks);
        return 0;
    }
    if (cli.mode == "approx-seq") {
        const DiagCommutingResult dc = diag_commuting_check(mf.matrix, mf.blocks);
        if (!dc.is_dc) {
            std::cerr << "input is not diagonally commuting; no approximant sequence\n";
            return 1;
        }
        const std::vector<int> ns = default_outer_schedule(mf.matrix);
        const std::vector<CMatrix> hs =
            strongly_outer_approximants(mf.matrix, mf.blocks, *dc.u, ns, p);
        std::cout << "n p_dist_to_h det\n";
        for (std::size_t i = 0; i < hs.size(); ++i)
            std::cout << ns[i] << " " << fmt(p_norm(hs[i] - mf.matrix, p)) << " "
                      << fmt(fk_det(hs[i]).value) << "\n";
        if (!cli.dump.empty() && !hs.empty())
            write_matrix_file(cli.dump, hs.back(), mf.blocks);
        return 0;
    }
    throw ParseError("--mode", "expected inner-outer|riesz-szego|uniform-seq|approx-seq");
}

int cmd_szego(const Cli& cli) {
    const MatrixFile mf = read_matrix_file(cli.input);
    OptimOptions opts;
    opts.restarts = cli.restarts;
    opts.seed = cli.seed;
    if (cli.tol > 0) opts.stall_tol = cli.tol;
    const InfimumResult res = szego_infimum(mf.matrix, mf.blocks, parse_p(cli.p_token), opts);
    std::cout << fmt(res.value) << "\n";
    std::cerr << "converged: " << (res.converged ? "true" : "false")
              << " iterations: " << res.iterations << " restarts: " << res.restarts_used << "\n";
    if (!cli.dump.empty()) write_matrix_file(cli.dump, res.witness_a, mf.blocks);
    if (!cli.dump_d.empty()) write_matrix_file(cli.dump_d, res.witness_d, mf.blocks);
    return 0;
}

int cmd_delta(const Cli& cli) {
    const MatrixFile mf = read_matrix_file(cli.input);
    Projection e = Projection::identity(mf.blocks.dim());
    if (!cli.proj_file.empty()) {
        const MatrixFile pf = read_matrix_file(cli.proj_file);
        e = Projection(pf.matrix);
    }
    OptimOptions opts;
    opts.restarts = cli.restarts;
    opts.seed = cli.seed;
    const InfimumResult res =
        dist_to_right_ideal(mf.matrix, mf.blocks, e, parse_p(cli.p_token), opts);
    std::cout << fmt(res.value) << "\n";
    if (!res.converged) std::cerr << "warning: optimizer did not reach stationarity\n";
    if (!cli.dump.empty()) write_matrix_file(cli.dump, res.witness_a, mf.blocks);
    return 0;
}

int cmd_outer_test(const Cli& cli) {
    const MatrixFile mf = read_matrix_file(cli.input);
    const OuterVerdict v = is_outer(mf.matrix, mf.blocks, parse_p(cli.p_token));
    nlohmann::json crit;
    for (const auto& [name, check] : v.criteria)
        crit[name] = {{"holds", check.holds}, {"residual", check.residual}};
    const nlohmann::json out{
        {"outer", v.outer}, {"strongly_outer", v.strongly_outer}, {"criteria", crit}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_verify(const Cli& cli) {
    SuiteConfig config;
    config.master_seed = cli.seed;
    config.trials = cli.trials;
    std::tie(config.dim_min, config.dim_max) = parse_dims(cli.dims);
    const VerificationReport report = run_suite(config);
    std::cout << report.to_table();
    if (!cli.report.empty()) {
        std::ofstream out(cli.report);
        if (!out) throw ParseError(cli.report, "cannot open report file for writing");
        out << report.to_json().dump(2) << "\n";
    }
    return report.total_failures() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block upper-triangular matrix algebras: determinants, Szego infima, "
                 "inner-outer factorization, outerness tests and a verification harness"};
    app.require_subcommand(1);

    Cli cli;
    double base_tol = -1.0;
    app.add_option("--tol-base", base_tol, "override the global base tolerance");

    CLI::App* det = app.add_subcommand("det", "geometric-mean determinant of a matrix file");
    det->add_option("file", cli.input)->required();

    CLI::App* factor = app.add_subcommand("factor", "factorizations and constructive sequences");
    factor->add_option("file", cli.input)->required();
    factor->add_option("--mode", cli.mode, "inner-outer|riesz-szego|uniform-seq|approx-seq");
    factor->add_option("--p", cli.p_token);
    factor->add_option("--dump", cli.dump, "write the outer factor / final step");
    factor->add_option("--dump-u", cli.dump_u, "write the unitary factor");

    CLI::App* szego = app.add_subcommand("szego", "determinant infimum over h(a + d)");
    szego->add_option("file", cli.input)->required();
    szego->add_option("--p", cli.p_token);
    szego->add_option("--restarts", cli.restarts);
    szego->add_option("--tol", cli.tol);
    szego->add_option("--seed", cli.seed);
    szego->add_option("--dump", cli.dump, "write the witness a");
    szego->add_option("--dump-d", cli.dump_d, "write the witness d");

    CLI::App* delta = app.add_subcommand("delta", "localized distance to the right ideal f A0");
    delta->add_option("file", cli.input)->required();
    delta->add_option("--e", cli.proj_file, "projection file (default: identity)");
    delta->add_option("--p", cli.p_token);
    delta->add_option("--restarts", cli.restarts);
    delta->add_option("--seed", cli.seed);
    delta->add_option("--dump", cli.dump, "write the witness a0");

    CLI::App* outer = app.add_subcommand("outer-test", "outerness verdict with theorem criteria");
    outer->add_option("file", cli.input)->required();
    outer->add_option("--p", cli.p_token);

    CLI::App* verify = app.add_subcommand("verify", "randomized verification suite");
    verify->add_option("--seed", cli.seed);
    verify->add_option("--trials", cli.trials);
    verify->add_option("--dims", cli.dims, "dimension range, e.g. 2..5");
    verify->add_option("--report", cli.report, "write the JSON report here");

    CLI11_PARSE(app, argc, argv);
    if (base_tol > 0) subdiag::tolerances().base = base_tol;

    try {
        if (*det) return cmd_det(cli);
        if (*factor) return cmd_factor(cli);
        if (*szego) return cmd_szego(cli);
        if (*delta) return cmd_delta(cli);
        if (*outer) return cmd_outer_test(cli);
        if (*verify) return cmd_verify(cli);
    } catch (const subdiag::NotFactorizableError& e) {
        std::cerr << e.what() << "\n";
        const auto& d = e.witness_d();
        std::cerr << "witness d: "
                  << subdiag::matrix_to_json(d, subdiag::BlockStructure::full(
                                                    static_cast<int>(d.rows())))
                         .dump()
                  << "\n";
        return 1;
    } catch (const subdiag::ParseError& e) {
        std::cerr << "parse error at " << e.field() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
