#include <CLI11.hpp>

#include "carnot/cli.hpp"
#include "carnot/version.hpp"

using carnot::CliOptions;

namespace {

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--spec", opt.spec_path, "spec file (JSON)");
    cmd->add_option("--group", opt.group, "group descriptor: heisenberg:n, abelian:n, free:m,r");
    cmd->add_option("--seed", opt.seed, "random seed for sampled verdicts");
    cmd->add_option("--out", opt.out, "write the report to this path instead of stdout");
    cmd->add_option("--format", opt.format, "report format: text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(carnot::kToolName) +
                 " - certificates and numerics for homogeneous left-invariant operators on "
                 "stratified groups"};
    app.set_version_flag("--version", std::string(carnot::kToolName) + " " + carnot::kToolVersion);
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App* check = app.add_subcommand("check", "run a cocanceling/canceling/compose-zero check");
    check->add_option("task", opt.task, "cocanceling | canceling | compose-zero")->required();
    add_common_flags(check, opt);

    CLI::App* verify = app.add_subcommand("verify-example", "verify a closed-form annihilator construction");
    verify->add_option("example", opt.example, "gradient | powers:K | korn")->required();
    verify->add_flag("--check-reduction", opt.check_reduction,
                     "also verify the Korn reduction identities with k = 2r");
    add_common_flags(verify, opt);

    CLI::App* find = app.add_subcommand("find-annihilator", "degree-bounded annihilator search");
    find->add_option("--degree", opt.degree, "order of the annihilator to search for")->required();
    find->add_option("--dimf", opt.dim_f, "target dimension of the annihilator (default 1)");
    add_common_flags(find, opt);

    CLI::App* sobolev = app.add_subcommand("sobolev", "numeric Sobolev-quotient refinement study");
    CLI::App* hardy = app.add_subcommand("hardy", "numeric Hardy-quotient refinement study");
    for (CLI::App* cmd : {sobolev, hardy}) {
        cmd->add_option("--example", opt.example, "gradient | powers:K | korn");
        cmd->add_option("--bump", opt.bump, "bump smoothness power p in (1-|x|^2)^p");
        cmd->add_option("--grid", opt.grid, "refinement levels, e.g. --grid 16,32,64")->delimiter(',');
        cmd->add_option("--box", opt.box, "half-width of the quadrature box (rational)");
        add_common_flags(cmd, opt);
    }
    hardy->add_option("--ell", opt.ell, "weight exponent: 1 <= ell <= min(k, Q-1)");
    hardy->add_option("--p", opt.p, "integrability exponent: 1 <= p < Q/(Q-ell)");

    CLI::App* info = app.add_subcommand("group-info", "print the algebra, basis and structure constants");
    add_common_flags(info, opt);

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return carnot::cmd_check(opt);
    if (verify->parsed()) return carnot::cmd_verify_example(opt);
    if (find->parsed()) return carnot::cmd_find_annihilator(opt);
    if (sobolev->parsed()) return carnot::cmd_numeric(opt, false);
    if (hardy->parsed()) return carnot::cmd_numeric(opt, true);
    if (info->parsed()) return carnot::cmd_group_info(opt);
    return carnot::exit_code::input_error;
}
