#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "carnot/cli.hpp"

using namespace carnot;

namespace {

std::string specs_dir() { return CARNOT_SPECS_DIR; }

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

CliOptions base_options() {
    CliOptions opt;
    opt.format = "json";
    return opt;
}

} // namespace

TEST_CASE("group descriptor strings") {
    CHECK(parse_group_string("heisenberg:1")->Q == 4);
    CHECK(parse_group_string("abelian:3")->Q == 3);
    CHECK(parse_group_string("free:2,3")->Q == 10);
    CHECK_THROWS_AS(parse_group_string("free:2"), SpecError);
    CHECK_THROWS_AS(parse_group_string("torus:1"), SpecError);
    CHECK_THROWS_AS(parse_group_string("heisenberg:x"), SpecError);
}

TEST_CASE("spec document parsing and operator round-trip") {
    Json doc = Json::parse(read_file(specs_dir() + "/gradient_h1.json"));
    SpecDocument spec = parse_spec_document(doc);
    REQUIRE(spec.op.has_value());
    CHECK(spec.op->order == 1);
    CHECK(spec.op->dim_in == 1);
    CHECK(spec.op->dim_out == 2);

    Json back = operator_to_json(*spec.op);
    OperatorMatrix again = parse_operator_json(back, spec.alg);
    CHECK(again.terms == spec.op->terms);
}

TEST_CASE("spec validation errors carry diagnostics") {
    CHECK_THROWS_WITH_AS(parse_spec_document(Json{{"operator", 1}}),
                         doctest::Contains("group"), SpecError);
    Json doc = Json::parse(read_file(specs_dir() + "/bad_letter.json"));
    CHECK_THROWS_WITH_AS(parse_spec_document(doc), doctest::Contains("letter 3"), SpecError);
    // rationals must parse and have nonzero denominator
    Json bad = Json::parse(R"({"group":{"preset":"abelian","n":1},
        "operator":{"order":0,"dimV":1,"dimE":1,"terms":[{"word":[],"matrix":[["1/0"]]}]}})");
    CHECK_THROWS_AS(parse_spec_document(bad), SpecError);
}

TEST_CASE("cmd_check exit codes") {
    CliOptions opt = base_options();
    opt.out = "cli_check_out.json";

    opt.spec_path = specs_dir() + "/curl_r2.json";
    opt.task = "cocanceling";
    CHECK(cmd_check(opt) == exit_code::ok);

    opt.spec_path = specs_dir() + "/laplacian_r2.json";
    opt.task = "canceling";
    CHECK(cmd_check(opt) == exit_code::verdict_false);
    Json rep = Json::parse(read_file(opt.out));
    CHECK(rep["verdicts"]["canceling"]["certified"] == false);
    CHECK(rep["verdicts"]["canceling"].contains("candidate_subspace"));

    opt.spec_path = specs_dir() + "/divergence_r2.json";
    opt.task = "canceling";
    CHECK(cmd_check(opt) == exit_code::verdict_false); // divergence is not canceling on R^2

    opt.spec_path = specs_dir() + "/gradient_curl_h1.json";
    opt.task = "compose-zero";
    CHECK(cmd_check(opt) == exit_code::verdict_false); // curl o grad = T on H1
    rep = Json::parse(read_file(opt.out));
    CHECK(rep["verdicts"]["first_nonzero_entry"] == "(1) T");

    opt.spec_path = specs_dir() + "/gradient_curl_r2.json";
    CHECK(cmd_check(opt) == exit_code::ok); // abelian: curl o grad = 0

    opt.spec_path = specs_dir() + "/x1_only_r2.json";
    opt.task = "cocanceling";
    CHECK(cmd_check(opt) == exit_code::verdict_false); // f2 is never touched
    rep = Json::parse(read_file(opt.out));
    CHECK(rep["verdicts"]["cocanceling"].contains("common_kernel_basis"));

    opt.spec_path = specs_dir() + "/bad_letter.json";
    opt.task = "cocanceling";
    CHECK(cmd_check(opt) == exit_code::input_error);

    // canceling demands an abelian group
    opt.spec_path = specs_dir() + "/gradient_h1.json";
    opt.task = "canceling";
    CHECK(cmd_check(opt) == exit_code::input_error);

    opt.task = "nonsense";
    opt.spec_path = specs_dir() + "/curl_r2.json";
    CHECK(cmd_check(opt) == exit_code::input_error);
}

TEST_CASE("custom groups load from spec files and are validated") {
    CliOptions opt = base_options();
    opt.out = "cli_custom_out.json";
    opt.spec_path = specs_dir() + "/custom_h1.json";
    opt.task = "cocanceling";
    CHECK(cmd_check(opt) == exit_code::ok); // gradient symbol is cocanceling

    Json doc = Json::parse(read_file(specs_dir() + "/custom_h1.json"));
    SpecDocument spec = parse_spec_document(doc);
    CHECK(spec.alg->Q == 4);
    CHECK(bracket(*spec.alg, basis_vector(*spec.alg, 0), basis_vector(*spec.alg, 1)) ==
          basis_vector(*spec.alg, 2));

    // a structurally invalid custom algebra is rejected with exit 2
    opt.spec_path = specs_dir() + "/custom_bad_jacobi.json";
    CHECK(cmd_check(opt) == exit_code::input_error);
}

TEST_CASE("cmd_verify_example runs the closed-form pipeline") {
    CliOptions opt = base_options();
    opt.out = "cli_verify_out.json";
    opt.group = "heisenberg:1";
    opt.example = "gradient";
    opt.check_reduction = true;
    CHECK(cmd_verify_example(opt) == exit_code::ok);
    Json rep = Json::parse(read_file(opt.out));
    CHECK(rep["verdicts"]["residual_zero"] == true);
    CHECK(rep["verdicts"]["sym_N_zero"] == true);
    CHECK(rep["korn_reduction"]["all_ok"] == true);
    CHECK(rep["orders"]["L"] == 3);
    CHECK(rep["group"]["basis_convention"].is_string());
}

TEST_CASE("cmd_find_annihilator exit codes and reproducibility") {
    CliOptions opt = base_options();
    opt.spec_path = specs_dir() + "/gradient_h1.json";
    opt.degree = 1;
    opt.out = "cli_find_1.json";
    CHECK(cmd_find_annihilator(opt) == exit_code::not_found);
    Json rep1 = Json::parse(read_file(opt.out));
    CHECK(rep1["solution_space_dim"] == 0);

    opt.degree = 3;
    opt.seed = 12;
    opt.out = "cli_find_3a.json";
    CHECK(cmd_find_annihilator(opt) == exit_code::ok);
    opt.out = "cli_find_3b.json";
    CHECK(cmd_find_annihilator(opt) == exit_code::ok);
    CHECK(read_file("cli_find_3a.json") == read_file("cli_find_3b.json")); // byte-identical
    Json rep3 = Json::parse(read_file("cli_find_3b.json"));
    CHECK(rep3["certificate"]["valid"] == true);
    CHECK(rep3["certificate"]["cocanceling"]["cocanceling"] == true);
}

TEST_CASE("cmd_numeric studies and parameter rejection") {
    CliOptions opt = base_options();
    opt.group = "heisenberg:1";
    opt.example = "gradient";
    opt.grid = {8, 16};
    opt.out = "cli_sobolev.json";
    CHECK(cmd_numeric(opt, false) == exit_code::ok);
    Json rep = Json::parse(read_file(opt.out));
    CHECK(rep["refinement"].size() == 2);

    opt.format = "csv";
    opt.out = "cli_sobolev.csv";
    CHECK(cmd_numeric(opt, false) == exit_code::ok);
    std::string csv = read_file(opt.out);
    CHECK(csv.rfind("n,lhs,rhs,ratio", 0) == 0);

    // machine reports are byte-identical across worker counts
    opt.format = "json";
    setenv("CARNOT_THREADS", "1", 1);
    opt.out = "cli_threads_1.json";
    CHECK(cmd_numeric(opt, false) == exit_code::ok);
    setenv("CARNOT_THREADS", "3", 1);
    opt.out = "cli_threads_3.json";
    CHECK(cmd_numeric(opt, false) == exit_code::ok);
    unsetenv("CARNOT_THREADS");
    CHECK(read_file("cli_threads_1.json") == read_file("cli_threads_3.json"));

    // p at the boundary Q/(Q-ell) = 4/3 is rejected
    opt.format = "json";
    opt.out = "cli_hardy.json";
    opt.ell = 1;
    opt.p = 1.34;
    CHECK(cmd_numeric(opt, true) == exit_code::input_error);
    opt.p = 1.0;
    opt.grid = {16, 32}; // the singular weight needs more resolution than the sobolev case
    CHECK(cmd_numeric(opt, true) == exit_code::ok);
}

TEST_CASE("cmd_group_info prints the basis convention") {
    CliOptions opt;
    opt.format = "text";
    opt.group = "free:2,3";
    opt.out = "cli_ginfo.txt";
    CHECK(cmd_group_info(opt) == exit_code::ok);
    std::string text = read_file(opt.out);
    CHECK(text.find("Hall basis") != std::string::npos);
    CHECK(text.find("[[X2,X1],X1]") != std::string::npos);
}

#ifdef CARNOT_BIN
TEST_CASE("carnot binary end to end") {
    auto run = [](const std::string& args) {
        std::string cmd = std::string(CARNOT_BIN) + " " + args + " > cli_bin_out.txt 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("--version") == 0);
    CHECK(run("group-info --group heisenberg:1") == 0);
    CHECK(run("verify-example gradient --group heisenberg:1") == 0);
    CHECK(run(std::string("check cocanceling --spec ") + specs_dir() + "/curl_r2.json") == 0);
    CHECK(run(std::string("check canceling --spec ") + specs_dir() + "/laplacian_r2.json") == 3);
    CHECK(run(std::string("find-annihilator --degree 1 --spec ") + specs_dir() + "/gradient_h1.json") == 4);
    CHECK(run("sobolev --group heisenberg:1 --example gradient --bump 4 --grid 8,16") == 0);
    CHECK(run("hardy --group heisenberg:1 --example gradient --ell 1 --p 1.34 --grid 8,16") == 2);
}
#endif
