#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subdiag/io.hpp"
#include "test_helpers.hpp"

using namespace subdiag;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("subdiag_test_" + name);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

struct CommandResult {
    int exit_code;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const fs::path out_path = temp_file("cli_out.txt");
    const std::string cmd =
        std::string(CLI_BINARY_PATH) + " " + args + " > " + out_path.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return CommandResult{WEXITSTATUS(raw), ss.str()};
}

}  // namespace

TEST_CASE("matrix json parsing") {
    const std::string good = R"({"n":2,"blocks":[1,1],"matrix":{"re":[[1,5],[0,2]]}})";
    const MatrixFile mf = matrix_from_json(nlohmann::json::parse(good));
    CHECK(mf.blocks.dim() == 2);
    CHECK(mf.matrix(0, 1).real() == 5.0);
    CHECK(mf.matrix(0, 1).imag() == 0.0);  // im defaults to zero

    // blocks default to all-ones
    const MatrixFile mf2 =
        matrix_from_json(nlohmann::json::parse(R"({"n":2,"matrix":{"re":[[1,0],[0,1]]}})"));
    CHECK(mf2.blocks.block_count() == 2);

    auto expect_field = [](const std::string& text, const std::string& field) {
        try {
            matrix_from_json(nlohmann::json::parse(text));
            FAIL_CHECK("expected ParseError for " << field);
        } catch (const ParseError& e) {
            CHECK(e.field() == field);
        }
    };
    expect_field(R"({"matrix":{"re":[[1]]}})", "n");
    expect_field(R"({"n":2,"blocks":[1,2],"matrix":{"re":[[1,0],[0,1]]}})", "blocks");
    expect_field(R"({"n":2,"matrix":{"re":[[1,0]]}})", "matrix.re");
    expect_field(R"({"n":2,"matrix":{"re":[[1,0],[0,"x"]]}})", "matrix.re[1][1]");
}

TEST_CASE("matrix file round trip is exact") {
    std::mt19937_64 rng(101);
    const BlockStructure bs({2, 1});
    const CMatrix m = random_element(bs, RandomKind::M, rng);
    const fs::path p = temp_file("roundtrip.json");
    write_matrix_file(p.string(), m, bs);
    const MatrixFile back = read_matrix_file(p.string());
    CHECK(back.blocks.sizes() == bs.sizes());
    CHECK((back.matrix - m).cwiseAbs().maxCoeff() == 0.0);  // bit-exact doubles
}

TEST_CASE("cli det prints 12 significant digits") {
    const fs::path p = temp_file("det_in.json");
    write_text(p, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[1,5],[0,2]]}})");
    const CommandResult r = run_cli("det " + p.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output == "1.41421356237\n");
}

TEST_CASE("cli outer-test emits the verdict as json") {
    const fs::path p = temp_file("outer_in.json");
    write_text(p, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[0,1],[0,1]]}})");
    const CommandResult r = run_cli("outer-test " + p.string());
    CHECK(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(j["outer"].get<bool>() == false);
    CHECK(j["criteria"]["phi_outer"]["holds"].get<bool>() == false);
}

TEST_CASE("cli factor succeeds and dumps a reparsable matrix") {
    const fs::path p = temp_file("factor_in.json");
    write_text(p, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[2,1],[1,2]]}})");
    const fs::path dump = temp_file("factor_h.json");
    const CommandResult r =
        run_cli("factor " + p.string() + " --mode inner-outer --dump " + dump.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("h_outer: true") != std::string::npos);
    const MatrixFile h = read_matrix_file(dump.string());
    CHECK(h.matrix(0, 0).real() == doctest::Approx(std::sqrt(5.0)));

    // singular input exits 1 (not factorizable)
    const fs::path s = temp_file("factor_sing.json");
    write_text(s, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[1,0],[0,0]]}})");
    CHECK(run_cli("factor " + s.string() + " --mode inner-outer").exit_code == 1);
}

TEST_CASE("cli szego and delta agree with closed forms") {
    const fs::path p = temp_file("szego_in.json");
    write_text(p, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[1,5],[0,2]]}})");
    const CommandResult r = run_cli("szego " + p.string() + " --p 2 --restarts 4");
    CHECK(r.exit_code == 0);
    CHECK(std::abs(std::stod(r.output) - std::sqrt(2.0)) < 1e-6);

    const CommandResult d = run_cli("delta " + p.string() + " --p 2");
    CHECK(d.exit_code == 0);
    CHECK(std::abs(std::stod(d.output) - std::sqrt(2.5)) < 1e-9);
}

TEST_CASE("cli accepts the inf token for p") {
    const fs::path p = temp_file("pinf_in.json");
    write_text(p, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[1,5],[0,2]]}})");
    const CommandResult r = run_cli("delta " + p.string() + " --p inf --restarts 4");
    CHECK(r.exit_code == 0);
    // delta^1 at p = inf equals ||Phi(f)||_inf = 2 for this instance
    CHECK(std::abs(std::stod(r.output) - 2.0) < 1e-6);
}

TEST_CASE("cli error paths use exit code 2") {
    {
        const fs::path p = temp_file("badmode_in.json");
        write_text(p, R"({"n":2,"blocks":[1,1],"matrix":{"re":[[2,1],[1,2]]}})");
        CHECK(run_cli("factor " + p.string() + " --mode bogus").exit_code == 2);
    }
    CHECK(run_cli("det /nonexistent/path.json").exit_code == 2);

    const fs::path bad = temp_file("bad.json");
    write_text(bad, R"({"n":2,"matrix":{"re":[[1,0]]}})");
    const CommandResult r = run_cli("det " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("matrix.re") != std::string::npos);  // offending field named

    write_text(bad, "not json at all");
    CHECK(run_cli("det " + bad.string()).exit_code == 2);
}

TEST_CASE("cli verify smoke run") {
    const fs::path report = temp_file("report.json");
    const CommandResult r =
        run_cli("verify --seed 42 --trials 2 --dims 2..3 --report " + report.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("total failures: 0") != std::string::npos);
    std::ifstream in(report);
    nlohmann::json j;
    in >> j;
    CHECK(j["total_failures"].get<long>() == 0);
    CHECK(j["master_seed"].get<std::uint64_t>() == 42);
}
