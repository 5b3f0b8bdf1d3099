#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef CASCADE_LAB_BIN
#error "CASCADE_LAB_BIN must point at the command-line binary"
#endif

namespace {

struct Result {
    int code = -1;
    std::string out;
};

// Runs the binary with `args` (shell syntax); stderr is discarded unless merged.
Result run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string("\"") + CASCADE_LAB_BIN + "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Result res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

const std::string kFig5 = R"('{"n":4,"alpha":1.2,"beta":0.713524269,"leak":1}')";
const std::string kPeak = R"('{"kind":"peak","r0":5,"lambda":2}')";

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("gain") {
    const auto r = run("gain -c " + kFig5);
    CHECK(r.code == 0);
    CHECK(r.out == "K=8.000, amplifies=true\n");

    const auto leak0 = run(R"(gain -c '{"n":2,"alpha":1,"beta":1,"leak":0}')", true);
    CHECK(leak0.code == 3);
    CHECK(leak0.out.find("truncated gain") != std::string::npos);

    const auto unstable = run(R"(gain -c '{"n":2,"alpha":[1,2],"beta":1,"leak":1,"feedback":0.6}')");
    CHECK(unstable.code == 3);

    const auto sweep = run("gain --sweep 50 --omega-max 100 -c " + kFig5);
    const auto ls = lines(sweep.out);
    REQUIRE(ls.size() == 52);
    CHECK(ls[1] == "omega,magnitude");
    CHECK(ls[2].rfind("0,8", 0) == 0);
}

TEST_CASE("config errors exit with 2") {
    CHECK(run(R"(gain -c '{"n":2,"alpha":[1,-1],"beta":1,"leak":1}')").code == 2);
    CHECK(run(R"(gain -c '{"n":2,')").code == 2);
    CHECK(run("gain -c /nonexistent/config.json").code == 2);
    CHECK(run("gain").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("metrics --norm fancy -i " + kPeak + " -c " + kFig5).code == 2);
}

TEST_CASE("metrics") {
    const auto paper = run("metrics --norm paper -i " + kPeak + " -c " + kFig5);
    REQUIRE(paper.code == 0);
    const auto j = nlohmann::json::parse(paper.out);
    CHECK(std::abs(j["amplitude"].get<double>() - 0.409) < 1e-3);
    CHECK(std::abs(j["sigma"].get<double>() - 3.059) < 1e-3);
    CHECK(std::abs(j["K"].get<double>() - 8.0) < 1e-6);
    CHECK(j.contains("tau"));
    CHECK(j.contains("sigma0"));

    const auto exact = nlohmann::json::parse(run("metrics --norm exact -i " + kPeak + " -c " + kFig5).out);
    CHECK(std::abs(exact["amplitude"].get<double>() - 2.312) < 1e-3);

    const auto step = nlohmann::json::parse(run("metrics --step 2 -i " + kPeak + " -c " + kFig5).out);
    CHECK(step["step"] == 2);
    CHECK(step["tau"].get<double>() == doctest::Approx(2 / 0.713524269 + 1));

    const auto table = run("metrics --table -i " + kPeak + " -c " + kFig5);
    CHECK(lines(table.out).size() == 5);

    const std::string imp = R"('{"kind":"impulse"}')";
    CHECK(run("metrics -i " + imp + " -c " + kFig5).code == 3);
    CHECK(run("metrics --skip-amplitude -i " + imp + " -c " + kFig5).code == 0);
}

TEST_CASE("numbers carry nine significant digits") {
    const auto j = nlohmann::json::parse(run("metrics -i " + kPeak + " -c " + kFig5).out);
    CHECK(j["sigma"].dump() == "3.05887921");
}

TEST_CASE("design") {
    const auto r = run("design --alpha 1.2 --gain 8 --leak 1");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["n_star"] == 4);
    CHECK(std::abs(j["beta_star"].get<double>() - 0.7135) < 5e-4);
    CHECK(j.contains("sigma0_star"));
    CHECK(j.contains("M"));

    const auto table = run("design --alpha 1.2 --gain-range 2:20 --leak 1 --table");
    REQUIRE(table.code == 0);
    const auto ls = lines(table.out);
    REQUIRE(ls.size() == 20);
    int prev = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        std::stringstream ss(ls[i]);
        std::string k, m, n;
        std::getline(ss, k, ',');
        std::getline(ss, m, ',');
        std::getline(ss, n, ',');
        CHECK(std::stoi(n) >= prev);
        prev = std::stoi(n);
    }

    const auto fb = nlohmann::json::parse(run("design --feedback 0.1 --alphas 1.2,1.2,1.2,1.2 --gain 8 --leak 1").out);
    CHECK(fb["n_star"].get<int>() <= 4);
    CHECK(fb["mode"] == "fixed_product");

    CHECK(run("design --gain 8").code == 2);
    CHECK(run("design --alpha 1.2").code == 2);
    CHECK(run("design --feedback 0.1 --gain 8").code == 2);
}

TEST_CASE("simulate") {
    const auto r = run("simulate --t-end 10 -i " + kPeak + " -c " + kFig5);
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    CHECK(ls[0] == "t,R,X1,X2,X3,X4,X5");
    CHECK(ls[1] == "0,0,0,0,0,0,0");

    const auto checked = run("simulate --check -i " + kPeak + " -c " + kFig5);
    REQUIRE(checked.code == 0);
    const auto cl = lines(checked.out);
    REQUIRE(cl.back().rfind("# ", 0) == 0);
    const auto footer = nlohmann::json::parse(cl.back().substr(2));
    CHECK(footer["tau_rel_err"].get<double>() < 5e-3);
    CHECK(footer["sigma_rel_err"].get<double>() < 5e-3);
    CHECK(footer["norm2_rel_err"].get<double>() < 1e-2);

    const std::string two = R"('{"n":2,"alpha":1,"beta":1,"leak":1}')";
    const auto nl = run("simulate --nonlinear --xtot 100,100 --t-end 5 -i " + kPeak + " -c " + two);
    CHECK(nl.code == 0);
    const auto dl = run("simulate --delays 0.5,0.5,0 --check -i " + kPeak + " -c " + two);
    CHECK(dl.code == 0);
    const auto dfoot = nlohmann::json::parse(lines(dl.out).back().substr(2));
    CHECK(dfoot["tau_hat"].get<double>() - dfoot["tau"].get<double>() == doctest::Approx(1.0).epsilon(0.01));

    CHECK(run("simulate --dt 1 -i " + kPeak + " -c " + kFig5).code == 4);
    CHECK(run("simulate --check --t-end 3 -i " + kPeak + " -c " + kFig5).code == 4);
    CHECK(run("simulate --nonlinear -i " + kPeak + " -c " + kFig5).code == 2);
}

TEST_CASE("simulate honours the precision variable and --out") {
    const auto path = std::filesystem::temp_directory_path() / "cascade_lab_cli_test.csv";
    const auto r = run("simulate --t-end 1 -o " + path.string() + " -i " + kPeak + " -c " + kFig5);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,R,X1,X2,X3,X4,X5");
    std::filesystem::remove(path);

    const auto coarse = run("simulate --t-end 1 -i " + kPeak + " -c " + kFig5);
    setenv("CASCADE_LAB_PRECISION", "0.01", 1);
    const auto env = run("simulate --t-end 1 -i " + kPeak + " -c " + kFig5);
    unsetenv("CASCADE_LAB_PRECISION");
    CHECK(lines(env.out).size() == 102);
    CHECK(lines(coarse.out).size() == 52);
}

TEST_CASE("stability") {
    const auto plain = nlohmann::json::parse(run("stability -c " + kFig5).out);
    CHECK(plain["stable"] == true);
    CHECK(plain["eigenvalues"].size() == 5);
    CHECK_FALSE(plain.contains("eps_max"));

    const auto toy =
        nlohmann::json::parse(run(R"(stability -c '{"n":2,"alpha":[1,2],"beta":1,"leak":1,"feedback":0.6}')").out);
    CHECK(toy["stable"] == false);
    CHECK(std::abs(toy["max_real_part"].get<double>() - 0.0954) < 1e-4);
    CHECK(toy["eps_max"].get<double>() == doctest::Approx(0.5));

    const auto down = nlohmann::json::parse(
        run("stability -c " + kFig5 + R"( -p '{"entries":[{"row":3,"col":1,"value":0.4}]}')").out);
    CHECK(down["stable"] == true);
    CHECK(run("stability -c " + kFig5 + R"( -p '{"entries":[{"row":2,"col":2,"value":0.4}]}')").code == 2);
}

TEST_CASE("sweep is deterministic and ordered") {
    const std::string args = "sweep --param beta-scale --from 0.8 --to 1.6 --count 9 -i " + kPeak + " -c " + kFig5;
    const auto a = run(args + " --threads 4");
    const auto b = run(args + " --threads 1");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto ls = lines(a.out);
    REQUIRE(ls.size() == 10);
    CHECK(ls[0] == "beta-scale,K,tau,sigma,amplitude,stable,status");
    CHECK(ls[1].rfind("0.8,", 0) == 0);
    CHECK(ls[9].rfind("1.6,", 0) == 0);

    const auto fb = lines(run("sweep --param feedback --from 0 --to 0.3 --count 4 -i " + kPeak + " -c " + kFig5).out);
    CHECK(fb[1].find("OK") != std::string::npos);
    CHECK(fb[4].find("UnstableFeedback") != std::string::npos);
    CHECK(run("sweep --param colour -i " + kPeak + " -c " + kFig5).code == 2);
}
