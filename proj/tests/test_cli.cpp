#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(GMFKIT_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("gmfkit_cli_" + name);
    std::ofstream(path) << content;
    return path.string();
}

}  // namespace

TEST_CASE("classify-jet reports the class of each example jet") {
    const auto nf = write_temp("nf3.json", R"({"dim":3,"constant":0,"linear":[0,0,0],
        "quadratic":[0,0,0, 0,-1,0, 0,0,1],"cubic":[{"idx":[1,1,1],"coeff":1}]})");
    auto r = run("classify-jet --input " + nf);
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["class"] == "BirthDeath");
    CHECK(j["index"] == 1);

    const auto zero = write_temp("zero1.json", R"({"dim":1,"constant":0,"linear":[0],"quadratic":[0],"cubic":[]})");
    r = run("classify-jet --input " + zero);
    CHECK(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["class"] == "Degenerate");
    CHECK(j["reason"] == "KernelCubicVanishes");

    const auto reg = write_temp("reg2.json", R"({"dim":2,"constant":0,"linear":[1,0],"quadratic":[0,0,0,0]})");
    r = run("classify-jet --input " + reg);
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["class"] == "Regular");
}

TEST_CASE("classify-jet exit codes for bad input") {
    CHECK(run("classify-jet --input " + write_temp("bad.json", "{not json")).code == 2);
    CHECK(run("classify-jet --input " + write_temp("nokey.json", R"({"dim":1})")).code == 2);
    CHECK(run("classify-jet --input /nonexistent/jet.json").code == 2);
    const auto dim = write_temp("dim.json", R"({"dim":2,"linear":[0,0,0],"quadratic":[0,0,0,0]})");
    CHECK(run("classify-jet --input " + dim).code == 3);
}

TEST_CASE("trace-family on the presets") {
    auto r = run("trace-family --preset cusp --t0 -1 --t1 1");
    CHECK(r.code == 0);
    CHECK(r.out.find("t_star,x_star_1,index,det_hessian\n0,0,0,0\n") == 0);
    CHECK(r.out.find("# summary events=1 degenerate=0") != std::string::npos);

    r = run("trace-family --preset swallowtail");
    CHECK(r.code == 1);
    CHECK(r.out.find("reason=KernelCubicVanishes") != std::string::npos);

    r = run("trace-family --preset suspended-cusp-1");
    CHECK(r.code == 0);
    CHECK(r.out.find("\n0,0,0,0,1,0\n") != std::string::npos);

    CHECK(run("trace-family --preset nope").code == 2);
    CHECK(run("trace-family --family " + write_temp("fam.json", R"({"param_dim":1})")).code == 2);
}

TEST_CASE("trace-family writes the CSV to --out") {
    const auto out = (std::filesystem::temp_directory_path() / "gmfkit_cli_events.csv").string();
    std::filesystem::remove(out);
    const auto fam = write_temp("cusp.json", R"({"param_dim":1,"fiber_dim":1,
        "terms":[{"powers":[0,3],"coeff":1},{"powers":[1,1],"coeff":-1}]})");
    const auto r = run("trace-family --family " + fam + " --steps 10 --out " + out);
    CHECK(r.code == 0);
    std::ifstream in(out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "t_star,x_star_1,index,det_hessian");
    CHECK(row == "0,0,0,0");
}

TEST_CASE("series queries") {
    auto r = run("series --object bo --d 2 --max-degree 4");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["coefficients"] == nlohmann::json::array({1, 1, 2, 2, 3}));
    CHECK(j["provenance"] == "exact");

    j = nlohmann::json::parse(run("series --object mt --d 1 --max-degree 6").out);
    CHECK(j["min_degree"] == -1);
    CHECK(j["coefficients"] == nlohmann::json::array({1, 1, 1, 1, 1, 1, 1, 1}));

    j = nlohmann::json::parse(run("series --object sigma-gmf --d 1 --max-degree 6").out);
    CHECK(j["coefficients"] == nlohmann::json::array({1, 1, 1, 1, 1, 1, 1}));

    j = nlohmann::json::parse(run("series --object mtgmf --d 2 --max-degree 6").out);
    CHECK(j["provenance"] == "split-assumption");
    CHECK(j.contains("lower"));

    j = nlohmann::json::parse(run("series --object grassmann --d 2 --n 2 --max-degree 6").out);
    CHECK(j["coefficients"] == nlohmann::json::array({1, 1, 2, 1, 1, 0, 0}));

    CHECK(run("series --object klein").code == 2);
}

TEST_CASE("GMFKIT_MAX_DEGREE sets the default truncation") {
    const auto j = nlohmann::json::parse(run("series --object bo --d 1", "GMFKIT_MAX_DEGREE=5").out);
    CHECK(j["max_degree"] == 5);
    const auto k = nlohmann::json::parse(run("series --object bo --d 1").out);
    CHECK(k["max_degree"] == 32);
}

TEST_CASE("verify reports verdicts and exit codes") {
    auto r = run("verify --check gysin --d 3");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["records"][0]["verdict"] == "pass");
    CHECK(j["records"][0]["N"] == 32);

    r = run("verify --check hocolim-cofiber --d 2 --max-degree 20");
    CHECK(r.code == 0);

    r = run("verify --check d1-oracle --d 1");
    CHECK(r.code == 0);

    r = run("verify --check all --d 2 --max-degree 10");
    CHECK(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["records"].size() == 6);
    CHECK(j["records"][5]["verdict"] == "interval");

    r = run("verify --check gysin --d 1 --structure so");
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.out)["records"][0]["first_mismatch_degree"] == 1);

    CHECK(run("verify --check nonsense").code == 2);
}

TEST_CASE("repeated runs are identical apart from wall time") {
    auto strip = [](std::string s) {
        auto j = nlohmann::json::parse(s);
        for (auto& rec : j["records"]) rec.erase("wall_time_ms");
        return j.dump();
    };
    const auto a = run("verify --check all --d 2 --max-degree 8").out;
    const auto b = run("verify --check all --d 2 --max-degree 8").out;
    CHECK(strip(a) == strip(b));
}
