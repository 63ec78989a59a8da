#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string(ZM_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path dir() {
    static fs::path d = [] {
        auto p = fs::temp_directory_path() / ("zm_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

}  // namespace

TEST_CASE("zeros: certified cache, idempotent") {
    auto cache = dir() / "z100.txt";
    auto r = cli("zeros --T 100 --cache " + cache.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("29 zeros") != std::string::npos);
    auto first = slurp(cache);
    CHECK(first.rfind("# zeros T=100 ", 0) == 0);
    CHECK(first.find("certified=true") != std::string::npos);
    CHECK(cli("zeros --T 100 --cache " + cache.string()).code == 0);
    CHECK(slurp(cache) == first);
    CHECK(cli("zeros --T 80 --cache " + cache.string()).code == 0);
    CHECK(slurp(cache) == first);
}

TEST_CASE("zeros: corrupt cache names the line") {
    auto cache = dir() / "bad.txt";
    std::ofstream(cache) << "# zeros T=50 abs_error=1e-12 certified=true\n14.134725141735\nabc\n";
    auto r = cli("zeros --T 100 --cache " + cache.string());
    CHECK(r.code == 2);
    CHECK(r.out.find(cache.string() + ":3:") != std::string::npos);
}

TEST_CASE("verify-identities") {
    auto r = cli("verify-identities --scope arith --bound 2000");
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS sum mu(d) = [n=1]") != std::string::npos);
    auto c = cli("verify-identities --scope characters --bound 20");
    CHECK(c.code == 0);
    CHECK(c.out.find("tau(chi)") != std::string::npos);
    CHECK(cli("verify-identities --bound 0").code == 0);
    CHECK(cli("verify-identities --scope bogus").code != 0);
}

TEST_CASE("calibrate writes a deterministic constants file; consumers need it") {
    auto a = dir() / "ka.txt", b = dir() / "kb.txt";
    CHECK(cli("calibrate --mode laurent --out " + a.string()).code == 0);
    CHECK(cli("calibrate --mode laurent --out " + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find("p2=2,-2,1") != std::string::npos);

    auto missing = dir() / "none.txt";
    auto r = cli("m0-check --constants " + missing.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("zmoments calibrate") != std::string::npos);
    CHECK(cli("shu-check --constants " + missing.string()).code == 2);
    CHECK(cli("compare --constants " + missing.string()).code == 2);

    auto m0 = cli("m0-check --M 8 --sweep 500,1000,2000,4000 --constants " + a.string());
    CHECK(m0.code == 0);
    CHECK(m0.out.find("PASS") != std::string::npos);
    auto shu = cli("shu-check --h 2 --k 3 --sweep 10000,100000 --constants " + a.string());
    CHECK(shu.code == 0);
    // the literal bracket is report-only here; it must run
    CHECK(cli("shu-check --bracket literal --sweep 10000,100000 --constants " + a.string()).out.find("rel_error") !=
          std::string::npos);
}

TEST_CASE("compare writes reports with the resolved config") {
    auto k = dir() / "kc.txt", cache = dir() / "z520.txt", stem = dir() / "rep";
    REQUIRE(cli("calibrate --mode laurent --out " + k.string()).code == 0);
    auto r = cli("compare --sweep 300,500 --cache " + cache.string() + " --constants " + k.string() + " --out " +
                 stem.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(cache));
    auto json = slurp(stem.string() + ".json");
    CHECK(json.find("\"config.sweep\": \"300,500\"") != std::string::npos);
    CHECK(json.find("\"first_sum_coefficients\": \"x_u y_nu\"") != std::string::npos);
    CHECK(slurp(stem.string() + ".txt").find("rel_error") != std::string::npos);
    // a cache that stops short is rejected with the command to extend it
    auto short_cache = dir() / "z100b.txt";
    REQUIRE(cli("zeros --T 100 --cache " + short_cache.string()).code == 0);
    auto s = cli("compare --sweep 500 --cache " + short_cache.string() + " --constants " + k.string());
    CHECK(s.code == 2);
    CHECK(s.out.find("zmoments zeros --T 510") != std::string::npos);
}

TEST_CASE("gonek-check") {
    auto r = cli("gonek-check --r 1.5 --T 200 --kappa 1.1");
    CHECK(r.code == 0);
    CHECK(r.out.find("within") != std::string::npos);
    CHECK(cli("gonek-check --r 31.5 --T 200").code == 2);  // within 5% of T/2pi
    CHECK(cli("gonek-check --r 1").code == 2);
}

TEST_CASE("flags are long-form only") {
    CHECK(cli("zeros -T 100").code != 0);
    CHECK(cli("--help").code == 0);
    CHECK(cli("").code != 0);
}
