#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "pflab/binio.hpp"
#include "pflab/runner.hpp"

using namespace pflab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct temp_dir {
    std::filesystem::path path;
    temp_dir() {
        path = std::filesystem::temp_directory_path() /
               ("pflab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~temp_dir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("config parser: tables, arrays, comments, line numbers") {
    const std::string text = "kind = \"solve\"  # comment\n"
                             "[domain]\n"
                             "kind = \"interval\"\n"
                             "a = 0.0\n"
                             "b = 1.0\n"
                             "[exponents]\n"
                             "p = 2.0\n"
                             "q = 1.0\n"
                             "[grid]\n"
                             "h = 0.125\n";
    const auto cf = config_file::parse("test.toml", text);
    CHECK(cf.string("", "kind") == "solve");
    CHECK(cf.number("exponents", "p") == 2.0);
    CHECK(cf.number("grid", "h") == 0.125);

    CHECK_THROWS_WITH(config_file::parse("bad.toml", "x ="),
                      Catch::Matchers::ContainsSubstring("bad.toml:1"));
    CHECK_THROWS_WITH(config_file::parse("bad.toml", "kind = \"a\"\nnope\n"),
                      Catch::Matchers::ContainsSubstring("bad.toml:2"));
    CHECK_THROWS_WITH(config_file::parse("bad.toml", "x = [1, oops]"),
                      Catch::Matchers::ContainsSubstring("malformed number"));
}

TEST_CASE("run_experiment: minimal solve config yields lambda = 12") {
    temp_dir dir;
    const std::string text = "kind = \"solve\"\n"
                             "[domain]\nkind = \"interval\"\na = 0.0\nb = 1.0\n"
                             "[exponents]\np = 2.0\nq = 1.0\n"
                             "[grid]\nh = 0.0078125\n";
    const auto cf = config_file::parse("solve.toml", text);
    run_options ropt;
    ropt.out_dir = dir.str();
    CHECK(run_experiment(cf, ropt) == 0);
    const std::string csv = slurp(dir.str() + "/report.csv");
    CHECK(csv.find("solve,") != std::string::npos);
    CHECK(csv.find("12.0") != std::string::npos);
    CHECK(!slurp(dir.str() + "/report.json").empty());
}

TEST_CASE("run_experiment: malformed regime is rejected before any solve") {
    temp_dir dir;
    const std::string text = "kind = \"solve\"\n"
                             "[domain]\nkind = \"interval\"\na = 0.0\nb = 1.0\n"
                             "[exponents]\np = 2.0\nq = 3.0\n" // p < q < inf needs p > N fails
                             "[grid]\nh = 0.125\n";
    const auto cf = config_file::parse("solve.toml", text);
    run_options ropt;
    ropt.out_dir = dir.str();
    // q > p on an interval: the super route requires... p=2 > N=1, so this one
    // actually runs; use a genuinely invalid config instead: unknown key.
    const std::string bad = "kind = \"solve\"\nbogus = 1\n"
                            "[domain]\nkind = \"interval\"\na = 0.0\nb = 1.0\n"
                            "[exponents]\np = 2.0\nq = 1.0\n[grid]\nh = 0.125\n";
    CHECK_THROWS_WITH(run_experiment(config_file::parse("bad.toml", bad), ropt),
                      Catch::Matchers::ContainsSubstring("unknown key 'bogus'"));
    // missing q is named in the error
    const std::string noq = "kind = \"solve\"\n"
                            "[domain]\nkind = \"interval\"\na = 0.0\nb = 1.0\n"
                            "[exponents]\np = 2.0\n[grid]\nh = 0.125\n";
    CHECK_THROWS_WITH(run_experiment(config_file::parse("noq.toml", noq), ropt),
                      Catch::Matchers::ContainsSubstring("'q'"));
    // lane-emden kind with q > p: rejected by the solver with the regime named
    const std::string qgtp = "kind = \"tower\"\n"
                             "[exponents]\np = 2.0\nq = 3.0\n[grid]\nh = 0.0625\n"
                             "[tower]\nm_list = [0]\n";
    CHECK_THROWS_WITH(run_experiment(config_file::parse("qgtp.toml", qgtp), ropt),
                      Catch::Matchers::ContainsSubstring("q < p"));
}

TEST_CASE("binary field format round trip") {
    temp_dir dir;
    auto g = rasterize(make_ball(2, point{}, 1.0), 0.25);
    auto d = distance_field(g);
    const std::string path = dir.str() + "/d.pflb";
    write_field_binary(path, d);
    const auto f = read_field_binary(path);
    CHECK(f.dim == 2);
    CHECK(f.h == 0.25);
    CHECK(f.shape[0] == g->shape[0]);
    REQUIRE(f.values.size() == d.v.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(f.values[i] == d.v[i]);
    // header is exactly 32 bytes + doubles
    CHECK(std::filesystem::file_size(path) == 32 + d.v.size() * sizeof(real));
    CHECK(slurp(path).substr(0, 4) == "PFLB");
}

TEST_CASE("text matrix export for small grids") {
    temp_dir dir;
    auto g = rasterize(make_interval(0, 1), 0.25);
    auto d = distance_field(g);
    write_field_text(dir.str() + "/d.txt", d);
    CHECK(slurp(dir.str() + "/d.txt") == "0 0.25 0.5 0.25 0\n");
}

TEST_CASE("CSV output is byte-identical across writes and hides wall time") {
    temp_dir dir;
    std::vector<report_row> rows(2);
    rows[0].experiment = "solve";
    rows[0].value = 12.000000001;
    rows[0].seconds = 1.234;
    rows[1].experiment = "solve";
    rows[1].tag = "eq:test";
    rows[1].q = inf;
    rows[1].pass = 1;
    write_csv(dir.str() + "/a.csv", rows);
    write_csv(dir.str() + "/b.csv", rows);
    const auto a = slurp(dir.str() + "/a.csv");
    CHECK(a == slurp(dir.str() + "/b.csv"));
    CHECK(a.find("1.234") == std::string::npos); // timing off by default
    CHECK(a.find("inf") != std::string::npos);
    write_csv(dir.str() + "/c.csv", rows, true);
    CHECK(slurp(dir.str() + "/c.csv").find("1.234") != std::string::npos);
}

TEST_CASE("sweep experiment writes rows and an SVG plot") {
    temp_dir dir;
    const std::string text = "kind = \"sweep_p\"\n"
                             "[domain]\nkind = \"interval\"\na = 0.0\nb = 1.0\n"
                             "[exponents]\nq = 1.0\np_list = [4, 8, 16, 32]\n"
                             "[grid]\nh = 0.001953125\n"
                             "[output]\nplots = true\n";
    run_options ropt;
    ropt.out_dir = dir.str();
    CHECK(run_experiment(config_file::parse("sweep.toml", text), ropt) == 0);
    const std::string csv = slurp(dir.str() + "/report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5); // header + 4 rows
    const std::string svg = slurp(dir.str() + "/gap_vs_p.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("fault injection flips the named acceptance check") {
    acceptance_options opts;
    opts.workers = 2;
    opts.fault_tags = {"A4"};
    opts.run_property_battery = false;
    opts.only = {4};
    auto run = acceptance_suite(opts).run();
    const auto& c4 = run.criteria[3];
    CHECK_FALSE(c4.pass);
    bool tagged = false;
    for (const auto& t : run.failing_tags)
        if (t == "A4") tagged = true;
    CHECK(tagged);
    CHECK_FALSE(run.pass);
}

TEST_CASE("workqueue results are independent of the worker count") {
    std::vector<real> a(64), b(64);
    run_jobs(64, 1, [&](std::size_t i) { a[i] = std::sin(static_cast<real>(i)); });
    run_jobs(64, 8, [&](std::size_t i) { b[i] = std::sin(static_cast<real>(i)); });
    CHECK(a == b);
}
