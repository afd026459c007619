#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("fqt_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
    }

    Result run(const std::string& args) const {
        const std::string log = path("stdout.txt");
        const std::string cmd = "cd '" + dir_.string() + "' && FQT_LOG=off '" FQT_CLI_PATH "' " + args +
                                " > '" + log + "' 2>/dev/null";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read(log)};
    }

    static std::string read(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

const char* baths_block = "[baths]\nt_e = 0.2\nt_b = 0.118\nt_c = 0.02\n";

} // namespace

TEST_F(CliTest, EquilibriumSampleGivesZeroCurrents) {
    const Result r = run("run --config '" FQT_SAMPLES_DIR "/eq.toml'");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("mode=point points=1 errors=0"), std::string::npos) << r.out;
    const auto rows = csv_rows(read(path("eq.csv")));
    ASSERT_EQ(rows.size(), 2u);
    for (int k = 1; k <= 3; ++k) EXPECT_LT(std::abs(std::stod(rows[1][k])), 1e-12) << rows[0][k];
    EXPECT_EQ(rows[1].back(), "ok");
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRunsAndThreads) {
    write("s.toml", std::string("[run]\nmode = sweep-nu\ngrid_min = 0.5\ngrid_max = 3\ngrid_points = 25\n") +
                        baths_block + "[modulation]\nscheme = pi_flip\n");
    ASSERT_EQ(run("run --config s.toml --out a.csv --threads 1").code, 0);
    ASSERT_EQ(run("run --config s.toml --out b.csv --threads 4").code, 0);
    ASSERT_EQ(run("run --config s.toml --out c.json --format json").code, 0);
    ASSERT_EQ(run("run --config s.toml --out d.json --format json --threads 3").code, 0);
    EXPECT_EQ(read(path("a.csv")), read(path("b.csv")));
    EXPECT_EQ(read(path("c.json")), read(path("d.json")));
    EXPECT_FALSE(read(path("a.csv")).empty());
}

TEST_F(CliTest, CsvSchema) {
    write("s.toml", std::string("[run]\nmode = sweep-tb\ngrid_min = 0.02\ngrid_max = 0.15\ngrid_points = 9\n") +
                        baths_block);
    ASSERT_EQ(run("run --config s.toml --out s.csv").code, 0);
    const auto rows = csv_rows(read(path("s.csv")));
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"tb", "j_e", "j_b", "j_c", "beta_plus", "beta_minus",
                                                 "residual", "bm_flag", "status"}));
    EXPECT_EQ(rows[1][4], "");  // no beta at the grid ends
    EXPECT_EQ(rows[9][5], "");
    for (std::size_t i = 2; i < 9; ++i) {
        EXPECT_NEAR(std::stod(rows[i][4]) + std::stod(rows[i][5]), -1.0, 1e-6);
    }
}

TEST_F(CliTest, JsonMirrorsCsv) {
    write("s.toml", std::string("[run]\nmode = sweep-nu\ngrid_min = 0.5\ngrid_max = 3\ngrid_points = 5\n") +
                        baths_block + "[modulation]\nscheme = sinusoidal\nlambda = 0.8\n");
    ASSERT_EQ(run("run --config s.toml --out s.csv").code, 0);
    ASSERT_EQ(run("run --config s.toml --out s.json --format json").code, 0);
    const auto j = nlohmann::json::parse(read(path("s.json")));
    const auto rows = csv_rows(read(path("s.csv")));
    ASSERT_EQ(j["rows"].size(), 5u);
    EXPECT_TRUE(j.contains("version"));
    EXPECT_TRUE(j.contains("config"));
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(std::stod(rows[i + 1][1]), j["rows"][i]["j_e"].get<double>());
    }
}

TEST_F(CliTest, RowsReproduceAsPointConfigs) {
    struct Case {
        std::string sweep, modulation, axis_key;
    };
    const Case cases[] = {
        {"mode = sweep-tb\ngrid_min = 0.01\ngrid_max = 0.118\ngrid_points = 6\n",
         "[modulation]\nscheme = pi_flip\nnu = 1\n", "t_b"},
        {"mode = sweep-nu\ngrid_min = 0.5\ngrid_max = 3\ngrid_points = 6\n",
         "[modulation]\nscheme = sinusoidal\nlambda = 0.8\n", "nu"},
    };
    for (const Case& c : cases) {
        write("s.toml", "[run]\n" + c.sweep + baths_block + c.modulation);
        ASSERT_EQ(run("run --config s.toml --out s.csv").code, 0);
        const auto rows = csv_rows(read(path("s.csv")));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            std::string baths = baths_block;
            std::string mod = c.modulation;
            const std::string v = rows[i][0];
            if (c.axis_key == "t_b") {
                baths = "[baths]\nt_e = 0.2\nt_b = " + v + "\nt_c = 0.02\n";
            } else {
                mod += "nu = " + v + "\n";
            }
            write("p.toml", "[run]\nmode = point\n" + baths + mod);
            ASSERT_EQ(run("run --config p.toml --out p.csv").code, 0);
            const auto p = csv_rows(read(path("p.csv")));
            for (int k = 1; k <= 3; ++k) {
                const double a = std::stod(rows[i][k]), b = std::stod(p[1][k]);
                EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a))) << c.axis_key << "=" << v;
            }
        }
    }
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("run --config missing.toml").code, 1);
    write("bad.toml", std::string("[run]\nmode = point\n") + baths_block +
                          "[modulation]\nscheme = sinusoidal\nlambda = 1.5\n");
    EXPECT_EQ(run("run --config bad.toml").code, 1);
    EXPECT_EQ(run("run --preset fig7").code, 1);
    EXPECT_EQ(run("run").code, 1);
    EXPECT_EQ(run("run --preset fig4 --config bad.toml").code, 1);
    EXPECT_EQ(run("run --preset fig4 --qmax 11").code, 1);
    write("ok.toml", std::string("[run]\nmode = point\n") + baths_block);
    EXPECT_EQ(run("run --config ok.toml --out no/such/dir/x.csv").code, 2);

    write("t.toml", std::string("[run]\nmode = sweep-tb\ngrid_min = 0.02\ngrid_max = 0.15\ngrid_points = 12\n") +
                        baths_block);
    const Result r = run("run --config t.toml --check");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("check=pass"), std::string::npos) << r.out;
}

TEST_F(CliTest, Fig10WritesTwoFiles) {
    const Result r = run("run --preset fig10 --out f.csv");
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* name : {"f_sinusoidal.csv", "f_pi_flip.csv"}) {
        const auto rows = csv_rows(read(path(name)));
        ASSERT_EQ(rows.size(), 201u) << name;
        EXPECT_EQ(rows[0][0], "nu");
        EXPECT_EQ(std::stod(rows[1][0]), 0.1);
        EXPECT_EQ(std::stod(rows[200][0]), 4.0);
    }
    EXPECT_NE(r.out.find("points=400"), std::string::npos) << r.out;
}
