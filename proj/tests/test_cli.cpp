#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "qfc_cli.hpp"

namespace qfc {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qfc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::initializer_list<std::string> args) {
        std::vector<std::string> storage{"qfc"};
        storage.insert(storage.end(), args);
        std::vector<const char*> argv;
        for (const auto& s : storage) argv.push_back(s.c_str());
        err_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), err_);
    }

    static std::string slurp(const std::string& file) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    /// Non-comment lines of a CSV file.
    static std::vector<std::string> csv_lines(const std::string& file) {
        std::vector<std::string> out;
        std::istringstream in(slurp(file));
        for (std::string line; std::getline(in, line);) {
            if (!line.empty() && line[0] != '#') out.push_back(line);
        }
        return out;
    }

    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
        return out;
    }

    fs::path dir_;
    std::ostringstream err_;
};

TEST(FormatNumber, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(2.0 / 3.0 * 1000), "666.666666667");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST_F(CliTest, FidelityNothingHappens) {
    ASSERT_EQ(run({"--out", path("f.csv"), "fidelity", "--theta", "0.8", "--phi", "1.0", "--p", "0", "--chi",
                   "1.5707963267948966", "--eta", "0", "--beta", "0"}),
              cli::kOk);
    const auto lines = csv_lines(path("f.csv"));
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "f_closed,f_simulated,difference,f_plus,f_minus");
    const auto cells = split(lines[1]);
    EXPECT_EQ(cells[0], "1.000000000000");
    EXPECT_EQ(cells[1], "1.000000000000");
}

TEST_F(CliTest, FidelityDoNothingOnXAxis) {
    ASSERT_EQ(run({"--out", path("f.csv"), "fidelity", "--theta", "0", "--phi", "0", "--p", "0.3", "--chi",
                   "1.5707963267948966", "--eta", "0", "--beta", "0"}),
              cli::kOk);
    const auto cells = split(csv_lines(path("f.csv"))[1]);
    EXPECT_EQ(cells[0], "0.700000000000");
    EXPECT_EQ(cells[1], "0.700000000000");
}

TEST_F(CliTest, FidelityFigureSevenRoutesAgree) {
    ASSERT_EQ(run({"--out", path("f.csv"), "fidelity", "--theta", "1.0155", "--phi", "0.8976", "--p", "0.18",
                   "--chi", "0.8583", "--eta", "0.7913", "--beta", "5.8905"}),
              cli::kOk);
    const auto cells = split(csv_lines(path("f.csv"))[1]);
    EXPECT_EQ(cells[0], cells[1]);
    EXPECT_EQ(cells[0], "0.886870353515");
    EXPECT_LT(std::abs(std::stod(cells[2])), 1e-12);
}

TEST_F(CliTest, DegreesConvertOnInput) {
    ASSERT_EQ(run({"--out", path("deg.csv"), "--degrees", "fidelity", "--theta", "45", "--phi", "45", "--p", "0.2",
                   "--chi", "30", "--eta", "20", "--beta", "100"}),
              cli::kOk);
    const double d = std::numbers::pi / 180;
    ControlParams c;
    c.theta = 45 * d;
    c.phi = 45 * d;
    c.p = 0.2;
    c.chi = 30 * d;
    c.eta = 20 * d;
    c.beta = 100 * d;
    EXPECT_NEAR(std::stod(split(csv_lines(path("deg.csv"))[1])[0]), fidelity_closed(c), 1e-12);
}

TEST_F(CliTest, ConfigFileSuppliesDefaultsAndFlagsWin) {
    {
        std::ofstream cfg(path("run.ini"));
        cfg << "[fidelity]\ntheta=0\nphi=0\np=0.1\nchi=1.5707963267948966\neta=0\nbeta=0\n";
    }
    ASSERT_EQ(run({"--config", path("run.ini"), "--out", path("a.csv"), "fidelity"}), cli::kOk) << err_.str();
    EXPECT_EQ(split(csv_lines(path("a.csv"))[1])[0], "0.900000000000");
    ASSERT_EQ(run({"--config", path("run.ini"), "--out", path("b.csv"), "fidelity", "--p", "0.3"}), cli::kOk);
    EXPECT_EQ(split(csv_lines(path("b.csv"))[1])[0], "0.700000000000");
}

TEST_F(CliTest, SweepRowOrderIsThetaMajorThenPhiThenP) {
    ASSERT_EQ(run({"--out", path("s.csv"), "sweep", "--p", "0.1", "0.2", "--grid-theta", "2", "--grid-phi", "3",
                   "--chi-grid", "17", "--beta-grid", "32"}),
              cli::kOk);
    const auto lines = csv_lines(path("s.csv"));
    ASSERT_EQ(lines.size(), 1u + 2 * 3 * 2);
    const auto header = split(lines[0]);
    ASSERT_GE(header.size(), 4u);
    EXPECT_EQ(header[0], "theta");
    EXPECT_EQ(header[1], "phi");
    EXPECT_EQ(header[2], "p");
    EXPECT_EQ(header[3], "value");
    std::vector<std::tuple<double, double, double>> keys;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split(lines[r]);
        ASSERT_EQ(cells.size(), header.size());
        keys.emplace_back(std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2]));
    }
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_EQ(std::get<2>(keys[0]), 0.1);
    EXPECT_EQ(std::get<2>(keys[1]), 0.2);
}

TEST_F(CliTest, MetadataEchoesEffectiveConfig) {
    ASSERT_EQ(run({"--out", path("s.csv"), "sweep", "--p", "0.3", "--grid-theta", "2", "--grid-phi", "2",
                   "--chi-grid", "17"}),
              cli::kOk);
    const std::string text = slurp(path("s.csv"));
    EXPECT_NE(text.find("# command=sweep\n"), std::string::npos);
    EXPECT_NE(text.find("# chi_grid=17\n"), std::string::npos);
    EXPECT_NE(text.find("# beta_grid=256\n"), std::string::npos);
    EXPECT_NE(text.find("# p_values=0.3\n"), std::string::npos);
}

TEST_F(CliTest, JsonRoundTripsToIdenticalBytes) {
    ASSERT_EQ(run({"--out", path("s.json"), "--format", "json", "sweep", "--p", "0.25", "--grid-theta", "3",
                   "--grid-phi", "3", "--chi-grid", "17", "--beta-grid", "32"}),
              cli::kOk);
    const std::string bytes = slurp(path("s.json"));
    const auto doc = nlohmann::ordered_json::parse(bytes);
    EXPECT_EQ(doc.dump(2) + "\n", bytes);
    EXPECT_EQ(doc["records"].size(), 9u);
    EXPECT_EQ(doc["columns"][0], "theta");
}

TEST_F(CliTest, OutputIsWrittenAtomically) {
    ASSERT_EQ(run({"--out", path("v.csv"), "verify"}), cli::kOk);
    EXPECT_TRUE(fs::exists(path("v.csv")));
    EXPECT_FALSE(fs::exists(path("v.csv.tmp")));
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++files;
    EXPECT_EQ(files, 1u);
}

TEST_F(CliTest, InvalidInputProducesNoOutputFile) {
    EXPECT_EQ(run({"--out", path("bad.csv"), "fidelity", "--theta", "5", "--phi", "0", "--p", "0.1", "--chi", "0",
                   "--eta", "0", "--beta", "0"}),
              cli::kRange);
    EXPECT_FALSE(fs::exists(path("bad.csv")));
    EXPECT_EQ(run({"--out", path("bad.csv"), "sweep", "--p", "0.7"}), cli::kRange);
    EXPECT_FALSE(fs::exists(path("bad.csv")));
    EXPECT_TRUE(fs::is_empty(dir_));
}

TEST_F(CliTest, FailedRunLeavesExistingFileUntouched) {
    {
        std::ofstream(path("keep.csv")) << "previous\n";
    }
    EXPECT_EQ(run({"--out", path("keep.csv"), "optimize", "--theta", "1", "--phi", "0", "--p", "-0.1"}), cli::kRange);
    EXPECT_EQ(slurp(path("keep.csv")), "previous\n");
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({}), cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}), cli::kUsage);
    EXPECT_EQ(run({"fidelity", "--theta", "abc"}), cli::kUsage);
    EXPECT_EQ(run({"--out", path("x.csv"), "fidelity", "--theta", "0.1"}), cli::kUsage);  // missing parameters
    EXPECT_EQ(run({"--out", path("x.csv"), "figure", "--figure", "9"}), cli::kUsage);
    EXPECT_EQ(run({"--out", path("x.csv"), "optimize", "--theta", "1", "--phi", "0", "--p", "0.1", "--chi-grid",
                   "3"}),
              cli::kUsage);
    EXPECT_EQ(run({"--out", path("x.csv"), "snapshot", "--theta", "1", "--phi", "0", "--p", "0.1", "--chi", "2",
                   "--eta", "0", "--beta", "0"}),
              cli::kRange);
    EXPECT_EQ(run({"--out", path("x.csv"), "verify"}), cli::kOk);
}

TEST_F(CliTest, VerifyReportIsDeterministic) {
    ASSERT_EQ(run({"--out", path("a.csv"), "verify"}), cli::kOk);
    ASSERT_EQ(run({"--out", path("b.csv"), "verify"}), cli::kOk);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    const auto lines = csv_lines(path("a.csv"));
    EXPECT_EQ(lines[0], "check,max_deviation,tolerance,status");
    for (std::size_t r = 1; r < lines.size(); ++r) EXPECT_EQ(split(lines[r]).back(), "pass") << lines[r];
}

TEST(Verify, PerturbedClosedFormIsCaught) {
    VerifyOptions opt;
    opt.oracle_samples = 2000;
    opt.samples = 100;
    opt.closed_form = [](const ControlParams& c) { return fidelity_closed(c) + 1e-9 * std::cos(c.theta); };
    const std::vector<CheckResult> checks = run_verification(opt);
    EXPECT_FALSE(all_passed(checks));
    ASSERT_EQ(checks.front().name, "oracle_equivalence");
    EXPECT_FALSE(checks.front().passed);
    EXPECT_GT(checks.front().max_deviation, 1e-10);
}

TEST_F(CliTest, FigureSevenBlochVectors) {
    ASSERT_EQ(run({"--out", path("f7.csv"), "figure", "--figure", "7"}), cli::kOk);
    const auto lines = csv_lines(path("f7.csv"));
    ASSERT_EQ(lines.size(), 1u + 12);
    EXPECT_EQ(lines[0], "state,stage,x,y,z,weight");
    const auto initial = split(lines[1]);
    EXPECT_EQ(initial[0], "psi_plus");
    EXPECT_EQ(initial[1], "initial");
    EXPECT_NEAR(std::stod(initial[2]), std::cos(1.0155), 1e-12);
    EXPECT_NEAR(std::stod(initial[3]), -std::sin(1.0155) * std::sin(0.8976), 1e-12);
    EXPECT_NEAR(std::stod(initial[4]), std::sin(1.0155) * std::cos(0.8976), 1e-12);
    const auto final_row = split(lines[5]);
    EXPECT_EQ(final_row[1], "final");
    EXPECT_NEAR(std::stod(final_row[2]), 0.6307861932826628, 1e-11);
    EXPECT_EQ(split(lines[6])[1], "final_beta0");
    EXPECT_EQ(split(lines[7])[0], "psi_minus");
}

TEST_F(CliTest, SurfaceFigureOutputIndependentOfJobs) {
    ASSERT_EQ(run({"--out", path("j1.csv"), "--jobs", "1", "figure", "--figure", "3", "--grid-theta", "5",
                   "--grid-phi", "5"}),
              cli::kOk);
    ASSERT_EQ(run({"--out", path("j3.csv"), "--jobs", "3", "figure", "--figure", "3", "--grid-theta", "5",
                   "--grid-phi", "5"}),
              cli::kOk);
    EXPECT_EQ(slurp(path("j1.csv")), slurp(path("j3.csv")));
    EXPECT_EQ(csv_lines(path("j1.csv")).size(), 1u + 5 * 5 * 4);
}

TEST_F(CliTest, BuiltBinaryReportsExitStatus) {
    const std::string bin = QFC_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((bin + " " + args + " > " + path("out.txt") + " 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("fidelity --theta 0 --phi 0 --p 0.3 --chi 1.5707963267948966 --eta 0 --beta 0"), 0);
    EXPECT_NE(slurp(path("out.txt")).find("0.700000000000"), std::string::npos);
    EXPECT_EQ(status("fidelity --theta 2 --phi 0 --p 0.3 --chi 0 --eta 0 --beta 0"), 3);
    EXPECT_EQ(status("fidelity --bogus"), 2);
    EXPECT_EQ(status("verify"), 0);
}

}  // namespace
}  // namespace qfc
