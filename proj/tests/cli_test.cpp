#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ibs/cli/config.hpp"
#include "ibs/cli/run.hpp"
#include "ibs/cli/selfcheck.hpp"

using namespace ibs;
using namespace ibs::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ibs_cli_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(KeyValues, CommentsBlanksAndOverrides) {
    std::istringstream is("# header\n\nfine = 60   # trailing\ncoarse=12\nfine = 80\n");
    const auto kv = parse_key_values(is);
    EXPECT_EQ(kv.at("fine"), "80");
    EXPECT_EQ(kv.at("coarse"), "12");
    EXPECT_EQ(kv.size(), 2u);
    std::istringstream bad("fine 60\n");
    EXPECT_THROW(parse_key_values(bad), ConfigError);
    std::istringstream empty_key(" = 3\n");
    EXPECT_THROW(parse_key_values(empty_key), ConfigError);
}

TEST(Config, SetRejectsUnknownKeysAndNonIntegers) {
    ExperimentConfig c;
    EXPECT_THROW(c.set("bogus", "1"), ConfigError);
    EXPECT_THROW(c.set("fine", "10.5"), ConfigError);
    EXPECT_THROW(c.set("seed", "-1"), ConfigError);
    EXPECT_THROW(c.set("noise", "abc"), std::exception);
    c.set("eps_list", "0,0.1");
    EXPECT_EQ(c.eps_list.size(), 2u);
}

TEST(Config, ValidateEnforcesInvariants) {
    ExperimentConfig c;
    c.experiment = "schrodinger";
    EXPECT_NO_THROW(c.validate());
    auto fails = [](ExperimentConfig x) { EXPECT_THROW(x.validate(), Error); };
    {
        auto x = c;
        x.coarse = 30;
        fails(x);
    }
    {
        auto x = c;
        x.tau = 1.0;
        fails(x);
    }
    {
        auto x = c;
        x.noise = -0.01;
        fails(x);
    }
    {
        auto x = c;
        x.method = "newton";
        fails(x);
    }
    {
        auto x = c;
        x.experiment = "wave";
        fails(x);
    }
    {
        auto x = c;
        x.omega2 = x.omega1;
        fails(x);
    }
}

TEST(Config, ResolvedDefaultsFollowNoiseLevel) {
    ExperimentConfig c;
    c.experiment = "schrodinger";
    EXPECT_DOUBLE_EQ(c.resolved_tau(), 0.01);
    c.noise = 0.01;
    EXPECT_DOUBLE_EQ(c.resolved_tau(), 0.02);
    c.noise = 0.05;
    EXPECT_DOUBLE_EQ(c.resolved_tau(), 0.06);
    c.tau = 0.3;
    EXPECT_DOUBLE_EQ(c.resolved_tau(), 0.3);
    EXPECT_EQ(c.resolved_seed(), 1u);
    c.experiment = "toy";
    EXPECT_EQ(c.resolved_seed(), toy::kToySeed);
    EXPECT_EQ(c.resolved_stride(100), 5);
    EXPECT_EQ(c.resolved_stride(10), 1);
}

TEST(Config, ManifestRoundTrip) {
    ExperimentConfig c;
    c.experiment = "hydro";
    c.noise = 0.05;
    c.omega2 = 25.0;
    c.eps_list = {0.0, 0.125};
    std::ostringstream os;
    c.write(os);
    std::istringstream is(os.str());
    ExperimentConfig back;
    back.merge(parse_key_values(is));
    std::ostringstream again;
    back.write(again);
    EXPECT_EQ(os.str(), again.str());
    EXPECT_DOUBLE_EQ(*back.tau, 0.06);
    EXPECT_EQ(*back.seed, 1u);
}

TEST(Run, ToyMatchesGoldenAndIsReproducible) {
    ExperimentConfig c;
    c.output = scratch("toy").string();
    run(c);
    EXPECT_EQ(slurp(std::filesystem::path(c.output) / "comparison.csv"),
              slurp(std::filesystem::path(IBS_GOLDEN_DIR) / "toy_comparison.csv"));
    const std::string first = slurp(std::filesystem::path(c.output) / "gn_trace.csv");
    run(c);
    EXPECT_EQ(slurp(std::filesystem::path(c.output) / "gn_trace.csv"), first);
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.output) / "manifest.txt"));
}

TEST(Run, BoundsRadiusIsMonotone) {
    ExperimentConfig c;
    c.experiment = "bounds";
    c.fine = 40;
    c.output = scratch("bounds").string();
    const Summary s = run(c);
    EXPECT_EQ(s.back().first, "radius_monotone");
    EXPECT_EQ(s.back().second, "true");
    const std::string csv = slurp(std::filesystem::path(c.output) / "radius.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Run, SchrodingerManifestRecordsNoiseThreshold) {
    ExperimentConfig c;
    c.experiment = "schrodinger";
    c.fine = 40;
    c.coarse = 10;
    c.method = "gn";
    c.iterations = 2;
    for (double noise : {0.0, 0.05}) {
        c.noise = noise;
        c.output = scratch("schrodinger" + std::to_string(int(noise * 100))).string();
        run(c);
        std::ifstream is(std::filesystem::path(c.output) / "manifest.txt");
        const auto kv = parse_key_values(is);
        EXPECT_EQ(kv.at("tau"), noise == 0.0 ? "0.01" : "0.06");
        EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.output) / "q_rec.pgm"));
    }
}

TEST(Run, HydroWritesConductivityAndStorage) {
    ExperimentConfig c;
    c.experiment = "hydro";
    c.fine = 40;
    c.coarse = 10;
    c.method = "gn";
    c.iterations = 2;
    c.output = scratch("hydro").string();
    const Summary s = run(c);
    for (const char* f : {"sigma.csv", "S.csv", "sigma.pgm", "S.pgm", "manifest.txt", "summary.csv"})
        EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.output) / f)) << f;
    std::ifstream is(std::filesystem::path(c.output) / "manifest.txt");
    const auto kv = parse_key_values(is);
    EXPECT_EQ(kv.at("omega1"), "1");
    EXPECT_EQ(kv.at("omega2"), "10");
    EXPECT_EQ(kv.at("seed"), "1");
}

TEST(Selfcheck, AllInvariantsHold) {
    std::ostringstream os;
    EXPECT_TRUE(print_selfcheck(os, selfcheck())) << os.str();
}
