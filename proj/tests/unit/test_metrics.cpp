#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbw/errors.hpp"
#include "fbw/metrics.hpp"

using namespace fbw;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("header schema") {
    CHECK(metrics_header(3) ==
          "epoch,split,loss,error_rate,eta_W,angle_W_B_l1,angle_W_B_l2,angle_W_B_l3,"
          "angle_delta_l1,angle_delta_l2,angle_delta_l3");
}

TEST_CASE("empty record list writes a header-only file") {
    const auto p = std::filesystem::temp_directory_path() / "fbw_test_empty.csv";
    emit_metrics({}, 2, p);
    CHECK(slurp(p) == metrics_header(2) + "\n");
    CHECK(read_metrics(p).empty());
    std::filesystem::remove(p);
}

TEST_CASE("rows use 9 significant digits and empty fields for undefined angles") {
    MetricsRecord r{3, Split::Test, 0.123456789012, 0.25, 0.05, {1.0 / 3.0, std::nullopt}, {2.0, 0.0}};
    CHECK(format_metrics_row(r) == "3,test,0.123456789,0.25,0.05,0.333333333,,2,0");
}

TEST_CASE("round trip reproduces values to printed precision") {
    std::vector<MetricsRecord> records{
        {0, Split::Train, 1.5, 0.9, 0.01, {88.123456789, 45.5}, {12.25, 0.0}},
        {0, Split::Test, 1.75, 0.875, 0.01, {88.123456789, std::nullopt}, {std::nullopt, 0.0}},
    };
    const auto p = std::filesystem::temp_directory_path() / "fbw_test_roundtrip.csv";
    emit_metrics(records, 2, p);
    const auto back = read_metrics(p);
    REQUIRE(back.size() == 2);
    CHECK(back[0].split == Split::Train);
    CHECK(back[1].split == Split::Test);
    CHECK(back[0].loss == 1.5);
    CHECK(*back[0].matrix_angle_deg[0] == doctest::Approx(88.123456789).epsilon(1e-9));
    CHECK_FALSE(back[1].matrix_angle_deg[1].has_value());
    CHECK_FALSE(back[1].delta_angle_deg[0].has_value());
    CHECK(format_metrics_row(back[0]) == format_metrics_row(records[0]));
    std::filesystem::remove(p);
}

TEST_CASE("angle count must match the layer count") {
    const auto p = std::filesystem::temp_directory_path() / "fbw_test_bad.csv";
    std::vector<MetricsRecord> records{{0, Split::Train, 1.0, 0.0, 0.1, {1.0}, {1.0}}};
    CHECK_THROWS_AS(emit_metrics(records, 2, p), DimensionError);
}

TEST_CASE("malformed files are format errors") {
    const auto p = std::filesystem::temp_directory_path() / "fbw_test_malformed.csv";
    {
        std::ofstream out(p);
        out << "epoch,split\n";
    }
    CHECK_THROWS_AS(read_metrics(p), FormatError);
    {
        std::ofstream out(p);
        out << metrics_header(1) << "\n0,train,abc,0,0,1,1\n";
    }
    CHECK_THROWS_AS(read_metrics(p), FormatError);
    {
        std::ofstream out(p);
        out << metrics_header(1) << "\n0,valid,1,0,0,1,1\n";
    }
    CHECK_THROWS_AS(read_metrics(p), FormatError);
    std::filesystem::remove(p);
    CHECK_THROWS_AS(read_metrics(p), IoError);
}
