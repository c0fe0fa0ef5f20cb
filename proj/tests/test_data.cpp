#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "genf/data.hpp"

using namespace genf;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

RawSeries make_series(const std::string& id, const std::vector<std::vector<double>>& rows) {
    RawSeries s;
    s.unit_id = id;
    s.values = Mat(rows.size(), rows[0].size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t k = 0; k < rows[0].size(); ++k) s.values(t, k) = rows[t][k];
    s.missing_mask.assign(rows.size(), std::vector<bool>(rows[0].size(), false));
    s.feature_names.resize(rows[0].size());
    for (std::size_t k = 0; k < rows[0].size(); ++k) s.feature_names[k] = "f" + std::to_string(k);
    return s;
}

} // namespace

TEST_CASE("load_csv structural mapping") {
    std::string csv = "unit,a,b,c\n";
    for (int t = 0; t < 10; ++t)
        csv += "u1," + std::to_string(t) + ",1.5,2\n";
    for (int t = 0; t < 10; ++t)
        csv += "u2," + std::to_string(t) + ",0.5,3\n";
    const auto path = write_temp("genf_two_units.csv", csv);

    auto units = load_csv(path);
    REQUIRE(units.size() == 2);
    CHECK(units[0].unit_id == "u1");
    CHECK(units[0].length() == 10);
    CHECK(units[0].features() == 3);
    CHECK(units[1].unit_id == "u2");
    CHECK(units[0].values(3, 0) == 3.0);
    CHECK(units[0].feature_names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("load_csv error cites line number") {
    std::string csv = "unit,a\nu1,1\nu1,2\nu1,3\nu1,4\nu1,5\nu1,oops\n";
    const auto path = write_temp("genf_badcell.csv", csv);
    try {
        load_csv(path);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }
}

TEST_CASE("load_csv empty file and missing cells") {
    const auto empty = write_temp("genf_empty.csv", "");
    CHECK(load_csv(empty).empty());

    const auto path = write_temp("genf_missing.csv", "unit,a,b\nu,1,\nu,,2\n");
    auto units = load_csv(path);
    REQUIRE(units.size() == 1);
    CHECK(units[0].missing_mask[0][1]);
    CHECK(units[0].missing_mask[1][0]);
    CHECK_FALSE(units[0].missing_mask[0][0]);
}

TEST_CASE("impute_last carries last reading forward") {
    RawSeries s = make_series("u", {{1.0}, {0.0}, {3.0}});
    s.missing_mask[1][0] = true;
    auto out = impute_last(s);
    CHECK(out.values(1, 0) == 1.0);
    CHECK(out.values(2, 0) == 3.0);
    CHECK_FALSE(out.missing_mask[1][0]);

    RawSeries clean = make_series("u", {{1.0}, {2.0}});
    auto same = impute_last(clean);
    CHECK(same.values(1, 0) == 2.0);

    RawSeries bad = make_series("u_bad", {{0.0}, {2.0}});
    bad.missing_mask[0][0] = true;
    try {
        impute_last(bad);
        FAIL("expected error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("u_bad") != std::string::npos);
        CHECK(msg.find("f0") != std::string::npos);
    }
}

TEST_CASE("min-max scaling") {
    RawSeries s = make_series("u", {{2.0, 5.0}, {4.0, 5.0}, {6.0, 5.0}});
    auto p = fit_scale({s});
    CHECK(p.min[0] == 2.0);
    CHECK(p.max[0] == 6.0);

    auto scaled = apply_scale(s, p);
    CHECK(scaled.values(0, 0) == 0.0);
    CHECK(scaled.values(1, 0) == 0.5);
    CHECK(scaled.values(2, 0) == 1.0);
    // degenerate feature scales to constant 0
    CHECK(scaled.values(0, 1) == 0.0);
    CHECK(scaled.values(2, 1) == 0.0);

    // test-time value outside the training range is not clipped
    RawSeries t = make_series("t", {{8.0, 5.0}});
    auto st = apply_scale(t, p);
    CHECK(st.values(0, 0) == 1.5);
}

TEST_CASE("scale round-trip within 1e-12 relative error") {
    Rng rng(5);
    RawSeries s = make_series("u", {{0, 0}, {0, 0}});
    s.values = Mat(50, 2);
    s.missing_mask.assign(50, std::vector<bool>(2, false));
    for (std::size_t t = 0; t < 50; ++t) {
        s.values(t, 0) = rng.normal() * 100.0 + 40.0;
        s.values(t, 1) = rng.uniform(1000.0, 2000.0);
    }
    auto p = fit_scale({s});
    auto back = inverse_scale(apply_scale(s, p), p);
    for (std::size_t t = 0; t < 50; ++t)
        for (std::size_t k = 0; k < 2; ++k) {
            const double rel =
                std::abs(back.values(t, k) - s.values(t, k)) / std::abs(s.values(t, k));
            CHECK(rel <= 1e-12);
        }
}

TEST_CASE("make_windows counts and targets") {
    // T=10, M=4, N_max=2 -> 5 windows
    RawSeries s = make_series("u", {{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}});
    auto ds = make_windows({s}, 4, {1, 2});
    CHECK(ds.windows.size() == 5);
    CHECK(ds.skipped_units.empty());
    // window s starts at s; last row value s+3; target at horizon h: s+3+h
    for (std::size_t w = 0; w < 5; ++w) {
        CHECK(ds.windows[w](3, 0) == static_cast<double>(w + 3));
        CHECK(ds.targets.at(1)[w] == static_cast<double>(w + 4));
        CHECK(ds.targets.at(2)[w] == static_cast<double>(w + 5));
    }

    // unit too short: skipped with warning
    RawSeries tiny = make_series("small", {{0}, {1}, {2}, {3}, {4}});
    auto ds2 = make_windows({tiny}, 4, {2});
    CHECK(ds2.windows.empty());
    REQUIRE(ds2.skipped_units.size() == 1);
    CHECK(ds2.skipped_units[0] == "small");

    // M=1, N=1, T=3 -> 2 windows targeting the following value
    RawSeries three = make_series("t3", {{10}, {20}, {30}});
    auto ds3 = make_windows({three}, 1, {1});
    REQUIRE(ds3.windows.size() == 2);
    CHECK(ds3.targets.at(1)[0] == 20.0);
    CHECK(ds3.targets.at(1)[1] == 30.0);
}

TEST_CASE("window count formula property") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t M = 1 + rng.index(6);
        const int n_max = 1 + static_cast<int>(rng.index(4));
        const std::size_t T = M + static_cast<std::size_t>(n_max) + rng.index(20);
        std::vector<std::vector<double>> rows(T, std::vector<double>{0.0});
        auto ds = make_windows({make_series("u", rows)}, M, {n_max});
        CHECK(ds.windows.size() == T - M - static_cast<std::size_t>(n_max) + 1);
    }
}

TEST_CASE("split_units fractions, determinism, disjointness") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("u" + std::to_string(i));

    auto s1 = split_units(ids, {0.6, 0.2, 0.2}, 31);
    CHECK(s1.train.size() == 6);
    CHECK(s1.test.size() == 2);
    CHECK(s1.validation.size() == 2);

    auto s2 = split_units(ids, {0.6, 0.2, 0.2}, 31);
    CHECK(s1.train == s2.train);
    CHECK(s1.test == s2.test);
    CHECK(s1.validation == s2.validation);

    std::set<std::string> all;
    for (const auto& v : {s1.train, s1.test, s1.validation})
        for (const auto& id : v) CHECK(all.insert(id).second); // no unit in two splits
    CHECK(all.size() == 10);

    CHECK_THROWS_AS(split_units({"a", "b"}, {0.6, 0.2, 0.2}, 1), std::invalid_argument);

    // minimum size: every partition non-empty
    auto s3 = split_units({"a", "b", "c"}, {0.6, 0.2, 0.2}, 7);
    CHECK(s3.train.size() >= 1);
    CHECK(s3.test.size() >= 1);
    CHECK(s3.validation.size() >= 1);
}

TEST_CASE("split manifest round trip") {
    const auto path = (fs::temp_directory_path() / "genf_manifest.txt").string();
    write_split_manifest(path, {"u3", "u1", "u7"});
    CHECK(read_split_manifest(path) == std::vector<std::string>{"u3", "u1", "u7"});
}
