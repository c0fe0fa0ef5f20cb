#include <catch2/catch_amalgamated.hpp>

#include "genf/metrics.hpp"
#include "genf/rng.hpp"

using namespace genf;

TEST_CASE("mse and mae hand values") {
    std::vector<double> a{0, 0}, b{1, 1};
    CHECK(mse(a, b) == 1.0);
    CHECK(mae(a, b) == 1.0);

    std::vector<double> c{2}, d{5};
    CHECK(mse(c, d) == 9.0);
    CHECK(mae(c, d) == 3.0);

    std::vector<double> same{1.5, -2.0, 0.25};
    CHECK(mse(same, same) == 0.0);
    CHECK(mae(same, same) == 0.0);
}

TEST_CASE("metric error paths") {
    std::vector<double> a{1, 2}, b{1};
    CHECK_THROWS_AS(mse(a, b), std::invalid_argument);
    CHECK_THROWS_AS(mae(a, b), std::invalid_argument);
    CHECK_THROWS_AS(smape(a, b), std::invalid_argument);
    std::vector<double> empty;
    CHECK_THROWS_AS(mse(empty, empty), std::invalid_argument);
}

TEST_CASE("smape hand values and conventions") {
    std::vector<double> y{100}, yhat{50};
    CHECK(smape(y, yhat) == Catch::Approx(200.0 / 3.0).epsilon(1e-12));

    std::vector<double> z{0}, zh{0};
    CHECK(smape(z, zh) == 0.0);

    std::vector<double> nz{3.0, -1.0};
    CHECK(smape(nz, nz) == 0.0);
}

TEST_CASE("smape symmetry, scale invariance, Jensen bound") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.index(20);
        std::vector<double> y(n), yh(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.normal() * 10.0;
            yh[i] = rng.normal() * 10.0;
        }
        // occasionally force a double zero term
        if (trial % 17 == 0 && n > 1) {
            y[0] = 0.0;
            yh[0] = 0.0;
        }

        CHECK(smape(y, yh) == smape(yh, y)); // exact

        // exact scale invariance for exactly-representable scalings
        const double c = std::ldexp(1.0, static_cast<int>(rng.index(16)) - 8);
        std::vector<double> yc(n), yhc(n);
        for (std::size_t i = 0; i < n; ++i) {
            yc[i] = c * y[i];
            yhc[i] = c * yh[i];
        }
        CHECK(smape(yc, yhc) == smape(y, yh));

        // arbitrary positive scale: invariant to rounding noise
        const double c2 = 0.1 + 5.0 * rng.uniform();
        for (std::size_t i = 0; i < n; ++i) {
            yc[i] = c2 * y[i];
            yhc[i] = c2 * yh[i];
        }
        CHECK(smape(yc, yhc) == Catch::Approx(smape(y, yh)).margin(1e-9));

        CHECK(mae(y, yh) <= std::sqrt(mse(y, yh)) * (1.0 + 1e-12));
        CHECK(smape(y, yh) >= 0.0);
        CHECK(smape(y, yh) <= 200.0);
    }
}
