#include "doctest.h"

#include "swelab/io.hpp"
#include "swelab/sampler.hpp"

#include <cmath>
#include <sstream>

using namespace swelab;

namespace {

FieldSample make_sample(std::optional<TimeBand> band = std::nullopt) {
    FieldSample s;
    s.grid.tau_values = {0.5, 1.0};
    s.grid.lambda_values = {0.25, 0.75, 1.25};
    s.grid.band = band;
    s.seed = 17;
    s.replication_id = 3;
    s.values.resize(2, 3);
    s.values << 0.1, -2.5, 3.25, 1e-17, 0.0, -123456.789;
    return s;
}

} // namespace

TEST_CASE("format_double round-trips doubles exactly") {
    for (double v : {0.0, 1.0 / 3.0, -2.5e-300, 6.02214076e23, M_PI}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("CSV output: header, row count, full precision") {
    const auto s = make_sample();
    std::ostringstream os;
    write_csv(os, {s, s});
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "replication_id,tau,lambda,value");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 12); // 2 replications x 6 grid points
    CHECK(os.str().find(format_double(-123456.789)) != std::string::npos);
}

TEST_CASE("binary round trip preserves values, keys, and grid") {
    for (const auto& band :
         {std::optional<TimeBand>{}, std::optional<TimeBand>{TimeBand::upto(0.7)},
          std::optional<TimeBand>{TimeBand::from(0.2)}}) {
        const auto s = make_sample(band);
        std::stringstream ss;
        write_binary(ss, s, 0.5);
        double beta = 0.0;
        const auto back = read_binary(ss, beta);
        CHECK(beta == 0.5);
        CHECK(back.seed == s.seed);
        CHECK(back.replication_id == s.replication_id);
        CHECK(back.grid.tau_values == s.grid.tau_values);
        CHECK(back.grid.lambda_values == s.grid.lambda_values);
        CHECK(back.values == s.values);
        REQUIRE(back.grid.band.has_value() == band.has_value());
        if (band) {
            CHECK(back.grid.band->s_lo == band->s_lo);
            CHECK(back.grid.band->s_hi == band->s_hi);
        }
    }
}

TEST_CASE("binary reader rejects malformed streams") {
    std::stringstream ss;
    ss << "not a sample";
    double beta = 0.0;
    CHECK_THROWS_AS(read_binary(ss, beta), std::runtime_error);
}
