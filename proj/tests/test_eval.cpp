#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "npos/evalrep.hpp"
#include "npos/rng.hpp"

using namespace npos;
using namespace npos::eval;

TEST_SUITE("eval") {
    TEST_CASE("statistics of 1..100") {
        std::vector<double> errors;
        for (int i = 1; i <= 100; ++i) errors.push_back(i);
        const ErrorReport r = make_report(errors, "x");
        CHECK(r.mean == doctest::Approx(50.5));
        CHECK(r.median == doctest::Approx(50.5));
        CHECK(r.p95 == doctest::Approx(95.0));  // nearest rank
    }

    TEST_CASE("perfect errors give zero statistics") {
        const ErrorReport r = make_report(std::vector<double>(10, 0.0), "x");
        CHECK(r.mean == 0.0);
        CHECK(r.median == 0.0);
        CHECK(r.p95 == 0.0);
    }

    TEST_CASE("statistics match a sort-based oracle on random data") {
        Rng rng(5);
        std::vector<double> errors;
        for (int i = 0; i < 1237; ++i) errors.push_back(rng.uniform(0.0, 3.0));
        const ErrorReport r = make_report(errors, "x");

        std::vector<double> sorted = errors;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (double e : sorted) sum += e;
        CHECK(r.mean == doctest::Approx(sum / sorted.size()).epsilon(1e-12));
        CHECK(r.median == doctest::Approx(sorted[sorted.size() / 2]));  // odd count
        const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * sorted.size()));
        CHECK(r.p95 == sorted[rank - 1]);
        CHECK(r.median <= r.p95);
        CHECK(r.p95 <= sorted.back());
    }

    TEST_CASE("empirical cdf basics") {
        const auto single = empirical_cdf(make_report({2.0}, "x"));
        REQUIRE(single.size() == 1);
        CHECK(single[0].first == 2.0);
        CHECK(single[0].second == 1.0);

        const auto two = empirical_cdf(make_report({3.0, 1.0}, "x"));
        REQUIRE(two.size() == 2);
        CHECK(two[0] == std::pair<double, double>{1.0, 0.5});
        CHECK(two[1] == std::pair<double, double>{3.0, 1.0});
    }

    TEST_CASE("cdf is monotone, ends at 1, and covers p95") {
        Rng rng(6);
        std::vector<double> errors;
        for (int i = 0; i < 1000; ++i) errors.push_back(rng.uniform(0.0, 2.0));
        const ErrorReport r = make_report(errors, "x");
        const auto cdf = empirical_cdf(r);
        for (std::size_t i = 1; i < cdf.size(); ++i) {
            CHECK(cdf[i].first > cdf[i - 1].first);
            CHECK(cdf[i].second > cdf[i - 1].second);
        }
        CHECK(cdf.back().second == doctest::Approx(1.0));
        // cumulative probability at the p95 value is at least 0.95
        double at_p95 = 0.0;
        for (const auto& [e, p] : cdf)
            if (e <= r.p95) at_p95 = p;
        CHECK(at_p95 >= 0.95);
    }

    TEST_CASE("csv and svg artifacts are written") {
        const std::string dir = std::filesystem::temp_directory_path().string();
        Rng rng(7);
        std::vector<double> errors;
        for (int i = 0; i < 50; ++i) errors.push_back(rng.uniform(0.0, 1.0));
        const ErrorReport r = make_report(errors, "ours");
        std::vector<ErrorReport> reports = {r};

        save_results_csv(dir + "/npos_test_results.csv", reports);
        save_cdf_csv(dir + "/npos_test_cdf.csv", r);
        std::vector<Vec2> pos(50, Vec2{1.0, 1.0});
        write_error_map_svg(dir + "/npos_test_map.svg", pos, r.per_sample_errors,
                            {{0, 0}, {2, 0}, {2, 2}, {0, 2}});
        write_cdf_svg(dir + "/npos_test_cdf.svg", reports);

        CHECK(std::filesystem::file_size(dir + "/npos_test_results.csv") > 30);
        CHECK(std::filesystem::file_size(dir + "/npos_test_cdf.csv") > 100);
        CHECK(std::filesystem::file_size(dir + "/npos_test_map.svg") > 500);
        CHECK(std::filesystem::file_size(dir + "/npos_test_cdf.svg") > 300);

        std::ifstream f(dir + "/npos_test_results.csv");
        std::string header;
        std::getline(f, header);
        CHECK(header == "method,mean_m,median_m,p95_m");
    }

    TEST_CASE("evaluate rejects an empty test set") {
        const mlp::Mlp<float> m = mlp::make_mlp({3, 4, 2}, 1);
        feat::FeatureMatrix features;
        features.count = 2;
        features.dim = 3;
        features.data.assign(6, 0.5f);
        const std::vector<Vec2> truth = {{0, 0}, {1, 1}};
        CHECK_THROWS(evaluate(m, features, {}, truth, "x"));
    }
}
