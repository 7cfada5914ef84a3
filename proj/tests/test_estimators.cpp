#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contgrow/estimators.hpp"
#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace contgrow;

namespace {
ProcessConfig one_type(double lambda = 1.0, std::uint64_t seed = 1) {
    ProcessConfig cfg(RadiusDistribution::deterministic(1.0));
    cfg.mode = GrowthMode::one_type;
    cfg.lambda1 = lambda;
    cfg.lambda2 = 0.0;
    cfg.d = 2;
    cfg.seed = seed;
    return cfg;
}

ProcessConfig two_type(double l1, double l2, std::uint64_t seed) {
    ProcessConfig cfg(RadiusDistribution::deterministic(1.0));
    cfg.mode = GrowthMode::two_type;
    cfg.lambda1 = l1;
    cfg.lambda2 = l2;
    cfg.d = 2;
    cfg.seed = seed;
    return cfg;
}
}  // namespace

TEST_CASE("hitting time at the origin is zero") {
    auto s = hitting_time(Point{0.0, 0.0}, one_type());
    CHECK_FALSE(s.censored);
    CHECK(s.time == 0.0);
}

TEST_CASE("hitting time censors on max_events") {
    auto cfg = one_type(1.0, 5);
    cfg.max_events = 3;
    auto s = hitting_time(Point{25.0, 0.0}, cfg);
    CHECK(s.censored);
}

TEST_CASE("hitting time is nondecreasing under dyadic resolution refinement") {
    for (std::uint64_t seed : {3u, 4u, 5u, 6u}) {
        auto coarse = one_type(1.0, seed);
        coarse.covering_resolution = 0.08;
        auto fine = one_type(1.0, seed);
        fine.covering_resolution = 0.04;  // dyadic: finer net contains the coarse one
        const Point x{4.0, 0.0};
        auto a = hitting_time(x, coarse);
        auto b = hitting_time(x, fine);
        REQUIRE_FALSE(a.censored);
        REQUIRE_FALSE(b.censored);
        CHECK(b.time >= a.time);
    }
}

TEST_CASE("hitting profile: stochastic ordering along the ray") {
    std::vector<double> t4, t8;
    for (int r = 0; r < 40; ++r) {
        auto cfg = one_type(1.0, 100 + r);
        auto prof = hitting_profile({4.0, 8.0}, cfg);
        REQUIRE_FALSE(prof[0].censored);
        REQUIRE_FALSE(prof[1].censored);
        t4.push_back(prof[0].time);
        t8.push_back(prof[1].time);
    }
    auto m4 = testsup::mean_se(t4), m8 = testsup::mean_se(t8);
    CHECK(m4.mean < m8.mean + 3.0 * std::sqrt(m4.se * m4.se + m8.se * m8.se));
    CHECK(m8.mean > m4.mean);  // clear separation at these distances
}

TEST_CASE("hampered hitting requires the target inside the stripe") {
    auto cfg = one_type(1.0, 9);
    cfg.stripe = StripeConstraint{0.5, true};  // gamma-ball around (n,0) pokes out
    CHECK_THROWS_AS(hitting_profile({5.0}, cfg), std::invalid_argument);
}

TEST_CASE("estimate_mu: positive with CI excluding zero; profile diagnostics") {
    auto est = estimate_mu(one_type(1.0, 17), {4.0, 8.0}, 40, 2);
    CHECK(est.ci_low > 0.0);
    CHECK(est.replicas == 40);
    CHECK(est.diagnostics.count("mu_at_n=4") == 1);
    CHECK(est.diagnostics.count("mu_at_n=8") == 1);
    CHECK(est.diagnostics.at("censoring_rate") == 0.0);
    CHECK(est.diagnostics.at("valid") == 1.0);
}

TEST_CASE("estimate_mu: T(2n)/2n within 2 CI-widths of T(n)/n (convergence scale)") {
    auto cfg = one_type(1.0, 19);
    auto est = estimate_mu(cfg, {10.0, 20.0}, 30, 2);
    // the per-n profile means come from the same runs; compare at the CI
    // width of the n=20 point estimate
    std::vector<double> at10, at20;
    for (int r = 0; r < 30; ++r) {
        auto c = cfg;
        c.stream_salt = r + 1;
        auto prof = hitting_profile({10.0, 20.0}, c);
        at10.push_back(prof[0].time / 10.0);
        at20.push_back(prof[1].time / 20.0);
    }
    auto s10 = testsup::mean_se(at10), s20 = testsup::mean_se(at20);
    const double width10 = 2.0 * 1.96 * s10.se;
    CHECK(std::abs(s20.mean - s10.mean) <= 2.0 * std::max(width10, 2.0 * 1.96 * s20.se));
    CHECK(est.diagnostics.at("mu_at_n=10") == doctest::Approx(s10.mean));
}

TEST_CASE("estimate_mu: time scaling, lambda * T-statistics match unit rate") {
    const std::vector<double> ns{6.0};
    auto unit = estimate_mu(one_type(1.0, 23), ns, 60, 2);
    auto half = estimate_mu(one_type(0.5, 24), ns, 60, 2);
    // lambda * T(lambda) is distributed as T(1): scaled CIs overlap
    const double lo = 0.5 * half.ci_low, hi = 0.5 * half.ci_high;
    CHECK(lo <= unit.ci_high);
    CHECK(unit.ci_low <= hi);
}

TEST_CASE("estimate_mu: hampered variant is slower (mu_b >= mu within CI)") {
    auto free = estimate_mu(one_type(1.0, 31), {6.0}, 50, 2);
    auto cfg = one_type(1.0, 32);
    cfg.stripe = StripeConstraint{2.0, true};
    auto hampered = estimate_mu(cfg, {6.0}, 50, 2);
    CHECK(hampered.point >= free.point - free.ci_width());
}

TEST_CASE("shape_deviation: guard and analytic single-ball case") {
    InfectionHistory h(2, {Ball{{0.0, 0.0}, 1.0}}, {}, {}, 1.0, 0.02);
    h.add_outburst(0.5, Point{0.0, 0.0}, 6.0, InfectionType::type1);
    CHECK_THROWS_AS(shape_deviation(h, 1.0, 0.5, 1.0, 8, 1.0), std::invalid_argument);
    // history is exactly B(0,6): r(u) = 6 in every direction
    const double t = 4.0, mu_hat = 1.0;
    const double dev = shape_deviation(h, 1.0, t, mu_hat, 16);
    const double expect = std::abs(6.0 / t - 1.0) / 1.0;
    CHECK(dev == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("shape_deviation: perfect ball of radius lambda/mu * t has deviation ~ 0") {
    InfectionHistory h(2, {Ball{{0.0, 0.0}, 1.0}}, {}, {}, 1.0, 0.02);
    const double t = 5.0, mu_hat = 0.8, lambda = 1.0;
    h.add_outburst(1.0, Point{0.0, 0.0}, lambda / mu_hat * t, InfectionType::type1);
    const double dev = shape_deviation(h, lambda, t, mu_hat, 32);
    CHECK(dev <= 0.01);
}

TEST_CASE("strongly_infected") {
    Engine e(two_type(1.0, 1.0, 3));
    const auto& h = e.history();
    SUBCASE("initial type-2 ball is strongly type 2 at its center") {
        CHECK(strongly_infected(h, Point{0.0, 0.0}, 0.0, InfectionType::type2));
        CHECK_FALSE(strongly_infected(h, Point{0.0, 0.0}, 0.0, InfectionType::type1));
    }
    SUBCASE("strongly infected implies classify at the center") {
        CHECK(h.classify(Point{0.0, 0.0}, 0.0) == PointClass::type2);
    }
    SUBCASE("points near the boundary are not strongly infected") {
        CHECK_FALSE(strongly_infected(h, Point{0.9, 0.0}, 0.0, InfectionType::type2));
    }
}

TEST_CASE("count_effective_in_region: basics and additivity") {
    Engine e(two_type(1.0, 1.0, 41));
    e.run_until(5.0);
    const auto& h = e.history();
    const Ball everything{{0.0, 0.0}, 1000.0};
    SUBCASE("t = 0 gives zero") { CHECK(count_effective_in_region(h, everything, 0.0) == 0); }
    SUBCASE("disjoint far region gives zero") {
        CHECK(count_effective_in_region(h, Ball{{500.0, 0.0}, 1.0}, 5.0) == 0);
    }
    SUBCASE("monotone in t") {
        CHECK(count_effective_in_region(h, everything, 2.0) <=
              count_effective_in_region(h, everything, 5.0));
    }
    SUBCASE("additive over disjoint half-space-ish regions (by centers)") {
        // two disjoint balls partitioning most outburst centers; counts add
        const Ball left{{-6.0, 0.0}, 6.0}, right{{6.0, 0.0}, 6.0};
        const long inl = count_effective_in_region(h, left, 5.0);
        const long inr = count_effective_in_region(h, right, 5.0);
        long joint = 0;
        for (std::size_t i = 0; i < h.outburst_count(); ++i) {
            const auto& o = h.outburst(i);
            if ((contains(left, o.center) || contains(right, o.center)) && h.effective(i))
                ++joint;
        }
        CHECK(inl + inr == joint);
    }
}

TEST_CASE("coexistence proxy: lambda2 = 0 means type 2 never alive") {
    auto cfg = two_type(1.0, 0.0, 55);
    cfg.horizon_time = 8.0;
    Engine e(cfg);
    e.run_until(8.0);
    auto p = coexistence_proxy(e.history(), 8.0, 4.0);
    CHECK_FALSE(p.type2_alive);
    CHECK(p.rule.size() > 0);
    CHECK_THROWS_AS(coexistence_proxy(e.history(), 8.0, 9.0), std::invalid_argument);
}

TEST_CASE("coexistence proxy: one-type histories have no type-2 life") {
    auto cfg = one_type(1.0, 56);
    Engine e(cfg);
    e.run_until(6.0);
    auto p = coexistence_proxy(e.history(), 6.0, 3.0);
    CHECK_FALSE(p.type2_alive);
}

TEST_CASE("results CSV export shape") {
    EstimateResult est;
    est.point = 1.5;
    est.ci_low = 1.25;
    est.ci_high = 1.75;
    est.replicas = 10;
    std::vector<ResultRow> rows{{"mu", est, "00ff00ff00ff00ff", 42}};
    std::ostringstream os;
    export_results_csv(rows, os);
    CHECK(os.str().rfind("statistic,point,ci_low,ci_high,replicas,config_hash,seed\n", 0) == 0);
    CHECK(os.str().find("mu,1.5,1.25,1.75,10,00ff00ff00ff00ff,42") != std::string::npos);
}
