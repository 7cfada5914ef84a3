#include "contgrow/estimators.hpp"

#include "contgrow/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace contgrow {

namespace {

struct Target {
    Point center;
    std::vector<Point> remaining;  // uncovered net points
    double reach = 0.0;            // prefilter radius: |center - event| <= event radius + reach
    HittingSample sample;
};

Target make_target(const Point& x, const ProcessConfig& cfg) {
    Target t;
    t.center = x;
    const double gamma = cfg.F.mean_gamma();
    t.reach = gamma;
    for_each_net_point(Ball{x, gamma}, cfg.resolution(), [&](std::span<const double> p) {
        if (!in_stripe(p, cfg.stripe))
            throw std::invalid_argument(
                "hitting time: target ball leaves the stripe; the target can never be covered "
                "(increase stripe.b)");
        t.remaining.emplace_back(p.begin(), p.end());
        return true;
    });
    return t;
}

void absorb_ball(Target& t, const Ball& b, double time) {
    if (t.sample.censored == false) return;
    const double d = std::sqrt(sq_distance(t.center, b.center));
    if (d > b.radius + t.reach) return;
    std::erase_if(t.remaining, [&](const Point& p) { return contains(b, p); });
    if (t.remaining.empty()) t.sample = {time, false};
}

}  // namespace

std::vector<HittingSample> hitting_profile(const std::vector<double>& distances,
                                           const ProcessConfig& cfg,
                                           std::optional<InfectionHistory>* out_history) {
    if (cfg.mode != GrowthMode::one_type)
        throw std::invalid_argument("hitting_profile: one-type mode required");
    Engine engine(cfg);

    std::vector<Target> targets;
    targets.reserve(distances.size());
    for (double n : distances) {
        Point x(cfg.d, 0.0);
        x[0] = n;
        targets.push_back(make_target(x, cfg));
    }
    for (auto& t : targets) {
        for (const Ball& b : engine.history().initial_1()) absorb_ball(t, b, 0.0);
        for (const Ball& b : engine.history().initial_2()) absorb_ball(t, b, 0.0);
    }

    const auto open = [&] {
        for (const auto& t : targets)
            if (t.sample.censored) return true;
        return false;
    };
    while (open()) {
        if (static_cast<long>(engine.history().outburst_count()) >= cfg.max_events) break;
        const Outburst& o = engine.step();
        const Ball b{o.center, o.radius};
        for (auto& t : targets) absorb_ball(t, b, o.time);
    }
    std::vector<HittingSample> out;
    out.reserve(targets.size());
    for (const auto& t : targets) out.push_back(t.sample);
    if (out_history) *out_history = std::move(engine.history());
    return out;
}

HittingSample hitting_time(const Point& x, const ProcessConfig& cfg) {
    if (cfg.mode != GrowthMode::one_type)
        throw std::invalid_argument("hitting_time: one-type mode required");
    if (x.size() != cfg.d) throw std::invalid_argument("hitting_time: dimension mismatch");
    Engine engine(cfg);
    Target t = make_target(x, cfg);
    for (const Ball& b : engine.history().initial_1()) absorb_ball(t, b, 0.0);
    while (t.sample.censored) {
        if (static_cast<long>(engine.history().outburst_count()) >= cfg.max_events) break;
        const Outburst& o = engine.step();
        absorb_ball(t, Ball{o.center, o.radius}, o.time);
    }
    return t.sample;
}

EstimateResult estimate_mu(const ProcessConfig& cfg, const std::vector<double>& n_list,
                           long replicas, int parallelism) {
    if (n_list.empty()) throw std::invalid_argument("estimate_mu: empty distance list");
    if (replicas < 1) throw std::invalid_argument("estimate_mu: replicas must be >= 1");
    std::vector<double> ns = n_list;
    std::sort(ns.begin(), ns.end());
    const double n_max = ns.back();
    if (!(n_max > 0.0)) throw std::invalid_argument("estimate_mu: distances must be positive");

    const auto profiles =
        parallel_replicas<std::vector<HittingSample>>(replicas, parallelism, [&](long r) {
            ProcessConfig c = cfg;
            c.stream_salt = static_cast<std::uint64_t>(r) + 1;
            return hitting_profile(ns, c);
        });

    std::vector<double> values;
    long censored = 0;
    for (const auto& prof : profiles) {
        if (prof.back().censored) ++censored;
        else values.push_back(prof.back().time / n_max);
    }
    if (values.empty())
        throw ExplosionGuardError("estimate_mu: every replica was censored by max_events");

    EstimateResult out = summarize(values);
    const double censor_rate = static_cast<double>(censored) / static_cast<double>(replicas);
    out.diagnostics["censoring_rate"] = censor_rate;
    out.diagnostics["valid"] = censor_rate <= 0.05 ? 1.0 : 0.0;
    if (!mgf_admissible(cfg.F)) out.diagnostics["mgf_warning"] = 1.0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        std::vector<double> at_n;
        for (const auto& prof : profiles)
            if (!prof[k].censored) at_n.push_back(prof[k].time / ns[k]);
        if (!at_n.empty()) {
            std::ostringstream key;
            key << "mu_at_n=" << ns[k];
            out.diagnostics[key.str()] = summarize(at_n).point;
        }
    }
    return out;
}

double shape_deviation(const InfectionHistory& h, double lambda, double t, double mu_hat,
                       std::size_t directions, double min_t) {
    if (!(t >= min_t))
        throw std::invalid_argument("shape_deviation: t below the configured minimum");
    if (!(mu_hat > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("shape_deviation: lambda and mu_hat must be > 0");
    if (directions < 1) throw std::invalid_argument("shape_deviation: directions must be >= 1");

    const double target = lambda / mu_hat;
    const double tol = h.covering_resolution() / 10.0;
    const double hi0 = norm_sup_all(h, t) + tol;
    double worst = 0.0;
    Point p(h.dim());
    for (const Point& u : spread_directions(h.dim(), directions)) {
        double lo = 0.0, hi = hi0;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < h.dim(); ++i) p[i] = mid * u[i];
            (h.classify(p, t) != PointClass::uninfected ? lo : hi) = mid;
        }
        const double r = 0.5 * (lo + hi);
        worst = std::max(worst, std::abs(r / t - target) / target);
    }
    return worst;
}

bool strongly_infected(const InfectionHistory& h, const Point& x, double t, InfectionType itype) {
    const PointClass want = to_class(itype);
    return for_each_net_point(Ball{x, h.gamma()}, h.covering_resolution(),
                              [&](std::span<const double> p) { return h.classify(p, t) == want; });
}

long count_effective_in_region(const InfectionHistory& h, const Ball& region, double t) {
    long count = 0;
    for (std::size_t i = 0; i < h.outburst_count(); ++i) {
        const Outburst& o = h.outburst(i);
        if (o.time > t) break;
        if (!contains(region, o.center)) continue;
        if (h.effective(i)) ++count;
    }
    return count;
}

CoexistenceProxy coexistence_proxy(const InfectionHistory& h, double horizon, double window,
                                   std::size_t boundary_points) {
    if (!(horizon > window && window > 0.0))
        throw std::invalid_argument("coexistence_proxy: need horizon > window > 0");
    CoexistenceProxy out;
    out.horizon = horizon;
    out.window = window;
    out.rule = "effective outburst in (horizon-window, horizon] and norm_sup(type) at horizon > "
               "2x its value at horizon/2";

    const auto recent_effective = [&](InfectionType itype) {
        for (std::size_t i = h.outburst_count(); i-- > 0;) {
            const Outburst& o = h.outburst(i);
            if (o.time > horizon) continue;
            if (o.time <= horizon - window) return false;
            if (o.itype == itype && h.effective(i)) return true;
        }
        return false;
    };
    const auto alive = [&](InfectionType itype) {
        if (!recent_effective(itype)) return false;
        const double now = norm_sup_type(h, horizon, itype, boundary_points);
        const double half = norm_sup_type(h, horizon / 2.0, itype, boundary_points);
        return now > 2.0 * half;
    };
    out.type1_alive = alive(InfectionType::type1);
    out.type2_alive = h.one_type() ? false : alive(InfectionType::type2);
    return out;
}

void export_results_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "statistic,point,ci_low,ci_high,replicas,config_hash,seed\n";
    char buf[64];
    const auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        os << r.statistic << ',' << fmt(r.est.point) << ',' << fmt(r.est.ci_low) << ','
           << fmt(r.est.ci_high) << ',' << r.est.replicas << ',' << r.config_hash << ','
           << r.seed << '\n';
    }
}

}  // namespace contgrow
