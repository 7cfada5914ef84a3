#include "contgrow/brw.hpp"

#include "contgrow/runner.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace contgrow {

BrwEngine::BrwEngine(BrwConfig cfg) : cfg_(cfg), base_(cfg_.seed, 0xb0) {
    if (cfg_.d < 1) throw std::invalid_argument("BrwConfig: dimension must be >= 1");
    if (cfg_.population_cap < 1) throw std::invalid_argument("BrwConfig: population_cap >= 1");
    Individual ancestor{0.0, Point(cfg_.d, 0.0), 0.0, std::nullopt, individual_stream(0)};
    ancestor.half_side = cfg_.iid_ancestor ? cfg_.F.sample(ancestor.stream) : cfg_.F.mean_gamma();
    const double rate = cube_rate(ancestor.half_side);
    pop_.individuals_.push_back(std::move(ancestor));
    queue_.push({pop_.individuals_[0].stream.exponential(rate), 0});
}

double BrwEngine::cube_rate(double half_side) const {
    return std::pow(2.0 * half_side, static_cast<double>(cfg_.d));
}

RandomStream BrwEngine::individual_stream(std::size_t index) const {
    return base_.fork((cfg_.stream_namespace << 40) + index);
}

const Individual& BrwEngine::step() {
    if (static_cast<long>(pop_.size()) >= cfg_.population_cap)
        throw BrwCapError("BrwEngine: population cap reached (exponential growth)");
    const auto [t, parent_idx] = queue_.top();
    queue_.pop();

    Individual& parent = pop_.individuals_[parent_idx];
    Individual child{t, Point(cfg_.d), 0.0, parent_idx,
                     individual_stream(pop_.individuals_.size())};
    for (std::size_t i = 0; i < cfg_.d; ++i)
        child.center[i] = parent.center[i] + parent.half_side * parent.stream.uniform(-1.0, 1.0);
    child.half_side = cfg_.F.sample(parent.stream);

    queue_.push({t + parent.stream.exponential(cube_rate(parent.half_side)), parent_idx});
    const std::size_t child_idx = pop_.individuals_.size();
    pop_.individuals_.push_back(std::move(child));
    Individual& stored = pop_.individuals_[child_idx];
    queue_.push({t + stored.stream.exponential(cube_rate(stored.half_side)), child_idx});
    pop_.clock_ = t;
    return stored;
}

bool BrwEngine::run_until(double horizon) {
    for (;;) {
        if (queue_.top().first > horizon) {
            pop_.clock_ = horizon;
            return true;
        }
        if (static_cast<long>(pop_.size()) >= cfg_.population_cap) return false;
        step();
    }
}

double rightmost(const BrwPopulation& pop, double t, std::size_t axis) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Individual& ind : pop.individuals()) {
        if (ind.birth_time > t) break;
        best = std::max(best, ind.center[axis] + ind.half_side);
    }
    return best;
}

double leftmost(const BrwPopulation& pop, double t, std::size_t axis) {
    double best = std::numeric_limits<double>::infinity();
    for (const Individual& ind : pop.individuals()) {
        if (ind.birth_time > t) break;
        best = std::min(best, ind.center[axis] - ind.half_side);
    }
    return best;
}

namespace {

// (2r)^(d-1) (1 - e^(-2 phi r)), stable near phi = 0 via expm1
double projected_kernel(double r, double phi, std::size_t d) {
    return std::pow(2.0 * r, static_cast<double>(d - 1)) * -std::expm1(-2.0 * phi * r);
}

// Int (2r)^(d-1) (1 - e^(-2 phi r)) dF(r) via the inverse-CDF substitution
// u -> r(u) on (0,1); nullopt when divergent.
std::optional<double> r_integral(double phi, const RadiusDistribution& F, std::size_t d) {
    switch (F.family()) {
        case RadiusFamily::deterministic:
            return projected_kernel(F.param1(), phi, d);
        case RadiusFamily::uniform: {
            boost::math::quadrature::tanh_sinh<double> integrator;
            const double a = F.param1(), b = F.param2();
            return integrator.integrate(
                [&](double u) { return projected_kernel(a + (b - a) * u, phi, d); }, 0.0, 1.0,
                1e-12);
        }
        case RadiusFamily::exponential: {
            const double rate = F.param1();
            if (phi < 0.0 && rate + 2.0 * phi <= 0.0) return std::nullopt;
            boost::math::quadrature::tanh_sinh<double> integrator;
            return integrator.integrate(
                [&](double u) {
                    const double r = -std::log1p(-u) / rate;
                    return projected_kernel(r, phi, d);
                },
                0.0, 1.0, 1e-12);
        }
        case RadiusFamily::pareto: {
            if (phi < 0.0) return std::nullopt;  // no exponential moment
            const double scale = F.param1(), shape = F.param2();
            if (static_cast<double>(d - 1) >= shape) return std::nullopt;  // (d-1)-moment missing
            boost::math::quadrature::tanh_sinh<double> integrator;
            return integrator.integrate(
                [&](double u) {
                    const double r = scale * std::pow(1.0 - u, -1.0 / shape);
                    return projected_kernel(r, phi, d);
                },
                0.0, 1.0, 1e-12);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

std::optional<double> laplace_m(double phi, double phihat, const RadiusDistribution& F,
                                std::size_t d) {
    if (phi == 0.0) throw std::invalid_argument("laplace_m: phi must be nonzero");
    if (!(phihat > 0.0)) throw std::invalid_argument("laplace_m: phihat must be > 0");
    const auto integral = r_integral(phi, F, d);
    if (!integral) return std::nullopt;
    return *integral / (phi * phihat);
}

double alpha(double phi, const RadiusDistribution& F, std::size_t d) {
    if (phi == 0.0) throw std::invalid_argument("alpha: phi must be nonzero");
    const auto integral = r_integral(phi, F, d);
    if (!integral) return std::numeric_limits<double>::infinity();
    // m(phi, .) is strictly decreasing with limit 0, so the root of m = 1
    // exists and is unique; bracket it and bisect.
    const auto m = [&](double phihat) { return *integral / (phi * phihat); };
    double hi = 1.0;
    while (m(hi) > 1.0) hi *= 2.0;
    double lo = hi * 0.5;
    while (m(lo) < 1.0 && lo > 1e-300) lo *= 0.5;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (m(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

EstimateResult estimate_zeta(const RadiusDistribution& F, std::size_t d, double horizon,
                             long replicas, std::uint64_t seed, int parallelism,
                             long population_cap, bool iid_ancestor) {
    if (!mgf_admissible(F))
        throw std::invalid_argument("estimate_zeta: radius family lacks the exponential moment");
    if (!(horizon > 0.0) || replicas < 1) throw std::invalid_argument("estimate_zeta: bad args");

    struct Rep {
        double full = 0.0, half = 0.0;
        bool capped = false;
    };
    const auto reps = parallel_replicas<Rep>(replicas, parallelism, [&](long i) {
        BrwConfig cfg(F);
        cfg.d = d;
        cfg.population_cap = population_cap;
        cfg.iid_ancestor = iid_ancestor;
        cfg.seed = seed;
        cfg.stream_namespace = static_cast<std::uint64_t>(i);
        BrwEngine engine(cfg);
        Rep r;
        r.capped = !engine.run_until(horizon);
        r.full = rightmost(engine.population(), horizon, 0) / horizon;
        r.half = rightmost(engine.population(), horizon / 2.0, 0) / (horizon / 2.0);
        return r;
    });
    std::vector<double> full, half;
    long capped = 0;
    for (const auto& r : reps) {
        full.push_back(r.full);
        half.push_back(r.half);
        if (r.capped) ++capped;
    }
    EstimateResult out = summarize(full);
    out.diagnostics["half_horizon"] = summarize(half).point;
    out.diagnostics["capped_replicas"] = static_cast<double>(capped);
    return out;
}

void export_population_jsonl(const BrwPopulation& pop, const BrwConfig& cfg, std::ostream& os) {
    nlohmann::json header;
    header["config"]["d"] = cfg.d;
    header["config"]["radius_family"] = cfg.F.family_name();
    header["config"]["gamma"] = cfg.F.mean_gamma();
    header["config"]["iid_ancestor"] = cfg.iid_ancestor;
    header["config"]["population_cap"] = cfg.population_cap;
    header["seed"] = cfg.seed;
    os << header.dump() << '\n';
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const Individual& ind = pop.individuals()[i];
        nlohmann::json line;
        line["seq"] = i;
        line["time"] = ind.birth_time;
        line["center"] = ind.center;
        line["half_side"] = ind.half_side;
        if (ind.parent) line["parent"] = *ind.parent;
        else line["parent"] = nullptr;
        os << line.dump() << '\n';
    }
}

}  // namespace contgrow
