#include "contgrow/couplings.hpp"

#include "contgrow/union_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace contgrow {

void CoupledTrace::require_all_passed() const {
    const long n = failures();
    if (n == 0) return;
    std::ostringstream os;
    os << "coupling certificate violation (" << n << " failed checks); first:";
    for (const auto& c : certificates)
        if (!c.pass) {
            os << " [seq " << c.event_seq << ", t=" << c.time << ", " << c.check_name << "]";
            break;
        }
    throw CertificateError(os.str());
}

void export_certificates_csv(const CoupledTrace& trace, std::ostream& os) {
    os << "event_seq,time,check_name,pass\n";
    for (const auto& c : trace.certificates)
        os << c.event_seq << ',' << c.time << ',' << c.check_name << ',' << (c.pass ? 1 : 0)
           << '\n';
}

namespace {

// Lazily realized marked space-time Poisson process over a growing cell
// union. Candidates are points of the realized process on the proposal
// region; consumers thin them by their own region tests. After any consumer
// event all sources are invalidated and rescan from the event time, which
// is exact by the memoryless property.
struct Source {
    double rate;
    RandomStream stream;
    CellRegion region;
    const RadiusDistribution* F;
    double local_clock = 0.0;
    std::optional<SpaceTimePoint> pending;
    bool beyond = false;
    Point scratch;

    Source(double r, RandomStream s, std::size_t d, double cell, const RadiusDistribution& f)
        : rate(r), stream(s), region(d, cell), F(&f) {}

    void ensure(double cap) {
        if (pending || beyond) return;
        if (!(rate > 0.0) || region.empty()) {
            beyond = true;
            local_clock = cap;
            return;
        }
        const double t = local_clock + stream.exponential(rate * region.volume());
        if (t > cap) {
            beyond = true;
            local_clock = cap;
            return;
        }
        region.sample(stream, scratch);
        const double radius = F->sample(stream);
        const double mark = stream.uniform01();
        pending = SpaceTimePoint{scratch, t, radius, mark};
    }

    void pop() {
        local_clock = pending->time;
        pending.reset();
    }

    void invalidate(double at) {
        pending.reset();
        beyond = false;
        local_clock = at;
    }
};

/// Index of the source holding the earliest pending candidate, -1 if all
/// are beyond the cap.
int earliest(std::vector<Source*>& sources, double cap) {
    int best = -1;
    for (auto* s : sources) s->ensure(cap);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (!sources[i]->pending) continue;
        if (best < 0 || sources[i]->pending->time < sources[best]->pending->time)
            best = static_cast<int>(i);
    }
    return best;
}

void invalidate_all(std::vector<Source*>& sources, double at) {
    for (auto* s : sources) s->invalidate(at);
}

InfectionHistory make_history(const CoupleConfig& cfg, std::vector<Ball> g1, std::vector<Ball> g2) {
    return InfectionHistory(cfg.d, std::move(g1), std::move(g2), {}, cfg.F.mean_gamma(),
                            cfg.resolution(), cfg.cell());
}

Ball gamma_ball_origin(const CoupleConfig& cfg) {
    return Ball{Point(cfg.d, 0.0), cfg.F.mean_gamma()};
}

Ball gamma_ball_left(const CoupleConfig& cfg) {
    Point c(cfg.d, 0.0);
    c[0] = -2.0 * cfg.F.mean_gamma();
    return Ball{std::move(c), cfg.F.mean_gamma()};
}

void check_event_budget(const InfectionHistory& h, long max_events) {
    if (static_cast<long>(h.outburst_count()) > max_events)
        throw ExplosionGuardError("coupled run exceeded max_events");
}

/// Count audited points that classify `want` in `a` but uninfected in `b`.
long audit_violations(const InfectionHistory& a, PointClass want, const InfectionHistory& b,
                      const std::vector<Ball>& sample_region, long m, RandomStream& rng) {
    long bad = 0;
    for (long i = 0; i < m; ++i) {
        const Point p = sample_uniform_in_union(sample_region, rng);
        if (a.classify_now(p) != want) continue;
        if (b.classify_now(p) == PointClass::uninfected) ++bad;
    }
    return bad;
}

}  // namespace

CoupledTrace couple_two_type_vs_one_type(const CoupleConfig& cfg) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
        throw std::invalid_argument("couple_two_type_vs_one_type: lambda must be in [0,1]");
    RandomStream base(cfg.seed, 0xC1);
    RandomStream audit_rng = base.fork(3);

    CoupledTrace trace;
    trace.shared_streams = {
        "N1: rate 1, drives two_type type-1 outbursts",
        "N2: rate lambda, shared by the one_type outbursts and the two_type type-2 outbursts "
        "with identical radius attachments"};
    auto& two = trace.histories.emplace("two_type", make_history(cfg, {gamma_ball_left(cfg)},
                                                                 {gamma_ball_origin(cfg)}))
                    .first->second;
    auto& one =
        trace.histories.emplace("one_type", make_history(cfg, {gamma_ball_origin(cfg)}, {}))
            .first->second;

    Source n1(1.0, base.fork(1), cfg.d, cfg.cell(), cfg.F);
    Source n2(cfg.lambda, base.fork(2), cfg.d, cfg.cell(), cfg.F);
    for (const Ball& b : two.initial_1()) n1.region.add_ball(b);
    n2.region.add_ball(gamma_ball_origin(cfg));  // Gamma2 = one-type initial, shared

    std::vector<Ball> two_t2_shapes{gamma_ball_origin(cfg)};  // audit sampling region

    std::vector<Source*> sources{&n1, &n2};
    std::int64_t seq = 0;
    for (;;) {
        const int which = earliest(sources, cfg.horizon);
        if (which < 0) break;
        Source& src = *sources[static_cast<std::size_t>(which)];
        const SpaceTimePoint ev = *src.pending;
        src.pop();

        bool accepted = false;
        if (which == 0) {
            if (two.classify_now(ev.location) == PointClass::type1) {
                two.add_outburst(ev.time, ev.location, ev.radius, InfectionType::type1);
                n1.region.add_ball(Ball{ev.location, ev.radius});
                accepted = true;
            }
        } else {
            const bool acc_two = two.classify_now(ev.location) == PointClass::type2;
            const bool acc_one = one.classify_now(ev.location) != PointClass::uninfected;
            if (acc_two || acc_one) {
                accepted = true;
                // the coupling invariant: a type-2 event point is a one-type
                // event point
                trace.certificates.push_back(
                    {seq + 1, ev.time, "subset_event_inclusion", !acc_two || acc_one});
                if (acc_two) {
                    two.add_outburst(ev.time, ev.location, ev.radius, InfectionType::type2);
                    two_t2_shapes.push_back(Ball{ev.location, ev.radius});
                }
                if (acc_one) one.add_outburst(ev.time, ev.location, ev.radius, InfectionType::type1);
                n2.region.add_ball(Ball{ev.location, ev.radius});
            }
        }
        if (accepted) {
            ++seq;
            const long bad = audit_violations(two, PointClass::type2, one, two_t2_shapes,
                                              cfg.audit_points, audit_rng);
            trace.certificates.push_back({seq, ev.time, "subset_point_audit", bad == 0});
            invalidate_all(sources, ev.time);
            check_event_budget(two, cfg.max_events);
            check_event_budget(one, cfg.max_events);
        }
    }
    trace.stats["two_type_events"] = static_cast<double>(two.outburst_count());
    trace.stats["one_type_events"] = static_cast<double>(one.outburst_count());
    return trace;
}

CoupledTrace couple_one_type_vs_two_type_union(const CoupleConfig& cfg) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
        throw std::invalid_argument("couple_one_type_vs_two_type_union: lambda must be in [0,1]");
    RandomStream base(cfg.seed, 0xC2);
    RandomStream audit_rng = base.fork(3);

    CoupledTrace trace;
    trace.shared_streams = {
        "N1: rate 1-lambda, drives two_type type-1 outbursts only",
        "N2: rate lambda, drives the one_type outbursts, the two_type type-2 outbursts and "
        "(jointly with N1) the two_type type-1 outbursts"};
    auto& two = trace.histories.emplace("two_type", make_history(cfg, {gamma_ball_left(cfg)},
                                                                 {gamma_ball_origin(cfg)}))
                    .first->second;
    auto& one =
        trace.histories.emplace("one_type", make_history(cfg, {gamma_ball_origin(cfg)}, {}))
            .first->second;

    Source na(1.0 - cfg.lambda, base.fork(1), cfg.d, cfg.cell(), cfg.F);
    Source nb(cfg.lambda, base.fork(2), cfg.d, cfg.cell(), cfg.F);
    // N1 only ever needs to cover the type-1 region; N2 covers everything.
    na.region.add_ball(gamma_ball_left(cfg));
    nb.region.add_ball(gamma_ball_left(cfg));
    nb.region.add_ball(gamma_ball_origin(cfg));

    std::vector<Ball> one_shapes{gamma_ball_origin(cfg)};

    std::vector<Source*> sources{&na, &nb};
    std::int64_t seq = 0;
    for (;;) {
        const int which = earliest(sources, cfg.horizon);
        if (which < 0) break;
        Source& src = *sources[static_cast<std::size_t>(which)];
        const SpaceTimePoint ev = *src.pending;
        src.pop();

        const PointClass ctwo = two.classify_now(ev.location);
        const bool acc_t1 = ctwo == PointClass::type1;
        const bool acc_t2 = which == 1 && ctwo == PointClass::type2;
        const bool acc_one = which == 1 && one.classify_now(ev.location) != PointClass::uninfected;
        if (!(acc_t1 || acc_t2 || acc_one)) continue;
        ++seq;

        if (which == 1)
            trace.certificates.push_back(
                {seq, ev.time, "union_event_inclusion", !acc_one || acc_t1 || acc_t2});
        if (acc_t1) {
            two.add_outburst(ev.time, ev.location, ev.radius, InfectionType::type1);
            na.region.add_ball(Ball{ev.location, ev.radius});
            nb.region.add_ball(Ball{ev.location, ev.radius});
        }
        if (acc_t2) {
            two.add_outburst(ev.time, ev.location, ev.radius, InfectionType::type2);
            nb.region.add_ball(Ball{ev.location, ev.radius});
        }
        if (acc_one) {
            one.add_outburst(ev.time, ev.location, ev.radius, InfectionType::type1);
            nb.region.add_ball(Ball{ev.location, ev.radius});
            one_shapes.push_back(Ball{ev.location, ev.radius});
        }
        const long bad = audit_violations(one, PointClass::type1, two, one_shapes,
                                          cfg.audit_points, audit_rng);
        trace.certificates.push_back({seq, ev.time, "union_point_audit", bad == 0});

        invalidate_all(sources, ev.time);
        check_event_budget(two, cfg.max_events);
        check_event_budget(one, cfg.max_events);
    }
    trace.stats["two_type_events"] = static_cast<double>(two.outburst_count());
    trace.stats["one_type_events"] = static_cast<double>(one.outburst_count());
    return trace;
}

CoupledTrace couple_one_type_vs_brw(const CoupleConfig& cfg) {
    RandomStream base(cfg.seed, 0xC3);
    RandomStream joint = base.fork(1);
    RandomStream audit_rng = base.fork(3);

    CoupledTrace trace;
    trace.shared_streams = {
        "N0..Nk: layered unit-rate stack realized by one joint stream; a point covered by m "
        "cubes belongs to a uniform layer in {0..m-1}; layer 0 drives the one_type process"};
    auto& one =
        trace.histories.emplace("one_type", make_history(cfg, {gamma_ball_origin(cfg)}, {}))
            .first->second;

    const double gamma = cfg.F.mean_gamma();
    BrwPopulation pop;
    pop.append(Individual{0.0, Point(cfg.d, 0.0), gamma, std::nullopt, joint.fork(0)});

    // cube bookkeeping: prefix-sum volumes for proportional picks, a grid
    // index for multiplicity counts
    std::vector<Cube> cubes{Cube{Point(cfg.d, 0.0), gamma}};
    std::vector<double> cum_vol{std::pow(2.0 * gamma, static_cast<double>(cfg.d))};
    GridGeometry grid(cfg.d, 2.0 * gamma);
    std::unordered_map<std::uint64_t, std::vector<std::int32_t>> cube_index;
    grid.for_each_cell_of_cube(cubes[0], [&](std::uint64_t k) { cube_index[k].push_back(0); });

    const auto multiplicity = [&](std::span<const double> x) {
        long m = 0;
        const auto it = cube_index.find(grid.key_of(x));
        if (it == cube_index.end()) return m;
        for (const std::int32_t id : it->second)
            if (contains(cubes[static_cast<std::size_t>(id)], x)) ++m;
        return m;
    };

    std::vector<Ball> one_shapes{gamma_ball_origin(cfg)};
    std::int64_t seq = 0;
    double clock = 0.0;
    Point x(cfg.d);
    for (;;) {
        if (static_cast<long>(pop.size()) >= cfg.population_cap) {
            trace.stats["truncated"] = 1.0;
            break;
        }
        clock += joint.exponential(cum_vol.back());
        if (clock > cfg.horizon) break;
        // parent cube proportional to volume, location uniform inside it
        const double u = joint.uniform01() * cum_vol.back();
        const std::size_t parent = static_cast<std::size_t>(
            std::upper_bound(cum_vol.begin(), cum_vol.end(), u) - cum_vol.begin());
        const Cube& pc = cubes[std::min(parent, cubes.size() - 1)];
        for (std::size_t i = 0; i < cfg.d; ++i)
            x[i] = pc.center[i] + pc.half_side * joint.uniform(-1.0, 1.0);
        const double radius = cfg.F.sample(joint);
        const long m = multiplicity(x);
        const long layer = static_cast<long>(joint.uniform_index(static_cast<std::uint64_t>(m)));

        ++seq;
        // every candidate is a birth of the cube process
        pop.append(Individual{clock, x, radius, std::min(parent, cubes.size() - 1),
                              joint.fork(static_cast<std::uint64_t>(seq))});
        cubes.push_back(Cube{x, radius});
        cum_vol.push_back(cum_vol.back() + std::pow(2.0 * radius, static_cast<double>(cfg.d)));
        grid.for_each_cell_of_cube(cubes.back(), [&](std::uint64_t k) {
            cube_index[k].push_back(static_cast<std::int32_t>(cubes.size()) - 1);
        });

        // layer 0 doubles as the one-type driving process
        if (layer == 0 && one.classify_now(x) != PointClass::uninfected) {
            one.add_outburst(clock, x, radius, InfectionType::type1);
            one_shapes.push_back(Ball{x, radius});
            trace.certificates.push_back(
                {seq, clock, "domination_center_covered", multiplicity(x) >= 1});
            long bad = 0;
            for (long i = 0; i < cfg.audit_points; ++i) {
                const Point p = sample_uniform_in_union(one_shapes, audit_rng);
                if (one.classify_now(p) == PointClass::uninfected) continue;
                if (multiplicity(p) < 1) ++bad;
            }
            trace.certificates.push_back({seq, clock, "domination_point_audit", bad == 0});
            trace.certificates.push_back(
                {seq, clock, "domination_count",
                 pop.size() >= one.outburst_count()});
            check_event_budget(one, cfg.max_events);
        }
    }
    pop.advance_clock(std::min(clock, cfg.horizon));
    trace.stats["brw_population"] = static_cast<double>(pop.size());
    trace.stats["one_type_events"] = static_cast<double>(one.outburst_count());
    trace.brw = std::move(pop);
    return trace;
}

CoupledTrace couple_lambda_family(const CoupleConfig& cfg) {
    if (cfg.lambdas.empty())
        throw std::invalid_argument("couple_lambda_family: empty lambda list");
    std::vector<double> lambdas = cfg.lambdas;
    std::sort(lambdas.begin(), lambdas.end());
    for (double l : lambdas)
        if (l < 0.0 || l > 1.0)
            throw std::invalid_argument("couple_lambda_family: lambdas must lie in [0,1]");

    RandomStream base(cfg.seed, 0xC4);
    CoupledTrace trace;
    trace.shared_streams = {"N1: rate 1, drives type-1 outbursts of every member",
                            "N2: rate 1 with uniform marks; member lambda uses the points with "
                            "mark <= lambda for its type-2 outbursts"};

    std::vector<InfectionHistory*> members;
    for (double l : lambdas) {
        std::ostringstream name;
        name << "lambda_" << l;
        auto& h = trace.histories
                      .emplace(name.str(), make_history(cfg, {gamma_ball_left(cfg)},
                                                        {gamma_ball_origin(cfg)}))
                      .first->second;
        members.push_back(&h);
    }

    Source n1(1.0, base.fork(1), cfg.d, cfg.cell(), cfg.F);
    Source n2(1.0, base.fork(2), cfg.d, cfg.cell(), cfg.F);
    n1.region.add_ball(gamma_ball_left(cfg));
    n2.region.add_ball(gamma_ball_origin(cfg));

    std::vector<Source*> sources{&n1, &n2};
    std::int64_t seq = 0;
    for (;;) {
        const int which = earliest(sources, cfg.horizon);
        if (which < 0) break;
        Source& src = *sources[static_cast<std::size_t>(which)];
        const SpaceTimePoint ev = *src.pending;
        src.pop();

        bool accepted = false;
        if (which == 0) {
            for (auto* h : members)
                if (h->classify_now(ev.location) == PointClass::type1) {
                    h->add_outburst(ev.time, ev.location, ev.radius, InfectionType::type1);
                    accepted = true;
                }
            if (accepted) n1.region.add_ball(Ball{ev.location, ev.radius});
        } else {
            // nesting of the thinned candidate sets is deterministic in the
            // shared mark; assert it pathwise anyway
            bool nested = true;
            for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
                if (ev.uniform_mark <= lambdas[i] && ev.uniform_mark > lambdas[i + 1])
                    nested = false;
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (ev.uniform_mark > lambdas[i]) continue;
                if (members[i]->classify_now(ev.location) == PointClass::type2) {
                    members[i]->add_outburst(ev.time, ev.location, ev.radius,
                                             InfectionType::type2);
                    accepted = true;
                }
            }
            if (accepted) {
                ++seq;
                n2.region.add_ball(Ball{ev.location, ev.radius});
                trace.certificates.push_back({seq, ev.time, "family_mark_nesting", nested});
            }
        }
        if (accepted) {
            invalidate_all(sources, ev.time);
            for (auto* h : members) check_event_budget(*h, cfg.max_events);
        }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        std::ostringstream key;
        key << "norm_sup_type1@lambda_" << lambdas[i];
        trace.stats[key.str()] =
            norm_sup_type(*members[i], cfg.horizon, InfectionType::type1,
                          cfg.norm_boundary_points);
    }
    return trace;
}

}  // namespace contgrow
