#include "contgrow/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace contgrow {

InfectionHistory::InfectionHistory(std::size_t d, std::vector<Ball> initial_1,
                                   std::vector<Ball> initial_2, StripeConstraint stripe,
                                   double gamma, double covering_resolution, double cell_side)
    : d_(d),
      initial_1_(std::move(initial_1)),
      initial_2_(std::move(initial_2)),
      stripe_(stripe),
      gamma_(gamma),
      covering_resolution_(covering_resolution),
      geom_(d, cell_side > 0.0 ? cell_side : gamma) {
    if (initial_1_.empty()) throw std::invalid_argument("InfectionHistory: initial_1 empty");
    if (!(gamma > 0.0)) throw std::invalid_argument("InfectionHistory: gamma must be > 0");
    if (!(covering_resolution_ > 0.0))
        throw std::invalid_argument("InfectionHistory: covering resolution must be > 0");
    if (stripe_.active && !(stripe_.b > 0.0))
        throw std::invalid_argument("InfectionHistory: active stripe needs b > 0");
    for (const Ball& b : initial_1_) validate_ball(b, d_);
    for (const Ball& b : initial_2_) validate_ball(b, d_);
    // Initial sets of the two types must be disjoint (touching boundaries
    // are fine: the overlap has measure zero).
    for (const Ball& a : initial_1_)
        for (const Ball& b : initial_2_)
            if (std::sqrt(sq_distance(a.center, b.center)) < a.radius + b.radius - 1e-12)
                throw std::invalid_argument("InfectionHistory: initial sets overlap");

    shapes_.reserve(initial_1_.size() + initial_2_.size() + 1024);
    // Interiors of the initial sets are disjoint; only boundary points can
    // lie in both. Those ties resolve to the type-2 ball, so its closed
    // gamma-ball reads fully type 2 (the default initials touch at one
    // point).
    for (const Ball& b : initial_2_) {
        shapes_.push_back({b.center, b.radius, 0.0, PointClass::type2});
        index_shape(static_cast<std::int32_t>(shapes_.size()) - 1);
    }
    for (const Ball& b : initial_1_) {
        shapes_.push_back({b.center, b.radius, 0.0, PointClass::type1});
        index_shape(static_cast<std::int32_t>(shapes_.size()) - 1);
    }
}

void InfectionHistory::index_shape(std::int32_t id) {
    const ShapeRec& s = shapes_[id];
    geom_.for_each_cell_of_ball(Ball{s.center, s.radius},
                                [&](std::uint64_t key) { index_[key].push_back(id); });
}

const Outburst& InfectionHistory::add_outburst(double time, Point center, double radius,
                                               InfectionType itype) {
    if (!(time > last_time_))
        throw std::logic_error("InfectionHistory: outburst times must strictly increase");
    if (!(radius > 0.0)) throw std::invalid_argument("InfectionHistory: radius must be > 0");
    if (center.size() != d_) throw std::invalid_argument("InfectionHistory: dimension mismatch");

    shapes_.push_back({center, radius, time, to_class(itype)});
    index_shape(static_cast<std::int32_t>(shapes_.size()) - 1);

    Outburst o;
    o.time = time;
    o.center = std::move(center);
    o.radius = radius;
    o.itype = itype;
    o.seq = static_cast<std::int64_t>(outbursts_.size()) + 1;
    outbursts_.push_back(std::move(o));
    effective_cache_.push_back(-1);
    last_time_ = time;
    return outbursts_.back();
}

PointClass InfectionHistory::classify(std::span<const double> x, double t) const {
    if (!in_stripe(x, stripe_)) return PointClass::uninfected;
    const auto it = index_.find(geom_.key_of(x));
    if (it == index_.end()) return PointClass::uninfected;
    for (const std::int32_t id : it->second) {
        const ShapeRec& s = shapes_[id];
        if (s.time > t) break;  // ids are chronological
        if (sq_distance(s.center, x) <= s.radius * s.radius) return s.cls;
    }
    return PointClass::uninfected;
}

PointClass InfectionHistory::classify_now(std::span<const double> x) const {
    if (!in_stripe(x, stripe_)) return PointClass::uninfected;
    const auto it = index_.find(geom_.key_of(x));
    if (it == index_.end()) return PointClass::uninfected;
    for (const std::int32_t id : it->second) {
        const ShapeRec& s = shapes_[id];
        if (sq_distance(s.center, x) <= s.radius * s.radius) return s.cls;
    }
    return PointClass::uninfected;
}

bool InfectionHistory::covered_before(std::span<const double> p, std::int32_t shape_id) const {
    const auto it = index_.find(geom_.key_of(p));
    if (it == index_.end()) return false;
    for (const std::int32_t id : it->second) {
        if (id >= shape_id) break;
        const ShapeRec& s = shapes_[id];
        if (sq_distance(s.center, p) <= s.radius * s.radius) return true;
    }
    return false;
}

bool InfectionHistory::effective(std::size_t i) const {
    if (effective_cache_[i] >= 0) return effective_cache_[i] == 1;
    const Outburst& o = outbursts_[i];
    const std::int32_t shape_id =
        static_cast<std::int32_t>(initial_1_.size() + initial_2_.size() + i);
    // Effective iff some net point inside the stripe is uncovered by all
    // earlier shapes. Points outside an active stripe are immune and cannot
    // be gained.
    const bool all_covered =
        for_each_net_point(Ball{o.center, o.radius}, covering_resolution_,
                           [&](std::span<const double> p) {
                               if (!in_stripe(p, stripe_)) return true;
                               return covered_before(p, shape_id);
                           });
    effective_cache_[i] = all_covered ? 0 : 1;
    return !all_covered;
}

void validate(const ProcessConfig& cfg) {
    std::ostringstream errs;
    if (cfg.d < 1) errs << "dimension must be >= 1; ";
    if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0) errs << "rates must be >= 0; ";
    const double l2 = cfg.mode == GrowthMode::one_type ? 0.0 : cfg.lambda2;
    if (!(cfg.lambda1 > 0.0 || l2 > 0.0)) errs << "at least one rate must be > 0; ";
    if (!(cfg.horizon_time > 0.0) || !std::isfinite(cfg.horizon_time))
        errs << "horizon_time must be positive and finite; ";
    if (cfg.max_events < 1) errs << "max_events must be >= 1; ";
    if (cfg.stripe.active && !(cfg.stripe.b > 0.0)) errs << "active stripe needs b > 0; ";
    if (!cfg.F.mgf_exists() && !cfg.allow_inadmissible)
        errs << "radius family lacks the exponential tail moment; set allow_inadmissible to "
                "override; ";
    const std::string s = errs.str();
    if (!s.empty()) throw std::invalid_argument("ProcessConfig: " + s);
}

std::vector<Ball> default_initial_1(const ProcessConfig& cfg) {
    const double g = cfg.F.mean_gamma();
    Point c(cfg.d, 0.0);
    if (cfg.mode == GrowthMode::two_type) c[0] = -2.0 * g;
    return {Ball{std::move(c), g}};
}

std::vector<Ball> default_initial_2(const ProcessConfig& cfg) {
    if (cfg.mode == GrowthMode::one_type) return {};
    const double g = cfg.F.mean_gamma();
    return {Ball{Point(cfg.d, 0.0), g}};
}

namespace {
ProcessConfig validated(ProcessConfig c) {
    validate(c);
    return c;
}
}  // namespace

Engine::Engine(ProcessConfig cfg)
    : cfg_(validated(std::move(cfg))),
      history_(cfg_.d, cfg_.initial_1.empty() ? default_initial_1(cfg_) : cfg_.initial_1,
               cfg_.mode == GrowthMode::one_type
                   ? std::vector<Ball>{}
                   : (cfg_.initial_2.empty() ? default_initial_2(cfg_) : cfg_.initial_2),
               cfg_.stripe, cfg_.F.mean_gamma(), cfg_.resolution(), cfg_.cell()) {
    RandomStream base(cfg_.seed, cfg_.stream_salt);
    if (cfg_.mode == GrowthMode::one_type) {
        chains_.emplace_back(cfg_.lambda1, PointClass::uninfected, cfg_.d, cfg_.cell(),
                             base.fork(1));
        for (const Ball& b : history_.initial_1()) chains_[0].region.add_ball(b);
    } else {
        chains_.emplace_back(cfg_.lambda1, PointClass::type1, cfg_.d, cfg_.cell(), base.fork(1));
        chains_.emplace_back(cfg_.lambda2, PointClass::type2, cfg_.d, cfg_.cell(), base.fork(2));
        for (const Ball& b : history_.initial_1()) chains_[0].region.add_ball(b);
        for (const Ball& b : history_.initial_2()) chains_[1].region.add_ball(b);
    }
}

std::optional<SpaceTimePoint> Engine::next_candidate(Chain& chain, double cap) {
    if (!(chain.rate > 0.0) || chain.region.empty()) return std::nullopt;
    const double mass = chain.rate * chain.region.volume();
    double t = clock_;
    for (long rejections = 0; rejections < cfg_.max_rejections; ++rejections) {
        t += chain.stream.exponential(mass);
        if (t > cap) return std::nullopt;
        chain.region.sample(chain.stream, scratch_);
        const double radius = cfg_.F.sample(chain.stream);
        const double mark = chain.stream.uniform01();
        const PointClass got = history_.classify_now(scratch_);
        const bool ok = chain.want == PointClass::uninfected ? got != PointClass::uninfected
                                                             : got == chain.want;
        if (ok) return SpaceTimePoint{scratch_, t, radius, mark};
    }
    throw RejectionGuardError("Engine: rejection guard tripped; acceptance region has measure ~0 "
                              "relative to its proposals");
}

void Engine::register_ball(const Ball& b, InfectionType t) {
    if (cfg_.mode == GrowthMode::one_type) {
        chains_[0].region.add_ball(b);
    } else {
        chains_[t == InfectionType::type1 ? 0 : 1].region.add_ball(b);
    }
}

std::optional<std::int64_t> Engine::step_until(double horizon) {
    if (static_cast<long>(history_.outburst_count()) >= cfg_.max_events)
        throw ExplosionGuardError(
            "Engine: max_events reached; with an admissible radius law the event times diverge, "
            "so this signals a misconfiguration");

    std::optional<SpaceTimePoint> best;
    std::size_t best_chain = 0;
    for (std::size_t i = 0; i < chains_.size(); ++i) {
        auto cand = next_candidate(chains_[i], horizon);
        if (!cand) continue;
        if (best && cand->time == best->time)
            throw std::logic_error("Engine: exactly tied candidate times; this has probability "
                                   "zero and signals an RNG fault");
        if (!best || cand->time < best->time) {
            best = std::move(cand);
            best_chain = i;
        }
    }
    if (!best) {
        if (std::isfinite(horizon)) clock_ = horizon;
        return std::nullopt;
    }
    const InfectionType itype = (cfg_.mode == GrowthMode::one_type || best_chain == 0)
                                    ? InfectionType::type1
                                    : InfectionType::type2;
    clock_ = best->time;
    const Outburst& o =
        history_.add_outburst(best->time, std::move(best->location), best->radius, itype);
    register_ball(Ball{o.center, o.radius}, itype);
    return o.seq;
}

const Outburst& Engine::step() {
    const auto seq = step_until(std::numeric_limits<double>::infinity());
    if (!seq)
        throw std::logic_error("Engine::step: no active candidate stream (all rates zero or "
                               "empty regions)");
    return history_.outburst(static_cast<std::size_t>(*seq) - 1);
}

bool Engine::run_until() { return run_until(cfg_.horizon_time); }

bool Engine::run_until(double horizon) {
    while (clock_ < horizon) {
        if (static_cast<long>(history_.outburst_count()) >= cfg_.max_events) return false;
        if (!step_until(horizon)) break;
    }
    return true;
}

double norm_sup_all(const InfectionHistory& h, double t) {
    double best = 0.0;
    for (const Ball& b : h.initial_1()) best = std::max(best, norm(b.center) + b.radius);
    for (const Ball& b : h.initial_2()) best = std::max(best, norm(b.center) + b.radius);
    for (const Outburst& o : h.outbursts()) {
        if (o.time > t) break;
        best = std::max(best, norm(o.center) + o.radius);
    }
    return best;
}

namespace {

// Quasi-random unit direction keyed by (salt, k); deterministic so that
// norm_sup_type needs no live random stream.
Point hashed_direction(std::size_t d, std::uint64_t salt, std::uint64_t k) {
    RandomStream rs(0x9c0ffee1u, detail::mix64(salt * 0x100000001b3ULL + k));
    Point v(d);
    double n;
    do {
        for (auto& c : v) c = rs.normal01();
        n = norm(v);
    } while (n < 1e-12);
    for (auto& c : v) c /= n;
    return v;
}

double norm_sup_candidates(const InfectionHistory& h, double t, PointClass want,
                           const Ball& shape, std::uint64_t salt, std::size_t boundary_points) {
    const std::size_t d = shape.center.size();
    double best = -1.0;
    Point p(d);
    const double cnorm = norm(shape.center);
    // outward extreme of the shape
    if (cnorm > 1e-12) {
        for (std::size_t i = 0; i < d; ++i)
            p[i] = shape.center[i] * (1.0 + shape.radius / cnorm);
    } else {
        p = shape.center;
        p[0] += shape.radius;
    }
    if (h.classify(p, t) == want) best = std::max(best, norm(p));
    for (std::size_t k = 0; k < boundary_points; ++k) {
        const Point dir = hashed_direction(d, salt, k);
        for (std::size_t i = 0; i < d; ++i) p[i] = shape.center[i] + shape.radius * dir[i];
        if (h.classify(p, t) == want) best = std::max(best, norm(p));
    }
    return best;
}

}  // namespace

double norm_sup_type(const InfectionHistory& h, double t, InfectionType itype,
                     std::size_t boundary_points) {
    const PointClass want = to_class(itype);
    double best = 0.0;
    std::uint64_t salt = 1;
    const auto& initials = itype == InfectionType::type1 ? h.initial_1() : h.initial_2();
    for (const Ball& b : initials)
        best = std::max(best, norm_sup_candidates(h, t, want, b, salt++, boundary_points));
    for (const Outburst& o : h.outbursts()) {
        if (o.time > t) break;
        if (o.itype != itype) continue;
        best = std::max(best, norm_sup_candidates(h, t, want, Ball{o.center, o.radius},
                                                  0x1000 + static_cast<std::uint64_t>(o.seq),
                                                  boundary_points));
    }
    return best;
}

double norm_star(const InfectionHistory& h, double t) {
    const double res = h.covering_resolution();
    const std::size_t d = h.dim();
    const auto covered = [&](double s) {
        return for_each_net_point(Ball{Point(d, 0.0), s}, res, [&](std::span<const double> p) {
            return h.classify(p, t) != PointClass::uninfected;
        });
    };
    double lo = res;
    if (!covered(lo)) return 0.0;
    double hi = norm_sup_all(h, t) + res;
    if (covered(hi)) return hi;  // cannot happen geometrically, but keeps the invariant
    while (hi - lo > res) {
        const double mid = 0.5 * (lo + hi);
        (covered(mid) ? lo : hi) = mid;
    }
    return lo;
}

void export_events_jsonl(const InfectionHistory& h, const ProcessConfig& cfg, std::ostream& os) {
    nlohmann::json header;
    header["config"]["d"] = cfg.d;
    header["config"]["mode"] = cfg.mode == GrowthMode::one_type ? "one_type" : "two_type";
    header["config"]["lambda1"] = cfg.lambda1;
    header["config"]["lambda2"] = cfg.mode == GrowthMode::one_type ? 0.0 : cfg.lambda2;
    header["config"]["radius_family"] = cfg.F.family_name();
    header["config"]["radius_p1"] = cfg.F.param1();
    header["config"]["radius_p2"] = cfg.F.param2();
    header["config"]["gamma"] = cfg.F.mean_gamma();
    header["config"]["horizon_time"] = cfg.horizon_time;
    header["config"]["max_events"] = cfg.max_events;
    header["config"]["stripe_active"] = cfg.stripe.active;
    header["config"]["stripe_b"] = cfg.stripe.b;
    header["config"]["covering_resolution"] = cfg.resolution();
    header["seed"] = cfg.seed;
    os << header.dump() << '\n';
    for (std::size_t i = 0; i < h.outburst_count(); ++i) {
        const Outburst& o = h.outburst(i);
        nlohmann::json line;
        line["seq"] = o.seq;
        line["time"] = o.time;
        line["type"] = static_cast<int>(o.itype);
        line["center"] = o.center;
        line["radius"] = o.radius;
        line["effective"] = h.effective(i);
        os << line.dump() << '\n';
    }
}

}  // namespace contgrow
