#pragma once

#include "contgrow/estimate.hpp"
#include "contgrow/process.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace contgrow {

/// Hitting time of one run: the first event time at which the gamma-ball
/// around the target is entirely infected; censored when max_events ran out
/// first.
struct HittingSample {
    double time = 0.0;
    bool censored = true;
};

/// T(x): run a one-type process (rate cfg.lambda1, started from B(0,gamma)
/// unless cfg supplies initials) until the epsilon-net of B(x, gamma) is
/// covered. cfg.mode must be one_type; cfg.stripe gives the hampered
/// variant. Active stripes must contain the whole target ball.
HittingSample hitting_time(const Point& x, const ProcessConfig& cfg);

/// One run, several targets n*e1 for n in distances; component i of the
/// result matches distances[i]. When out_history is given it receives the
/// run's full event history.
std::vector<HittingSample> hitting_profile(const std::vector<double>& distances,
                                           const ProcessConfig& cfg,
                                           std::optional<InfectionHistory>* out_history = nullptr);

/// Mean of T(n_max * e1)/n_max over replicas with a 95% CI. Replica k runs
/// on stream salt k+1 of cfg.seed. Diagnostics: "mu_at_n=<n>" profile
/// means, "censoring_rate", "valid" (1 when censoring <= 5%), and
/// "mgf_warning" when F lacks the exponential moment.
EstimateResult estimate_mu(const ProcessConfig& cfg, const std::vector<double>& n_list,
                           long replicas, int parallelism = 1);

/// Relative radial deviation of the shape at time t from the ball of radius
/// lambda/mu_hat: max over `directions` unit vectors of
/// |r(u)/t - lambda/mu_hat| / (lambda/mu_hat), where r(u) is the radial
/// extent of the infected set along u found by ray bisection (tolerance =
/// covering resolution / 10). Requires t >= min_t.
double shape_deviation(const InfectionHistory& h, double lambda, double t, double mu_hat,
                       std::size_t directions, double min_t = 1.0);

/// Whether the whole gamma-ball around x is type-i infected at time t
/// (epsilon-net test).
bool strongly_infected(const InfectionHistory& h, const Point& x, double t, InfectionType itype);

/// Number of effective outbursts with time <= t and center in the region.
long count_effective_in_region(const InfectionHistory& h, const Ball& region, double t);

/// Documented finite-horizon survival surrogate: type i is alive iff it
/// made at least one effective outburst in (horizon - window, horizon] and
/// its norm_sup estimate at the horizon exceeds twice the value at
/// horizon/2. Never claimed to decide the asymptotic survival event.
struct CoexistenceProxy {
    double horizon = 0.0;
    double window = 0.0;
    bool type1_alive = false;
    bool type2_alive = false;
    std::string rule;
};

CoexistenceProxy coexistence_proxy(const InfectionHistory& h, double horizon, double window,
                                   std::size_t boundary_points = 16);

/// One row of the results export.
struct ResultRow {
    std::string statistic;
    EstimateResult est;
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// CSV {statistic, point, ci_low, ci_high, replicas, config_hash, seed}.
void export_results_csv(const std::vector<ResultRow>& rows, std::ostream& os);

}  // namespace contgrow
