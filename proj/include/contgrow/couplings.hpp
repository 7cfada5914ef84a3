#pragma once

#include "contgrow/brw.hpp"
#include "contgrow/process.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contgrow {

class CertificateError : public std::runtime_error {
public:
    explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

struct CertificateRecord {
    std::int64_t event_seq = 0;
    double time = 0.0;
    std::string check_name;
    bool pass = true;
};

/// A family of processes generated from declared shared streams, with the
/// pathwise inclusion checks recorded per event.
struct CoupledTrace {
    std::map<std::string, InfectionHistory> histories;
    std::optional<BrwPopulation> brw;
    std::vector<std::string> shared_streams;
    std::vector<CertificateRecord> certificates;
    std::map<std::string, double> stats;

    long failures() const {
        long n = 0;
        for (const auto& c : certificates)
            if (!c.pass) ++n;
        return n;
    }
    bool all_passed() const { return failures() == 0; }
    /// Certificate violations signal implementation bugs, not randomness.
    void require_all_passed() const;
};

struct CoupleConfig {
    explicit CoupleConfig(RadiusDistribution f) : F(std::move(f)) {}

    std::size_t d = 2;
    RadiusDistribution F;
    double lambda = 0.5;                               // rate of the weaker type (<= 1)
    std::vector<double> lambdas = {0.25, 0.5, 0.75, 1.0};  // family members
    double horizon = 5.0;
    std::uint64_t seed = 1;
    long max_events = 1000000;
    long audit_points = 1000;  // random audit points per checked event
    double covering_resolution = 0.0;
    double cell_side = 0.0;
    long population_cap = 1000000;
    std::size_t norm_boundary_points = 16;

    double resolution() const { return covering_resolution > 0.0 ? covering_resolution : F.mean_gamma() / 50.0; }
    double cell() const { return cell_side > 0.0 ? cell_side : F.mean_gamma(); }
};

/// Two-type (1, lambda) process and a rate-lambda one-type process sharing
/// the rate-lambda stream (with identical radius attachments) for the type-2
/// and one-type outbursts. Certifies per event that accepted type-2 event
/// points are accepted one-type event points and that audited type-2 points
/// are infected in the one-type history.
CoupledTrace couple_two_type_vs_one_type(const CoupleConfig& cfg);

/// Two independent streams of rates (1 - lambda) and lambda; their union
/// drives the type-1 outbursts of the two-type process, the lambda stream
/// alone drives the one-type process and the type-2 outbursts. Certifies
/// that the one-type region stays inside the two-type union.
CoupledTrace couple_one_type_vs_two_type_union(const CoupleConfig& cfg);

/// Unit-rate one-type process inside the branching cube process: one joint
/// candidate stream realizes the layered stack of processes (a point in a
/// region covered by m cubes belongs to a uniformly chosen one of the first
/// m layers) and layer 0 doubles as the one-type driving process. Certifies
/// that one-type outburst centers lie in the covered region, that audited
/// infected points lie in the cube union and that the population count
/// dominates the event count.
CoupledTrace couple_one_type_vs_brw(const CoupleConfig& cfg);

/// Simultaneous coupling of two-type processes across all lambda in
/// cfg.lambdas: one unit-rate type-1 stream and one unit-rate marked type-2
/// stream; member lambda consumes the type-2 points with mark <= lambda.
/// Certifies the exact nesting of the thinned candidate sets and records
/// norm_sup of the type-1 region per member (reported, not asserted).
CoupledTrace couple_lambda_family(const CoupleConfig& cfg);

/// CSV {event_seq, time, check_name, pass}.
void export_certificates_csv(const CoupledTrace& trace, std::ostream& os);

}  // namespace contgrow
