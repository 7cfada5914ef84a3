#pragma once

#include "contgrow/config.hpp"

#include <string>

namespace contgrow {

/// Exit codes of run_experiment: 0 success, 2 certificate failure, 3 guard
/// trip (explosion / rejection guard / invalid censoring), 4 I/O failure.
struct ExperimentStatus {
    int exit_code = 0;
    std::string message;
};

/// Execute the experiment across its replicas on index-derived substreams
/// and write events.jsonl (first replica), results.csv, certificates.csv
/// (couple-check only) and manifest.txt into out_dir.
ExperimentStatus run_experiment(const ExperimentSpec& spec, int parallelism,
                                const std::string& out_dir);

}  // namespace contgrow
