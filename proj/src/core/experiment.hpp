#pragma once

#include <map>
#include <string>

#include "core/engine.hpp"

namespace vdf {

// The campaign setup each archetype is exercised with: which driver, which
// harness, which injection policy. Shared between the experiment driver and
// the acceptance suite so both measure the same thing.
CampaignConfig archetype_fixture_config(BugArchetype a);

struct ExperimentResult {
    std::string name;
    std::string table;  // rendered plain-text table
    std::string csv;    // machine-readable, one row per measurement

    // Headline aggregates for programmatic checks.
    double delay_ratio_median = 0.0;
    double ttb_targeted_median_s = 0.0;
    double ttb_random_median_s = 0.0;
    std::map<std::string, double> ttb_median_s_by_driver;
};

// delay: executions/s with and without delay reduction on the delay-heavy
// fixture, 60 s budget per side.
ExperimentResult run_experiment_delay(int runs, u64 seed);
// irq: time-to-bug on the interrupt-gated fixture, targeted vs random(1,1000).
ExperimentResult run_experiment_irq(int runs, u64 seed);
// ttb: time to first bug for every seeded archetype.
ExperimentResult run_experiment_ttb(int runs, u64 seed);

// Dispatch by name ("delay", "irq", "ttb"); false on unknown name.
bool run_experiment(const std::string& name, int runs, u64 seed,
                    ExperimentResult& out);

}  // namespace vdf
