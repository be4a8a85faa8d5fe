#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magshield/fields.hpp"
#include "magshield/integrator.hpp"
#include "magshield/sampling.hpp"
#include "magshield/self_field.hpp"

namespace magshield {

/// Matched pair of runs at velocity cutoffs N and N+1 from one seed.
struct ConvergencePair {
    double cutoff_n = 0.0;
    std::vector<double> times;
    std::vector<double> delta_series;  // max position gap over common particles
    std::vector<double> eta_series;    // max velocity gap
    std::vector<double> sigma_series;  // delta + eta pointwise
    double sup_sigma = 0.0;
    int shell_count = 0;  // extra particles carried only by the N+1 leg
};

struct PairSetup {
    InitialDatum datum;  // cutoff_n here is ignored; run_pair sets it per leg
    int particle_count = 256;
    ExternalFieldConfig field;
    SolverConfig solver;
    StepperConfig stepper;
    int record_cadence = 10;
};

/// Sample one ensemble with cutoff N (admissible for both dynamics), then
/// evolve it twice: the N+1 leg adds shell particles with N <= |v| < N+1
/// drawn from the same stream continuation. Gaps are taken over the common
/// particles at each record time.
ConvergencePair run_pair(const PairSetup& setup, double cutoff_n, std::uint64_t seed);

struct ConvergenceRow {
    double cutoff_n = 0.0;
    double sup_sigma = 0.0;
    double ratio_to_previous = 0.0;  // 0 for the first row
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool monotone = false;
    bool valid = false;
    std::string message;

    std::string format() const;
};

/// Needs at least two pairs; an undersized input is reported in the table,
/// not thrown.
ConvergenceTable convergence_report(const std::vector<ConvergencePair>& pairs);

}  // namespace magshield
