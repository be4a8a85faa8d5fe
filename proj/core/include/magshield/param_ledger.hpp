#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "magshield/errors.hpp"

namespace magshield {

using rational = boost::multiprecision::cpp_rational;

/// Parse "3", "-1/2" or "5.5" into an exact rational.
rational parse_rational(const std::string& text);

double to_double(const rational& r);

struct RationalInterval {
    rational lo;
    rational hi;
    bool empty() const { return lo >= hi; }
    rational mid() const { return (lo + hi) / 2; }
};

struct LedgerInput {
    rational mu;
    rational tau;
    rational gamma = rational(3, 5);  // declared default, existence-level constant
    rational c6 = 1;
    rational vmax = 10;

    void validate() const;
};

struct LedgerReport {
    bool shield_ok = false;
    bool weaker_taumu_ok = false;  // tau > (7/4) mu + 11/4, reported only
    rational gamma_prime;
    RationalInterval eta_range, beta_range, delta_range, xi_range, nu_range, q_range;
    bool feasible = false;
    std::vector<std::string> empty_intervals;

    // Chosen tuple: interval midpoints, picked in dependency order.
    rational eta, beta, delta, xi, nu, zeta, q;
    rational c;  // c = 2 - eta - beta - mu/(tau - 1)

    // Ladder schedule (filled by ladder_schedule).
    int lbar = 0;
    double delta1 = 0.0;
    long long g_factor = 0;
    std::vector<double> schedule;

    std::string format() const;
    std::string to_json() const;
};

/// Strict inequality (mu + 1)/(tau - 1) < 4/9.
bool check_shield_condition(const rational& mu, const rational& tau);

/// Interval system and chosen tuple. Throws InfeasibleInput when the
/// shield condition fails.
LedgerReport compute_intervals(const LedgerInput& input);

/// Fill lbar, delta1, g_factor and the window sequence on a feasible
/// report. Throws DegenerateLadder when Intg(vmax^delta) < 2.
void ladder_schedule(const LedgerInput& input, LedgerReport& report);

}  // namespace magshield
