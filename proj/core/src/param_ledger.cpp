#include "magshield/param_ledger.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace magshield {

namespace {

using boost::multiprecision::cpp_int;

cpp_int floor_rational(const rational& r) {
    cpp_int q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

rational rmax(const rational& a, const rational& b) { return a > b ? a : b; }

std::string rstr(const rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

}  // namespace

rational parse_rational(const std::string& text) {
    std::string s = text;
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const cpp_int num(s.substr(0, slash));
        const cpp_int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return rational(num, den);
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return rational(cpp_int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits == "" || digits == "-" || digits == "+")
        throw std::invalid_argument("bad rational literal '" + text + "'");
    cpp_int den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return rational(cpp_int(digits), den);
}

double to_double(const rational& r) { return r.convert_to<double>(); }

void LedgerInput::validate() const {
    if (!(mu > 0)) throw std::domain_error("ledger: mu must be > 0");
    if (!(tau > 1)) throw std::domain_error("ledger: tau must be > 1");
    if (!(gamma > 0 && gamma < rational(2, 3)))
        throw std::domain_error("ledger: gamma must lie in (0, 2/3)");
    if (!(c6 > 0)) throw std::domain_error("ledger: c6 must be > 0");
    if (!(vmax >= 1)) throw std::domain_error("ledger: vmax must be >= 1");
}

bool check_shield_condition(const rational& mu, const rational& tau) {
    if (!(mu > 0)) throw std::domain_error("shield condition: mu must be > 0");
    if (!(tau > 1)) throw std::domain_error("shield condition: tau must be > 1");
    return (mu + 1) / (tau - 1) < rational(4, 9);
}

LedgerReport compute_intervals(const LedgerInput& input) {
    input.validate();
    LedgerReport rep;
    rep.shield_ok = check_shield_condition(input.mu, input.tau);
    rep.weaker_taumu_ok = input.tau > rational(7, 4) * input.mu + rational(11, 4);
    if (!rep.shield_ok)
        throw InfeasibleInput("shield condition (mu+1)/(tau-1) < 4/9 fails for mu=" +
                              rstr(input.mu) + ", tau=" + rstr(input.tau));

    const rational ratio = input.mu / (input.tau - 1);
    rep.gamma_prime = rmax(input.gamma, (input.mu + 1) / (input.tau - 1));

    rep.eta_range = {input.mu / (2 * (input.tau - 1)), rational(2, 3) - ratio};
    rep.eta = rep.eta_range.mid();

    rep.beta_range = {rational(4, 3), 2 - rep.eta - ratio};
    rep.beta = rep.beta_range.mid();

    rep.c = 2 - rep.eta - rep.beta - ratio;
    rep.delta_range = {0, rep.c};
    rep.delta = rep.delta_range.mid();

    rep.xi_range = {0, rational(1, 4) - rational(3, 8) * ratio};
    rep.xi = rep.xi_range.mid();

    const rational two_nu_lo =
        rmax(rmax(3 * rep.gamma_prime + 2, 2 * input.tau / (input.tau - 1)),
             (input.mu + 2) / (input.tau - 1));
    rep.nu_range = {two_nu_lo / 2, 2};
    rep.nu = rep.nu_range.mid();
    rep.zeta = rational(9, 4) * rep.nu;

    rep.q_range = {rational(1, 2), rational(2, 3)};
    rep.q = rep.q_range.mid();

    const struct {
        const char* name;
        const RationalInterval& iv;
    } checks[] = {{"eta", rep.eta_range},   {"beta", rep.beta_range},
                  {"delta", rep.delta_range}, {"xi", rep.xi_range},
                  {"nu", rep.nu_range},     {"q", rep.q_range}};
    for (const auto& chk : checks)
        if (chk.iv.empty()) rep.empty_intervals.push_back(chk.name);
    rep.feasible = rep.empty_intervals.empty();
    return rep;
}

void ladder_schedule(const LedgerInput& input, LedgerReport& report) {
    if (!report.feasible)
        throw InfeasibleInput("ladder_schedule requires a feasible tuple");
    const double v = to_double(input.vmax);
    const rational exponent =
        rational(4, 3) + input.mu / (3 * (input.tau - 1)) + report.eta;
    report.delta1 = 1.0 / (4.0 * to_double(input.c6) * std::pow(v, to_double(exponent)));

    const rational rhs =
        rational(2, 3) + input.mu / (3 * (input.tau - 1)) - report.c;
    // Smallest integer lbar with delta * (lbar - 1) > rhs, exactly.
    const rational r = rhs / report.delta;
    cpp_int m = floor_rational(r) + 1;  // smallest integer strictly above r
    if (m < 0) m = 0;
    report.lbar = static_cast<int>(m) + 1;

    const double g_real = std::pow(v, to_double(report.delta));
    // Relative slack so an exactly-integer power is not floored down a unit.
    const long long g = static_cast<long long>(std::floor(g_real * (1.0 + 1e-13)));
    if (g < 2)
        throw DegenerateLadder("Intg(vmax^delta) = " + std::to_string(g) +
                               " < 2; ladder degenerates at vmax=" + rstr(input.vmax));
    report.g_factor = g;

    report.schedule.clear();
    double d = report.delta1;
    for (int l = 1; l <= report.lbar; ++l) {
        report.schedule.push_back(d);
        d *= static_cast<double>(g);
    }
}

std::string LedgerReport::format() const {
    std::ostringstream os;
    auto iv = [&](const char* name, const RationalInterval& i, const rational& pick) {
        os << "  " << name << " in (" << i.lo << ", " << i.hi << ")";
        if (i.empty())
            os << "  EMPTY\n";
        else
            os << "; chosen " << pick << " = " << to_double(pick) << "\n";
    };
    os << "shield condition: " << (shield_ok ? "holds" : "FAILS") << "\n";
    os << "weaker tau bound tau > (7/4)mu + 11/4: "
       << (weaker_taumu_ok ? "holds" : "fails") << " (reported only)\n";
    os << "gamma' = " << gamma_prime << " = " << to_double(gamma_prime) << "\n";
    iv("eta  ", eta_range, eta);
    iv("beta ", beta_range, beta);
    iv("delta", delta_range, delta);
    iv("xi   ", xi_range, xi);
    iv("nu   ", nu_range, nu);
    iv("q    ", q_range, q);
    os << "  c = " << c << " = " << to_double(c) << "\n";
    os << "  zeta = (9/4) nu = " << zeta << "\n";
    os << "feasible: " << (feasible ? "yes" : "NO") << "\n";
    if (lbar > 0) {
        os << "ladder: g_factor = " << g_factor << ", lbar = " << lbar
           << ", delta1 = " << delta1 << "\n  windows:";
        for (double w : schedule) os << " " << w;
        os << "\n";
    }
    return os.str();
}

std::string LedgerReport::to_json() const {
    std::ostringstream os;
    auto iv = [&](const char* name, const RationalInterval& i, const rational& pick) {
        os << "\"" << name << "\":{\"lo\":\"" << i.lo << "\",\"hi\":\"" << i.hi
           << "\",\"empty\":" << (i.empty() ? "true" : "false") << ",\"chosen\":\"" << pick
           << "\",\"chosen_value\":" << to_double(pick) << "},";
    };
    os.precision(17);
    os << "{\"shield_ok\":" << (shield_ok ? "true" : "false")
       << ",\"weaker_taumu_ok\":" << (weaker_taumu_ok ? "true" : "false")
       << ",\"gamma_prime\":\"" << gamma_prime << "\",";
    iv("eta", eta_range, eta);
    iv("beta", beta_range, beta);
    iv("delta", delta_range, delta);
    iv("xi", xi_range, xi);
    iv("nu", nu_range, nu);
    iv("q", q_range, q);
    os << "\"c\":\"" << c << "\",\"zeta\":\"" << zeta
       << "\",\"feasible\":" << (feasible ? "true" : "false") << ",\"lbar\":" << lbar
       << ",\"g_factor\":" << g_factor << ",\"delta1\":" << delta1 << ",\"schedule\":[";
    for (std::size_t i = 0; i < schedule.size(); ++i)
        os << (i ? "," : "") << schedule[i];
    os << "]}";
    return os.str();
}

}  // namespace magshield
