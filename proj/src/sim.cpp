#include "optbench/sim.hpp"

#include "optbench/errors.hpp"

#include <cmath>

namespace optbench {

MsArSimulation simulate_msar(const MsArParams& params, std::size_t length,
                             std::mt19937_64& rng) {
    const std::size_t a = params.phi[0].size();
    if (params.phi[1].size() != a)
        throw DataError("simulate_msar: AR orders differ between regimes");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    MsArSimulation sim;
    sim.returns.reserve(length);
    sim.regimes.reserve(length);
    const auto pi = params.stationary_distribution();
    int state = unif(rng) < pi[0] ? 0 : 1;
    for (std::size_t t = 0; t < length; ++t) {
        if (t > 0) {
            const double stay = state == 0 ? params.p00 : params.p11;
            if (unif(rng) >= stay) state = 1 - state;
        }
        double m = params.mu[state];
        for (std::size_t i = 1; i <= a && i <= t; ++i)
            m += params.phi[state][i - 1] * sim.returns[t - i];
        sim.returns.push_back(m + std::sqrt(params.sigma2[state]) * gauss(rng));
        sim.regimes.push_back(state);
    }
    return sim;
}

std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec,
                                   std::size_t length, std::mt19937_64& rng,
                                   std::size_t burn_in) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool student = params.eta > 2.0;
    std::student_t_distribution<double> tdist(student ? params.eta : 10.0);
    const double t_scale = student ? std::sqrt((params.eta - 2.0) / params.eta) : 1.0;

    const std::size_t total = length + burn_in;
    std::vector<double> eps(total), sigma2(total), out;
    const double persistence = params.persistence();
    const double uncond = persistence < 1.0
                              ? params.omega / (1.0 - persistence)
                              : params.omega;
    for (std::size_t t = 0; t < total; ++t) {
        double v = params.omega;
        for (int i = 1; i <= spec.p; ++i)
            v += params.alpha[i - 1] *
                 (t >= static_cast<std::size_t>(i) ? eps[t - i] * eps[t - i] : uncond);
        for (int i = 1; i <= spec.o; ++i) {
            const double e = t >= static_cast<std::size_t>(i) ? eps[t - i] : 0.0;
            v += params.gamma[i - 1] * e * e * (e < 0 ? 1.0 : 0.0);
        }
        for (int j = 1; j <= spec.q; ++j)
            v += params.beta[j - 1] *
                 (t >= static_cast<std::size_t>(j) ? sigma2[t - j] : uncond);
        sigma2[t] = v;
        const double z = student ? t_scale * tdist(rng) : gauss(rng);
        eps[t] = std::sqrt(v) * z;
    }
    out.reserve(length);
    for (std::size_t t = burn_in; t < total; ++t) out.push_back(params.mu + eps[t]);
    return out;
}

} // namespace optbench
