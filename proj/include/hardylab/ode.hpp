#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

// Dormand-Prince 5(4) adaptive integrator for the 2-component linear systems
// used by the radial profiles. Integrates through a sorted list of sample
// abscissae (increasing or decreasing) and records the state at each.
// Renormalizes the state when it grows past 1e100 (the equations are linear);
// the accumulated log-scale is reported so callers can undo it.
struct OdeSamples {
    std::vector<std::array<double, 2>> y;  // state at each requested abscissa
    std::vector<double> log_scale;         // accumulated ln(rescaling) at each
    bool ok = true;
    std::string message;
};

template <class F>
OdeSamples integrate_linear2(F&& f, double x0, std::array<double, 2> y0,
                             const std::vector<double>& samples,
                             double rtol = 1e-10, double atol = 1e-14) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeSamples out;
    double x = x0;
    std::array<double, 2> y = y0;
    double logs = 0.0;
    const double dir = (samples.empty() || samples.back() >= x0) ? 1.0 : -1.0;
    double h = dir * 1e-4 * std::max(1e-12, std::abs(x0) + 1e-3);

    auto step_to = [&](double target) -> bool {
        int guard = 0;
        while (dir * (target - x) > 0.0) {
            if (++guard > 2000000) return false;
            if (dir * (x + h - target) > 0.0) h = target - x;
            const auto k1 = f(x, y);
            std::array<double, 2> t2{y[0] + h * a21 * k1[0], y[1] + h * a21 * k1[1]};
            const auto k2 = f(x + c2 * h, t2);
            std::array<double, 2> t3{y[0] + h * (a31 * k1[0] + a32 * k2[0]),
                                     y[1] + h * (a31 * k1[1] + a32 * k2[1])};
            const auto k3 = f(x + c3 * h, t3);
            std::array<double, 2> t4{
                y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])};
            const auto k4 = f(x + c4 * h, t4);
            std::array<double, 2> t5{
                y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])};
            const auto k5 = f(x + c5 * h, t5);
            std::array<double, 2> t6{
                y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] +
                            a65 * k5[0]),
                y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] +
                            a65 * k5[1])};
            const auto k6 = f(x + h, t6);
            std::array<double, 2> y5{
                y[0] + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]),
                y[1] + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1])};
            const auto k7 = f(x + h, y5);
            double errn = 0.0;
            for (int c = 0; c < 2; ++c) {
                const double err = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] +
                                        e5 * k5[c] + e6 * k6[c] + e7 * k7[c]);
                const double sc = atol + rtol * std::max(std::abs(y[c]), std::abs(y5[c]));
                errn = std::max(errn, std::abs(err) / sc);
            }
            if (!std::isfinite(errn)) { h *= 0.25; continue; }
            if (errn <= 1.0) {
                x += h;
                y = y5;
                const double amp = std::max(std::abs(y[0]), std::abs(y[1]));
                if (amp > 1e100) {  // renormalize; the system is linear
                    y[0] /= amp;
                    y[1] /= amp;
                    logs += std::log(amp);
                }
            }
            const double fac = 0.9 * std::pow(1.0 / std::max(errn, 1e-10), 0.2);
            h *= std::min(5.0, std::max(0.2, fac));
        }
        return true;
    };

    for (double target : samples) {
        if (!step_to(target)) {
            out.ok = false;
            out.message = "step-count guard exceeded during profile integration";
            break;
        }
        out.y.push_back(y);
        out.log_scale.push_back(logs);
    }
    return out;
}

} // namespace hardylab
