#pragma once

#include "vortexstab/types.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace vortexstab {

struct IntegratorOptions {
    double atol = 1e-11;
    double rtol = 1e-11;
    double initial_step = 1e-3;
    double max_step = 0.25;
    long max_steps = 400000;
};

/// Dormand-Prince 5(4) with the standard order-4 continuous extension.
/// Templated on the scalar so the whole-plane variational system can also be
/// run above double precision.
template <class Scalar>
class Dopri5 {
public:
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Rhs = std::function<void(Scalar t, const Vec& y, Vec& dydt)>;

    /// One accepted step's interpolant on [t0, t0+h].
    struct Segment {
        Scalar t0, h;
        Vec c1, c2, c3, c4, c5;

        Vec eval(Scalar t) const {
            Scalar th = (t - t0) / h;
            Scalar th1 = Scalar(1) - th;
            return c1 + th * (c2 + th1 * (c3 + th * (c4 + th1 * c5)));
        }
    };

    /// Integrates from t0 to t1 (either direction); calls observer after each
    /// accepted step.  Returns the final state.
    static Vec integrate(const Rhs& rhs, Scalar t0, Scalar t1, Vec y,
                         const IntegratorOptions& opts,
                         const std::function<void(const Segment&)>& observer = nullptr) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;

        if (t1 == t0) return y;

        auto rat = [](double num, double den) { return Scalar(num) / Scalar(den); };
        const Scalar C2 = rat(1, 5), C3 = rat(3, 10), C4 = rat(4, 5), C5 = rat(8, 9);
        const Scalar A21 = rat(1, 5);
        const Scalar A31 = rat(3, 40), A32 = rat(9, 40);
        const Scalar A41 = rat(44, 45), A42 = rat(-56, 15), A43 = rat(32, 9);
        const Scalar A51 = rat(19372, 6561), A52 = rat(-25360, 2187), A53 = rat(64448, 6561),
                     A54 = rat(-212, 729);
        const Scalar A61 = rat(9017, 3168), A62 = rat(-355, 33), A63 = rat(46732, 5247),
                     A64 = rat(49, 176), A65 = rat(-5103, 18656);
        const Scalar A71 = rat(35, 384), A73 = rat(500, 1113), A74 = rat(125, 192),
                     A75 = rat(-2187, 6784), A76 = rat(11, 84);
        const Scalar E1 = rat(71, 57600), E3 = rat(-71, 16695), E4 = rat(71, 1920),
                     E5 = rat(-17253, 339200), E6 = rat(22, 525), E7 = rat(-1, 40);
        const Scalar D1 = rat(-12715105075.0, 11282082432.0), D3 = rat(87487479700.0, 32700410799.0),
                     D4 = rat(-10690763975.0, 1880347072.0), D5 = rat(701980252875.0, 199316789632.0),
                     D6 = rat(-1453857185.0, 822651844.0), D7 = rat(69997945.0, 29380423.0);

        const Scalar dir = t1 > t0 ? Scalar(1) : Scalar(-1);
        const int n = static_cast<int>(y.size());

        Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
        Scalar t = t0;
        Scalar h = dir * min(Scalar(opts.initial_step), abs(t1 - t0));
        rhs(t, y, k1);

        long steps = 0;
        bool last = false;
        while (!last) {
            if (++steps > opts.max_steps)
                throw NonConvergenceError("integrator: exceeded the step budget");
            if (abs(h) < Scalar(64) * std::numeric_limits<Scalar>::epsilon() * max(abs(t), Scalar(1)))
                throw StepSizeError("integrator: step size underflow");
            if (dir * (t + h - t1) >= Scalar(0)) {
                h = t1 - t;
                last = true;
            }

            ytmp = y + h * (A21 * k1);
            rhs(t + C2 * h, ytmp, k2);
            ytmp = y + h * (A31 * k1 + A32 * k2);
            rhs(t + C3 * h, ytmp, k3);
            ytmp = y + h * (A41 * k1 + A42 * k2 + A43 * k3);
            rhs(t + C4 * h, ytmp, k4);
            ytmp = y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
            rhs(t + C5 * h, ytmp, k5);
            ytmp = y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
            rhs(t + h, ytmp, k6);
            ynew = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            rhs(t + h, ynew, k7);  // FSAL

            Scalar err = Scalar(0);
            for (int i = 0; i < n; ++i) {
                Scalar e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                                E7 * k7[i]);
                Scalar sc = Scalar(opts.atol) + Scalar(opts.rtol) * max(abs(y[i]), abs(ynew[i]));
                err += (e / sc) * (e / sc);
            }
            err = sqrt(err / Scalar(n));

            const bool accepted = err <= Scalar(1);
            if (accepted) {
                if (observer) {
                    Segment seg;
                    seg.t0 = t;
                    seg.h = h;
                    seg.c1 = y;
                    seg.c2 = ynew - y;
                    seg.c3 = h * k1 - seg.c2;
                    seg.c4 = seg.c2 - h * k7 - seg.c3;
                    seg.c5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
                    observer(seg);
                }
                t += h;
                y.swap(ynew);
                k1.swap(k7);
            } else {
                last = false;
            }

            Scalar fac = Scalar(0.9) * pow(max(err, Scalar(1e-10)), Scalar(-0.2));
            fac = min(Scalar(accepted ? 5.0 : 1.0), max(Scalar(0.2), fac));
            h = dir * min(abs(h) * fac, Scalar(opts.max_step));
        }
        return y;
    }
};

}  // namespace vortexstab
