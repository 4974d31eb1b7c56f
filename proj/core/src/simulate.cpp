#include "kcontract/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

namespace kcontract {

using nlohmann::json;

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b(5th) - b(4th): the embedded error estimate weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Eigen::VectorXd Trajectory::sample(double t) const {
    if (times.empty()) throw InvalidArgument("Trajectory::sample: empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double t0 = times[i], t1 = times[i + 1], h = t1 - t0;
    const double s = (t - t0) / h;
    // cubic Hermite with stored endpoint derivatives
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * states[i] + (h10 * h) * derivs[i] + h01 * states[i + 1] +
           (h11 * h) * derivs[i + 1];
}

std::string Trajectory::to_csv() const {
    std::ostringstream out;
    out.precision(15);
    out << 't';
    const int n = states.empty() ? 0 : static_cast<int>(states.front().size());
    for (int j = 1; j <= n; ++j) out << ",x" << j;
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << times[i];
        for (int j = 0; j < n; ++j) out << ',' << states[i](j);
        out << '\n';
    }
    return out.str();
}

Trajectory integrate(const VectorFieldModel& model, const Eigen::VectorXd& x0, double t0,
                     double t_end, const SolverSettings& settings) {
    if (t_end <= t0) throw InvalidArgument("integrate: t_end must exceed t0");
    if (static_cast<int>(x0.size()) != model.dim)
        throw InvalidArgument("integrate: x0 dimension mismatch");

    Trajectory traj;
    traj.model_id = model.id;
    traj.x0 = x0;
    traj.settings = settings;

    double t = t0;
    Eigen::VectorXd y = x0;
    Eigen::VectorXd k1 = model.eval(t, y);
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivs.push_back(k1);

    bool inside = model.domain.contains(y);
    if (!inside) traj.events.push_back({t, "domain_exit"});

    const bool fixed = settings.fixed_step > 0;
    double h;
    if (fixed) {
        h = settings.fixed_step;
    } else if (settings.initial_step > 0) {
        h = settings.initial_step;
    } else {
        h = 0.01 * (1.0 + y.cwiseAbs().maxCoeff()) / (1.0 + k1.cwiseAbs().maxCoeff());
    }
    if (settings.max_step > 0) h = std::min(h, settings.max_step);
    h = std::min(h, t_end - t0);

    const int n = model.dim;
    Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n);

    long long steps = 0;
    while (t < t_end) {
        if (++steps > settings.max_steps) throw IntegrationError("integrate: step budget exceeded");
        h = std::min(h, t_end - t);
        if (!fixed && h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError("integrate: step underflow at t=" + std::to_string(t));

        k2 = model.eval(t + c2 * h, y + h * (a21 * k1));
        k3 = model.eval(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = model.eval(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = model.eval(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = model.eval(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = model.eval(t + h, ynew);

        bool accept = true;
        if (!fixed) {
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double sc = settings.abs_tol +
                                  settings.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                const double r = err(i) / sc;
                acc += r * r;
            }
            const double enorm = std::sqrt(acc / n);
            accept = enorm <= 1.0;
            double factor = 0.9 * std::pow(std::max(enorm, 1e-10), -0.2);
            factor = std::clamp(factor, 0.2, 5.0);
            double hnew = h * factor;
            if (settings.max_step > 0) hnew = std::min(hnew, settings.max_step);
            if (accept) {
                t += h;
                y = ynew;
                k1 = k7;  // FSAL
                traj.times.push_back(t);
                traj.states.push_back(y);
                traj.derivs.push_back(k1);
                const bool now_inside = model.domain.contains(y);
                if (inside && !now_inside) traj.events.push_back({t, "domain_exit"});
                if (!inside && now_inside) traj.events.push_back({t, "domain_reenter"});
                inside = now_inside;
            }
            h = hnew;
        } else {
            t += h;
            y = ynew;
            k1 = k7;
            traj.times.push_back(t);
            traj.states.push_back(y);
            traj.derivs.push_back(k1);
        }
    }
    return traj;
}

json AsymptoticsReport::to_json() const {
    json j;
    j["verdict"] = verdict;
    if (equilibrium) {
        json e = json::array();
        for (Eigen::Index i = 0; i < equilibrium->size(); ++i) e.push_back((*equilibrium)(i));
        j["equilibrium"] = e;
    }
    if (period) j["period"] = *period;
    j["residuals"] = residuals;
    return j;
}

AsymptoticsReport detect_equilibrium(const Trajectory& traj, const VectorFieldModel& model,
                                     double tol, double window_fraction) {
    if (traj.times.size() < 2) throw InvalidArgument("detect_equilibrium: trajectory too short");
    const double H = traj.t_end() - traj.t_begin();
    const double w0 = traj.t_end() - window_fraction * H;
    if (w0 < traj.t_begin() - 1e-12)
        throw InvalidArgument("detect_equilibrium: window longer than trajectory");

    double sup_f = 0.0;
    Eigen::VectorXd lo = traj.states.back(), hi = traj.states.back();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < w0) continue;
        sup_f = std::max(sup_f, model.eval(traj.times[i], traj.states[i]).cwiseAbs().maxCoeff());
        lo = lo.cwiseMin(traj.states[i]);
        hi = hi.cwiseMax(traj.states[i]);
    }
    const double diameter = (hi - lo).maxCoeff();

    AsymptoticsReport rep;
    rep.residuals["sup_field_norm"] = sup_f;
    rep.residuals["state_diameter"] = diameter;
    if (sup_f <= tol && diameter <= tol) {
        rep.verdict = "converged_to_equilibrium";
        rep.equilibrium = traj.states.back();
    } else {
        rep.verdict = "undetermined";
    }
    return rep;
}

namespace {

// sup-mismatch between x(t) and x(t + T) over the trailing comparison window,
// evaluated on the uniform resampling by linear interpolation.
double period_mismatch(const std::vector<double>& ts, const std::vector<Eigen::VectorXd>& xs,
                       double T, double win_len) {
    const double t_end = ts.back();
    const double t_lo = t_end - win_len - T;
    const double dt = ts[1] - ts[0];
    const auto interp = [&](double t) -> Eigen::VectorXd {
        const double pos = (t - ts.front()) / dt;
        const auto i = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), ts.size() - 2);
        const double s = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
        return (1 - s) * xs[i] + s * xs[i + 1];
    };
    double worst = 0.0;
    const int probes = 512;
    for (int j = 0; j <= probes; ++j) {
        const double t = t_lo + win_len * j / probes;
        worst = std::max(worst, (interp(t + T) - interp(t)).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

AsymptoticsReport detect_period(const Trajectory& traj, const PeriodSettings& settings) {
    if (traj.times.size() < 8) throw InvalidArgument("detect_period: trajectory too short");
    const double H = traj.t_end() - traj.t_begin();
    const int N = std::max(settings.resample_points, 16);
    std::vector<double> ts(static_cast<std::size_t>(N));
    std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        ts[static_cast<std::size_t>(i)] = traj.t_begin() + H * i / (N - 1);
        xs[static_cast<std::size_t>(i)] = traj.sample(ts[static_cast<std::size_t>(i)]);
    }

    AsymptoticsReport rep;

    // stationary tails belong to detect_equilibrium, never to a period claim
    {
        Eigen::VectorXd lo = xs.back(), hi = xs.back();
        for (int i = 2 * N / 3; i < N; ++i) {
            lo = lo.cwiseMin(xs[static_cast<std::size_t>(i)]);
            hi = hi.cwiseMax(xs[static_cast<std::size_t>(i)]);
        }
        const double tail_diam = (hi - lo).maxCoeff();
        rep.residuals["tail_diameter"] = tail_diam;
        if (tail_diam <= settings.equilibrium_tol) {
            rep.verdict = "undetermined";
            return rep;
        }
    }

    const double T_max = H / 3.0;
    const double win_len = H / 3.0;
    const double dt = H / (N - 1);

    // Scan candidate periods on the resampling grid, then refine each local
    // minimum of the V-shaped mismatch curve by ternary search. The smallest
    // refined T below tolerance wins, so multiples of the fundamental period
    // never shadow it.
    std::vector<double> grid_T, grid_m;
    for (double T = dt; T <= T_max + 1e-12; T += dt) {
        grid_T.push_back(T);
        grid_m.push_back(period_mismatch(ts, xs, T, win_len));
    }
    auto refine = [&](double center) {
        double a = std::max(center - dt, settings.period_min / 2);
        double b = std::min(center + dt, T_max);
        for (int iter = 0; iter < 80 && b - a > 1e-10; ++iter) {
            const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (period_mismatch(ts, xs, m1, win_len) < period_mismatch(ts, xs, m2, win_len))
                b = m2;
            else
                a = m1;
        }
        return 0.5 * (a + b);
    };

    // A genuine period shows a hill in the mismatch curve before its valley;
    // a slow monotone drift toward equilibrium does not, and must not be
    // reported as periodic no matter how small its small-T mismatch is.
    const double hill = 16.0 * settings.match_tol;
    double best_T = 0.0, best_mismatch = std::numeric_limits<double>::infinity();
    double prefix_max = 0.0;
    for (std::size_t i = 0; i < grid_T.size(); ++i) {
        const bool local_min = (i == 0 || grid_m[i] <= grid_m[i - 1]) &&
                               (i + 1 == grid_T.size() || grid_m[i] <= grid_m[i + 1]);
        if (local_min && prefix_max >= hill &&
            (grid_m[i] <= 16.0 * settings.match_tol || grid_m[i] < best_mismatch)) {
            const double T = refine(grid_T[i]);
            const double m = period_mismatch(ts, xs, T, win_len);
            if (m <= settings.match_tol && T >= settings.period_min) {
                best_T = T;
                best_mismatch = m;
                break;  // smallest admissible period
            }
            if (m < best_mismatch) {
                best_mismatch = m;
                best_T = T;
            }
        }
        prefix_max = std::max(prefix_max, grid_m[i]);
    }

    if (!std::isfinite(best_mismatch)) {
        // no admissible valley; report the raw curve minimum for diagnostics
        best_mismatch = *std::min_element(grid_m.begin(), grid_m.end());
        best_T = 0.0;
    }
    rep.residuals["period_mismatch"] = best_mismatch;
    if (best_mismatch <= settings.match_tol && best_T >= settings.period_min) {
        rep.verdict = "periodic";
        rep.period = best_T;
    } else {
        rep.verdict = "undetermined";
    }
    return rep;
}

std::vector<AsymptoticsReport> cics_probe(const SerialPair& pair,
                                          const std::vector<Eigen::VectorXd>& x0_list,
                                          double horizon, double tol,
                                          const SolverSettings& settings) {
    if (pair.upstream.time_varying)
        throw InvalidArgument("cics_probe: upstream model must be time-invariant");
    const VectorFieldModel composed = compose_serial(pair);
    std::vector<AsymptoticsReport> out;
    out.reserve(x0_list.size());
    for (const auto& x0 : x0_list) {
        const Trajectory traj = integrate(composed, x0, 0.0, horizon, settings);
        out.push_back(detect_equilibrium(traj, composed, tol));
    }
    return out;
}

}  // namespace kcontract
