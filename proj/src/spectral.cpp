#include "substrat/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace substrat {

namespace {

struct PowerResult {
    double lambda = 0.0;
    std::vector<double> right;
    std::vector<double> left;
};

PowerResult window_power(const BandWindow& w, double shift, double inner_tol,
                         std::int64_t max_iters, ExecMode exec) {
    const std::int64_t n = w.dim();
    auto iterate = [&](bool left_side) {
        std::vector<double> v(static_cast<std::size_t>(n), 1.0 / std::sqrt(double(n)));
        std::vector<double> av(static_cast<std::size_t>(n));
        double lam = 0.0, prev_rq = 0.0, prev_delta = 0.0;
        for (std::int64_t it = 0; it < max_iters; ++it) {
            if (left_side)
                w.apply_left(v, av, exec);
            else
                w.apply_right(v, av, exec);
            if (shift != 0.0)
                for (std::int64_t i = 0; i < n; ++i)
                    av[static_cast<std::size_t>(i)] += shift * v[static_cast<std::size_t>(i)];
            double num = 0.0, den = 0.0, nrm = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                num += v[static_cast<std::size_t>(i)] * av[static_cast<std::size_t>(i)];
                den += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
                nrm += av[static_cast<std::size_t>(i)] * av[static_cast<std::size_t>(i)];
            }
            double rq = num / den;
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) fail(Errc::not_irreducible_on_window, "power iterate vanished");
            for (std::int64_t i = 0; i < n; ++i)
                v[static_cast<std::size_t>(i)] = av[static_cast<std::size_t>(i)] / nrm;
            // Linear convergence makes the per-step Rayleigh delta shrink long
            // before the quotient has settled; Aitken-correct the tail with
            // the observed contraction ratio and stop on the corrected error.
            double delta = rq - prev_rq;
            if (it > 8 && prev_delta != 0.0) {
                double rho = delta / prev_delta;
                if (rho > 0.0 && rho < 0.999999) {
                    double tail = delta * rho / (1.0 - rho);
                    if (std::abs(tail) + std::abs(delta) < inner_tol) {
                        lam = rq + tail;
                        break;
                    }
                } else if (std::abs(delta) < 1e-3 * inner_tol) {
                    lam = rq;
                    break;
                }
            }
            prev_delta = delta;
            prev_rq = rq;
            lam = rq;
        }
        return std::make_pair(lam - shift, v);
    };
    auto [lr, vr] = iterate(false);
    auto [ll, vl] = iterate(true);
    PowerResult res;
    res.lambda = 0.5 * (lr + ll);
    res.right = std::move(vr);
    res.left = std::move(vl);
    return res;
}

// lambda_K = L - A/(K+s)^2 fitted through three points; bisection on s.
double fit_vanishing_boundary(const std::vector<std::pair<std::int64_t, double>>& h) {
    const auto& [K1, l1] = h[h.size() - 3];
    const auto& [K2, l2] = h[h.size() - 2];
    const auto& [K3, l3] = h[h.size() - 1];
    auto predict = [&](double s) {
        double x1 = 1.0 / ((double(K1) + s) * (double(K1) + s));
        double x2 = 1.0 / ((double(K2) + s) * (double(K2) + s));
        double x3 = 1.0 / ((double(K3) + s) * (double(K3) + s));
        double A = (l2 - l1) / (x1 - x2);
        double L = l1 + A * x1;
        return std::make_pair(L - A * x3 - l3, L);
    };
    double lo = -0.9 * double(std::min({K1, K2, K3})) + 1.0, hi = 64.0;
    auto [flo, Llo] = predict(lo);
    auto [fhi, Lhi] = predict(hi);
    (void)Llo;
    (void)Lhi;
    if (flo * fhi > 0.0) return predict(0.0).second;  // plain Richardson fallback
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        auto [fm, Lm] = predict(mid);
        (void)Lm;
        if (flo * fm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return predict(0.5 * (lo + hi)).second;
}

// Exact-interior iteration from the uniform start: after p steps the values
// on [-K, K] agree with the infinite matrix acting on the all-ones vector.
struct UniformCandidate {
    std::vector<double> values;  // on [-K, K]
    bool converged = false;
};

UniformCandidate uniform_iterate(const BandedMatrix& m, std::int64_t K, double lambda,
                                 bool left_side, std::int64_t max_steps, double inner_tol) {
    const std::int64_t bw = m.bandwidth;
    const std::int64_t K0 = K + bw * max_steps;
    std::vector<double> v(static_cast<std::size_t>(2 * K0 + 1), 1.0);
    std::int64_t valid = K0;  // values on [-valid, valid] are exact
    UniformCandidate out;
    std::vector<double> prev_interior;
    for (std::int64_t step = 0; step < max_steps && valid - bw >= K; ++step) {
        std::int64_t nv = valid - bw;
        std::vector<double> next(static_cast<std::size_t>(2 * K0 + 1), 0.0);
        for (std::int64_t i = -nv; i <= nv; ++i) {
            double acc = 0.0;
            if (left_side) {
                // (vF)_i = sum_j v_j f_{ji}
                for (std::int64_t j = i - bw; j <= i + bw; ++j)
                    for (const auto& [c, f] : m.row(j))
                        if (c == i) acc += v[static_cast<std::size_t>(j + K0)] * double(f);
            } else {
                for (const auto& [c, f] : m.row(i))
                    acc += double(f) * v[static_cast<std::size_t>(c + K0)];
            }
            next[static_cast<std::size_t>(i + K0)] = acc / lambda;
        }
        v = std::move(next);
        valid = nv;
        std::vector<double> interior(v.begin() + (K0 - K), v.begin() + (K0 + K + 1));
        if (!prev_interior.empty()) {
            double rel = 0.0;
            for (std::size_t i = 0; i < interior.size(); ++i) {
                double denom = std::max(1e-300, std::abs(prev_interior[i]));
                rel = std::max(rel, std::abs(interior[i] - prev_interior[i]) / denom);
            }
            if (rel < inner_tol) {
                out.values = std::move(interior);
                out.converged = true;
                return out;
            }
        }
        prev_interior = std::move(interior);
    }
    out.values = std::move(prev_interior);
    return out;
}

double relative_residual(const BandedMatrix& m, const std::vector<double>& v, std::int64_t lo,
                         std::int64_t hi, double lambda, bool left_side) {
    // v covers [lo, hi]; the residual is evaluated where the band fits.
    double worst = 0.0;
    for (std::int64_t b = lo + m.bandwidth; b <= hi - m.bandwidth; ++b) {
        double acc = 0.0;
        if (left_side) {
            for (std::int64_t a = b - m.bandwidth; a <= b + m.bandwidth; ++a)
                for (const auto& [c, f] : m.row(a))
                    if (c == b) acc += v[static_cast<std::size_t>(a - lo)] * double(f);
        } else {
            for (const auto& [c, f] : m.row(b))
                acc += double(f) * v[static_cast<std::size_t>(c - lo)];
        }
        double vb = v[static_cast<std::size_t>(b - lo)];
        if (vb <= 0.0) return HUGE_VAL;
        worst = std::max(worst, std::abs(acc - lambda * vb) / (lambda * vb));
    }
    return worst;
}

}  // namespace

SpectralData pf_eigen(const BandedMatrix& m, const SpectralOptions& opts) {
    if (opts.schedule.empty()) fail(Errc::invalid_argument, "empty window schedule");
    SpectralData sd;

    const std::int64_t K_last = opts.schedule.back();
    BandWindow largest(m, K_last);
    sd.irreducible_on_window = largest.strongly_connected();
    if (!sd.irreducible_on_window)
        fail(Errc::not_irreducible_on_window,
             "window [-" + std::to_string(K_last) + "," + std::to_string(K_last) +
                 "] is not strongly connected");
    sd.period = largest.period();
    const double shift = sd.period > 1 ? 1.0 : 0.0;

    PowerResult last_power;
    bool accepted = false;
    for (std::size_t si = 0; si < opts.schedule.size(); ++si) {
        std::int64_t K = opts.schedule[si];
        BandWindow w(m, K);
        PowerResult pr =
            window_power(w, shift, opts.tol / 10.0, opts.max_power_iters, opts.exec);
        if (!sd.lambda_history.empty() &&
            pr.lambda < sd.lambda_history.back().second - 100.0 * opts.tol)
            fail(Errc::no_convergence,
                 "window eigenvalue sequence is not nondecreasing (lambda_" + std::to_string(K) +
                     " dropped)");
        sd.lambda_history.emplace_back(K, pr.lambda);
        if (K == K_last) last_power = std::move(pr);
        if (si > 0 && !accepted &&
            std::abs(sd.lambda_history[si].second - sd.lambda_history[si - 1].second) < opts.tol) {
            sd.lambda = sd.lambda_history[si].second;
            sd.converged_by_cauchy = true;
            accepted = true;
        }
    }
    if (!accepted) {
        if (sd.lambda_history.size() < 3)
            fail(Errc::no_convergence, "schedule exhausted before three windows were available");
        sd.lambda = fit_vanishing_boundary(sd.lambda_history);
        sd.converged_by_cauchy = false;
    }

    // Interior of the largest window.
    std::int64_t margin = std::max<std::int64_t>(8 * m.bandwidth, K_last / 4);
    std::int64_t ilo = -K_last + margin, ihi = K_last - margin;
    if (ilo > ihi) {
        ilo = -K_last / 2;
        ihi = K_last / 2;
    }
    sd.interior_lo = ilo;
    sd.interior_hi = ihi;

    auto pick_side = [&](bool left_side) {
        // candidate A: deep interior of the window power vector
        std::vector<double> candA(static_cast<std::size_t>(ihi - ilo + 1));
        const std::vector<double>& pv = left_side ? last_power.left : last_power.right;
        for (std::int64_t i = ilo; i <= ihi; ++i)
            candA[static_cast<std::size_t>(i - ilo)] = pv[static_cast<std::size_t>(i + K_last)];
        double resA = relative_residual(m, candA, ilo, ihi, sd.lambda, left_side);
        // candidate B: uniform start, exact interior
        UniformCandidate ub = uniform_iterate(m, K_last, sd.lambda, left_side,
                                              opts.uniform_iters, opts.tol / 10.0);
        double resB = HUGE_VAL;
        std::vector<double> candB;
        if (!ub.values.empty()) {
            candB.assign(ub.values.begin() + (ilo + K_last), ub.values.begin() + (ihi + K_last + 1));
            resB = relative_residual(m, candB, ilo, ihi, sd.lambda, left_side);
        }
        if (resB < resA)
            return std::make_tuple(std::move(candB), resB, EigenSource::uniform_exact_interior);
        return std::make_tuple(std::move(candA), resA, EigenSource::window_power_iteration);
    };

    auto [lv, lres, lsrc] = pick_side(true);
    auto [rv, rres, rsrc] = pick_side(false);
    sd.residual_left = lres;
    sd.residual_right = rres;
    sd.left_source = lsrc;
    sd.right_source = rsrc;

    for (double x : lv)
        if (!(x > 0.0)) fail(Errc::no_convergence, "left eigenvector has a nonpositive entry");
    for (double x : rv)
        if (!(x > 0.0)) fail(Errc::no_convergence, "right eigenvector has a nonpositive entry");

    // Normalization. Detect geometric tails of the left vector on both sides;
    // when summable, scale to total mass 1 (window-extrapolated), otherwise
    // scale the maximum interior entry to 1. The right vector is pinned at
    // index 0.
    {
        std::int64_t nsamp = std::min<std::int64_t>(6, (ihi - ilo) / 4);
        auto tail_ratio = [&](bool right_end) -> std::optional<double> {
            if (nsamp < 3) return std::nullopt;
            double ratio = 0.0;
            for (std::int64_t k = 0; k < nsamp; ++k) {
                std::int64_t i = right_end ? ihi - nsamp + k : ilo + nsamp - k;
                std::int64_t prev = right_end ? i - 1 : i + 1;
                double r = lv[static_cast<std::size_t>(i - ilo)] /
                           lv[static_cast<std::size_t>(prev - ilo)];
                if (k > 0 && std::abs(r - ratio) > 1e-6 * (1.0 + ratio)) return std::nullopt;
                ratio = r;
            }
            if (ratio >= 1.0 - 1e-9) return std::nullopt;
            return ratio;
        };
        auto rplus = tail_ratio(true);
        auto rminus = tail_ratio(false);
        if (rplus && rminus) {
            double total = 0.0;
            for (double x : lv) total += x;
            total += lv.back() * (*rplus) / (1.0 - *rplus);
            total += lv.front() * (*rminus) / (1.0 - *rminus);
            for (double& x : lv) x /= total;
            sd.left_normalization = "sum=1";
        } else {
            double mx = *std::max_element(lv.begin(), lv.end());
            for (double& x : lv) x /= mx;
            sd.left_normalization = "max=1";
        }
        double r0 = rv[static_cast<std::size_t>(0 - ilo)];
        for (double& x : rv) x /= r0;
    }

    sd.left = std::move(lv);
    sd.right = std::move(rv);
    return sd;
}

ResidualReport verify_eigen_exact(const Substitution& s, const ClosedFormSpectral& cf,
                                  const LetterInterval& window) {
    ResidualReport rep;
    rep.window = window;
    const Alphabet al = s.alphabet();
    const std::int64_t stride = al.stride;
    Rational worst_l = 0, worst_r = 0;
    Letter lo = window.lo;
    while (!al.contains(lo)) ++lo;
    for (Letter b = lo; b <= window.hi; b += stride) {
        if (b - s.size() < window.lo || b + s.size() > window.hi) continue;  // interior only
        // left: sum_a l_a f_ab = lambda l_b  (a ranges over the band of b)
        Rational acc = 0;
        for (Letter a = b - s.size(); a <= b + s.size(); a += stride) {
            auto row = s.abelianize_row(a);
            auto it = row.find(b);
            if (it != row.end()) acc += cf.ell(a) * it->second;
        }
        Rational dl = acc - cf.lambda * cf.ell(b);
        if (dl < 0) dl = -dl;
        if (dl > worst_l) worst_l = dl;
        // right: sum_c f_bc r_c = lambda r_b
        Rational accr = 0;
        for (const auto& [c, f] : s.abelianize_row(b)) accr += Rational(f) * cf.right(c);
        Rational dr = accr - cf.lambda * cf.right(b);
        if (dr < 0) dr = -dr;
        if (dr > worst_r) worst_r = dr;
    }
    rep.exact_left_max = worst_l;
    rep.exact_right_max = worst_r;
    rep.float_left_max = to_double(worst_l);
    rep.float_right_max = to_double(worst_r);
    return rep;
}

ResidualReport verify_eigen(const BandedMatrix& m, const SpectralData& sd) {
    ResidualReport rep;
    rep.window = LetterInterval{sd.interior_lo, sd.interior_hi};
    rep.float_left_max =
        relative_residual(m, sd.left, sd.interior_lo, sd.interior_hi, sd.lambda, true);
    rep.float_right_max =
        relative_residual(m, sd.right, sd.interior_lo, sd.interior_hi, sd.lambda, false);
    return rep;
}

RecurrenceClass classify_series(const std::vector<double>& sums, int slope_window) {
    if (static_cast<int>(sums.size()) < slope_window + 2) return RecurrenceClass::inconclusive;
    std::vector<double> inc;
    for (std::size_t i = 1; i < sums.size(); ++i) inc.push_back(sums[i] - sums[i - 1]);
    // period-robust: take the largest increment over each stride-2 pair
    std::vector<double> tail;
    for (std::size_t i = inc.size() >= 2 ? inc.size() - 2 * std::size_t(slope_window) : 0;
         i + 1 < inc.size(); i += 2)
        tail.push_back(std::max(inc[i], inc[i + 1]));
    if (static_cast<int>(tail.size()) < 4) return RecurrenceClass::inconclusive;
    double last = tail.back();
    double total = sums.back();
    if (last < 1e-12 * std::max(1.0, total)) return RecurrenceClass::transient_evidence;
    // power-law slope of the surviving increments
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        if (tail[i] <= 0.0) continue;
        double x = std::log(double(2 * i + 1));
        double y = std::log(tail[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 4) return RecurrenceClass::inconclusive;
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (slope > -1.2) return RecurrenceClass::recurrent_evidence;
    if (slope < -2.0) return RecurrenceClass::transient_evidence;
    return RecurrenceClass::inconclusive;
}

RecurrenceVerdict classify_recurrence(const BandedMatrix& m, const SpectralData& sd,
                                      const RecurrenceOptions& opts) {
    RecurrenceVerdict v;
    v.irreducible_on_window = sd.irreducible_on_window;
    v.period = sd.period;

    const std::int64_t width = m.bandwidth * opts.n_max + 2;
    // f-series: w_n = F^n delta_0 scaled by lambda^-n; exact on the interior
    // because paths of length n from 0 stay inside the width.
    {
        std::vector<double> w(static_cast<std::size_t>(2 * width + 1), 0.0);
        w[static_cast<std::size_t>(width)] = 1.0;
        double sum = 0.0;
        for (int n = 1; n <= opts.n_max; ++n) {
            std::vector<double> nx(w.size(), 0.0);
            for (std::int64_t i = -width; i <= width; ++i) {
                double wi = w[static_cast<std::size_t>(i + width)];
                if (wi == 0.0) continue;
                for (const auto& [j, f] : m.row(i)) {
                    if (j < -width || j > width) continue;
                    nx[static_cast<std::size_t>(j + width)] += wi * double(f);
                }
            }
            for (double& x : nx) x /= sd.lambda;
            w = std::move(nx);
            sum += w[static_cast<std::size_t>(width)];
            v.f_series_partial_sums.push_back(sum);
        }
    }
    // taboo series: t_00(n) with the origin forbidden in between.
    {
        std::vector<double> t(static_cast<std::size_t>(2 * width + 1), 0.0);
        // t(1) row: f_{0j}
        for (const auto& [j, f] : m.row(0))
            if (-width <= j && j <= width) t[static_cast<std::size_t>(j + width)] = double(f) / sd.lambda;
        double sum = 1.0 * t[static_cast<std::size_t>(width)];
        v.taboo_series_partial_sums.push_back(sum);
        for (int n = 2; n <= opts.n_max; ++n) {
            std::vector<double> nx(t.size(), 0.0);
            for (std::int64_t k = -width; k <= width; ++k) {
                if (k == 0) continue;  // the taboo state
                double tk = t[static_cast<std::size_t>(k + width)];
                if (tk == 0.0) continue;
                for (const auto& [j, f] : m.row(k)) {
                    if (j < -width || j > width) continue;
                    nx[static_cast<std::size_t>(j + width)] += tk * double(f);
                }
            }
            for (double& x : nx) x /= sd.lambda;
            t = std::move(nx);
            sum += double(n) * t[static_cast<std::size_t>(width)];
            v.taboo_series_partial_sums.push_back(sum);
        }
    }
    v.klass = classify_series(v.f_series_partial_sums, opts.slope_window);

    // positive vs null via partial sums of l . r over the window schedule.
    {
        std::vector<double> partial;
        for (std::int64_t K : opts.lr_schedule) {
            std::int64_t lo = std::max(sd.interior_lo, -K);
            std::int64_t hi = std::min(sd.interior_hi, K);
            double acc = 0.0;
            for (std::int64_t i = lo; i <= hi; ++i) acc += sd.left_at(i) * sd.right_at(i);
            v.lr_partial.emplace_back(K, acc);
            partial.push_back(acc);
        }
        bool settled = partial.size() >= 2 &&
                       std::abs(partial.back() - partial[partial.size() - 2]) <
                           1e-9 * std::max(1.0, std::abs(partial.back()));
        if (settled || sd.left_normalization == "sum=1") {
            // geometric tails detected for l, r bounded: finite inner product
            v.positive_vs_null = MassClass::positive;
            v.lr_extrapolated = partial.back();
        } else {
            // increments that do not decay signal divergence
            bool growing = partial.size() >= 3 &&
                           (partial[partial.size() - 1] - partial[partial.size() - 2]) >
                               0.5 * (partial[partial.size() - 2] - partial[partial.size() - 3]);
            v.positive_vs_null = growing ? MassClass::null_evidence : MassClass::inconclusive;
        }
    }
    return v;
}

}  // namespace substrat
