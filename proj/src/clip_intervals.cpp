#include "wpt/clip_intervals.hpp"

#include "wpt/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <cmath>

namespace wpt {

namespace {

constexpr double kBisectionTolerance = 1e-10;
constexpr double kQuadratureTolerance = 1e-8;
// Intervals shorter than this fraction of the period are treated as tangential touches.
constexpr double kDegenerateWidth = 1e-9;
// Slack for the consistency check; boundaries are only located to 1e-10 T.
constexpr double kConsistencySlack = 1e-9;

const char* branch_name(Branch b)
{
    return b == Branch::I ? "I" : "Q";
}

} // namespace

double branch_value(const MultisineSpec& spec, Branch branch, double t)
{
    const Complex x = spec.evaluate(t);
    return branch == Branch::I ? x.real() : x.imag();
}

std::vector<ClipIntervals::Segment> ClipIntervals::clipped_segments() const
{
    std::vector<Segment> out;
    bool clipped = starts_clipped;
    double start = 0.0;
    for (double b : boundaries) {
        if (clipped) {
            out.emplace_back(start, b);
        }
        start = b;
        clipped = !clipped;
    }
    if (clipped) {
        out.emplace_back(start, period);
    }
    return out;
}

std::vector<ClipIntervals::Segment> ClipIntervals::unclipped_segments() const
{
    std::vector<Segment> out;
    bool clipped = starts_clipped;
    double start = 0.0;
    for (double b : boundaries) {
        if (!clipped) {
            out.emplace_back(start, b);
        }
        start = b;
        clipped = !clipped;
    }
    if (!clipped) {
        out.emplace_back(start, period);
    }
    return out;
}

double ClipIntervals::clipped_fraction() const
{
    double total = 0.0;
    for (const auto& [a, b] : clipped_segments()) {
        total += b - a;
    }
    return total / period;
}

ClipIntervals find_clip_intervals(const MultisineSpec& spec, Branch branch, int grid_points)
{
    spec.validate();
    if (grid_points < 10000) {
        throw InvalidArgument(fmt::format("clip search grid of {} points is below 10^4", grid_points));
    }
    const double T = spec.period();
    auto clipped_at = [&](double t) { return std::abs(branch_value(spec, branch, t)) >= 1.0; };

    ClipIntervals result;
    result.branch = branch;
    result.period = T;

    const double h = T / grid_points;
    const bool state0 = clipped_at(0.0);
    result.starts_clipped = state0;

    std::vector<double> raw;
    bool prev_state = state0;
    double prev_t = 0.0;
    for (int i = 1; i <= grid_points; ++i) {
        const double t = i == grid_points ? T : i * h;
        // Periodicity: the closing sample is the opening sample.
        const bool state = i == grid_points ? state0 : clipped_at(t);
        if (state != prev_state) {
            double a = prev_t;
            double b = t;
            while (b - a > kBisectionTolerance * T) {
                const double mid = 0.5 * (a + b);
                if (clipped_at(mid) == prev_state) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            raw.push_back(0.5 * (a + b));
        }
        prev_state = state;
        prev_t = t;
    }

    // Drop zero-measure intervals left by tangential touches of |x_B| = 1.
    std::vector<double>& out = result.boundaries;
    for (double b : raw) {
        if (!out.empty() && b - out.back() < kDegenerateWidth * T) {
            out.pop_back();
            result.degenerate = true;
        } else {
            out.push_back(b);
        }
    }
    return result;
}

double piecewise_branch_power(const MultisineSpec& spec, const ClipIntervals& intervals)
{
    spec.validate();
    const double T = spec.period();
    if (std::abs(intervals.period - T) > 1e-12 * T) {
        throw InvalidArgument(fmt::format("clip intervals span {:g} s but the multisine period is {:g} s",
                                          intervals.period, T));
    }
    double prev = 0.0;
    for (double b : intervals.boundaries) {
        if (!(b > prev && b < T)) {
            throw InvalidArgument("clip boundaries must be strictly increasing inside (0, T)");
        }
        prev = b;
    }

    const Branch br = intervals.branch;
    auto x = [&](double t) { return branch_value(spec, br, t); };
    auto x_squared = [&](double t) {
        const double v = x(t);
        return v * v;
    };

    double total = 0.0;
    for (const auto& [a, b] : intervals.clipped_segments()) {
        const double mid = std::abs(x(0.5 * (a + b)));
        if (mid < 1.0 - kConsistencySlack) {
            throw InvalidArgument(fmt::format(
                "branch {} segment [{:g}, {:g}] is marked clipped but |x| = {:g} at its midpoint",
                branch_name(br), a, b, mid));
        }
        total += b - a;
    }
    for (const auto& [a, b] : intervals.unclipped_segments()) {
        for (int j = 1; j < 8; ++j) {
            const double t = a + (b - a) * j / 8.0;
            const double v = std::abs(x(t));
            if (v > 1.0 + kConsistencySlack) {
                throw InvalidArgument(fmt::format(
                    "branch {} exceeds full scale (|x| = {:g} at t = {:g}) inside unclipped segment "
                    "[{:g}, {:g}]",
                    branch_name(br), v, t, a, b));
            }
        }
        // Integrate on [-1, 1]: the Boost error test is not scale invariant and
        // segments here are nanoseconds long.
        const double mid_t = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        auto unit = [&](double s) { return x_squared(mid_t + half * s); };
        total += half * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(unit, -1.0, 1.0, 15,
                                                                                    kQuadratureTolerance);
    }
    return total / T;
}

double piecewise_average_power(const MultisineSpec& spec, const ClipIntervals& i_intervals,
                               const ClipIntervals& q_intervals)
{
    if (i_intervals.branch != Branch::I || q_intervals.branch != Branch::Q) {
        throw InvalidArgument("piecewise_average_power expects I intervals then Q intervals");
    }
    return piecewise_branch_power(spec, i_intervals) + piecewise_branch_power(spec, q_intervals);
}

} // namespace wpt
