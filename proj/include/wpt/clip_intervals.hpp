#pragma once

#include "wpt/waveform.hpp"

#include <utility>
#include <vector>

namespace wpt {

enum class Branch { I, Q };

/// Times within one period [0, T) where |x_B(t)| crosses the DAC full scale (1).
///
/// With `starts_clipped` set, |x̄_B| = 1 on [0, t1], [t2, t3], ..., [tM, T] and the
/// open gaps in between are unclipped; otherwise the roles swap. `degenerate`
/// records that a tangential touch (an interval of zero measure) was dropped.
struct ClipIntervals {
    Branch branch = Branch::I;
    double period = 0.0;
    std::vector<double> boundaries;
    bool starts_clipped = false;
    bool degenerate = false;

    using Segment = std::pair<double, double>;
    std::vector<Segment> clipped_segments() const;
    std::vector<Segment> unclipped_segments() const;
    /// Fraction of the period spent at full scale.
    double clipped_fraction() const;
};

/// Branch value of the continuous multisine at time t.
double branch_value(const MultisineSpec& spec, Branch branch, double t);

/// Brackets sign changes of |x_B(t)| - 1 on a `grid_points` grid over one period and
/// refines each by bisection to 1e-10 T. Requires grid_points >= 10^4.
ClipIntervals find_clip_intervals(const MultisineSpec& spec, Branch branch, int grid_points = 1 << 16);

/// (1/T) [clipped time + integral of x_B^2 over unclipped time], summed over I and Q.
/// Integrals use adaptive Gauss-Kronrod to 1e-8 relative. Rejects interval sets that
/// disagree with the signal (|x_B| > 1 inside an unclipped segment or < 1 inside a
/// clipped one).
double piecewise_average_power(const MultisineSpec& spec, const ClipIntervals& i_intervals,
                               const ClipIntervals& q_intervals);

/// Per-branch piecewise mean of x̄_B^2.
double piecewise_branch_power(const MultisineSpec& spec, const ClipIntervals& intervals);

} // namespace wpt
