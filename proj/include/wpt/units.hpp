#pragma once

#include <cmath>
#include <limits>

namespace wpt {

inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

/// 10 log10(ratio); -inf for zero.
inline double ratio_to_db(double ratio)
{
    return ratio > 0.0 ? 10.0 * std::log10(ratio) : -std::numeric_limits<double>::infinity();
}

inline double dbm_to_mw(double dbm) { return db_to_ratio(dbm); }
inline double mw_to_dbm(double mw) { return ratio_to_db(mw); }
inline double dbm_to_w(double dbm) { return db_to_ratio(dbm) * 1e-3; }
inline double w_to_dbm(double w) { return ratio_to_db(w * 1e3); }

} // namespace wpt
