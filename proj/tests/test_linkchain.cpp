#include "wpt/error.hpp"
#include "wpt/linkchain.hpp"
#include "wpt/units.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace wpt;

TEST_CASE("channel attenuation")
{
    ChannelModel ch;
    CHECK(ch.attenuation_db() == doctest::Approx(24.0));
    ch.distance_m = 2.0;
    CHECK(ch.attenuation_db() == doctest::Approx(24.0 + 20.0 * std::log10(2.0)));
    ch.distance_m = 1.0;
    ch.reflector_offset_db = kReflectorConstructiveDb;
    CHECK(propagate(1.0, ch) == doctest::Approx(db_to_ratio(-24.0 + 3.5)));
    ch.reflector_offset_db = kReflectorDestructiveDb;
    CHECK(propagate(1.0, ch) == doctest::Approx(db_to_ratio(-26.5)));

    ChannelModel bad;
    bad.distance_m = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = {};
    bad.distance_m = 0.1; // 24 - 20 = 4 dB, still a loss
    CHECK_NOTHROW(bad.validate());
    bad.distance_m = 0.01; // net gain
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK_THROWS_AS(propagate(-1.0, ChannelModel{}), InvalidArgument);
}

TEST_CASE("harvester curve and threshold")
{
    const auto h = HarvesterModel::default_model();
    CHECK(h.efficiency(-20) == 0.0);
    CHECK(h.efficiency(-10) == doctest::Approx(0.05));
    CHECK(h.efficiency(0.5) == doctest::Approx(0.15));
    CHECK(h.efficiency(30) == doctest::Approx(0.20));
    CHECK(harvest(dbm_to_w(-16.0), h) == 0.0);
    CHECK(harvest(dbm_to_w(6.0), h) == doctest::Approx(dbm_to_w(6.0) * 0.2));

    HarvesterModel shaped = h;
    shaped.shape_factor = 1.5;
    CHECK(harvest(dbm_to_w(6.0), shaped) == doctest::Approx(dbm_to_w(6.0) * 0.3));

    HarvesterModel bad = h;
    bad.efficiency_curve = {{0.0, 0.1}, {0.0, 0.2}};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad.efficiency_curve = {{0.0, 1.2}};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad.efficiency_curve = {};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("efficiency table file")
{
    const auto dir = std::filesystem::temp_directory_path() / "wpt_test_table";
    std::filesystem::create_directories(dir);
    const auto good = dir / "good.txt";
    {
        std::ofstream f(good);
        f << "# dBm eta\n-20, 0\n\n-5 0.1   # mid\n10\t0.3\n";
    }
    const auto table = load_efficiency_table(good);
    REQUIRE(table.size() == 3);
    CHECK(table[2].input_dbm == 10.0);
    CHECK(table[2].efficiency == 0.3);

    const auto three = dir / "three.txt";
    {
        std::ofstream f(three);
        f << "1 0.1 7\n";
    }
    CHECK_THROWS_AS(load_efficiency_table(three), ConfigError);
    const auto unsorted = dir / "unsorted.txt";
    {
        std::ofstream f(unsorted);
        f << "1 0.1\n0 0.2\n";
    }
    try {
        load_efficiency_table(unsorted);
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(e.section() == "harvester");
    }
    CHECK_THROWS_AS(load_efficiency_table(dir / "missing.txt"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("power trace invariants and report")
{
    PowerTrace t{10.0, 1.0, 0.01, 0.002};
    CHECK_NOTHROW(t.validate());
    const auto r = assemble_report(t);
    CHECK(r.eta_dc_rf == doctest::Approx(0.1));
    CHECK(r.eta_rf_rf == doctest::Approx(0.01));
    CHECK(r.eta_rf_dc == doctest::Approx(0.2));
    CHECK(r.eta_dc_dc == r.eta_dc_rf * r.eta_rf_rf * r.eta_rf_dc);

    CHECK_THROWS_AS(assemble_report({0.0, 0.0, 0.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(PowerTrace({1.0, 2.0, 0.1, 0.01}).validate(), InvalidArgument);
    CHECK_THROWS_AS(PowerTrace({1.0, 0.5, 0.6, 0.01}).validate(), InvalidArgument);
    CHECK_THROWS_AS(PowerTrace({1.0, 0.5, 0.1, 0.2}).validate(), InvalidArgument);
    CHECK_THROWS_AS(PowerTrace({1.0, -0.5, 0.1, 0.0}).validate(), InvalidArgument);

    const auto silent = assemble_report({1.0, 0.0, 0.0, 0.0});
    CHECK(silent.eta_dc_dc == 0.0);
}

TEST_CASE("calibrated chain at 1 m")
{
    const SymbolSource qpsk{ConstellationSpec::make(Modulation::Qpsk, 1e6), 2000, 40e6, 1};
    const auto tx = TransmitterModel::default_model().with_gain(57);
    const auto res = run_chain(WaveformSource{qpsk}, tx, ChannelModel{}, HarvesterModel::default_model());
    CHECK(res.report.eta_dc_rf > 0.12);
    CHECK(res.report.eta_dc_rf < 0.135);
    CHECK(w_to_dbm(res.trace.p_in_rf) == doctest::Approx(7.8).epsilon(0.02));
    CHECK(res.trace.p_out_dc == doctest::Approx(1.17e-3).epsilon(0.02));

    ChannelModel far;
    far.distance_m = 3.0;
    const auto res3 = run_chain(WaveformSource{qpsk}, tx, far, HarvesterModel::default_model());
    CHECK(res3.trace.p_out_dc == doctest::Approx(8.3e-5).epsilon(0.05));
}

TEST_CASE("chain rejects invalid stages")
{
    const MultisineSource ms{MultisineSpec::co_phased(2, 0.5, std::numbers::pi / 4), 40e6, 1};
    ChannelModel ch;
    ch.distance_m = -1;
    CHECK_THROWS_AS(run_chain(WaveformSource{ms}, TransmitterModel::default_model(), ch,
                              HarvesterModel::default_model()),
                    InvalidArgument);
    CHECK_THROWS_AS(run_chain(WaveformSource{ms}, TransmitterModel::default_model().with_gain(30),
                              ChannelModel{}, HarvesterModel::default_model()),
                    InvalidArgument);
}
