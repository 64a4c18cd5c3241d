#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "travelsim/stamina.hpp"

using namespace travelsim;
using namespace travelsim::stamina;

namespace {

// The single-traveler rule from the shipped fixtures.
StaminaRule single_rule() {
    StaminaRule r;
    r.sightseeing_per_hr = -1.0;
    r.dining_per_event = 1.0;
    r.resting_per_hr = 1.0;
    r.transit_per_hr = {{TransitMode::bus_metro, 0.0},
                        {TransitMode::taxi, 0.5},
                        {TransitMode::walking, -1.0},
                        {TransitMode::cycling, -0.5}};
    r.arrival_penalty = 2.0;
    return r;
}

// The elderly-couple rule: harsher exertion, slower recovery, no cycling.
StaminaRule couple_rule() {
    StaminaRule r;
    r.sightseeing_per_hr = -1.5;
    r.dining_per_event = 0.5;
    r.resting_per_hr = 0.5;
    r.transit_per_hr = {{TransitMode::bus_metro, -1.0},
                        {TransitMode::taxi, 0.0},
                        {TransitMode::walking, -1.5}};
    r.forbidden_modes = {TransitMode::cycling};
    r.arrival_penalty = 2.0;
    return r;
}

}  // namespace

TEST_CASE("activity deltas pro-rate by the hour") {
    const StaminaRule rule = single_rule();
    // 120 min of sightseeing at -1/hr from 4.5.
    CHECK(apply_activity({4.5, 8.5}, rule, ActivityKind::sightsee, 120).value ==
          doctest::Approx(2.5));
    // resting recovers at +1/hr
    CHECK(apply_activity({3.0, 8.5}, rule, ActivityKind::rest, 90).value == doctest::Approx(4.5));
    // taxi at +0.5/hr for 30 min
    CHECK(apply_activity({4.0, 8.5}, rule, ActivityKind::transit, 30, TransitMode::taxi).value ==
          doctest::Approx(4.25));
}

TEST_CASE("dining is per event and respects the cap") {
    const StaminaRule rule = single_rule();
    // duration does not matter for dining
    CHECK(apply_activity({6.0, 6.5}, rule, ActivityKind::dine, 5).value == doctest::Approx(6.5));
    CHECK(apply_activity({6.0, 6.5}, rule, ActivityKind::dine, 240).value == doctest::Approx(6.5));
    // cap clamps the +1 to 6.5
    CHECK(apply_activity({6.0, 6.5}, rule, ActivityKind::dine, 60).value == doctest::Approx(6.5));
    CHECK(apply_activity({6.0, 10.0}, rule, ActivityKind::dine, 60).value == doctest::Approx(7.0));
}

TEST_CASE("floor clamp at zero") {
    StaminaRule rule = single_rule();
    rule.transit_per_hr[TransitMode::walking] = -1.5;
    CHECK(apply_activity({0.5, 8.5}, rule, ActivityKind::transit, 120, TransitMode::walking).value ==
          doctest::Approx(0.0));
}

TEST_CASE("zero duration is identity for non-dining") {
    const StaminaRule rule = single_rule();
    for (auto kind : {ActivityKind::sightsee, ActivityKind::rest}) {
        CHECK(apply_activity({3.7, 8.5}, rule, kind, 0).value == doctest::Approx(3.7));
    }
    CHECK(apply_activity({3.7, 8.5}, rule, ActivityKind::transit, 0, TransitMode::walking).value ==
          doctest::Approx(3.7));
}

TEST_CASE("forbidden and unknown modes raise") {
    const StaminaRule rule = couple_rule();
    CHECK_THROWS_AS(apply_activity({5.0, 6.5}, rule, ActivityKind::transit, 30,
                                   TransitMode::cycling),
                    ModeError);
    CHECK_THROWS_AS(apply_activity({5.0, 6.5}, rule, ActivityKind::transit, 30), ArgumentError);
    CHECK_THROWS_AS(apply_activity({5.0, 6.5}, rule, ActivityKind::rest, -1), ArgumentError);
}

TEST_CASE("arrival penalty") {
    const StaminaRule rule = couple_rule();
    CHECK(apply_arrival_penalty({6.5, 6.5}, rule).value == doctest::Approx(4.5));
    CHECK(apply_arrival_penalty({1.0, 6.5}, rule).value == doctest::Approx(0.0));
    StaminaRule zero = rule;
    zero.arrival_penalty = 0.0;
    CHECK(apply_arrival_penalty({5.25, 6.5}, zero).value == doctest::Approx(5.25));
}

TEST_CASE("stamina state boundaries") {
    CHECK(stamina_state(6.5) == "Energetic");
    CHECK(stamina_state(6.01) == "Energetic");
    CHECK(stamina_state(6.0) == "Good");  // 6.0 is not greater than 6.0
    CHECK(stamina_state(4.0) == "Good");
    CHECK(stamina_state(3.99) == "Slightly Tired");
    CHECK(stamina_state(2.0) == "Slightly Tired");
    CHECK(stamina_state(1.99) == "Very Tired");
    CHECK(stamina_state(0.0) == "Very Tired");
    CHECK_THROWS_AS(stamina_state(-0.1), ArgumentError);
}

TEST_CASE("stamina state is monotone in value") {
    auto rank = [](const std::string& label) {
        if (label == "Very Tired") return 0;
        if (label == "Slightly Tired") return 1;
        if (label == "Good") return 2;
        return 3;
    };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        double a = dist(rng), b = dist(rng);
        if (a > b) std::swap(a, b);
        CHECK(rank(stamina_state(a)) <= rank(stamina_state(b)));
    }
}

TEST_CASE("results always stay inside [0, cap]") {
    const StaminaRule rule = single_rule();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> value(0.0, 8.5);
    std::uniform_int_distribution<int> minutes(0, 600);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int i = 0; i < 500; ++i) {
        const StaminaValue s{value(rng), 8.5};
        const auto kind = static_cast<ActivityKind>(pick(rng));
        std::optional<TransitMode> mode;
        if (kind == ActivityKind::transit) mode = TransitMode::walking;
        const StaminaValue out = apply_activity(s, rule, kind, minutes(rng), mode);
        CHECK(out.value >= 0.0);
        CHECK(out.value <= out.cap);
    }
}
