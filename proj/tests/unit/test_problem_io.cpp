#include <catch2/catch_amalgamated.hpp>

#include <slmt/problem_io.hpp>

#include "support/oracles.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {
std::string message_of(const std::string& text) {
    try {
        slmt::parse_problem_spec(text);
    } catch (const slmt::Error& e) {
        CHECK(e.code() == slmt::ErrorCode::parse_error);
        return e.what();
    }
    FAIL("expected ParseError");
    return {};
}
}  // namespace

TEST_CASE("problem files parse into specs") {
    auto s = slmt::parse_problem_spec(R"({
        "potential": {"type": "piecewise", "pieces": [
            {"type": "constant", "value": "0.1"},
            {"type": "polynomial", "coefficients": [1, -2, 3]},
            {"type": "sampled", "x": [0.4, 1], "q": [0, 1]}]},
        "interfaces": [-0.3, 0.4], "jumps": [2, "0.5"],
        "alpha": [0, 1], "beta": [-1, 0], "beta_prime": [0, 1], "name": "x"})");
    REQUIRE(s.potential.pieces.size() == 3);
    CHECK(std::get<slmt::ConstantPiece>(s.potential.pieces[0]).value == 0.1);
    CHECK(s.jumps[1] == 0.5);
    CHECK(s.right_bc.beta2_prime == 1.0);
    slmt::Problem p(s);
    CHECK(p.piece_count() == 3);
}

TEST_CASE("round trip keeps every bit") {
    auto s = oracle::case1_m2();
    s.left_bc.alpha1 = 0.1 + 0.2;
    s.jumps[0] = 1.0 / 3.0;
    auto back = slmt::problem_spec_from_json(slmt::problem_spec_to_json(s));
    CHECK(back.left_bc.alpha1 == s.left_bc.alpha1);
    CHECK(back.jumps == s.jumps);
    CHECK(back.interfaces == s.interfaces);
    const auto& a = std::get<slmt::SampledPiece>(s.potential.pieces[0]);
    const auto& b = std::get<slmt::SampledPiece>(back.potential.pieces[0]);
    CHECK(a.x == b.x);
    CHECK(a.q == b.q);
}

TEST_CASE("diagnostics name the offending key or location") {
    const std::string bc = R"("alpha": [1, 0], "beta": [0, 1], "beta_prime": [1, 0])";
    CHECK_THAT(message_of("{\"jumps\": [\"two\"], \"interfaces\": [0], " + bc + "}"), ContainsSubstring("jumps[0]"));
    CHECK_THAT(message_of("{\"jump\": [1], " + bc + "}"), ContainsSubstring("'jump'"));
    CHECK_THAT(message_of(R"({"alpha": [1], "beta": [0, 1], "beta_prime": [1, 0]})"), ContainsSubstring("alpha"));
    CHECK_THAT(message_of(R"({"alpha": [1, 0], "beta": [0, 1]})"), ContainsSubstring("beta_prime"));
    CHECK_THAT(message_of("{\"potential\": {\"type\": \"cubic\"}, " + bc + "}"), ContainsSubstring("potential.type"));
    CHECK_THAT(message_of("{\n  \"alpha\": [1, 0],\n  \"beta\": [0 1]\n}"), ContainsSubstring("line 3"));
}

TEST_CASE("target elements") {
    slmt::Problem p(oracle::canon1());
    auto e = slmt::element_spec_from_json(slmt::parse_json_text(R"({"f": {"type": "bump", "center": 0.5, "width": 0.3, "amplitude": 1}, "f1": 0.25})"));
    auto F = slmt::make_element(p, e);
    CHECK(F.f1 == 0.25);
    CHECK(F.f(1, 0.5) == 1.0);
    CHECK(F.f(0, -0.5) == 0.0);
    auto bad = slmt::element_spec_from_json(slmt::parse_json_text(
        R"({"f": {"type": "piecewise", "pieces": [{"type": "constant", "value": 1}, {"type": "constant", "value": 1}, {"type": "constant", "value": 1}]}})"));
    CHECK_THROWS_AS(slmt::make_element(p, bad), slmt::Error);
}
