#include <catch_amalgamated.hpp>

#include <sstream>

#include "prevalence/sample_io.hpp"

using namespace prevalence;

TEST_CASE("reads values, skipping comments, blanks and one header", "[io]") {
    std::istringstream in("# comment\nx\n1.5\n\n  -2e-1 \n+3\n# trailing\n");
    const Sample s = read_sample(in);
    REQUIRE(s.size() == 3);
    CHECK(s.values()[0] == 1.5);
    CHECK(s.values()[1] == -0.2);
    CHECK(s.values()[2] == 3.0);
}

TEST_CASE("header is only accepted before the first value", "[io]") {
    std::istringstream in("1\nx\n");
    try {
        (void)read_sample(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("non-finite and malformed records carry their line number", "[io]") {
    std::istringstream nan_in("0.5\n1.5\nnan\n");
    try {
        (void)read_sample(nan_in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream junk("1\n2 3\n");
    CHECK_THROWS_AS(read_sample(junk), ParseError);
    std::istringstream inf_in("inf\n");
    CHECK_THROWS_AS(read_sample(inf_in), ParseError);
}

TEST_CASE("empty input and missing files are I/O errors", "[io]") {
    std::istringstream empty("# nothing\n\n");
    CHECK_THROWS_AS(read_sample(empty), IoError);
    CHECK_THROWS_AS(read_sample_file("/nonexistent/sample.txt"), IoError);
    CHECK(read_sample_file(std::string(PREVALENCE_TEST_DATA_DIR) + "/two_point.txt").size() == 2);
}
