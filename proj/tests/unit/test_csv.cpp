#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "fimpkit/csv.hpp"

using namespace fimpkit;

TEST_SUITE("csv") {
    TEST_CASE("quoted fields, comments, blank lines and BOM") {
        std::istringstream in("\xEF\xBB\xBF# comment\nid,name\n\n1,\"Smith, J.\"\n2,\"say \"\"hi\"\"\"\r\n3,\"two\nlines\"\n");
        const auto rows = csv::read(in);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0] == csv::Row{"id", "name"});
        CHECK(rows[1][1] == "Smith, J.");
        CHECK(rows[2][1] == "say \"hi\"");
        CHECK(rows[3][1] == "two\nlines");
    }

    TEST_CASE("escape round-trips through read") {
        std::ostringstream out;
        csv::write_row(out, {"a,b", "q\"", "plain", "semi;colon"}, ';');
        std::istringstream in(out.str());
        const auto rows = csv::read(in, ';');
        REQUIRE(rows.size() == 1);
        CHECK(rows[0] == csv::Row{"a,b", "q\"", "plain", "semi;colon"});
    }

    TEST_CASE("numbers print with nine significant digits") {
        CHECK(csv::format_number(0.0) == "0");
        CHECK(csv::format_number(-0.0) == "0");
        CHECK(csv::format_number(2.2) == "2.2");
        CHECK(csv::format_number(1.0 / 3.0) == "0.333333333");
        CHECK(csv::format_number(123456789012.0) == "1.23456789e+11");
        CHECK(csv::format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
        CHECK(csv::round_significant(1.0 / 3.0) == 0.333333333);
        CHECK(csv::format_number(csv::round_significant(2.0 / 3.0)) == csv::format_number(2.0 / 3.0));
    }

    TEST_CASE("trim and lower") {
        CHECK(csv::trim("  x y \t") == "x y");
        CHECK(csv::to_lower("YeS") == "yes");
    }
}
